// Acceptance suite. Prints one PASS/FAIL line per criterion; exit status is
// the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/error.hpp"
#include "spdc/fit.hpp"
#include "spdc/jacobi.hpp"
#include "spdc/metrics.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/store.hpp"

using namespace spdc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Summary {
  double k = 0.0, k_az = 0.0, seconds = 0.0;
  SchmidtSpectrum spectrum;
};

Summary run_sinc(double b_sigma, double phi) {
  DecompositionOptions o;
  o.keep_modes = false;
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = full_decomposition(SpdcParams{b_sigma, phi}, std::nullopt, o);
  Summary s;
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.k = schmidt_number(d.spectrum);
  s.k_az = azimuthal_schmidt_number(spiral_spectrum(d.spectrum));
  s.spectrum = d.spectrum;
  return s;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
}

std::map<std::string, Summary> cache;

const Summary& sinc_case(double b_sigma, double phi) {
  const std::string key = fmt("b_sigma=%g phi=%g", b_sigma, phi);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, run_sinc(b_sigma, phi)).first;
  return it->second;
}

void check_spiral(Outcome& o, const SchmidtSpectrum& s, const std::string& name) {
  const auto sp = spiral_spectrum(s);
  bool mirror = true, bounded = true;
  for (const auto& [l, p] : sp.probabilities) mirror = mirror && sp.at(-l) == p;
  for (int i = 0; i <= 720; ++i) {
    const double v = hom_visibility(sp, 2.0 * std::numbers::pi * i / 720.0);
    bounded = bounded && std::abs(v) <= 1.0 + 1e-12;
  }
  o.require(std::abs(s.total() - 1.0) < 1e-12, name + " sum lambda = 1");
  o.require(mirror, name + " P_-l = P_l");
  o.require(std::abs(hom_visibility(sp, 0.0) - 1.0) < 1e-12 && bounded, name + " V(0)=1, |V|<=1");
}

double orthonormality_defect(const RadialDecomposition& r) {
  double worst = 0.0;
  for (std::size_t a = 0; a < r.modes.size(); ++a)
    for (std::size_t b = a; b < r.modes.size(); ++b)
      worst = std::max(worst, std::abs(r.modes[a].samples.dot(r.modes[b].samples) * r.grid.step() -
                                       (a == b ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

int main() {
  report(1, "headline K and K_az, b_sigma=0.05, phi=0", [] {
    const auto& s = sinc_case(0.05, 0.0);
    Outcome o;
    o.require(within(s.k, 220.0, 243.0), fmt("K=%.2f in [220,243]", s.k));
    o.require(within(s.k_az, 30.0, 34.0), fmt("K_az=%.2f in [30,34]", s.k_az));
    o.require(s.seconds <= 300.0, fmt("runtime %.1fs <= 300s", s.seconds));
    return o;
  });

  report(2, "negative mismatch phi=-4", [] {
    const auto& s = sinc_case(0.05, -4.0);
    Outcome o;
    o.require(within(s.k, 404.0, 446.0), fmt("K=%.2f in [404,446]", s.k));
    o.require(within(s.k_az, 68.0, 76.0), fmt("K_az=%.2f in [68,76]", s.k_az));
    return o;
  });

  report(3, "positive mismatch phi=+4", [] {
    const auto& s = sinc_case(0.05, 4.0);
    Outcome o;
    o.require(within(s.k, 594.0, 656.0), fmt("K=%.2f in [594,656]", s.k));
    o.require(within(s.k_az, 54.0, 60.0), fmt("K_az=%.2f in [54,60]", s.k_az));
    const double kp = excess_kurtosis(spiral_spectrum(s.spectrum));
    const double kn = excess_kurtosis(spiral_spectrum(sinc_case(0.05, -4.0).spectrum));
    o.require(kp > kn, fmt("excess kurtosis %.2f (phi=+4) > %.2f (phi=-4)", kp, kn));
    return o;
  });

  report(4, "Gaussian kind against the closed-form law and order degeneracy", [] {
    Outcome o;
    for (double b : {0.05, 0.1, 0.2, 0.5, 1.0}) {
      DecompositionOptions opt;
      opt.keep_modes = false;
      const auto d = full_decomposition(SpdcParams{b, 0.0, GaussianMatching{}}, std::nullopt, opt);
      const double k = schmidt_number(d.spectrum);
      const double exact = gaussian_schmidt_number(b);
      const double rel = std::abs(k / exact - 1.0);
      // Orders 2p + |l| carrying at least 1e-6 of the leading weight.
      std::map<int, std::pair<double, double>> range;
      const double top = d.spectrum.weight(0, 0);
      for (const auto& [l, w] : d.spectrum.weights) {
        for (std::size_t p = 0; p < w.size(); ++p) {
          if (w[p] < 1e-6 * top) continue;
          const int n = 2 * static_cast<int>(p) + std::abs(l);
          auto [it, fresh] = range.try_emplace(n, w[p], w[p]);
          if (!fresh) {
            it->second.first = std::min(it->second.first, w[p]);
            it->second.second = std::max(it->second.second, w[p]);
          }
        }
      }
      double spread = 0.0;
      for (const auto& [n, mm] : range) spread = std::max(spread, mm.second / mm.first - 1.0);
      o.require(rel < 1e-3, fmt("b_sigma=%g: |K/K_gauss-1|=%.2e < 1e-3", b, rel));
      o.require(spread < 0.01, fmt("b_sigma=%g: order spread %.2e < 1%%", b, spread));
    }
    return o;
  });

  report(5, "analytic vs quadrature kernels, b_sigma<=0.2, |phi|<=5, l<=30", [] {
    Outcome o;
    double worst = 0.0;
    std::string where;
    for (double b : {0.05, 0.1, 0.15, 0.2}) {
      for (double phi : {-5.0, -2.5, 0.0, 2.5, 5.0}) {
        const SpdcParams p{b, phi};
        const auto g = default_grid(p);
        const auto analytic = radial_kernels_analytic(p, 0, 31, g);
        const auto quadrature = radial_kernels_quadrature(p, 0, 31, g);
        for (int l = 0; l <= 30; ++l) {
          const double dev = kernel_agreement(analytic[l], quadrature[l]);
          if (dev > worst) {
            worst = dev;
            char buf[96];
            std::snprintf(buf, sizeof buf, " at b_sigma=%g phi=%g l=%d", b, phi, l);
            where = buf;
          }
        }
      }
    }
    o.require(worst < 0.01, fmt("max relative deviation %.3e < 1e-2", worst) + where);
    return o;
  });

  std::vector<ScanSample> scan;
  report(6, "rescaling fit of the sinc K(b_sigma) scan", [&scan] {
    const std::vector<double> bs{0.05, 0.07, 0.1, 0.14, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0};
    for (double b : bs) scan.push_back({b, sinc_case(b, 0.0).k});
    const auto fit = fit_rescaling(scan);
    const double a1e = alpha_from_1e_criterion();
    Outcome o;
    o.require(std::abs(fit.alpha - 0.85) <= 0.09, fmt("alpha=%.4f in 0.85+-0.09", fit.alpha));
    o.require(std::abs(fit.beta - 1.65) <= 0.17, fmt("beta=%.4f in 1.65+-0.17", fit.beta));
    o.require(fit.alpha_prime && std::abs(*fit.alpha_prime - 0.65) <= 0.05,
              fmt("alpha'=%.4f in 0.65+-0.05", fit.alpha_prime.value_or(NAN)));
    o.require(within(a1e, 0.60, 0.70), fmt("1/e alpha=%.4f in [0.60,0.70]", a1e));
    const double kmin = interpolated_minimum(scan);
    o.require(kmin > 1.0 && kmin < 2.0, fmt("K minimum at b_sigma=%.3f in (1,2)", kmin));
    const double k_model = rescaled_schmidt_number(0.05, 0.85, 1.65);
    const double k_num = sinc_case(0.05, 0.0).k;
    o.require(std::abs(k_model / k_num - 1.0) < 0.1,
              fmt("rescaled law %.1f vs numeric %.1f within 10%%", k_model, k_num));
    return o;
  });

  report(7, "K_az ~ 2 sqrt(K) at phi=0", [] {
    Outcome o;
    for (double b : {0.05, 0.1}) {
      const auto& s = sinc_case(b, 0.0);
      const double rel = std::abs(s.k_az - 2.0 * std::sqrt(s.k)) / s.k_az;
      o.require(rel < 0.15, fmt("b_sigma=%g: %.3f < 0.15", b, rel));
    }
    return o;
  });

  RadialDecomposition ring_modes, open_modes;
  report(8, "mode structure", [&] {
    Outcome o;
    const SpdcParams open{0.05, -4.0};
    const auto go = default_grid(open);
    open_modes = decompose_radial(radial_kernel_analytic(open, 0, go));
    const auto& m0 = open_modes.modes.at(0);
    const double first = m0.samples[0] * m0.samples[0];
    const double peak = m0.samples.cwiseAbs2().maxCoeff();
    o.require(first < 0.01 * peak, fmt("phi=-4 fundamental |phi(q_1)|^2/peak=%.2e < 0.01", first / peak));

    const SpdcParams flat{0.05, 0.0};
    const auto g = default_grid(flat);
    ring_modes = decompose_radial(radial_kernel_analytic(flat, 10, g));
    for (int p = 0; p < 3; ++p) {
      const auto& m = ring_modes.modes.at(p);
      const int lobes = intensity_lobes(m.samples);
      const auto ring = ring_assignment(m, g, flat);
      char buf[128];
      std::snprintf(buf, sizeof buf, "l=10 p=%d: %d lobes, ring %d, energy %.3f", p, lobes, ring.ring,
                    ring.energy_fraction);
      o.require(lobes == p + 1 && ring.ring == 0 && ring.energy_fraction > 0.9, buf);
    }
    int jump = -1;
    for (const auto& m : ring_modes.modes) {
      if (ring_assignment(m, g, flat).ring >= 1) {
        jump = m.p;
        break;
      }
    }
    o.require(jump > 0, "first p in ring >= 1: " + std::to_string(jump));
    return o;
  });

  report(9, "property suites", [&] {
    Outcome o;
    for (const auto& [key, s] : cache) check_spiral(o, s.spectrum, key);
    o.require(orthonormality_defect(ring_modes) < 1e-6 && orthonormality_defect(open_modes) < 1e-6,
              fmt("orthonormality defect %.2e < 1e-6",
                  std::max(orthonormality_defect(ring_modes), orthonormality_defect(open_modes))));

    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd f(12, 12);
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) f(i, j) = nd(rng);
      f = 0.5 * (f + f.transpose()).eval();
      RadialKernel k;
      k.grid = RadialGrid(12, 1.0);
      k.entries = f;
      DecomposeOptions all;
      all.relative_cutoff = 0.0;
      const auto r = decompose_radial(k, all);
      const auto sv = singular_values_by_embedding(f);
      for (int i = 0; i < 12; ++i) worst = std::max(worst, std::abs(r.weights[i] - sv[i] * sv[i]) / r.weights[0]);
    }
    o.require(worst < 1e-10, fmt("eigen vs embedding SVD %.2e < 1e-10", worst));

    // Projection coefficients with a Gaussian detector.
    const SpdcParams p{0.2, 0.0};
    const auto d = full_decomposition(p);
    check_spiral(o, d.spectrum, "b_sigma=0.2");
    double c_lo = 1.0, c_hi = 0.0;
    for (double q_d : {0.5, 1.0, 3.0}) {
      const auto det = gaussian_detector(d.spectrum.grid, q_d);
      for (const auto& [l, r] : d.radial) {
        for (const auto& m : r.modes) {
          const double c = projection_coefficient(m, d.spectrum.grid, det);
          c_lo = std::min(c_lo, c);
          c_hi = std::max(c_hi, c);
        }
      }
    }
    o.require(c_lo >= 0.0 && c_hi <= 1.0 + 1e-8, fmt("C in [%.2e, %.6f]", c_lo, c_hi));

    // Byte-identical reruns of the serialized outputs.
    auto serialize = [] {
      const SpdcParams q{0.1, -2.0};
      const auto dd = full_decomposition(q);
      std::ostringstream out;
      out << metrics_report(dd, {0.0, 0.5, 1.0}).dump(2) << spectrum_json(dd.spectrum, "modes").dump(2);
      write_spectrum_csv(out, dd.spectrum);
      for (const auto& [l, r] : dd.radial) write_mode_csv(out, r);
      return out.str();
    };
    const std::string a = serialize(), b = serialize();
    o.require(a == b, "byte-identical reruns (" + std::to_string(a.size()) + " bytes)");
    return o;
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
