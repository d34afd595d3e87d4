#include "spdc/metrics.hpp"

#include <cmath>
#include <numbers>

#include "spdc/error.hpp"

namespace spdc {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kModeNormTolerance = 1e-6;
constexpr double kDetectorNormTolerance = 1e-8;

}  // namespace

double schmidt_number(const SchmidtSpectrum& spectrum) {
  double sum = 0.0, sq = 0.0;
  for (const auto& [l, w] : spectrum.weights) {
    for (double x : w) {
      sum += x;
      sq += x * x;
    }
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw ContractError("spectrum is not normalized (sum=" + std::to_string(sum) + ")");
  }
  return 1.0 / sq;
}

double SpiralSpectrum::at(int l) const {
  const auto it = probabilities.find(l);
  return it == probabilities.end() ? 0.0 : it->second;
}

double SpiralSpectrum::total() const {
  double sum = 0.0;
  for (const auto& [l, p] : probabilities) sum += p;
  return sum;
}

SpiralSpectrum spiral_spectrum(const SchmidtSpectrum& spectrum) {
  SpiralSpectrum out;
  for (const auto& [l, w] : spectrum.weights) {
    double p = 0.0;
    for (double x : w) p += x;
    out.probabilities[l] = p;
  }
  return out;
}

double azimuthal_schmidt_number(const SpiralSpectrum& spiral) {
  double sq = 0.0;
  for (const auto& [l, p] : spiral.probabilities) sq += p * p;
  return 1.0 / sq;
}

double excess_kurtosis(const SpiralSpectrum& spiral) {
  double m2 = 0.0, m4 = 0.0, total = 0.0;
  for (const auto& [l, p] : spiral.probabilities) {
    const double l2 = static_cast<double>(l) * l;
    total += p;
    m2 += p * l2;
    m4 += p * l2 * l2;
  }
  m2 /= total;
  m4 /= total;
  return m4 / (m2 * m2) - 3.0;
}

double gaussian_schmidt_number(double b_sigma) {
  const double x = b_sigma + 1.0 / b_sigma;
  return 0.25 * x * x;
}

double rescaled_schmidt_number(double b_sigma, double alpha, double beta) {
  const double y = b_sigma * alpha;
  const double x = y + 1.0 / y;
  return 0.25 * beta * x * x;
}

double alpha_from_1e_criterion(const std::function<double(double)>& profile) {
  const double target = std::exp(-1.0);
  const double peak = profile(0.0);
  auto excess = [&](double u) { return profile(u) / peak - target; };
  double lo = 0.0, hi = 0.01;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi += 0.01;
    if (hi > 1e6) throw NumericalError("profile never falls to 1/e of its peak");
  }
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  // exp(-alpha^2 u) = 1/e at u = 1 / alpha^2.
  return 1.0 / std::sqrt(0.5 * (lo + hi));
}

double alpha_from_1e_criterion() {
  return alpha_from_1e_criterion([](double u) { return sinc(u); });
}

double coherence_width(double crystal_length, double emission_wavelength,
                       double refractive_index) {
  if (!(crystal_length > 0.0) || !(emission_wavelength > 0.0) || !(refractive_index > 0.0)) {
    throw DomainError("coherence width needs positive inputs");
  }
  return std::sqrt(crystal_length * emission_wavelength / (std::numbers::pi * refractive_index));
}

double etendue_schmidt_estimate(double pump_waist, double coherence) {
  const double k = one_dimensional_schmidt_number(pump_waist, coherence);
  return k * k;
}

double one_dimensional_schmidt_number(double pump_waist, double coherence) {
  if (!(pump_waist > 0.0) || !(coherence > 0.0)) throw DomainError("widths must be positive");
  return pump_waist / coherence;
}

double schmidt_waist(double pump_waist, double coherence) {
  if (!(pump_waist > 0.0) || !(coherence > 0.0)) throw DomainError("widths must be positive");
  return std::sqrt(pump_waist * coherence);
}

double gaussian_modal_weight(int l, int p, double k_1d) {
  if (!(k_1d > 0.0)) throw DomainError("K_1D must be positive");
  return std::exp(-(2.0 * p + std::abs(l)) / k_1d);
}

double gaussian_modal_probability(int l, int p, double k_1d) {
  if (!(k_1d > 0.0)) throw DomainError("K_1D must be positive");
  const double t = std::exp(-2.0 / k_1d);
  const double one_minus_t = -std::expm1(-2.0 / k_1d);
  return one_minus_t * one_minus_t * std::pow(t, 2.0 * p + std::abs(l));
}

double hom_visibility(const SpiralSpectrum& spiral, double dtheta) {
  double v = 0.0;
  for (const auto& [l, p] : spiral.probabilities) v += p * std::cos(l * dtheta);
  return v;
}

DetectorMode gaussian_detector(const RadialGrid& grid, double q_d) {
  if (!(q_d > 0.0)) throw DomainError("detector width must be positive");
  DetectorMode d;
  d.grid = grid;
  d.profile.resize(static_cast<Eigen::Index>(grid.size()));
  double norm = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = grid.point(i);
    const double u = std::exp(-q * q / (q_d * q_d));
    d.profile[static_cast<Eigen::Index>(i)] = u;
    norm += u * u * q;
  }
  d.profile /= std::sqrt(norm * grid.step());
  return d;
}

double projection_coefficient(const RadialMode& mode, const RadialGrid& grid,
                              const DetectorMode& detector) {
  if (detector.grid != grid || mode.samples.size() != static_cast<Eigen::Index>(grid.size()) ||
      detector.profile.size() != mode.samples.size()) {
    throw ShapeError("mode and detector live on different grids");
  }
  const double s = grid.step();
  double mode_norm = 0.0, det_norm = 0.0, overlap = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double q = grid.point(i);
    const double phi = mode.samples[k];
    const double ud = detector.profile[k];
    mode_norm += phi * phi;
    det_norm += ud * ud * q;
    overlap += phi * std::sqrt(q) * ud;  // u q with u = phi / sqrt(q)
  }
  mode_norm *= s;
  det_norm *= s;
  if (std::abs(mode_norm - 1.0) > kModeNormTolerance) throw ContractError("mode is not normalized");
  if (std::abs(det_norm - 1.0) > kDetectorNormTolerance) {
    throw ContractError("detector mode is not normalized");
  }
  overlap *= s;
  return overlap * overlap;
}

std::complex<double> projected_amplitude(const Decomposition& decomposition,
                                         const DetectorMode& detector, double dtheta) {
  const auto& grid = decomposition.spectrum.grid;
  if (detector.grid != grid) throw ShapeError("detector grid differs from decomposition grid");
  std::complex<double> sum = 0.0;
  for (const auto& [l, radial] : decomposition.radial) {
    if (radial.modes.size() != radial.weights.size()) {
      throw ContractError("decomposition was computed without modes");
    }
    double term = 0.0;
    for (const auto& mode : radial.modes) {
      const double lambda = mode.weight / decomposition.spectrum.normalization;
      term += projection_coefficient(mode, grid, detector) * std::sqrt(lambda);
    }
    if (l == 0) {
      sum += term;
    } else {
      sum += term * 2.0 * std::cos(l * dtheta);  // e^{i l t} + e^{-i l t}
    }
  }
  return sum;
}

nlohmann::ordered_json to_json(const RescalingFit& fit) {
  nlohmann::ordered_json j;
  j["alpha"] = fit.alpha;
  j["beta"] = fit.beta;
  j["residual"] = fit.residual;
  j["iterations"] = fit.iterations;
  if (fit.alpha_prime) {
    j["alpha_prime"] = *fit.alpha_prime;
    j["alpha_prime_residual"] = fit.alpha_prime_residual;
  } else {
    j["alpha_prime"] = nullptr;
  }
  j["small_count"] = fit.small_count;
  return j;
}

nlohmann::ordered_json metrics_report(const Decomposition& decomposition,
                                      const std::vector<double>& angles,
                                      const std::optional<RescalingFit>& fit) {
  const auto& spectrum = decomposition.spectrum;
  const SpiralSpectrum spiral = spiral_spectrum(spectrum);
  nlohmann::ordered_json j;
  j["b_sigma"] = spectrum.params.b_sigma;
  j["phi"] = spectrum.params.phi;
  j["kind"] = to_string(spectrum.params.kind);
  j["kernel"] = to_string(spectrum.path);
  j["grid_n"] = spectrum.grid.size();
  j["grid_step"] = spectrum.grid.step();
  j["K"] = schmidt_number(spectrum);
  j["K_az"] = azimuthal_schmidt_number(spiral);
  j["captured_mass"] = spectrum.captured_mass;
  j["l_max"] = spectrum.l_max;
  j["mode_count"] = spectrum.mode_count();
  j["excess_kurtosis"] = excess_kurtosis(spiral);
  j["warnings"] = spectrum.warnings;
  auto table = nlohmann::ordered_json::array();
  for (const auto& [l, p] : spiral.probabilities) table.push_back({{"l", l}, {"P", p}});
  j["P_ell"] = std::move(table);
  auto curve = nlohmann::ordered_json::array();
  for (double a : angles) curve.push_back({{"dtheta", a}, {"V", hom_visibility(spiral, a)}});
  j["visibility"] = std::move(curve);
  if (fit) j["fit"] = to_json(*fit);
  return j;
}

}  // namespace spdc
