#include "spdc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <variant>

#include "spdc/bessel.hpp"
#include "spdc/error.hpp"
#include "spdc/io.hpp"
#include "spdc/parallel.hpp"

namespace spdc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr int kMaxMomentOrder = 24;

// d^n/dx^n sin(x)/x. Taylor series near zero, Leibniz rule on sin(x) * x^-1
// elsewhere; s and c are sin(x) and cos(x).
double sinc_derivative(double x, int n, double s, double c) {
  if (std::abs(x) < 4.0) {
    // sum over m >= n/2 of (-1)^m (2m)! / ((2m - n)! (2m + 1)!) x^(2m - n)
    const int m0 = (n + 1) / 2;
    double term = (m0 % 2 ? -1.0 : 1.0);
    for (int k = 2 * m0 - n + 1; k <= 2 * m0; ++k) term *= k;
    for (int k = 2; k <= 2 * m0 + 1; ++k) term /= k;
    if (2 * m0 > n) term *= x;
    double sum = term;
    const double x2 = x * x;
    for (int m = m0 + 1; m < m0 + 60; ++m) {
      term *= -x2 * (2.0 * m - 1.0) / ((2.0 * m - n) * (2.0 * m - n - 1.0) * (2.0 * m + 1.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  const double d[4] = {s, c, -s, -c};
  const double inv = 1.0 / x;
  // sum_k C(n, k) sin^(n-k)(x) (-1)^k k! x^(-k-1)
  double sum = 0.0, binom = 1.0, inv_pow = inv, fact = 1.0;
  for (int k = 0; k <= n; ++k) {
    sum += binom * d[(n - k) % 4] * (k % 2 ? -1.0 : 1.0) * fact * inv_pow;
    binom = binom * (n - k) / (k + 1);
    fact *= k + 1;
    inv_pow *= inv;
  }
  return sum;
}

// Azimuthal average of sinc(base - gamma Y), Y = 1 - cos psi, against the
// weight exp(-alpha Y) cos(l psi), normalized by its integral
// 2 pi I_l(alpha) e^{-alpha}. Cumulants of Y are derivatives of
// log I_l(alpha) e^{-alpha}: kappa_1 = 1 - R and kappa_n = (-1)^n R^(n-1),
// where R = I_l'/I_l solves R' = 1 + l^2/alpha^2 - R/alpha - R^2. The Taylor
// series of R about alpha gives every kappa_n. The sinc is expanded about the
// mean in central moments and summed until the terms stop shrinking.
double moment_corrected_sinc(int l, double alpha, double ratio, double base, double gamma) {
  constexpr int N = kMaxMomentOrder;
  double r[N], kappa[N + 1], mu[N + 1], a[N];
  const double la2 = static_cast<double>(l) * l;
  const double inv = 1.0 / alpha;
  r[0] = ratio + l * inv;
  a[0] = inv;  // 1/(alpha + t) = sum a_k t^k
  const double b = base - gamma * (1.0 - r[0]);
  const double sb = std::sin(b), cb = std::cos(b);
  double sum = sinc_derivative(b, 0, sb, cb);
  mu[0] = 1.0;
  mu[1] = 0.0;
  double coef = -gamma;  // (-gamma)^n / n!
  double fact = 1.0;     // (n - 1)!
  double prev = std::numeric_limits<double>::infinity(), last = prev;
  for (int n = 2; n <= N; ++n) {
    // Riccati recursion for r_{n-1}; 1/(alpha + t)^2 has coefficient
    // -(k + 1) a_{k+1} at t^k.
    const int k = n - 2;
    a[k + 1] = -a[k] * inv;
    double rhs = (k == 0 ? 1.0 : 0.0) - la2 * (k + 1) * a[k + 1];
    for (int j = 0; j <= k; ++j) rhs -= r[j] * (a[k - j] + r[k - j]);
    r[k + 1] = rhs / (k + 1);
    fact *= n - 1;
    kappa[n] = (n % 2 ? -1.0 : 1.0) * fact * r[n - 1];
    double m = 0.0, binom = 1.0;  // C(n - 1, j - 1)
    for (int j = 2; j <= n; ++j) {
      binom = binom * (n - j + 1) / (j - 1);
      m += binom * kappa[j] * mu[n - j];
    }
    mu[n] = m;
    coef *= -gamma / n;
    const double term = coef * mu[n] * sinc_derivative(b, n, sb, cb);
    const double size = std::abs(term);
    // Asymptotic series: stop once a pair of terms grows.
    if (n > 4 && size > prev && size > 1e-300) break;
    sum += term;
    if (n > 4 && size + last < 1e-17) break;
    prev = last;
    last = size;
  }
  return sum;
}

void check_batch(int l_first, int count) {
  if (l_first < 0) throw DomainError("kernel batch must start at l >= 0");
  if (count <= 0) throw DomainError("kernel batch needs at least one l");
}

std::vector<RadialKernel> empty_batch(int l_first, int count, const RadialGrid& grid) {
  std::vector<RadialKernel> out(static_cast<std::size_t>(count));
  const auto n = static_cast<Eigen::Index>(grid.size());
  for (int k = 0; k < count; ++k) {
    out[k].l = l_first + k;
    out[k].grid = grid;
    out[k].entries = Eigen::MatrixXd::Zero(n, n);
  }
  return out;
}

// Phase-matching functors for the quadrature inner loop.
struct SincPm {
  double phi;
  double operator()(double u) const { return sinc(u + phi); }
};
struct GaussPm {
  double scale;
  double operator()(double u) const { return std::exp(-scale * u); }
};
struct SuperPm {
  double c;
  double operator()(double u) const { return std::exp(-c * u * u); }
};

// Cosine tables cos(l * 2 pi k / N) for k = 0 .. N/2 at each refinement level.
class CosineTables {
 public:
  CosineTables(int n0, int l_first, int count) : n0_(n0), l_first_(l_first), count_(count) {}

  struct Level {
    int n = 0;
    Eigen::MatrixXd cosines;           // (N/2 + 1) x count
    std::vector<double> one_minus_cos;  // 2 sin^2(pi k / N)
  };

  const Level& level(int index) {
    std::lock_guard lock(mutex_);
    while (static_cast<int>(levels_.size()) <= index) {
      auto lv = std::make_unique<Level>();
      lv->n = n0_ << levels_.size();
      const int half = lv->n / 2;
      lv->cosines.resize(half + 1, count_);
      lv->one_minus_cos.resize(half + 1);
      for (int k = 0; k <= half; ++k) {
        const double sh = std::sin(std::numbers::pi * k / lv->n);
        lv->one_minus_cos[k] = 2.0 * sh * sh;
        for (int c = 0; c < count_; ++c) {
          const long long l = l_first_ + c;
          // Reduce l k mod N exactly before taking the cosine.
          const long long m = (l * k) % lv->n;
          lv->cosines(k, c) = std::cos(kTwoPi * static_cast<double>(m) / lv->n);
        }
      }
      levels_.push_back(std::move(lv));
    }
    return *levels_[index];
  }

 private:
  int n0_, l_first_, count_;
  std::mutex mutex_;
  std::vector<std::unique_ptr<Level>> levels_;
};

template <class Pm>
void quadrature_fill(const SpdcParams& params, const Pm& pm, int l_first, int count,
                     const RadialGrid& grid, const QuadratureOptions& options,
                     std::vector<RadialKernel>& out) {
  const std::size_t n = grid.size();
  const double s = grid.step();
  const double h = params.phase_coefficient();
  CosineTables tables(options.n_theta, l_first, count);
  int max_levels = 1;
  while ((options.n_theta << max_levels) <= options.n_theta_max) ++max_levels;

  std::vector<int> row_nodes(n, 0);
  std::vector<double> row_imag(n, 0.0);

  parallel_for(n, worker_count(), [&](std::size_t i) {
    std::vector<double> samples, refined;
    Eigen::VectorXd weighted, current, previous;
    const double q1 = grid.point(i);
    for (std::size_t j = i; j < n; ++j) {
      const double q2 = grid.point(j);
      const double d = q1 - q2;
      if (std::exp(-d * d) < kBandEnvelopeFloor) break;
      const double cross = 2.0 * q1 * q2;
      const double sum2 = (q1 + q2) * (q1 + q2);
      auto eval = [&](double omc) {
        const double pump = std::exp(-(d * d + cross * omc));
        return pump * pm(h * std::max(0.0, sum2 - cross * omc));
      };

      int lv_index = 0;
      const auto* lv = &tables.level(0);
      samples.resize(lv->n / 2 + 1);
      for (int k = 0; k <= lv->n / 2; ++k) samples[k] = eval(lv->one_minus_cos[k]);

      auto project = [&](const CosineTables::Level& level, const std::vector<double>& g,
                         Eigen::VectorXd& coeffs) {
        const int half = level.n / 2;
        weighted.resize(half + 1);
        double l1 = 0.0;
        for (int k = 0; k <= half; ++k) {
          const double w = (k == 0 || k == half) ? 1.0 : 2.0;
          weighted[k] = w * g[k];
          l1 += std::abs(weighted[k]);
        }
        const double dpsi = kTwoPi / level.n;
        coeffs.noalias() = level.cosines.transpose() * weighted;
        coeffs *= dpsi;
        return l1 * dpsi;
      };

      project(*lv, samples, current);
      if (options.adaptive) {
        for (;;) {
          if (lv_index + 1 >= max_levels) {
            throw AccuracyError("angular quadrature did not converge at q1=" +
                                format_double(q1) + ", q2=" + format_double(q2) +
                                " within n_theta=" + std::to_string(options.n_theta_max));
          }
          const auto* next = &tables.level(lv_index + 1);
          refined.resize(next->n / 2 + 1);
          for (int k = 0; k <= next->n / 2; ++k) {
            refined[k] = (k % 2 == 0) ? samples[k / 2] : eval(next->one_minus_cos[k]);
          }
          previous.swap(current);
          const double l1 = project(*next, refined, current);
          samples.swap(refined);
          lv = next;
          ++lv_index;
          const double change = (current - previous).cwiseAbs().maxCoeff();
          if (change <= options.tolerance * l1 || l1 == 0.0) break;
        }
      }
      row_nodes[i] = std::max(row_nodes[i], lv->n);

      const double pref = s * std::sqrt(q1 * q2);
      for (int c = 0; c < count; ++c) {
        const double v = pref * current[c];
        out[c].entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        out[c].entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }

      if (options.check_imaginary) {
        const int nn = lv->n;
        for (int c = 0; c < count; ++c) {
          const long long l = l_first + c;
          double im = 0.0;
          for (int k = 0; k < nn; ++k) {
            const double sh = std::sin(std::numbers::pi * k / nn);
            const long long m = (l * k) % nn;
            im += eval(2.0 * sh * sh) * std::sin(kTwoPi * static_cast<double>(m) / nn);
          }
          row_imag[i] = std::max(row_imag[i], std::abs(pref * im * kTwoPi / nn));
        }
      }
    }
  });

  const int used = *std::max_element(row_nodes.begin(), row_nodes.end());
  const double imag = *std::max_element(row_imag.begin(), row_imag.end());
  for (auto& k : out) {
    k.n_theta_used = used;
    const double peak = k.entries.cwiseAbs().maxCoeff();
    k.max_imaginary = peak > 0.0 ? imag / peak : imag;
  }
}

void check_same_shape(const RadialKernel& a, const RadialKernel& b) {
  if (!(a.grid == b.grid) || a.l != b.l || a.entries.rows() != b.entries.rows() ||
      a.entries.cols() != b.entries.cols()) {
    throw ShapeError("kernels differ in grid or l");
  }
}

}  // namespace

std::vector<RadialKernel> radial_kernels_analytic(const SpdcParams& params, int l_first,
                                                  int count, const RadialGrid& grid,
                                                  AnalyticForm form) {
  params.validate();
  if (!is_sinc(params.kind)) {
    throw UnsupportedKindError("analytic kernel requires sinc phase matching");
  }
  check_batch(l_first, count);
  auto out = empty_batch(l_first, count, grid);
  const bool outside = params.b_sigma > kAnalyticMaxBSigma;
  for (auto& k : out) k.outside_validity = outside;

  const std::size_t n = grid.size();
  const double s = grid.step();
  const double h = params.phase_coefficient();
  const double l_r = params.l_r();
  const double phi = params.phi;
  const int top = l_first + count;  // highest order needed (ratio uses l + 1)

  parallel_for(n, worker_count(), [&](std::size_t i) {
    std::vector<double> bessel(static_cast<std::size_t>(top) + 1);
    const double q1 = grid.point(i);
    for (std::size_t j = i; j < n; ++j) {
      const double q2 = grid.point(j);
      const double d = q1 - q2;
      const double envelope = std::exp(-d * d);
      if (envelope < kBandEnvelopeFloor) break;
      const double alpha = 2.0 * q1 * q2;
      bessel_i_scaled_sequence(alpha, bessel);
      const double pref = kTwoPi * s * std::sqrt(q1 * q2) * envelope;
      const double base = h * (q1 + q2) * (q1 + q2) + phi;
      const double gamma = h * alpha;
      const double plain = sinc(l_r * (q1 * q1 + q2 * q2) + phi);
      for (int c = 0; c < count; ++c) {
        const int l = l_first + c;
        const double il = bessel[l];
        if (il == 0.0) continue;
        const double factor =
            form == AnalyticForm::kPlainSinc
                ? plain
                : moment_corrected_sinc(l, alpha, bessel[l + 1] / il, base, gamma);
        const double v = pref * il * factor;
        out[c].entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        out[c].entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    }
  });
  return out;
}

RadialKernel radial_kernel_analytic(const SpdcParams& params, int l, const RadialGrid& grid,
                                    AnalyticForm form) {
  auto batch = radial_kernels_analytic(params, std::abs(l), 1, grid, form);
  batch[0].l = l;
  return std::move(batch[0]);
}

std::vector<RadialKernel> radial_kernels_quadrature(const SpdcParams& params, int l_first,
                                                    int count, const RadialGrid& grid,
                                                    const QuadratureOptions& options) {
  params.validate();
  check_batch(l_first, count);
  if (options.n_theta < 64 || (options.n_theta & (options.n_theta - 1)) != 0) {
    throw DomainError("n_theta must be a power of two >= 64");
  }
  if (options.adaptive && options.n_theta_max < 2 * options.n_theta) {
    throw DomainError("n_theta_max must allow at least one refinement");
  }
  auto out = empty_batch(l_first, count, grid);
  std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, SincMatching>) {
          quadrature_fill(params, SincPm{params.phi}, l_first, count, grid, options, out);
        } else if constexpr (std::is_same_v<K, GaussianMatching>) {
          quadrature_fill(params, GaussPm{1.0}, l_first, count, grid, options, out);
        } else if constexpr (std::is_same_v<K, RescaledGaussianMatching>) {
          quadrature_fill(params, GaussPm{kind.alpha * kind.alpha}, l_first, count, grid,
                          options, out);
        } else {
          quadrature_fill(params, SuperPm{kind.c}, l_first, count, grid, options, out);
        }
      },
      params.kind);
  return out;
}

RadialKernel radial_kernel_quadrature(const SpdcParams& params, int l, const RadialGrid& grid,
                                      const QuadratureOptions& options) {
  auto batch = radial_kernels_quadrature(params, std::abs(l), 1, grid, options);
  batch[0].l = l;
  return std::move(batch[0]);
}

double kernel_agreement(const RadialKernel& a, const RadialKernel& b) {
  check_same_shape(a, b);
  const double floor = 1e-6 * b.entries.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < b.entries.cols(); ++c) {
    for (Eigen::Index r = 0; r < b.entries.rows(); ++r) {
      const double ref = std::abs(b.entries(r, c));
      if (ref > floor) worst = std::max(worst, std::abs(a.entries(r, c) - b.entries(r, c)) / ref);
    }
  }
  return worst;
}

double kernel_deviation_scaled(const RadialKernel& a, const RadialKernel& b) {
  check_same_shape(a, b);
  const double peak = b.entries.cwiseAbs().maxCoeff();
  if (peak == 0.0) return (a.entries - b.entries).cwiseAbs().maxCoeff();
  return (a.entries - b.entries).cwiseAbs().maxCoeff() / peak;
}

double kernel_edge_ratio(const RadialKernel& kernel) {
  const double peak = kernel.entries.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  return kernel.entries.row(kernel.entries.rows() - 1).cwiseAbs().maxCoeff() / peak;
}

void write_kernel_csv(std::ostream& out, const RadialKernel& kernel) {
  out << "# l=" << kernel.l << ", n=" << kernel.grid.size()
      << ", s=" << format_double(kernel.grid.step()) << '\n';
  write_matrix_csv(out, kernel.entries);
}

void write_kernel_pgm(std::ostream& out, const RadialKernel& kernel) {
  std::string comment = "l=" + std::to_string(kernel.l) + " n=" +
                        std::to_string(kernel.grid.size()) +
                        " s=" + format_double(kernel.grid.step());
  write_log_pgm(out, kernel.entries.cwiseAbs(), comment);
}

}  // namespace spdc
