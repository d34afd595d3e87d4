#include "spdc/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "spdc/error.hpp"
#include "spdc/io.hpp"
#include "spdc/parallel.hpp"

namespace spdc {

namespace {

constexpr double kSignThreshold = 1e-6;
constexpr double kResidualLimit = 1e-8;
constexpr double kTieTolerance = 1e-10;

void flip_to_convention(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kSignThreshold) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
  // No sample clears the threshold: fall back to the largest one.
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k] < 0.0) v = -v;
}

}  // namespace

double RadialDecomposition::retained() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

RadialDecomposition decompose_radial(const RadialKernel& kernel, const DecomposeOptions& options) {
  const Eigen::MatrixXd& f = kernel.entries;
  if (f.rows() != f.cols() || f.rows() != static_cast<Eigen::Index>(kernel.grid.size())) {
    throw ShapeError("kernel matrix does not match its grid");
  }
  if (!f.allFinite()) throw ContractError("kernel has non-finite entries");
  const double peak = f.cwiseAbs().maxCoeff();
  if ((f - f.transpose()).cwiseAbs().maxCoeff() > 1e-12 * peak) {
    throw ContractError("kernel is not symmetric");
  }

  RadialDecomposition out;
  out.l = kernel.l;
  out.grid = kernel.grid;
  out.trace = f.squaredNorm();
  if (peak == 0.0) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      f, options.compute_modes ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver failed for l=" + std::to_string(kernel.l) +
                         " (n=" + std::to_string(f.rows()) + ")");
  }
  const Eigen::VectorXd& mu = solver.eigenvalues();
  const Eigen::Index n = mu.size();
  const double s = kernel.grid.step();
  const double inv_sqrt_s = 1.0 / std::sqrt(s);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return mu[a] * mu[a] > mu[b] * mu[b]; });
  const double lambda_max = mu[order[0]] * mu[order[0]];
  const double reference = options.reference > 0.0 ? options.reference : lambda_max;

  std::size_t keep = 0;
  while (keep < order.size() && mu[order[keep]] * mu[order[keep]] >= options.relative_cutoff * reference &&
         (options.p_max < 0 || static_cast<int>(keep) < options.p_max)) {
    ++keep;
  }

  if (!options.compute_modes) {
    for (std::size_t k = 0; k < keep; ++k) out.weights.push_back(mu[order[k]] * mu[order[k]]);
    return out;
  }

  // Sign-normalized vectors, then the tie-break inside degenerate clusters.
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  std::vector<Eigen::VectorXd> normalized(order.size());
  auto vector_of = [&](Eigen::Index k) -> const Eigen::VectorXd& {
    auto& v = normalized[static_cast<std::size_t>(k)];
    if (v.size() == 0) {
      v = vecs.col(k) * inv_sqrt_s;
      flip_to_convention(v);
    }
    return v;
  };
  std::size_t start = 0;
  const std::size_t span_end = std::min(order.size(), keep + 1);
  while (start < span_end) {
    const double head = mu[order[start]] * mu[order[start]];
    std::size_t stop = start + 1;
    while (stop < order.size() &&
           head - mu[order[stop]] * mu[order[stop]] <= kTieTolerance * head) {
      ++stop;
    }
    if (stop - start > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(stop),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return std::abs(vector_of(a)[0]) > std::abs(vector_of(b)[0]);
                       });
    }
    start = stop;
  }

  Eigen::MatrixXd retained(f.rows(), static_cast<Eigen::Index>(keep));
  for (std::size_t k = 0; k < keep; ++k) retained.col(static_cast<Eigen::Index>(k)) = vecs.col(order[k]);
  const Eigen::MatrixXd image = f * retained;
  const double norm_f = std::sqrt(lambda_max);

  out.modes.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    const Eigen::Index idx = order[k];
    const double m = mu[idx];
    // ||F^2 v - m^2 v|| <= (||F|| + |m|) ||F v - m v||.
    const double r1 = (image.col(static_cast<Eigen::Index>(k)) - m * vecs.col(idx)).norm();
    const double residual = (norm_f + std::abs(m)) * r1 / lambda_max;
    out.max_residual = std::max(out.max_residual, residual);
    if (residual > kResidualLimit) {
      throw NumericalError("eigenpair residual " + format_double(residual) + " exceeds limit for l=" +
                           std::to_string(kernel.l) + ", p=" + std::to_string(k));
    }
    RadialMode mode;
    mode.l = kernel.l;
    mode.p = static_cast<int>(k);
    mode.samples = vector_of(idx);
    mode.weight = m * m;
    mode.partner_sign = m < 0.0 ? -1 : 1;
    out.weights.push_back(mode.weight);
    out.modes.push_back(std::move(mode));
  }
  return out;
}

std::string to_string(KernelPath path) {
  switch (path) {
    case KernelPath::kAnalytic: return "analytic";
    case KernelPath::kQuadrature: return "quadrature";
    case KernelPath::kAuto: break;
  }
  return "auto";
}

KernelPath parse_kernel_path(const std::string& text) {
  if (text == "analytic") return KernelPath::kAnalytic;
  if (text == "quadrature") return KernelPath::kQuadrature;
  if (text == "auto") return KernelPath::kAuto;
  throw DomainError("unknown kernel path '" + text + "' (expected analytic, quadrature or auto)");
}

double SchmidtSpectrum::weight(int l, int p) const {
  const auto it = weights.find(l);
  if (it == weights.end() || p < 0 || p >= static_cast<int>(it->second.size())) return 0.0;
  return it->second[static_cast<std::size_t>(p)];
}

std::size_t SchmidtSpectrum::mode_count() const {
  std::size_t n = 0;
  for (const auto& [l, w] : weights) n += w.size();
  return n;
}

double SchmidtSpectrum::total() const {
  double sum = 0.0;
  for (const auto& [l, w] : weights)
    for (double x : w) sum += x;
  return sum;
}

const RadialDecomposition& Decomposition::at(int l) const {
  const auto it = radial.find(std::abs(l));
  if (it == radial.end()) {
    throw LookupError("l=" + std::to_string(l) + " not in decomposition (|l| <= " +
                      std::to_string(spectrum.l_max) + ")");
  }
  return it->second;
}

const RadialMode& Decomposition::mode(int l, int p) const {
  const auto& r = at(l);
  if (p < 0 || p >= static_cast<int>(r.modes.size())) {
    throw RangeError("p=" + std::to_string(p) + " not retained for l=" + std::to_string(l) +
                     "; available p = 0.." + std::to_string(static_cast<int>(r.modes.size()) - 1));
  }
  return r.modes[static_cast<std::size_t>(p)];
}

Decomposition full_decomposition(const SpdcParams& params, const std::optional<RadialGrid>& grid,
                                 const DecompositionOptions& options) {
  params.validate();
  if (options.batch <= 0 || options.l_max < 0 || options.stop_run <= 0) {
    throw DomainError("invalid decomposition options");
  }
  const RadialGrid g = grid ? *grid : default_grid(params);
  KernelPath path = options.path;
  if (path == KernelPath::kAuto) {
    path = is_sinc(params.kind) && params.b_sigma <= kAnalyticMaxBSigma ? KernelPath::kAnalytic
                                                                        : KernelPath::kQuadrature;
  }

  Decomposition out;
  out.spectrum.params = params;
  out.spectrum.grid = g;
  out.spectrum.path = path;

  std::vector<double> traces;
  double reference = 0.0;
  int run = 0;
  bool stopped = false;
  int l_first = 0;
  while (!stopped && l_first <= options.l_max) {
    const int count = std::min(options.batch, options.l_max - l_first + 1);
    std::vector<RadialKernel> kernels =
        path == KernelPath::kAnalytic
            ? radial_kernels_analytic(params, l_first, count, g, options.analytic_form)
            : radial_kernels_quadrature(params, l_first, count, g, options.quadrature);
    if (kernels.front().outside_validity) out.outside_validity = true;

    DecomposeOptions dopt;
    dopt.relative_cutoff = options.relative_cutoff;
    dopt.p_max = options.p_max;
    dopt.compute_modes = options.keep_modes;
    std::vector<RadialDecomposition> parts(static_cast<std::size_t>(count));
    std::size_t begin = 0;
    if (l_first == 0) {
      parts[0] = decompose_radial(kernels[0], dopt);
      reference = parts[0].weights.empty() ? 0.0 : parts[0].weights.front();
      begin = 1;
    }
    dopt.reference = reference;
    parallel_for(parts.size() - begin, worker_count(),
                 [&](std::size_t k) { parts[begin + k] = decompose_radial(kernels[begin + k], dopt); });
    kernels.clear();

    for (auto& part : parts) {
      traces.push_back(part.trace);
      const int l = part.l;
      const double t0 = traces.front();
      run = (t0 > 0.0 && part.trace < options.stop_ratio * t0) ? run + 1 : 0;
      out.radial.emplace(l, std::move(part));
      out.spectrum.l_max = l;
      if (run >= options.stop_run) {
        stopped = true;
        break;
      }
    }
    l_first += count;
  }

  // Totals count each l > 0 twice (l and -l).
  double retained = 0.0, total = 0.0;
  for (const auto& [l, r] : out.radial) {
    const double mult = l == 0 ? 1.0 : 2.0;
    retained += mult * r.retained();
    total += mult * r.trace;
  }
  if (traces.size() >= 2) {
    const double last = traces.back(), prev = traces[traces.size() - 2];
    const double ratio = prev > 0.0 ? last / prev : 0.0;
    if (ratio >= 1.0) {
      total = std::numeric_limits<double>::infinity();
    } else {
      total += 2.0 * last * ratio / (1.0 - ratio);
    }
  }
  if (!(retained > 0.0)) throw NumericalError("decomposition retained no weight");
  out.spectrum.normalization = retained;
  out.spectrum.captured_mass = retained / total;

  for (const auto& [l, r] : out.radial) {
    std::vector<double> w(r.weights.size());
    for (std::size_t p = 0; p < w.size(); ++p) w[p] = r.weights[p] / retained;
    if (l != 0) out.spectrum.weights.emplace(-l, w);
    out.spectrum.weights.emplace(l, std::move(w));
  }

  if (out.outside_validity) {
    out.spectrum.warnings.push_back("analytic kernel used outside its validity regime (b_sigma=" +
                                    format_double(params.b_sigma) + ")");
  }
  const double cm = out.spectrum.captured_mass;
  if (cm < options.error_mass) {
    throw TruncationError("captured mass " + format_double(cm) + " below " +
                          format_double(options.error_mass) +
                          "; increase the grid extent (--q-max, --grid-n) or --l-max");
  }
  if (cm < options.warn_mass) {
    out.spectrum.warnings.push_back("captured mass " + format_double(cm) + " below " +
                                    format_double(options.warn_mass));
  }
  return out;
}

double reconstruct(const RadialDecomposition& radial, std::size_t i, std::size_t j, int p_count) {
  const std::size_t n = p_count < 0 ? radial.modes.size()
                                    : std::min(radial.modes.size(), static_cast<std::size_t>(p_count));
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto& m = radial.modes[p];
    sum += m.partner_sign * std::sqrt(m.weight) * m.samples[ii] * m.samples[jj];
  }
  return sum * radial.grid.step();
}

double reconstruct(const Decomposition& decomposition, int l, std::size_t i, std::size_t j) {
  return reconstruct(decomposition.at(l), i, j);
}

Eigen::MatrixXd reconstruct_kernel(const RadialDecomposition& radial, int p_count) {
  const std::size_t n = p_count < 0 ? radial.modes.size()
                                    : std::min(radial.modes.size(), static_cast<std::size_t>(p_count));
  const auto size = static_cast<Eigen::Index>(radial.grid.size());
  Eigen::MatrixXd basis(size, static_cast<Eigen::Index>(n));
  Eigen::VectorXd coeff(static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    basis.col(static_cast<Eigen::Index>(p)) = radial.modes[p].samples;
    coeff[static_cast<Eigen::Index>(p)] =
        radial.modes[p].partner_sign * std::sqrt(radial.modes[p].weight);
  }
  return radial.grid.step() * basis * coeff.asDiagonal() * basis.transpose();
}

double reconstruction_error(const RadialDecomposition& radial, const RadialKernel& kernel,
                            int p_count) {
  if (radial.grid != kernel.grid || std::abs(radial.l) != std::abs(kernel.l)) {
    throw ShapeError("decomposition and kernel differ in grid or l");
  }
  const double norm = kernel.entries.norm();
  if (norm == 0.0) return 0.0;
  return (kernel.entries - reconstruct_kernel(radial, p_count)).norm() / norm;
}

RingAssignment ring_assignment(const RadialMode& mode, const RadialGrid& grid,
                               const SpdcParams& params) {
  if (!is_sinc(params.kind)) throw UnsupportedKindError("ring assignment requires sinc phase matching");
  if (mode.samples.size() != static_cast<Eigen::Index>(grid.size())) {
    throw ShapeError("mode does not match grid");
  }
  const double four_h = 4.0 * params.phase_coefficient();
  Eigen::Index peak = 0;
  mode.samples.cwiseAbs2().maxCoeff(&peak);

  RingAssignment out;
  out.peak_q = grid.point(static_cast<std::size_t>(peak));
  // Diagonal zeros: 4 h q^2 + phi = k pi with k != 0 and k pi > phi.
  int k = static_cast<int>(std::floor(params.phi / std::numbers::pi)) + 1;
  double inner = 0.0;
  for (;; ++k) {
    if (k == 0) continue;
    const double outer = std::sqrt((k * std::numbers::pi - params.phi) / four_h);
    if (out.peak_q < outer) {
      out.inner = inner;
      out.outer = outer;
      break;
    }
    inner = outer;
    ++out.ring;
  }
  double energy = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = grid.point(i);
    if (q >= out.inner && q < out.outer) {
      const double v = mode.samples[static_cast<Eigen::Index>(i)];
      energy += v * v;
    }
  }
  out.energy_fraction = energy * grid.step();
  return out;
}

int intensity_lobes(const Eigen::VectorXd& samples, double threshold) {
  const Eigen::VectorXd p = samples.cwiseAbs2();
  const Eigen::Index n = p.size();
  if (n == 0) return 0;
  const double floor = threshold * p.maxCoeff();
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p[i] <= floor) continue;
    const double left = i > 0 ? p[i - 1] : -1.0;
    const double right = i + 1 < n ? p[i + 1] : -1.0;
    if (p[i] > left && p[i] >= right) ++count;
  }
  return count;
}

}  // namespace spdc
