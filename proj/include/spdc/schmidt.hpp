#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spdc/grid.hpp"
#include "spdc/kernel.hpp"
#include "spdc/model.hpp"

namespace spdc {

/// Radial Schmidt mode phi_{l,p}(q_i), normalized so that
/// sum_i phi(q_i)^2 s = 1. The first sample above 1e-6 in magnitude is
/// positive.
struct RadialMode {
  int l = 0;
  int p = 0;
  Eigen::VectorXd samples;
  /// Raw weight (squared singular value of the kernel matrix).
  double weight = 0.0;
  /// The partner photon's mode is partner_sign * phi (sign of the kernel
  /// eigenvalue).
  int partner_sign = 1;
};

struct DecomposeOptions {
  /// Drop weights below relative_cutoff * reference.
  double relative_cutoff = 1e-8;
  /// Reference weight for the cutoff; <= 0 uses the kernel's own largest.
  double reference = 0.0;
  /// Keep at most this many modes; negative means unlimited.
  int p_max = -1;
  bool compute_modes = true;
};

struct RadialDecomposition {
  int l = 0;
  RadialGrid grid{2, 1.0};
  /// Retained raw weights, descending.
  std::vector<double> weights;
  /// Empty when modes were not requested.
  std::vector<RadialMode> modes;
  /// Sum of all raw weights, ||F||_F^2.
  double trace = 0.0;
  /// max ||F^2 v - lambda v|| / ||F^2|| over retained pairs (modes only).
  double max_residual = 0.0;

  double retained() const;
};

/// Eigen-decomposition of the symmetric kernel F. The weights are the
/// eigenvalues of F F^T = F^2; F itself is diagonalized so that modes of
/// eigenvalues +-mu stay separated. Degenerate weights are ordered by
/// first-sample magnitude, descending. Throws ContractError for non-finite
/// or non-symmetric input and NumericalError when the residual check fails.
RadialDecomposition decompose_radial(const RadialKernel& kernel,
                                     const DecomposeOptions& options = {});

enum class KernelPath {
  /// Analytic for sinc kinds inside the validity regime, quadrature otherwise.
  kAuto,
  kAnalytic,
  kQuadrature,
};

std::string to_string(KernelPath path);
KernelPath parse_kernel_path(const std::string& text);

struct DecompositionOptions {
  KernelPath path = KernelPath::kAuto;
  AnalyticForm analytic_form = AnalyticForm::kMomentCorrected;
  QuadratureOptions quadrature;
  /// Hard cap on |l|.
  int l_max = 2000;
  /// Stop once ||F_l||^2 < stop_ratio * ||F_0||^2 for stop_run consecutive l.
  double stop_ratio = 1e-4;
  int stop_run = 3;
  /// Weights below relative_cutoff * lambda_{0,0} are dropped.
  double relative_cutoff = 1e-8;
  int p_max = -1;
  /// Kernel batch size (l values sharing one pass over the grid).
  int batch = 16;
  bool keep_modes = true;
  /// Below this captured mass a warning is attached; below error_mass the
  /// decomposition fails with TruncationError.
  double warn_mass = 0.999;
  double error_mass = 0.99;
};

/// Globally normalized weights lambda_{l,p} for l = -l_max .. l_max.
struct SchmidtSpectrum {
  SpdcParams params;
  RadialGrid grid{2, 1.0};
  KernelPath path = KernelPath::kAuto;
  /// l -> weights in descending p order; both signs of l are present.
  std::map<int, std::vector<double>> weights;
  /// Retained raw weight over the estimated total (computed traces plus a
  /// geometric tail estimate when the l range hit its cap).
  double captured_mass = 1.0;
  /// Sum of retained raw weights (counting l and -l); divides raw weights.
  double normalization = 1.0;
  int l_max = 0;
  std::vector<std::string> warnings;

  double weight(int l, int p) const;
  std::size_t mode_count() const;
  double total() const;
};

struct Decomposition {
  SchmidtSpectrum spectrum;
  /// Radial decompositions for l >= 0 (raw weights).
  std::map<int, RadialDecomposition> radial;
  /// Kernel outside the analytic validity regime (analytic path forced).
  bool outside_validity = false;

  /// Throws LookupError when |l| was not computed.
  const RadialDecomposition& at(int l) const;
  /// Mode (l, p); throws LookupError / RangeError.
  const RadialMode& mode(int l, int p) const;
};

Decomposition full_decomposition(const SpdcParams& params,
                                 const std::optional<RadialGrid>& grid = std::nullopt,
                                 const DecompositionOptions& options = {});

/// Sum_p partner_sign sqrt(lambda_p) phi_p(q_i) phi_p(q_j) s over the
/// retained modes, i.e. the kernel entry (i, j) in matrix units.
double reconstruct(const RadialDecomposition& radial, std::size_t i, std::size_t j,
                   int p_count = -1);
double reconstruct(const Decomposition& decomposition, int l, std::size_t i, std::size_t j);

Eigen::MatrixXd reconstruct_kernel(const RadialDecomposition& radial, int p_count = -1);

/// ||F - F_rec||_F / ||F||_F using the first p_count modes (all if negative).
double reconstruction_error(const RadialDecomposition& radial, const RadialKernel& kernel,
                            int p_count = -1);

struct RingAssignment {
  /// Interval between consecutive diagonal phase-matching zeros, counted
  /// from the origin.
  int ring = 0;
  double energy_fraction = 0.0;
  double peak_q = 0.0;
  double inner = 0.0;
  double outer = 0.0;
};

/// Locates argmax |phi|^2 among the zeros of sinc(4 h q^2 + phi) on the
/// diagonal. Throws UnsupportedKindError for Gaussian-family kinds.
RingAssignment ring_assignment(const RadialMode& mode, const RadialGrid& grid,
                               const SpdcParams& params);

/// Number of local maxima of phi^2 above threshold * max phi^2.
int intensity_lobes(const Eigen::VectorXd& samples, double threshold = 0.01);

}  // namespace spdc
