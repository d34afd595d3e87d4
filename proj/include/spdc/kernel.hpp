#pragma once

// Per-OAM radial kernels. Entry (i, j) of the kernel for index l is
//
//   s sqrt(q_i q_j) * integral_0^{2 pi} A(q_i, q_j, pi + psi) cos(l psi) dpsi,
//
// with the azimuth psi measured from the back-to-back configuration. This
// differs from the plain e^{-i l dtheta} projection by the sign (-1)^l only,
// which leaves every Schmidt weight unchanged.

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "spdc/grid.hpp"
#include "spdc/model.hpp"

namespace spdc {

/// Upper edge of the analytic kernel's validity regime (L_R <= 0.1).
inline constexpr double kAnalyticMaxBSigma = 0.2236067977499790;

/// Pairs with exp(-(q_i - q_j)^2) below this are stored as exact zeros; the
/// pump envelope bounds every entry by 2 pi s sqrt(q_i q_j) times it.
inline constexpr double kBandEnvelopeFloor = 1e-30;

struct RadialKernel {
  int l = 0;
  RadialGrid grid{2, 1.0};
  Eigen::MatrixXd entries;

  /// Analytic path evaluated with b_sigma above kAnalyticMaxBSigma.
  bool outside_validity = false;
  /// Largest node count any entry needed (quadrature path).
  int n_theta_used = 0;
  /// Largest |imaginary part| relative to max |entry|, when checked.
  double max_imaginary = 0.0;
};

enum class AnalyticForm {
  /// sinc(L_R (q1^2 + q2^2) + phi) times the Bessel factor.
  kPlainSinc,
  /// Sinc expanded about the azimuthal mean of the pump weight in its
  /// central moments, summed up to the smallest term of the series.
  kMomentCorrected,
};

/// Closed-form kernel for sinc phase matching:
///
///   2 pi s sqrt(q1 q2) e^{-(q1-q2)^2} [I_l(2 q1 q2) e^{-2 q1 q2}] S(q1, q2),
///
/// where S is the phase-matching factor of `form`. Throws
/// UnsupportedKindError for non-sinc kinds.
RadialKernel radial_kernel_analytic(const SpdcParams& params, int l, const RadialGrid& grid,
                                    AnalyticForm form = AnalyticForm::kMomentCorrected);

/// Kernels for l = l_first .. l_first + count - 1 with one Bessel pass per
/// pair.
std::vector<RadialKernel> radial_kernels_analytic(
    const SpdcParams& params, int l_first, int count, const RadialGrid& grid,
    AnalyticForm form = AnalyticForm::kMomentCorrected);

struct QuadratureOptions {
  /// Initial node count on [0, 2 pi). Must be >= 64 and a power of two.
  int n_theta = 64;
  /// Double the node count per entry until successive results agree.
  bool adaptive = true;
  int n_theta_max = 1 << 16;
  /// Agreement threshold relative to the integral of |A| over the period.
  double tolerance = 1e-10;
  /// Evaluate the sine projection over the full period and record the
  /// imaginary residue in RadialKernel::max_imaginary.
  bool check_imaginary = false;
};

/// Kernel from trapezoidal quadrature of the amplitude over the relative
/// azimuth. Works for every phase-matching kind and every b_sigma. Throws
/// AccuracyError when an entry has not converged at n_theta_max.
RadialKernel radial_kernel_quadrature(const SpdcParams& params, int l, const RadialGrid& grid,
                                      const QuadratureOptions& options = {});

std::vector<RadialKernel> radial_kernels_quadrature(const SpdcParams& params, int l_first,
                                                    int count, const RadialGrid& grid,
                                                    const QuadratureOptions& options = {});

/// Max of |a - b| / |b| over entries with |b| > 1e-6 max |b|.
/// Throws ShapeError for different grids or l.
double kernel_agreement(const RadialKernel& a, const RadialKernel& b);

/// max |a - b| / max |b|.
double kernel_deviation_scaled(const RadialKernel& a, const RadialKernel& b);

/// Largest |entry| in the last row relative to the largest |entry|.
double kernel_edge_ratio(const RadialKernel& kernel);

/// Row-major CSV with a "# l=..., n=..., s=..." header line.
void write_kernel_csv(std::ostream& out, const RadialKernel& kernel);

/// Binary 8-bit PGM of log10 |entry| over six decades below the maximum.
void write_kernel_pgm(std::ostream& out, const RadialKernel& kernel);

}  // namespace spdc
