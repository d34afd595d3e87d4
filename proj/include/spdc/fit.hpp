#pragma once

#include <optional>
#include <vector>

namespace spdc {

struct ScanSample {
  double b_sigma = 0.0;
  double k = 0.0;
};

struct RescalingFit {
  double alpha = 1.0;
  double beta = 1.0;
  /// RMS of log K_model - log K over all samples.
  double residual = 0.0;
  int iterations = 0;
  /// One-parameter fit K = 1 / (2 b sigma alpha')^2 over the small-b sigma
  /// samples; empty when there are none.
  std::optional<double> alpha_prime;
  double alpha_prime_residual = 0.0;
  std::size_t small_count = 0;
};

/// Least squares in log K over (log alpha, log beta) with Levenberg-Marquardt.
/// Needs at least four samples spanning a decade in b sigma (DomainError).
/// Throws FitError with the residual history when the iteration stalls.
RescalingFit fit_rescaling(const std::vector<ScanSample>& samples, double small_limit = 0.2);

/// b sigma at the minimum of K: vertex of the parabola in (log b sigma,
/// log K) through the smallest sample and its neighbours. Falls back to the
/// smallest sample at either end. Samples must be sorted by b sigma.
double interpolated_minimum(const std::vector<ScanSample>& samples);

}  // namespace spdc
