#include "spdc/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spdc/error.hpp"

namespace spdc {

namespace {

constexpr double kRescaleAbove = 1e200;
constexpr double kRescaleBy = 1e-200;

// Start order for the backward recurrence. The neglected tail behaves like
// exp(-(n^2 - l^2) / (2x)) for x large and like (x/2)^n / n! for x small.
int start_order(int l_max, double x) {
  const double big = std::sqrt(static_cast<double>(l_max) * l_max + 80.0 * x);
  return static_cast<int>(std::ceil(big)) + 30;
}

}  // namespace

void bessel_i_scaled_sequence(double x, std::span<double> out) {
  if (out.empty()) return;
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_i_scaled: x must be finite and non-negative");
  }
  if (x == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    return;
  }
  const int l_max = static_cast<int>(out.size()) - 1;
  const int n = start_order(l_max, x);
  const double two_over_x = 2.0 / x;

  std::fill(out.begin(), out.end(), 0.0);
  double above = 0.0;  // b_{k+1}
  double here = 1e-30;  // b_k, k = n
  double sum = 0.0;
  for (int k = n; k >= 1; --k) {
    if (k <= l_max) out[k] = here;
    sum += 2.0 * here;
    const double below = above + k * two_over_x * here;
    above = here;
    here = below;
    if (std::abs(here) > kRescaleAbove) {
      here *= kRescaleBy;
      above *= kRescaleBy;
      sum *= kRescaleBy;
      for (int j = k; j <= l_max; ++j) out[j] *= kRescaleBy;
    }
  }
  out[0] = here;
  sum += here;
  const double inv = 1.0 / sum;
  for (auto& v : out) v *= inv;
}

double bessel_i_scaled(int l, double x) {
  if (l < 0) l = -l;  // I_{-l} = I_l for integer order
  std::vector<double> seq(static_cast<std::size_t>(l) + 1);
  bessel_i_scaled_sequence(x, seq);
  return seq.back();
}

}  // namespace spdc
