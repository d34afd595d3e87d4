#pragma once

#include <cstddef>

#include "spdc/model.hpp"

namespace spdc {

inline constexpr std::size_t kDefaultGridPoints = 512;

/// Equidistant radial grid q_i = (i + 1) * step, i = 0 .. n - 1. The origin
/// is excluded because the Jacobian weight sqrt(q) vanishes there.
class RadialGrid {
 public:
  RadialGrid(std::size_t n, double step);

  static RadialGrid with_extent(std::size_t n, double q_max) {
    return RadialGrid(n, q_max / static_cast<double>(n));
  }

  std::size_t size() const { return n_; }
  double step() const { return step_; }
  double point(std::size_t i) const { return static_cast<double>(i + 1) * step_; }
  double q_max() const { return point(n_ - 1); }

  bool operator==(const RadialGrid& other) const = default;

 private:
  std::size_t n_;
  double step_;
};

/// Outer radius covering the pump envelope and the phase-matching profile.
///
/// Sinc: the diagonal argument 4 h q^2 + phi reaches 20 pi, i.e. the grid
/// holds about twenty emission rings. Gaussian family: the diagonal
/// phase-matching exponent reaches 40. Never below 6 (pump envelope).
double default_q_max(const SpdcParams& params);

RadialGrid default_grid(const SpdcParams& params, std::size_t n = kDefaultGridPoints);

}  // namespace spdc
