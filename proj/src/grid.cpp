#include "spdc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>

#include "spdc/error.hpp"

namespace spdc {

namespace {

constexpr double kPumpExtent = 6.0;
constexpr double kSincArgumentEdge = 20.0 * std::numbers::pi;
constexpr double kGaussianExponentEdge = 40.0;

}  // namespace

RadialGrid::RadialGrid(std::size_t n, double step) : n_(n), step_(step) {
  if (n < 2) throw DomainError("radial grid needs at least two points");
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("radial step must be positive");
}

double default_q_max(const SpdcParams& params) {
  params.validate();
  const double four_h = 4.0 * params.phase_coefficient();
  double diagonal_u = 0.0;  // value of 4 h q^2 at the edge
  if (is_sinc(params.kind)) {
    diagonal_u = std::max(kSincArgumentEdge - params.phi, 0.5 * kSincArgumentEdge);
  } else if (std::holds_alternative<GaussianMatching>(params.kind)) {
    diagonal_u = kGaussianExponentEdge;
  } else if (const auto* r = std::get_if<RescaledGaussianMatching>(&params.kind)) {
    diagonal_u = kGaussianExponentEdge / (r->alpha * r->alpha);
  } else {
    const auto& sg = std::get<SupergaussianMatching>(params.kind);
    diagonal_u = std::sqrt(kGaussianExponentEdge / sg.c);
  }
  return std::max(kPumpExtent, std::sqrt(diagonal_u / four_h));
}

RadialGrid default_grid(const SpdcParams& params, std::size_t n) {
  return RadialGrid::with_extent(n, default_q_max(params));
}

}  // namespace spdc
