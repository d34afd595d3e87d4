#include "spdc/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "spdc/error.hpp"

namespace spdc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_positive(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DomainError("cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

bool is_sinc(const PhaseMatching& kind) {
  return std::holds_alternative<SincMatching>(kind);
}

std::string to_string(const PhaseMatching& kind) {
  return std::visit(
      Overloaded{
          [](const SincMatching&) { return std::string("sinc"); },
          [](const GaussianMatching&) { return std::string("gauss"); },
          [](const RescaledGaussianMatching& k) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "rescaled:%.17g", k.alpha);
            return std::string(buf);
          },
          [](const SupergaussianMatching& k) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "supergauss:%.17g", k.c);
            return std::string(buf);
          },
      },
      kind);
}

PhaseMatching parse_phase_matching(std::string_view text) {
  if (text == "sinc") return SincMatching{};
  if (text == "gauss" || text == "gaussian") return GaussianMatching{};
  auto colon = text.find(':');
  auto head = text.substr(0, colon);
  if (head == "supergauss" || head == "supergaussian") {
    if (colon == std::string_view::npos) return SupergaussianMatching{};
    return SupergaussianMatching{parse_positive(text.substr(colon + 1))};
  }
  if (head == "rescaled" && colon != std::string_view::npos) {
    return RescaledGaussianMatching{parse_positive(text.substr(colon + 1))};
  }
  throw DomainError("unknown phase-matching kind '" + std::string(text) + "'");
}

void SpdcParams::validate() const {
  if (!(b_sigma > 0.0) || !std::isfinite(b_sigma)) {
    throw DomainError("b_sigma must be positive and finite");
  }
  if (!std::isfinite(phi)) throw DomainError("phi must be finite");
  std::visit(Overloaded{
                 [](const SincMatching&) {},
                 [this](const GaussianMatching&) {
                   if (phi != 0.0) {
                     throw DomainError("Gaussian phase matching is defined only for phi = 0");
                   }
                 },
                 [this](const RescaledGaussianMatching& k) {
                   if (!(k.alpha > 0.0)) throw DomainError("rescaled alpha must be positive");
                   if (phi != 0.0) {
                     throw DomainError("Gaussian phase matching is defined only for phi = 0");
                   }
                 },
                 [this](const SupergaussianMatching& k) {
                   if (!(k.c > 0.0)) throw DomainError("supergaussian c must be positive");
                   if (phi != 0.0) {
                     throw DomainError("Gaussian phase matching is defined only for phi = 0");
                   }
                 },
             },
             kind);
}

void PhysicalParams::validate() const {
  if (!(crystal_length > 0.0) || !(pump_waist > 0.0) || !(pump_wavelength > 0.0) ||
      !(refractive_index > 0.0)) {
    throw DomainError("physical parameters must all be strictly positive");
  }
}

double PhysicalParams::pump_wavenumber() const {
  return 2.0 * std::numbers::pi * refractive_index / pump_wavelength;
}

DimensionlessParams derive_dimensionless(const PhysicalParams& physical) {
  physical.validate();
  const double kp = physical.pump_wavenumber();
  const double bs = std::sqrt(physical.crystal_length /
                              (physical.pump_waist * physical.pump_waist * kp));
  return {bs, 2.0 * bs * bs};
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double phase_matching(const PhaseMatching& kind, double u, double phi) {
  return std::visit(Overloaded{
                        [&](const SincMatching&) { return sinc(u + phi); },
                        [&](const GaussianMatching&) { return std::exp(-u); },
                        [&](const RescaledGaussianMatching& k) {
                          return std::exp(-k.alpha * k.alpha * u);
                        },
                        [&](const SupergaussianMatching& k) { return std::exp(-k.c * u * u); },
                    },
                    kind);
}

double amplitude(const SpdcParams& params, double q1, double q2, double dtheta) {
  if (q1 < 0.0 || q2 < 0.0) throw DomainError("radial momenta must be non-negative");
  // |q1 + q2|^2 = (q1 - q2)^2 + 2 q1 q2 (1 - cos(psi)) with psi = dtheta - pi.
  const double one_minus_cos = 1.0 + std::cos(dtheta);
  return detail::amplitude_back_to_back(params, q1, q2, one_minus_cos);
}

namespace detail {

double amplitude_back_to_back(const SpdcParams& params, double q1, double q2,
                              double one_minus_cos) {
  const double d = q1 - q2;
  const double s = q1 + q2;
  const double cross = 2.0 * q1 * q2 * one_minus_cos;
  const double pump = std::exp(-(d * d + cross));
  const double u = params.phase_coefficient() * std::max(0.0, s * s - cross);
  return pump * phase_matching(params.kind, u, params.phi);
}

}  // namespace detail

}  // namespace spdc
