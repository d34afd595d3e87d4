#pragma once

// Dimensionless model of the collinear, frequency-degenerate two-photon
// amplitude generated by a Gaussian pump.
//
// Transverse momenta are measured in units of sigma = 2 / w_p, so the pump
// envelope reads exp(-|q1 + q2|^2) and the phase-matching argument is
// (b sigma)^2 |q1 - q2|^2.

#include <string>
#include <string_view>
#include <variant>

namespace spdc {

inline constexpr double kSupergaussianDefault = 0.193;

struct SincMatching {};
struct GaussianMatching {};
struct RescaledGaussianMatching {
  double alpha = 1.0;
};
struct SupergaussianMatching {
  double c = kSupergaussianDefault;
};

using PhaseMatching = std::variant<SincMatching, GaussianMatching,
                                   RescaledGaussianMatching, SupergaussianMatching>;

bool is_sinc(const PhaseMatching& kind);

/// "sinc", "gauss", "rescaled:ALPHA" or "supergauss:C".
std::string to_string(const PhaseMatching& kind);
PhaseMatching parse_phase_matching(std::string_view text);

struct SpdcParams {
  double b_sigma = 0.05;
  double phi = 0.0;
  PhaseMatching kind = SincMatching{};

  /// Throws DomainError on b_sigma <= 0, non-positive alpha / c, or a
  /// Gaussian-family kind combined with a non-zero mismatch.
  void validate() const;

  /// Coefficient h of |q1 - q2|^2 in the phase-matching argument.
  double phase_coefficient() const { return b_sigma * b_sigma; }

  /// Crystal length over pump Rayleigh range, 2 (b sigma)^2.
  double l_r() const { return 2.0 * b_sigma * b_sigma; }
};

/// Crystal and pump in SI units.
struct PhysicalParams {
  double crystal_length = 0.0;
  double pump_waist = 0.0;
  double pump_wavelength = 0.0;
  double refractive_index = 0.0;

  void validate() const;
  /// k_p = 2 pi n / lambda_p.
  double pump_wavenumber() const;
  /// Degenerate emission wavelength in vacuum, 2 lambda_p.
  double emission_wavelength() const { return 2.0 * pump_wavelength; }
};

struct DimensionlessParams {
  double b_sigma = 0.0;
  double l_r = 0.0;
};

DimensionlessParams derive_dimensionless(const PhysicalParams& physical);

/// Unnormalized sin(x) / x.
double sinc(double x);

/// Phase-matching factor as a function of u = h |q1 - q2|^2 (u >= 0).
/// Gaussian-family kinds ignore phi.
double phase_matching(const PhaseMatching& kind, double u, double phi);

/// Two-photon amplitude at radial momenta q1, q2 and relative azimuth
/// dtheta = theta1 - theta2.
double amplitude(const SpdcParams& params, double q1, double q2, double dtheta);

namespace detail {

/// Amplitude with the azimuth measured from the back-to-back configuration,
/// taking one_minus_cos = 1 - cos(psi) so that the pump exponent stays
/// accurate close to psi = 0.
double amplitude_back_to_back(const SpdcParams& params, double q1, double q2,
                              double one_minus_cos);

}  // namespace detail

}  // namespace spdc
