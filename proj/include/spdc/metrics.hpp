#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "spdc/fit.hpp"
#include "spdc/schmidt.hpp"

namespace spdc {

/// K = 1 / sum lambda^2. Throws ContractError unless sum lambda = 1.
double schmidt_number(const SchmidtSpectrum& spectrum);

/// OAM distribution P_l = sum_p lambda_{l,p}.
struct SpiralSpectrum {
  std::map<int, double> probabilities;

  double at(int l) const;
  double total() const;
};

SpiralSpectrum spiral_spectrum(const SchmidtSpectrum& spectrum);

/// K_az = 1 / sum P_l^2.
double azimuthal_schmidt_number(const SpiralSpectrum& spiral);

/// <l^4> / <l^2>^2 - 3 of the (zero-mean) OAM distribution.
double excess_kurtosis(const SpiralSpectrum& spiral);

/// Closed-form Gaussian law (b sigma + 1 / b sigma)^2 / 4.
double gaussian_schmidt_number(double b_sigma);

/// beta / 4 (1 / (b sigma alpha) + b sigma alpha)^2.
double rescaled_schmidt_number(double b_sigma, double alpha, double beta);

/// Width-matching rescale: alpha such that exp(-alpha^2 u) and `profile`
/// (the sinc by default) fall to 1/e of their peak amplitude at the same u.
double alpha_from_1e_criterion();
double alpha_from_1e_criterion(const std::function<double(double)>& profile);

/// Transverse coherence width sqrt(L lambda0 / (pi n)), SI units.
double coherence_width(double crystal_length, double emission_wavelength,
                       double refractive_index);
/// (w_p / w_coh)^2.
double etendue_schmidt_estimate(double pump_waist, double coherence);
/// w_p / w_coh.
double one_dimensional_schmidt_number(double pump_waist, double coherence);
/// Geometric mean sqrt(w_p w_coh).
double schmidt_waist(double pump_waist, double coherence);

/// exp(-(2p + |l|) / K_1D), the unnormalized amplitude sqrt(lambda).
double gaussian_modal_weight(int l, int p, double k_1d);
/// Normalized weight lambda = (1 - t)^2 t^(2p + |l|), t = exp(-2 / K_1D);
/// summed over all (l, p) it is exactly one.
double gaussian_modal_probability(int l, int p, double k_1d);

/// V = sum_l P_l cos(l dtheta).
double hom_visibility(const SpiralSpectrum& spiral, double dtheta);

/// Detector profile u_d(q_i) with sum u_d^2 q s = 1.
struct DetectorMode {
  RadialGrid grid{2, 1.0};
  Eigen::VectorXd profile;
};

/// u_d proportional to exp(-q^2 / q_d^2).
DetectorMode gaussian_detector(const RadialGrid& grid, double q_d);

/// |sum u_{l,p} u_d q s|^2 with u = phi / sqrt(q). Throws ContractError for
/// unnormalized inputs and ShapeError for mismatched grids.
double projection_coefficient(const RadialMode& mode, const RadialGrid& grid,
                              const DetectorMode& detector);

/// sum_{l,p} C_{l,p} sqrt(lambda_{l,p}) exp(i l dtheta) over all retained
/// modes; requires a decomposition that kept its modes.
std::complex<double> projected_amplitude(const Decomposition& decomposition,
                                         const DetectorMode& detector, double dtheta);

/// K, K_az, captured mass, the P_l table, visibility samples and the
/// optional fit.
nlohmann::ordered_json metrics_report(const Decomposition& decomposition,
                                      const std::vector<double>& angles,
                                      const std::optional<RescalingFit>& fit = std::nullopt);

nlohmann::ordered_json to_json(const RescalingFit& fit);

}  // namespace spdc
