#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "spdc/schmidt.hpp"

namespace spdc {

/// lambda_{l,p} as a (2 l_max + 1) x P matrix, rows l = -l_max .. l_max.
Eigen::MatrixXd spectrum_matrix(const SchmidtSpectrum& spectrum);

void write_spectrum_csv(std::ostream& out, const SchmidtSpectrum& spectrum);
void write_spectrum_pgm(std::ostream& out, const SchmidtSpectrum& spectrum);

/// Spectrum index: parameters, normalization and per-l weights. When
/// mode_dir is non-empty each entry names its mode file.
nlohmann::ordered_json spectrum_json(const SchmidtSpectrum& spectrum,
                                     const std::string& mode_dir = {});

/// File name of the mode table for |l|.
std::string mode_file_name(int l);

/// Columns q, phi_0 .. phi_{count-1} (all retained modes if count < 0).
void write_mode_csv(std::ostream& out, const RadialDecomposition& radial, int count = -1);

/// One mode_file_name(l) per computed l >= 0 inside dir (created if missing).
void write_mode_store(const std::filesystem::path& dir, const Decomposition& decomposition,
                      int count = -1);

}  // namespace spdc
