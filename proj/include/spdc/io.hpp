#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

namespace spdc {

/// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double x);

/// Row-major CSV, one matrix row per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

/// Binary 8-bit PGM of log10 of the (non-negative) values, mapping six
/// decades below the maximum onto 0..255. Zero and smaller values map to 0.
void write_log_pgm(std::ostream& out, const Eigen::MatrixXd& values,
                   const std::string& comment);

}  // namespace spdc
