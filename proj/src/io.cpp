#include "spdc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace spdc {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_log_pgm(std::ostream& out, const Eigen::MatrixXd& values,
                   const std::string& comment) {
  constexpr double kDecades = 6.0;
  const double peak = values.size() ? values.maxCoeff() : 0.0;
  out << "P5\n# " << comment << '\n' << values.cols() << ' ' << values.rows() << "\n255\n";
  const double top = peak > 0.0 ? std::log10(peak) : 0.0;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double v = values(r, c);
      double level = 0.0;
      if (peak > 0.0 && v > 0.0) {
        level = std::clamp((std::log10(v) - top + kDecades) / kDecades, 0.0, 1.0);
      }
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * level))));
    }
  }
}

}  // namespace spdc
