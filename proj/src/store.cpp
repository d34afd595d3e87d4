#include "spdc/store.hpp"

#include <fstream>
#include <ostream>

#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc {

Eigen::MatrixXd spectrum_matrix(const SchmidtSpectrum& spectrum) {
  std::size_t cols = 0;
  for (const auto& [l, w] : spectrum.weights) cols = std::max(cols, w.size());
  const int rows = 2 * spectrum.l_max + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(cols));
  for (const auto& [l, w] : spectrum.weights) {
    for (std::size_t p = 0; p < w.size(); ++p) {
      m(l + spectrum.l_max, static_cast<Eigen::Index>(p)) = w[p];
    }
  }
  return m;
}

void write_spectrum_csv(std::ostream& out, const SchmidtSpectrum& spectrum) {
  const Eigen::MatrixXd m = spectrum_matrix(spectrum);
  out << "# rows l=" << -spectrum.l_max << ".." << spectrum.l_max << ", columns p=0.."
      << m.cols() - 1 << '\n';
  write_matrix_csv(out, m);
}

void write_spectrum_pgm(std::ostream& out, const SchmidtSpectrum& spectrum) {
  write_log_pgm(out, spectrum_matrix(spectrum),
                "lambda rows l=" + std::to_string(-spectrum.l_max) + ".." +
                    std::to_string(spectrum.l_max));
}

std::string mode_file_name(int l) { return "modes_l" + std::to_string(std::abs(l)) + ".csv"; }

nlohmann::ordered_json spectrum_json(const SchmidtSpectrum& spectrum, const std::string& mode_dir) {
  nlohmann::ordered_json j;
  j["b_sigma"] = spectrum.params.b_sigma;
  j["phi"] = spectrum.params.phi;
  j["kind"] = to_string(spectrum.params.kind);
  j["kernel"] = to_string(spectrum.path);
  j["grid_n"] = spectrum.grid.size();
  j["grid_step"] = spectrum.grid.step();
  j["l_max"] = spectrum.l_max;
  j["normalization"] = spectrum.normalization;
  j["captured_mass"] = spectrum.captured_mass;
  auto list = nlohmann::ordered_json::array();
  for (const auto& [l, w] : spectrum.weights) {
    nlohmann::ordered_json e;
    e["l"] = l;
    e["weights"] = w;
    if (!mode_dir.empty()) e["modes"] = mode_dir + "/" + mode_file_name(l);
    list.push_back(std::move(e));
  }
  j["spectrum"] = std::move(list);
  return j;
}

void write_mode_csv(std::ostream& out, const RadialDecomposition& radial, int count) {
  const std::size_t n = count < 0 ? radial.modes.size()
                                  : std::min(radial.modes.size(), static_cast<std::size_t>(count));
  out << "q";
  for (std::size_t p = 0; p < n; ++p) out << ",phi_" << p;
  out << '\n';
  for (std::size_t i = 0; i < radial.grid.size(); ++i) {
    out << format_double(radial.grid.point(i));
    for (std::size_t p = 0; p < n; ++p) {
      out << ',' << format_double(radial.modes[p].samples[static_cast<Eigen::Index>(i)]);
    }
    out << '\n';
  }
}

void write_mode_store(const std::filesystem::path& dir, const Decomposition& decomposition,
                      int count) {
  std::filesystem::create_directories(dir);
  for (const auto& [l, radial] : decomposition.radial) {
    const auto path = dir / mode_file_name(l);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_mode_csv(out, radial, count);
  }
}

}  // namespace spdc
