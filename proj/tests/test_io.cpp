#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "spdc/io.hpp"
#include "spdc/store.hpp"

using namespace spdc;

TEST_CASE("doubles round-trip through text") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng) * std::pow(10.0, i % 40 - 20);
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("matrix csv and pgm") {
  Eigen::MatrixXd m(2, 3);
  m << 1.0, 0.0, 1e-3, 1e-7, 0.25, 1.0;
  std::ostringstream csv;
  write_matrix_csv(csv, m);
  CHECK(csv.str() == "1,0,0.001\n9.9999999999999995e-08,0.25,1\n");
  std::ostringstream pgm;
  write_log_pgm(pgm, m, "x");
  const std::string s = pgm.str();
  const std::string header = "P5\n# x\n3 2\n255\n";
  REQUIRE(s.size() == header.size() + 6);
  CHECK(static_cast<unsigned char>(s[header.size()]) == 255);
  CHECK(static_cast<unsigned char>(s[header.size() + 1]) == 0);
  CHECK(static_cast<unsigned char>(s[header.size() + 2]) == 128);  // three of six decades
  CHECK(static_cast<unsigned char>(s[header.size() + 3]) == 0);    // clipped below six decades
}

TEST_CASE("spectrum and mode store") {
  const SpdcParams p{0.2, 0.0};
  const auto d = full_decomposition(p, default_grid(p, 64));
  const auto m = spectrum_matrix(d.spectrum);
  CHECK(m.rows() == 2 * d.spectrum.l_max + 1);
  CHECK(m.sum() == doctest::Approx(1.0));
  const auto j = spectrum_json(d.spectrum, "modes");
  CHECK(j["spectrum"].size() == static_cast<std::size_t>(m.rows()));
  CHECK(j["spectrum"][0]["l"].get<int>() == -d.spectrum.l_max);
  CHECK(j["spectrum"][0]["modes"].get<std::string>() == "modes/" + mode_file_name(d.spectrum.l_max));

  const auto dir = std::filesystem::temp_directory_path() / "spdc_store_test";
  std::filesystem::remove_all(dir);
  write_mode_store(dir, d, 3);
  std::ifstream in(dir / "modes_l0.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "q,phi_0,phi_1,phi_2");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 64);
  CHECK(std::filesystem::exists(dir / mode_file_name(d.spectrum.l_max)));
  std::filesystem::remove_all(dir);
}
