// spdc_schmidt: Schmidt decomposition of the SPDC two-photon amplitude.
//
//   spdc_schmidt decompose  --b-sigma 0.05 --phi -4 --out run/
//   spdc_schmidt scan       --b-sigmas 0.05,0.1,0.2,0.5,1,2,5 --out scan/
//   spdc_schmidt visibility --b-sigma 0.05 --samples 361 --out vis/
//   spdc_schmidt modes      --b-sigma 0.05 --l 10 --p 0,1,2 --out modes/
//   spdc_schmidt fit        --input scan/scan.csv --out scan/
//
// Exit codes: 0 success, 1 computation failed its accuracy contract,
// 2 invalid input, 3 finished with warnings, 4 output error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/error.hpp"
#include "spdc/fit.hpp"
#include "spdc/io.hpp"
#include "spdc/metrics.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/store.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kInvalid = 2, kWarned = 3, kOutput = 4 };

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<spdc::SpdcParams> params;
  std::optional<spdc::PhysicalParams> physical;
  double phi = 0.0;
  std::string kind = "sinc";
  int grid_n = static_cast<int>(spdc::kDefaultGridPoints);
  std::optional<double> q_max;
  int n_theta = 64;
  int l_max = 2000;
  int p_max = -1;
  std::string kernel = "auto";
  std::string out = ".";
  std::vector<std::string> formats{"csv", "json"};

  spdc::SpdcParams resolved() const {
    if (params.has_value() == physical.has_value()) {
      throw spdc::DomainError("give exactly one of --b-sigma or the physical parameters");
    }
    spdc::SpdcParams p;
    if (params) {
      p = *params;
    } else {
      p.b_sigma = spdc::derive_dimensionless(*physical).b_sigma;
    }
    p.phi = phi;
    p.kind = spdc::parse_phase_matching(kind);
    p.validate();
    return p;
  }

  std::optional<spdc::RadialGrid> grid(const spdc::SpdcParams& p) const {
    if (grid_n < 2) throw spdc::DomainError("--grid-n must be at least 2");
    const double extent = q_max ? *q_max : spdc::default_q_max(p);
    return spdc::RadialGrid::with_extent(static_cast<std::size_t>(grid_n), extent);
  }

  spdc::DecompositionOptions options(bool keep_modes) const {
    spdc::DecompositionOptions o;
    o.path = spdc::parse_kernel_path(kernel);
    o.quadrature.n_theta = n_theta;
    o.l_max = l_max;
    o.p_max = p_max;
    o.keep_modes = keep_modes;
    return o;
  }

  bool wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
  }
};

// Flag values; only the ones given on the command line override the config.
struct Flags {
  std::string config;
  double b_sigma = 0.0, phi = 0.0, q_max = 0.0;
  double crystal_length = 0.0, pump_waist = 0.0, pump_wavelength = 0.0, refractive_index = 0.0;
  std::string kind, kernel, out;
  int grid_n = 0, n_theta = 0, l_max = 0, p_max = 0;
  std::vector<std::string> formats;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_common(CLI::App* app, Flags& f) {
  f.opts["config"] = app->add_option("--config", f.config, "JSON run configuration");
  f.opts["b-sigma"] = app->add_option("--b-sigma", f.b_sigma, "dimensionless b sigma");
  f.opts["phi"] = app->add_option("--phi", f.phi, "collinear phase mismatch");
  f.opts["kind"] = app->add_option("--kind", f.kind, "sinc | gauss | rescaled:ALPHA | supergauss[:C]");
  f.opts["grid-n"] = app->add_option("--grid-n", f.grid_n, "radial grid points");
  f.opts["q-max"] = app->add_option("--q-max", f.q_max, "radial grid extent");
  f.opts["n-theta"] = app->add_option("--n-theta", f.n_theta, "initial azimuthal nodes");
  f.opts["l-max"] = app->add_option("--l-max", f.l_max, "cap on |l|");
  f.opts["p-max"] = app->add_option("--p-max", f.p_max, "cap on radial modes per l");
  f.opts["kernel"] = app->add_option("--kernel", f.kernel, "analytic | quadrature | auto");
  f.opts["out"] = app->add_option("--out", f.out, "output directory");
  f.opts["format"] = app->add_option("--format", f.formats, "csv, json, pgm")->delimiter(',');
  f.opts["crystal-length"] = app->add_option("--crystal-length", f.crystal_length, "L [m]");
  f.opts["pump-waist"] = app->add_option("--pump-waist", f.pump_waist, "w_p [m]");
  f.opts["pump-wavelength"] = app->add_option("--pump-wavelength", f.pump_wavelength, "lambda_p [m]");
  f.opts["refractive-index"] = app->add_option("--refractive-index", f.refractive_index, "n");
}

RunConfig load_config(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw spdc::DomainError("cannot read config " + f.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw spdc::DomainError(std::string("bad config: ") + e.what());
    }
    if (j.contains("b_sigma")) c.params = spdc::SpdcParams{j.at("b_sigma").get<double>()};
    if (j.contains("physical")) {
      const auto& p = j.at("physical");
      c.physical = spdc::PhysicalParams{p.at("crystal_length").get<double>(),
                                        p.at("pump_waist").get<double>(),
                                        p.at("pump_wavelength").get<double>(),
                                        p.at("refractive_index").get<double>()};
    }
    c.phi = j.value("phi", c.phi);
    c.kind = j.value("kind", c.kind);
    c.grid_n = j.value("grid_n", c.grid_n);
    if (j.contains("q_max")) c.q_max = j.at("q_max").get<double>();
    c.n_theta = j.value("n_theta", c.n_theta);
    c.l_max = j.value("l_max", c.l_max);
    c.p_max = j.value("p_max", c.p_max);
    c.kernel = j.value("kernel", c.kernel);
    c.out = j.value("out", c.out);
    if (j.contains("format")) c.formats = j.at("format").get<std::vector<std::string>>();
  }
  if (f.given("b-sigma")) {
    c.params = spdc::SpdcParams{f.b_sigma};
    c.physical.reset();
  }
  const bool physical_flag = f.given("crystal-length") || f.given("pump-waist") ||
                             f.given("pump-wavelength") || f.given("refractive-index");
  if (physical_flag) {
    if (f.given("b-sigma")) {
      throw spdc::DomainError("--b-sigma conflicts with the physical parameters");
    }
    spdc::PhysicalParams p = c.physical.value_or(spdc::PhysicalParams{});
    if (f.given("crystal-length")) p.crystal_length = f.crystal_length;
    if (f.given("pump-waist")) p.pump_waist = f.pump_waist;
    if (f.given("pump-wavelength")) p.pump_wavelength = f.pump_wavelength;
    if (f.given("refractive-index")) p.refractive_index = f.refractive_index;
    p.validate();
    c.physical = p;
    c.params.reset();
  }
  if (f.given("phi")) c.phi = f.phi;
  if (f.given("kind")) c.kind = f.kind;
  if (f.given("grid-n")) c.grid_n = f.grid_n;
  if (f.given("q-max")) c.q_max = f.q_max;
  if (f.given("n-theta")) c.n_theta = f.n_theta;
  if (f.given("l-max")) c.l_max = f.l_max;
  if (f.given("p-max")) c.p_max = f.p_max;
  if (f.given("kernel")) c.kernel = f.kernel;
  if (f.given("out")) c.out = f.out;
  if (f.given("format")) c.formats = f.formats;
  for (const auto& fmt : c.formats) {
    if (fmt != "csv" && fmt != "json" && fmt != "pgm") {
      throw spdc::DomainError("unknown format '" + fmt + "'");
    }
  }
  return c;
}

fs::path prepare_out(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory " + c.out);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw spdc::DomainError("bad number '" + item + "'");
    v.push_back(x);
  }
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report_warnings(const std::vector<std::string>& warnings, int& code) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  if (!warnings.empty() && code == kOk) code = kWarned;
}

std::vector<double> default_angles(int samples) {
  std::vector<double> a(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) a[i] = 2.0 * std::numbers::pi * i / samples;
  return a;
}

int run_decompose(const RunConfig& c, int mode_columns, int angle_samples) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto params = c.resolved();
  const bool csv = c.wants("csv");
  const auto d = spdc::full_decomposition(params, c.grid(params), c.options(csv));
  const fs::path dir = prepare_out(c);

  auto summary = spdc::metrics_report(d, default_angles(angle_samples));
  write_json(dir / "summary.json", summary);
  if (c.wants("json")) write_json(dir / "spectrum.json", spdc::spectrum_json(d.spectrum, csv ? "modes" : ""));
  if (csv) {
    auto out = open_out(dir / "spectrum.csv");
    spdc::write_spectrum_csv(out, d.spectrum);
    spdc::write_mode_store(dir / "modes", d, mode_columns);
  }
  if (c.wants("pgm")) {
    auto out = open_out(dir / "spectrum.pgm");
    spdc::write_spectrum_pgm(out, d.spectrum);
  }
  const double elapsed = seconds_since(t0);
  write_json(dir / "timing.json", ordered_json{{"wall_time_s", elapsed}});
  std::printf("K=%s K_az=%s captured_mass=%s l_max=%d wall_time=%.2fs\n",
              spdc::format_double(summary["K"].get<double>()).c_str(),
              spdc::format_double(summary["K_az"].get<double>()).c_str(),
              spdc::format_double(d.spectrum.captured_mass).c_str(), d.spectrum.l_max, elapsed);
  int code = kOk;
  report_warnings(d.spectrum.warnings, code);
  return code;
}

int run_scan(const RunConfig& c, const std::string& list) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> bs = parse_list(list);
  if (bs.empty()) throw spdc::DomainError("--b-sigmas is empty");
  if (!std::is_sorted(bs.begin(), bs.end())) throw spdc::DomainError("--b-sigmas must be ascending");
  const fs::path dir = prepare_out(c);
  auto out = open_out(dir / "scan.csv");
  out << "b_sigma,K,K_az,captured_mass,kernel,status\n";

  int code = kOk;
  std::vector<spdc::ScanSample> samples;
  for (double b : bs) {
    RunConfig one = c;
    one.params = spdc::SpdcParams{b};
    one.physical.reset();
    try {
      const auto params = one.resolved();
      const auto d = spdc::full_decomposition(params, one.grid(params), one.options(false));
      const double k = spdc::schmidt_number(d.spectrum);
      const double kaz = spdc::azimuthal_schmidt_number(spdc::spiral_spectrum(d.spectrum));
      out << spdc::format_double(b) << ',' << spdc::format_double(k) << ','
          << spdc::format_double(kaz) << ',' << spdc::format_double(d.spectrum.captured_mass)
          << ',' << spdc::to_string(d.spectrum.path) << ','
          << (d.spectrum.warnings.empty() ? "ok" : "warning") << '\n';
      samples.push_back({b, k});
      std::fprintf(stderr, "b_sigma=%g K=%.6g K_az=%.6g\n", b, k, kaz);
      report_warnings(d.spectrum.warnings, code);
    } catch (const spdc::Error& e) {
      out << spdc::format_double(b) << ",,,,," << "error" << '\n';
      std::cerr << "error at b_sigma=" << b << ": " << e.what() << '\n';
      code = kFailed;
    }
  }

  if (samples.size() >= 4) {
    try {
      const auto fit = spdc::fit_rescaling(samples);
      auto j = spdc::to_json(fit);
      j["K_min_b_sigma"] = spdc::interpolated_minimum(samples);
      write_json(dir / "fit.json", j);
      std::printf("alpha=%s beta=%s\n", spdc::format_double(fit.alpha).c_str(),
                  spdc::format_double(fit.beta).c_str());
    } catch (const spdc::DomainError& e) {
      std::cerr << "no fit: " << e.what() << '\n';
    } catch (const spdc::FitError& e) {
      std::cerr << "fit failed: " << e.what() << '\n';
      code = kFailed;
    }
  }
  write_json(dir / "timing.json", ordered_json{{"wall_time_s", seconds_since(t0)}});
  return code;
}

int run_visibility(const RunConfig& c, const std::string& angles_text, int samples) {
  std::vector<double> angles = angles_text.empty() ? default_angles(samples) : parse_list(angles_text);
  const double two_pi = 2.0 * std::numbers::pi;
  for (double& a : angles) {
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
  }
  const auto params = c.resolved();
  const auto d = spdc::full_decomposition(params, c.grid(params), c.options(false));
  const auto spiral = spdc::spiral_spectrum(d.spectrum);
  const fs::path dir = prepare_out(c);
  auto out = open_out(dir / "visibility.csv");
  out << "# K_az=" << spdc::format_double(spdc::azimuthal_schmidt_number(spiral)) << '\n';
  out << "dtheta,V\n";
  for (double a : angles) {
    out << spdc::format_double(a) << ',' << spdc::format_double(spdc::hom_visibility(spiral, a))
        << '\n';
  }
  int code = kOk;
  report_warnings(d.spectrum.warnings, code);
  return code;
}

int run_modes(const RunConfig& c, int l, const std::string& p_text) {
  std::vector<int> ps;
  for (double x : parse_list(p_text)) {
    if (x < 0 || x != std::floor(x)) throw spdc::DomainError("--p entries must be integers >= 0");
    ps.push_back(static_cast<int>(x));
  }
  const auto params = c.resolved();
  auto opts = c.options(true);
  opts.l_max = std::max(opts.l_max, std::abs(l));
  const auto d = spdc::full_decomposition(params, c.grid(params), opts);
  std::vector<const spdc::RadialMode*> modes;
  for (int p : ps) modes.push_back(&d.mode(l, p));

  const auto& grid = d.spectrum.grid;
  std::string rings, energies;
  if (spdc::is_sinc(params.kind)) {
    for (const auto* m : modes) {
      const auto r = spdc::ring_assignment(*m, grid, params);
      rings += (rings.empty() ? "" : " ") + std::to_string(r.ring);
      energies += (energies.empty() ? "" : " ") + spdc::format_double(r.energy_fraction);
    }
  }
  const fs::path dir = prepare_out(c);
  auto out = open_out(dir / ("modes_l" + std::to_string(l) + ".csv"));
  out << "# l=" << l << " p=" << p_text;
  if (!rings.empty()) out << " rings=" << rings << " ring_energy=" << energies;
  out << '\n' << "q";
  for (int p : ps) out << ",intensity_" << p << ",phi_" << p;
  out << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << spdc::format_double(grid.point(i));
    for (const auto* m : modes) {
      const double v = m->samples[static_cast<Eigen::Index>(i)];
      out << ',' << spdc::format_double(v * v) << ',' << spdc::format_double(v);
    }
    out << '\n';
  }
  int code = kOk;
  report_warnings(d.spectrum.warnings, code);
  return code;
}

std::vector<spdc::ScanSample> read_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spdc::DomainError("cannot read " + path);
  std::vector<spdc::ScanSample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("b_sigma", 0) == 0) continue;
    std::stringstream ss(line);
    std::string b, k;
    std::getline(ss, b, ',');
    std::getline(ss, k, ',');
    if (k.empty()) continue;  // failed scan row
    samples.push_back({std::stod(b), std::stod(k)});
  }
  return samples;
}

int run_fit(const RunConfig& c, const std::string& input, const std::string& pairs) {
  std::vector<spdc::ScanSample> samples;
  if (!input.empty()) samples = read_scan_csv(input);
  if (!pairs.empty()) {
    const auto v = parse_list(pairs);
    if (v.size() % 2) throw spdc::DomainError("--samples needs b_sigma,K pairs");
    for (std::size_t i = 0; i < v.size(); i += 2) samples.push_back({v[i], v[i + 1]});
  }
  const auto fit = spdc::fit_rescaling(samples);
  const fs::path dir = prepare_out(c);
  auto j = spdc::to_json(fit);
  j["alpha_1e"] = spdc::alpha_from_1e_criterion();
  write_json(dir / "fit.json", j);
  std::printf("%s\n", j.dump().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schmidt decomposition of the SPDC two-photon amplitude"};
  app.require_subcommand(1);

  Flags fd, fs_, fv, fm, ff;
  auto* dec = app.add_subcommand("decompose", "spectrum, K, K_az and the mode store");
  add_common(dec, fd);
  int mode_columns = 8, dec_angles = 361;
  dec->add_option("--mode-columns", mode_columns, "modes per l written to the mode store (-1 = all)");
  dec->add_option("--angles", dec_angles, "visibility samples in the summary");

  auto* scan = app.add_subcommand("scan", "K and K_az over a b sigma list, plus the rescaling fit");
  add_common(scan, fs_);
  std::string b_list;
  scan->add_option("--b-sigmas", b_list, "ascending comma-separated list")->required();

  auto* vis = app.add_subcommand("visibility", "HOM visibility curve");
  add_common(vis, fv);
  std::string angle_list;
  int angle_samples = 361;
  vis->add_option("--angle-list", angle_list, "comma-separated angles [rad]");
  vis->add_option("--samples", angle_samples, "uniform samples on [0, 2 pi)")->check(CLI::PositiveNumber);

  auto* modes = app.add_subcommand("modes", "radial mode profiles for one l");
  add_common(modes, fm);
  int mode_l = 0;
  std::string p_list = "0,1,2";
  modes->add_option("--l", mode_l, "OAM index");
  modes->add_option("--p", p_list, "comma-separated radial indices");

  auto* fit = app.add_subcommand("fit", "rescaling fit of K(b sigma) samples");
  add_common(fit, ff);
  std::string fit_input, fit_pairs;
  fit->add_option("--input", fit_input, "scan.csv from the scan command");
  fit->add_option("--samples", fit_pairs, "b_sigma,K,b_sigma,K,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (dec->parsed()) return run_decompose(load_config(fd), mode_columns, dec_angles);
    if (scan->parsed()) return run_scan(load_config(fs_), b_list);
    if (vis->parsed()) return run_visibility(load_config(fv), angle_list, angle_samples);
    if (modes->parsed()) return run_modes(load_config(fm), mode_l, p_list);
    if (fit->parsed()) return run_fit(load_config(ff), fit_input, fit_pairs);
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOutput;
  } catch (const spdc::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const spdc::UnsupportedKindError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const spdc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kInvalid;
}
