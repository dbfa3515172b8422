// Command-line driver: tomography experiments, routing-table inspection of
// the named circuits, and the cascade-vs-SLM component scaling study.
#include <CLI11.hpp>

#include <cinttypes>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "oam/circuits.hpp"
#include "oam/io.hpp"
#include "oam/tomography.hpp"

namespace fs = std::filesystem;
using namespace oam;

namespace {

constexpr double kPi = std::numbers::pi;

// Accepts "pi", "pi/2", "3pi/4", "2pi", "-pi/8" and plain decimals.
double parse_angle(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw CLI::ValidationError("angle", "empty angle");
  double sign = 1.0;
  if (s[0] == '-') {
    sign = -1.0;
    s = s.substr(1);
  }
  size_t pi_pos = s.find("pi");
  if (pi_pos == std::string::npos) {
    try {
      return sign * std::stod(s);
    } catch (const std::exception&) {
      throw CLI::ValidationError("angle", "cannot parse '" + text + "'");
    }
  }
  double numerator = 1.0;
  if (pi_pos > 0) numerator = std::stod(s.substr(0, pi_pos));
  double denominator = 1.0;
  std::string rest = s.substr(pi_pos + 2);
  if (!rest.empty()) {
    if (rest[0] != '/') throw CLI::ValidationError("angle", "cannot parse '" + text + "'");
    denominator = std::stod(rest.substr(1));
  }
  return sign * numerator * kPi / denominator;
}

std::string format_amplitude(Complex a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.9f%+.9fi", a.real(), a.imag());
  return buf;
}

struct RoutingOptions {
  std::string circuit;
  std::string alpha = "pi/2";
  std::string beta = "pi/2";
  std::string theta = "pi";
  int lmax = 4;
  int pmax = 1;
  std::string even = "slm";
  int stages = 0;  // 0 = auto
  int in_path = 0;
  bool check = false;
  bool csv = false;
};

const std::vector<std::string> kCircuitNames = {
    "oam-sorter", "radial", "hs", "hs-odd", "hs-even-slm", "hs-even-cascade",
    "fhs",        "hx",     "phase", "hy"};

Circuit build_named_circuit(const RoutingOptions& opt) {
  const double alpha = parse_angle(opt.alpha);
  const double beta = parse_angle(opt.beta);
  const double theta = parse_angle(opt.theta);
  std::optional<int> stages;
  if (opt.stages > 0) stages = opt.stages;
  const FhsVariant variant = opt.even == "cascade" ? FhsVariant::Cascade : FhsVariant::Slm;
  if (opt.circuit == "oam-sorter") return oam_sorter(beta, make_basis(opt.lmax));
  if (opt.circuit == "radial")
    return radial_mode_sorter(alpha, BasisSpec::contiguous(-opt.lmax, opt.lmax, opt.pmax));
  if (opt.circuit == "hs") return partial_helicity_sorter(alpha, make_basis(opt.lmax));
  if (opt.circuit == "hs-odd") return hs_odd(make_basis(opt.lmax));
  if (opt.circuit == "hs-even-slm") return hs_even_slm(BasisSpec::even_only(opt.lmax));
  if (opt.circuit == "hs-even-cascade") {
    int n = stages.value_or(0);
    if (n == 0)
      for (n = 2; (1 << n) <= opt.lmax; ++n) {}
    return hs_even_cascade(n, BasisSpec::even_only(opt.lmax));
  }
  if (opt.circuit == "fhs") return full_helicity_sorter(make_basis(opt.lmax), variant, stages);
  if (opt.circuit == "hx") return gate_hx(make_basis(opt.lmax), stages);
  if (opt.circuit == "phase") return gate_phase(theta, make_basis(opt.lmax), stages);
  if (opt.circuit == "hy") return gate_hy(make_basis(opt.lmax), stages);
  std::string names;
  for (const std::string& n : kCircuitNames) names += (names.empty() ? "" : ", ") + n;
  throw CLI::ValidationError("circuit", "unknown circuit '" + opt.circuit +
                                            "'; valid names: " + names);
}

// Returns the number of violated invariants.
int check_circuit(const Circuit& c, const RoutingOptions& opt) {
  int violations = 0;
  auto fail = [&](const std::string& msg) {
    std::cerr << "CHECK FAILED: " << msg << "\n";
    ++violations;
  };
  if (!c.is_isometry(1e-10)) fail("composed matrix is not an isometry within 1e-10");

  PortRoutingTable table = routing_table(c);
  auto port_of = [&](ModeIndex m) -> std::pair<int, double> {
    const RoutingRow& row = table.row(opt.in_path, m);
    int best_path = -1;
    double best = 0.0;
    for (const RoutingTarget& t : row.targets) {
      if (std::abs(t.amplitude) > best) {
        best = std::abs(t.amplitude);
        best_path = t.out_path;
      }
    }
    return {best_path, best};
  };

  if (opt.circuit == "hs" || opt.circuit == "hs-odd") {
    const int port_b = c.port("b");
    for (const ModeIndex& m : c.input_basis().modes()) {
      if (m.ell >= 0) continue;
      const RoutingRow& row = table.row(0, m);
      for (const RoutingTarget& t : row.targets)
        if (t.out_path == port_b && std::abs(t.amplitude) > 1e-12)
          fail("negative mode " + to_string(m) + " leaks into port b");
    }
  }
  if (opt.circuit == "fhs" || opt.circuit == "hs-even-slm" ||
      opt.circuit == "hs-even-cascade") {
    for (const ModeIndex& m : c.input_basis().modes()) {
      if (m.ell == 0) continue;
      const RoutingRow& row = table.row(0, m);
      if (row.targets.size() != 1) {
        fail("mode " + to_string(m) + " exits through multiple ports");
        continue;
      }
      auto [path, mag] = port_of(m);
      const int want = m.ell > 0 ? c.port("+") : c.port("-");
      if (path != want) fail("mode " + to_string(m) + " exits the wrong port");
      if (std::abs(mag - 1.0) > 1e-12)
        fail("mode " + to_string(m) + " has non-unit amplitude");
    }
  }
  if (opt.circuit == "hx" || opt.circuit == "hy" || opt.circuit == "phase") {
    const int n = c.input_basis().dim() / 2;
    Matrix want = opt.circuit == "hx"
                      ? hx_block_matrix(n)
                      : (opt.circuit == "hy" ? hy_block_matrix(n)
                                             : phase_block_matrix(parse_angle(opt.theta), n));
    if ((c.port_unitary(0, 0) - want).cwiseAbs().maxCoeff() > 1e-10)
      fail("gate block deviates from the ideal matrix");
  }
  if (opt.circuit == "oam-sorter" && std::abs(parse_angle(opt.beta) - kPi / 2) < 1e-12) {
    for (const ModeIndex& m : c.input_basis().modes()) {
      auto [path, mag] = port_of(m);
      const int want = (std::abs(m.ell) % 2 == 0) ? c.port("a") : c.port("b");
      if (path != want || std::abs(mag - 1.0) > 1e-12)
        fail("parity routing failed for " + to_string(m));
    }
  }
  return violations;
}

int cmd_routing(const RoutingOptions& opt) {
  Circuit c = build_named_circuit(opt);
  PortRoutingTable table = routing_table(c);
  if (opt.csv) {
    std::cout << "in_path,in_ell,in_p,out_path,out_ell,out_p,re,im,abs\n";
    for (const RoutingRow& row : table.rows()) {
      if (row.in_path != opt.in_path) continue;
      for (const RoutingTarget& t : row.targets)
        std::cout << row.in_path << "," << row.in_mode.ell << "," << row.in_mode.p << ","
                  << t.out_path << "," << t.out_mode.ell << "," << t.out_mode.p << ","
                  << format_double(t.amplitude.real()) << ","
                  << format_double(t.amplitude.imag()) << ","
                  << format_double(std::abs(t.amplitude)) << "\n";
    }
  } else {
    std::cout << "circuit " << c.name() << "  paths=" << c.n_paths()
              << " cost=" << c.total_cost() << "  ports:";
    for (const auto& [label, path] : c.ports()) std::cout << " " << label << "=" << path;
    std::cout << "\n";
    for (const RoutingRow& row : table.rows()) {
      if (row.in_path != opt.in_path) continue;
      std::cout << "  " << to_string(row.in_mode) << " ->";
      for (const RoutingTarget& t : row.targets)
        std::cout << "  path " << t.out_path << " " << to_string(t.out_mode) << " "
                  << format_amplitude(t.amplitude);
      std::cout << "\n";
    }
  }
  if (opt.check) {
    int violations = check_circuit(c, opt);
    if (violations > 0) return 2;
    std::cout << "checks passed\n";
  }
  return 0;
}

int cmd_scaling(int nmin, int nmax, const std::string& out_path) {
  if (nmin < 2) {
    std::cerr << "error: --nmin must be >= 2\n";
    return 1;
  }
  std::ostringstream csv;
  csv << "N,ell_max,cascade_cost,slm_cost\n";
  for (int n = nmin; n <= nmax; ++n) {
    const int lmax = (1 << n) - 2;
    BasisSpec evens = BasisSpec::even_only(lmax);
    csv << n << "," << lmax << "," << element_count(hs_even_cascade(n, evens)) << ","
        << element_count(hs_even_slm(evens)) << "\n";
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    atomic_write(out_path, csv.str());
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

struct TomographyOverrides {
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> grid_m;
  std::optional<double> extent;
};

int cmd_tomography(const std::string& config_path, const TomographyOverrides& over) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config " << config_path << "\n";
    return 1;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig cfg = parse_experiment_config(buffer, fs::path(config_path).filename());
  if (over.seed) cfg.seed = *over.seed;
  if (!over.out_dir.empty()) cfg.out_dir = over.out_dir;
  if (over.grid_m) cfg.grid_m = *over.grid_m;
  if (over.extent) cfg.extent = *over.extent;
  // the hash covers the effective inputs: config text plus any overrides
  std::string hash_src = buffer.str();
  if (cfg.seed) hash_src += "|seed=" + std::to_string(*cfg.seed);
  hash_src += "|grid=" + std::to_string(cfg.grid_m) + "|extent=" + format_double(cfg.extent);
  const uint64_t hash = fnv1a64(hash_src);
  char hash_text[32];
  std::snprintf(hash_text, sizeof hash_text, "config_hash=0x%016" PRIx64, hash);

  QstConfig qst = cfg.qst();
  Matrix truth = build_state(cfg.state, cfg.ell_max);

  KernelCache cache(qst.effective_ahst());
  if (cfg.kernel_cache_dir) {
    std::size_t loaded = load_kernel_cache(*cfg.kernel_cache_dir, cache);
    if (loaded) std::cout << "loaded " << loaded << " cached kernels\n";
  }

  TomographyReport report = run_full_qst(truth, qst, &cache);

  fs::create_directories(cfg.out_dir);
  {
    std::ostringstream os;
    write_report(os, report, cfg, hash);
    atomic_write(fs::path(cfg.out_dir) / "report.txt", os.str());
  }
  auto write_density_file = [&](const std::string& name, const Matrix& rho) {
    std::ostringstream os;
    os << "# " << hash_text << "\n";
    write_density_text(os, rho);
    atomic_write(fs::path(cfg.out_dir) / name, os.str());
  };
  write_density_file("rho_reconstructed.txt", report.rho_reconstructed);
  if (report.rho_truth) write_density_file("rho_truth.txt", *report.rho_truth);
  for (const auto& [label, image] : report.images) {
    std::ostringstream csv, pgm;
    write_intensity_csv(csv, image, hash_text);
    write_intensity_pgm(pgm, image, hash_text);
    atomic_write(fs::path(cfg.out_dir) / ("intensity_" + label + ".csv"), csv.str());
    atomic_write(fs::path(cfg.out_dir) / ("intensity_" + label + ".pgm"), pgm.str());
  }
  if (cfg.kernel_cache_dir) save_kernel_cache(*cfg.kernel_cache_dir, cache);

  std::cout << "fidelity=" << format_double(report.fidelity)
            << " trace_distance=" << format_double(report.trace_distance)
            << " threshold=" << format_double(cfg.fidelity_threshold) << "\n";
  return report.fidelity >= cfg.fidelity_threshold ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oamsim: OAM interferometer simulation and intensity-based tomography"};
  app.require_subcommand(1);

  // tomography
  std::string config_path;
  TomographyOverrides over;
  uint64_t seed_value = 0;
  int grid_value = 0;
  double extent_value = 0.0;
  auto* tomo = app.add_subcommand("tomography", "run a tomography experiment from a config");
  tomo->add_option("--config", config_path, "config file")->required();
  tomo->add_option("--out", over.out_dir, "output directory override");
  auto* seed_opt = tomo->add_option("--seed", seed_value, "seed override");
  auto* grid_opt = tomo->add_option("--grid", grid_value, "grid size override");
  auto* extent_opt =
      tomo->add_option("--extent", extent_value, "grid half-width override (units of w0)");

  // routing
  RoutingOptions ropt;
  auto* routing = app.add_subcommand("routing", "print a circuit's port routing table");
  routing->add_option("circuit", ropt.circuit, "circuit name")->required();
  routing->add_option("--alpha", ropt.alpha, "HS / radial sorter angle (e.g. pi/2)");
  routing->add_option("--beta", ropt.beta, "OAM sorter angle");
  routing->add_option("--theta", ropt.theta, "phase gate angle");
  routing->add_option("--lmax", ropt.lmax, "basis ell_max");
  routing->add_option("--pmax", ropt.pmax, "radial p_max (radial sorter)");
  routing->add_option("--even", ropt.even, "FHS even-mode variant: slm or cascade");
  routing->add_option("--stages", ropt.stages, "cascade stage count (0 = auto)");
  routing->add_option("--in-path", ropt.in_path, "input path for the table");
  routing->add_flag("--check", ropt.check, "assert the circuit's invariants");
  routing->add_flag("--csv", ropt.csv, "CSV output");

  // scaling
  int nmin = 2, nmax = 6;
  std::string scaling_out;
  auto* scaling = app.add_subcommand("scaling", "component counts of the even-mode sorters");
  scaling->add_option("--nmin", nmin, "smallest stage count");
  scaling->add_option("--nmax", nmax, "largest stage count");
  scaling->add_option("--out", scaling_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tomo) {
      if (*seed_opt) over.seed = seed_value;
      if (*grid_opt) over.grid_m = grid_value;
      if (*extent_opt) over.extent = extent_value;
      return cmd_tomography(config_path, over);
    }
    if (*routing) return cmd_routing(ropt);
    if (*scaling) return cmd_scaling(nmin, nmax, scaling_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
