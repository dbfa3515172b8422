#include "oam/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace oam {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  }
}

long long parse_int(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + s + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_density_text(std::ostream& out, const Matrix& rho,
                        const std::vector<int>& ordering) {
  const int n = static_cast<int>(rho.rows());
  if (rho.cols() != n || static_cast<int>(ordering.size()) != n)
    throw std::invalid_argument("write_density_text: ordering does not match the matrix");
  out << "dim=" << n << " ordering=";
  for (int i = 0; i < n; ++i) out << (i ? "," : "") << ordering[static_cast<size_t>(i)];
  out << "\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) out << ",";
      out << format_double(rho(i, j).real()) << "," << format_double(rho(i, j).imag());
    }
    out << "\n";
  }
}

void write_density_text(std::ostream& out, const Matrix& rho) {
  const int n = static_cast<int>(rho.rows());
  if (n % 2 != 0) throw std::invalid_argument("write_density_text: odd dimension");
  std::vector<int> ordering;
  for (int l = 1; l <= n / 2; ++l) ordering.push_back(l);
  for (int l = 1; l <= n / 2; ++l) ordering.push_back(-l);
  write_density_text(out, rho, ordering);
}

DensityFile read_density_text(std::istream& in) {
  std::string header;
  do {
    if (!std::getline(in, header)) throw ConfigError("density file: missing header");
  } while (!trim(header).empty() && trim(header)[0] == '#');
  DensityFile file;
  int dim = -1;
  for (const std::string& tok : split(trim(header), ' ')) {
    if (tok.rfind("dim=", 0) == 0) {
      dim = static_cast<int>(parse_int(tok.substr(4), "density header"));
    } else if (tok.rfind("ordering=", 0) == 0) {
      for (const std::string& e : split(tok.substr(9), ','))
        file.ordering.push_back(static_cast<int>(parse_int(e, "density ordering")));
    } else if (!tok.empty()) {
      throw ConfigError("density file: unexpected header token '" + tok + "'");
    }
  }
  if (dim < 1 || static_cast<int>(file.ordering.size()) != dim)
    throw ConfigError("density file: bad header");
  file.rho.resize(dim, dim);
  for (int i = 0; i < dim; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("density file: truncated matrix");
    std::vector<std::string> parts = split(trim(line), ',');
    if (static_cast<int>(parts.size()) != 2 * dim)
      throw ConfigError("density file: row " + std::to_string(i + 1) + " has " +
                        std::to_string(parts.size()) + " fields, expected " +
                        std::to_string(2 * dim));
    for (int j = 0; j < dim; ++j)
      file.rho(i, j) = {parse_double(parts[static_cast<size_t>(2 * j)], "density row"),
                        parse_double(parts[static_cast<size_t>(2 * j + 1)], "density row")};
  }
  return file;
}

void write_intensity_csv(std::ostream& out, const IntensityGrid& grid,
                         const std::string& comment) {
  const GridSpec& g = grid.grid();
  out << "# m=" << g.m << " extent=" << format_double(g.extent)
      << " w0=" << format_double(g.w0) << " layout=row-y,col-x\n";
  if (!comment.empty()) out << "# " << comment << "\n";
  for (int j = 0; j < g.m; ++j) {
    for (int i = 0; i < g.m; ++i) {
      if (i) out << ",";
      out << format_double(grid.values()(i, j));
    }
    out << "\n";
  }
}

void write_intensity_pgm(std::ostream& out, const IntensityGrid& grid,
                         const std::string& comment) {
  const GridSpec& g = grid.grid();
  const double peak = grid.values().maxCoeff();
  const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;
  out << "P5\n# extent=" << format_double(g.extent) << " w0=" << format_double(g.w0)
      << " peak=" << format_double(peak) << "\n";
  if (!comment.empty()) out << "# " << comment << "\n";
  out << g.m << " " << g.m << "\n65535\n";
  for (int j = 0; j < g.m; ++j) {
    for (int i = 0; i < g.m; ++i) {
      const auto v = static_cast<uint16_t>(grid.values()(i, j) * scale + 0.5);
      out.put(static_cast<char>((v >> 8) & 0xFF));
      out.put(static_cast<char>(v & 0xFF));
    }
  }
}

namespace {

void write_basis_line(std::ostream& out, const BasisSpec& basis) {
  out << "# basis=";
  for (const ModeIndex& m : basis.modes()) out << " " << m.ell << ":" << m.p;
  out << "\n";
}

BasisSpec parse_basis_line(const std::string& payload) {
  std::vector<ModeIndex> modes;
  std::istringstream iss(payload);
  std::string tok;
  while (iss >> tok) {
    std::vector<std::string> pair = split(tok, ':');
    if (pair.size() != 2) throw ConfigError("netlist: bad mode token '" + tok + "'");
    modes.push_back({static_cast<int>(parse_int(pair[0], "netlist mode")),
                     static_cast<int>(parse_int(pair[1], "netlist mode"))});
  }
  return BasisSpec::from_modes(std::move(modes));
}

}  // namespace

void save_netlist(std::ostream& out, const Circuit& circuit) {
  out << "# oamsim netlist v1\n";
  out << "# name= " << circuit.name() << "\n";
  out << "# n_paths= " << circuit.n_paths() << "\n";
  write_basis_line(out, circuit.input_basis());
  for (const auto& [label, path] : circuit.ports())
    out << "# port " << label << " = " << path << "\n";
  for (const OpticalElement& e : circuit.elements()) {
    out << to_string(e.kind);
    switch (e.kind) {
      case ElementKind::DovePrism: out << " beta=" << format_double(e.param); break;
      case ElementKind::DovePrismPair: out << " angle=" << format_double(e.param); break;
      case ElementKind::GouyStack: out << " alpha=" << format_double(e.param); break;
      case ElementKind::PhasePlate: out << " theta=" << format_double(e.param); break;
      case ElementKind::SlmShift: out << " k=" << static_cast<int>(e.param); break;
      case ElementKind::BalancedBeamSplitter:
      case ElementKind::PathSwap: break;
    }
    out << " path=" << e.path;
    if (e.path2 >= 0) out << " path2=" << e.path2;
    out << "\n";
  }
}

Circuit load_netlist(std::istream& in) {
  std::string name = "netlist";
  int n_paths = -1;
  std::optional<BasisSpec> basis;
  std::map<std::string, int> ports;
  std::vector<OpticalElement> elements;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "netlist line " + std::to_string(line_no);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::string payload = trim(t.substr(1));
      if (payload.rfind("name=", 0) == 0) {
        name = trim(payload.substr(5));
      } else if (payload.rfind("n_paths=", 0) == 0) {
        n_paths = static_cast<int>(parse_int(trim(payload.substr(8)), where));
      } else if (payload.rfind("basis=", 0) == 0) {
        basis = parse_basis_line(payload.substr(6));
      } else if (payload.rfind("port ", 0) == 0) {
        std::vector<std::string> kv = split(payload.substr(5), '=');
        if (kv.size() != 2) throw ConfigError(where + ": bad port line");
        ports[trim(kv[0])] = static_cast<int>(parse_int(trim(kv[1]), where));
      }
      continue;
    }
    if (n_paths < 1 || !basis)
      throw ConfigError(where + ": element before n_paths/basis header");
    std::istringstream iss(t);
    std::string kind;
    iss >> kind;
    std::map<std::string, std::string> args;
    std::string tok;
    while (iss >> tok) {
      std::vector<std::string> kv = split(tok, '=');
      if (kv.size() != 2) throw ConfigError(where + ": bad argument '" + tok + "'");
      args[kv[0]] = kv[1];
    }
    auto need = [&](const char* key) {
      auto it = args.find(key);
      if (it == args.end()) throw ConfigError(where + ": missing " + key);
      return it->second;
    };
    const int path = static_cast<int>(parse_int(need("path"), where));
    const BasisSpec& b = *basis;
    OpticalElement e;
    if (kind == "DOVE_PRISM") {
      e = dove_prism(parse_double(need("beta"), where), path, b, n_paths);
    } else if (kind == "DOVE_PRISM_PAIR") {
      e = dove_prism_pair(parse_double(need("angle"), where), path, b, n_paths);
    } else if (kind == "GOUY_STACK") {
      e = gouy_stack(parse_double(need("alpha"), where), path, b, n_paths);
    } else if (kind == "PHASE_PLATE") {
      e = phase_plate(parse_double(need("theta"), where), path, b, n_paths);
    } else if (kind == "SLM_SHIFT") {
      e = slm_shift(static_cast<int>(parse_int(need("k"), where)), path, b, n_paths);
    } else if (kind == "BBS") {
      e = beam_splitter(path, static_cast<int>(parse_int(need("path2"), where)), b, n_paths);
    } else if (kind == "PATH_SWAP") {
      e = path_swap(path, static_cast<int>(parse_int(need("path2"), where)), b, n_paths);
    } else {
      throw ConfigError(where + ": unknown element '" + kind + "'");
    }
    basis = e.basis_out;
    elements.push_back(std::move(e));
  }
  if (elements.empty()) throw ConfigError("netlist: no elements");
  return Circuit(name, std::move(elements), std::move(ports));
}

void save_kernel_cache(const std::filesystem::path& dir, KernelCache& cache) {
  std::filesystem::create_directories(dir);
  const AhstConfig& cfg = cache.config();
  std::ostringstream manifest;
  manifest << "oamsim kernel cache v1\n";
  manifest << "m=" << cfg.grid.m << " extent=" << format_double(cfg.grid.extent)
           << " w0=" << format_double(cfg.grid.w0) << " n_r=" << cfg.n_r
           << " n_phi=" << cfg.n_phi << " weight_cap=" << format_double(cfg.weight_cap)
           << " oversample=" << cfg.fft_oversample << "\n";
  // The manifest lists whatever the caller has populated.
  std::ostringstream entries;
  cache.for_each([&](const FourierKernel& k) {
    const std::string fname =
        "kernel_" + std::to_string(k.ell1) + "_" + std::to_string(k.ell2) + ".c128";
    std::string blob(reinterpret_cast<const char*>(k.half_weighted.data()),
                     static_cast<size_t>(k.half_weighted.size()) * sizeof(Complex));
    atomic_write(dir / fname, blob);
    entries << "kernel ell1=" << k.ell1 << " ell2=" << k.ell2 << " file=" << fname
            << " rows=" << k.half_weighted.rows() << " cols=" << k.half_weighted.cols()
            << "\n";
  });
  manifest << entries.str();
  atomic_write(dir / "manifest.txt", manifest.str());
}

std::size_t load_kernel_cache(const std::filesystem::path& dir, KernelCache& cache) {
  std::ifstream manifest(dir / "manifest.txt");
  if (!manifest) return 0;
  std::string line;
  if (!std::getline(manifest, line) || trim(line) != "oamsim kernel cache v1") return 0;
  const AhstConfig& cfg = cache.config();
  std::ostringstream expect;
  expect << "m=" << cfg.grid.m << " extent=" << format_double(cfg.grid.extent)
         << " w0=" << format_double(cfg.grid.w0) << " n_r=" << cfg.n_r
         << " n_phi=" << cfg.n_phi << " weight_cap=" << format_double(cfg.weight_cap)
         << " oversample=" << cfg.fft_oversample;
  if (!std::getline(manifest, line) || trim(line) != expect.str()) return 0;

  std::size_t loaded = 0;
  while (std::getline(manifest, line)) {
    std::string t = trim(line);
    if (t.rfind("kernel ", 0) != 0) continue;
    std::istringstream iss(t.substr(7));
    std::map<std::string, std::string> args;
    std::string tok;
    while (iss >> tok) {
      std::vector<std::string> kv = split(tok, '=');
      if (kv.size() == 2) args[kv[0]] = kv[1];
    }
    const int l1 = static_cast<int>(parse_int(args.at("ell1"), "kernel manifest"));
    const int l2 = static_cast<int>(parse_int(args.at("ell2"), "kernel manifest"));
    const auto rows = parse_int(args.at("rows"), "kernel manifest");
    const auto cols = parse_int(args.at("cols"), "kernel manifest");
    std::ifstream blob(dir / args.at("file"), std::ios::binary);
    if (!blob) continue;
    FourierKernel k;
    k.ell1 = l1;
    k.ell2 = l2;
    k.half_weighted.resize(rows, cols);
    blob.read(reinterpret_cast<char*>(k.half_weighted.data()),
              static_cast<std::streamsize>(static_cast<size_t>(rows * cols) * sizeof(Complex)));
    if (!blob) continue;
    if (cache.insert(std::move(k))) ++loaded;
  }
  return loaded;
}

QstConfig ExperimentConfig::qst() const {
  QstConfig q;
  q.ell_max = ell_max;
  q.ahst.grid = GridSpec{grid_m, extent, w0};
  q.ahst.n_r = n_r;
  q.ahst.n_phi = n_phi;
  q.ahst.weight_cap = weight_cap;
  q.ahst.fft_oversample = fft_oversample;
  q.fhs_variant = fhs_variant;
  if (photons > 0.0) q.noise = NoiseSpec{photons, seed.value_or(0)};
  q.psd_repair = psd_repair;
  q.exact_marginals = exact_marginals;
  q.keep_images = true;
  return q;
}

ExperimentConfig parse_experiment_config(std::istream& in, const std::string& filename) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  bool have_seed = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = filename + ":" + std::to_string(line_no);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') continue;  // section headers are cosmetic
    size_t eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key == "ell_max") {
      cfg.ell_max = static_cast<int>(parse_int(value, where));
      if (cfg.ell_max < 1) throw ConfigError(where + ": ell_max must be >= 1");
    } else if (key == "w0") {
      cfg.w0 = parse_double(value, where);
      if (cfg.w0 <= 0) throw ConfigError(where + ": w0 must be > 0");
    } else if (key == "grid_m") {
      cfg.grid_m = static_cast<int>(parse_int(value, where));
      if (cfg.grid_m < 32 || cfg.grid_m % 2 != 0)
        throw ConfigError(where + ": grid_m must be even and >= 32");
    } else if (key == "extent") {
      cfg.extent = parse_double(value, where);
      if (cfg.extent <= 0) throw ConfigError(where + ": extent must be > 0");
    } else if (key == "n_r") {
      cfg.n_r = static_cast<int>(parse_int(value, where));
      if (cfg.n_r < 8) throw ConfigError(where + ": n_r must be >= 8");
    } else if (key == "n_phi") {
      cfg.n_phi = static_cast<int>(parse_int(value, where));
      if (cfg.n_phi < 8) throw ConfigError(where + ": n_phi must be >= 8");
    } else if (key == "weight_cap") {
      cfg.weight_cap = parse_double(value, where);
      if (cfg.weight_cap <= 1) throw ConfigError(where + ": weight_cap must exceed 1");
    } else if (key == "fft_oversample") {
      cfg.fft_oversample = static_cast<int>(parse_int(value, where));
      if (cfg.fft_oversample < 1 || cfg.fft_oversample > 8)
        throw ConfigError(where + ": fft_oversample must be in 1..8");
    } else if (key == "fhs_variant") {
      if (value == "slm") cfg.fhs_variant = FhsVariant::Slm;
      else if (value == "cascade") cfg.fhs_variant = FhsVariant::Cascade;
      else throw ConfigError(where + ": fhs_variant must be slm or cascade");
    } else if (key == "photons") {
      cfg.photons = parse_double(value, where);
      if (cfg.photons < 0) throw ConfigError(where + ": photons must be >= 0");
    } else if (key == "seed") {
      cfg.seed = static_cast<uint64_t>(parse_int(value, where));
      have_seed = true;
    } else if (key == "state") {
      cfg.state = value;
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "fidelity_threshold") {
      cfg.fidelity_threshold = parse_double(value, where);
    } else if (key == "psd_repair") {
      cfg.psd_repair = value == "true" || value == "1";
    } else if (key == "marginals") {
      if (value == "exact") cfg.exact_marginals = true;
      else if (value == "ahst") cfg.exact_marginals = false;
      else throw ConfigError(where + ": marginals must be ahst or exact");
    } else if (key == "kernel_cache_dir") {
      cfg.kernel_cache_dir = value;
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  if (cfg.photons > 0.0 && !have_seed)
    throw ConfigError(filename + ": seed is required when photons > 0");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_experiment_config(in, path.filename().string());
}

Matrix build_state(const std::string& spec, int ell_max) {
  const int dim = 2 * ell_max;
  BasisSpec basis = make_basis(ell_max);
  auto mode_index = [&](int ell) {
    if (ell == 0 || std::abs(ell) > ell_max)
      throw ConfigError("state spec: ell " + std::to_string(ell) + " outside the basis");
    return basis.index_of({ell, 0});
  };
  size_t colon = spec.find(':');
  std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "pure") {
    Vector v = Vector::Zero(dim);
    v(mode_index(static_cast<int>(parse_int(arg, "state spec")))) = 1.0;
    return v * v.adjoint();
  }
  if (kind == "superpos") {
    Vector v = Vector::Zero(dim);
    for (const std::string& tok : split(arg, ','))
      v(mode_index(static_cast<int>(parse_int(trim(tok), "state spec")))) = 1.0;
    v.normalize();
    return v * v.adjoint();
  }
  if (kind == "random-pure" || kind == "random-mixed") {
    uint64_t seed = 1;
    int rank = 1;
    for (const std::string& tok : split(arg, ',')) {
      std::vector<std::string> kv = split(trim(tok), '=');
      if (kv.size() != 2) throw ConfigError("state spec: bad argument '" + tok + "'");
      if (kv[0] == "seed") seed = static_cast<uint64_t>(parse_int(kv[1], "state spec"));
      else if (kv[0] == "rank") rank = static_cast<int>(parse_int(kv[1], "state spec"));
      else throw ConfigError("state spec: unknown argument '" + kv[0] + "'");
    }
    std::mt19937_64 rng(seed);
    if (kind == "random-pure") {
      Vector v = random_pure(dim, rng);
      return v * v.adjoint();
    }
    return random_density(dim, rank, rng);
  }
  if (kind == "file") {
    std::ifstream in(arg);
    if (!in) throw ConfigError("state spec: cannot open " + arg);
    DensityFile f = read_density_text(in);
    if (f.rho.rows() != dim)
      throw ConfigError("state spec: file dimension " + std::to_string(f.rho.rows()) +
                        " does not match ell_max " + std::to_string(ell_max));
    return f.rho;
  }
  throw ConfigError("state spec: unknown kind '" + kind + "'");
}

void write_report(std::ostream& out, const TomographyReport& report,
                  const ExperimentConfig& cfg, uint64_t config_hash) {
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof hash_buf, "0x%016" PRIx64, config_hash);
  out << "oamsim tomography report\n";
  out << "config_hash=" << hash_buf << "\n";
  out << "ell_max=" << cfg.ell_max << "\n";
  out << "state=" << cfg.state << "\n";
  out << "fhs_variant=" << (cfg.fhs_variant == FhsVariant::Slm ? "slm" : "cascade") << "\n";
  out << "grid_m=" << cfg.grid_m << "\n";
  out << "extent=" << format_double(cfg.extent) << "\n";
  out << "w0=" << format_double(cfg.w0) << "\n";
  out << "photons=" << format_double(cfg.photons) << "\n";
  if (cfg.seed) out << "seed=" << *cfg.seed << "\n";
  out << "marginals="
      << (report.marginals.provenance == MarginalProvenance::Exact ? "exact" : "ahst") << "\n";
  out << "psd_repaired=" << (report.psd_repaired ? "true" : "false") << "\n";
  out << "fidelity=" << format_double(report.fidelity) << "\n";
  out << "trace_distance=" << format_double(report.trace_distance) << "\n";
  out << "min_eigenvalue=" << format_double(report.diagnostics.min_eigenvalue) << "\n";
  out << "truncation_radius=" << format_double(report.diagnostics.truncation_radius) << "\n";
  out << "orthogonality_residual="
      << format_double(report.diagnostics.orthogonality_residual) << "\n";
  for (int k = 0; k < 3; ++k)
    out << "setting_trace_" << (k + 1) << "="
        << format_double(report.diagnostics.setting_trace[static_cast<size_t>(k)]) << "\n";
  out << "[rho_reconstructed]\n";
  write_density_text(out, report.rho_reconstructed);
  if (report.rho_truth) {
    out << "[rho_truth]\n";
    write_density_text(out, *report.rho_truth);
  }
  const char* labels[3] = {"1", "2", "3"};
  for (int k = 0; k < 3; ++k) {
    out << "[mu_" << labels[k] << "]\n";
    std::vector<int> pos, neg;
    for (int l = 1; l <= cfg.ell_max; ++l) pos.push_back(l);
    for (int l = 1; l <= cfg.ell_max; ++l) neg.push_back(-l);
    write_density_text(out, report.marginals.mu[static_cast<size_t>(k)], pos);
    out << "[nu_" << labels[k] << "]\n";
    write_density_text(out, report.marginals.nu[static_cast<size_t>(k)], neg);
  }
}

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace oam
