// File formats and configuration:
//   - density matrices as text: "dim=<n> ordering=<ell list>" then n rows of
//     comma-separated re,im pairs at full double precision;
//   - intensity grids as CSV (geometry header) and 16-bit binary PGM;
//   - circuits as netlists, one element per line with a port-naming header;
//   - kernel caches as a directory of raw little-endian complex arrays plus
//     a manifest;
//   - experiment configuration as flat key = value text with [section]
//     headers, parsed with line-anchored diagnostics;
//   - tomography reports as key = value text with embedded density blocks.
// All writers are deterministic; files are written to a temporary name and
// renamed into place.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oam/circuits.hpp"
#include "oam/tomography.hpp"

namespace oam {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- density matrices -----------------------------------------------------

void write_density_text(std::ostream& out, const Matrix& rho,
                        const std::vector<int>& ordering);
// Convenience for tomography matrices (ordering 1..n,-1..-n).
void write_density_text(std::ostream& out, const Matrix& rho);

struct DensityFile {
  Matrix rho;
  std::vector<int> ordering;
};
DensityFile read_density_text(std::istream& in);

// --- intensity grids --------------------------------------------------------

// An optional extra comment (e.g. a config hash) is embedded in the header.
void write_intensity_csv(std::ostream& out, const IntensityGrid& grid,
                         const std::string& comment = "");
// 16-bit big-endian binary PGM, scaled to the image maximum.
void write_intensity_pgm(std::ostream& out, const IntensityGrid& grid,
                         const std::string& comment = "");

// --- netlists ---------------------------------------------------------------

void save_netlist(std::ostream& out, const Circuit& circuit);
Circuit load_netlist(std::istream& in);

// --- kernel cache persistence ------------------------------------------------

// Writes every cached kernel as <dir>/kernel_<l1>_<l2>.c128 plus
// <dir>/manifest.txt describing the lattice.
void save_kernel_cache(const std::filesystem::path& dir, KernelCache& cache);
// Loads kernels whose manifest matches cfg into a fresh cache; returns the
// number loaded. A mismatching manifest loads nothing.
std::size_t load_kernel_cache(const std::filesystem::path& dir, KernelCache& cache);

// --- experiment configuration -------------------------------------------------

struct ExperimentConfig {
  int ell_max = 3;
  double w0 = 1.0;
  int grid_m = 512;
  double extent = 8.0;
  int n_r = 384;
  int n_phi = 256;
  double weight_cap = 1e12;
  int fft_oversample = 2;
  FhsVariant fhs_variant = FhsVariant::Slm;
  double photons = 0.0;  // 0 = noiseless
  std::optional<uint64_t> seed;
  std::string state = "pure:2";
  std::string out_dir = "out";
  double fidelity_threshold = 0.99;
  bool psd_repair = false;
  bool exact_marginals = false;
  std::optional<std::string> kernel_cache_dir;

  QstConfig qst() const;
};

ExperimentConfig parse_experiment_config(std::istream& in, const std::string& filename);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// State construction from the config's state spec:
//   pure:<ell>                       a single basis mode
//   superpos:<l1>,<l2>,...           equal-weight superposition
//   random-pure:seed=<s>             Haar-ish random pure state
//   random-mixed:rank=<r>,seed=<s>   Ginibre random mixed state
//   file:<path>                      density-matrix text file
Matrix build_state(const std::string& spec, int ell_max);

// --- reports -------------------------------------------------------------------

void write_report(std::ostream& out, const TomographyReport& report,
                  const ExperimentConfig& cfg, uint64_t config_hash);

// --- helpers --------------------------------------------------------------------

uint64_t fnv1a64(const std::string& text);
// Write via a temporary file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& contents);
std::string format_double(double v);  // shortest round-trippable decimal

}  // namespace oam
