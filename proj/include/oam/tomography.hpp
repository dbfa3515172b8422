// Full state estimation over both helicities: three measurement settings
// (identity, Hx, Hy) in front of a full helicity sorter, single-image
// reconstruction of the six port marginals, and the block assembly
//
//   rho_+ = mu_1,   rho_- = nu_1,
//   sigma = (mu_2 - i mu_3 - (1-i)/2 (mu_1 + nu_1))^dagger.
//
// The adjoint in the sigma line follows from the evolution convention
// rho -> U rho U^dagger: writing rho in helicity blocks and expanding the
// six marginals gives mu_2 - i mu_3 - (1-i)/2 (mu_1 + nu_1) = sigma^dagger
// exactly; the tests keep the brute-force check of this identity.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oam/ahst.hpp"
#include "oam/circuits.hpp"
#include "oam/density.hpp"

namespace oam {

enum class SettingLabel { Identity, Hx, Hy };

std::string to_string(SettingLabel label);

// A pre-sorter unitary. For the gate settings the circuit is kept and the
// single-port block is extracted from it; the block is checked against the
// ideal form on construction.
struct MeasurementSetting {
  SettingLabel label = SettingLabel::Identity;
  std::optional<Circuit> circuit;
  Matrix unitary;

  static MeasurementSetting identity(const BasisSpec& basis);
  static MeasurementSetting hx(const BasisSpec& basis);
  static MeasurementSetting hy(const BasisSpec& basis);
  static MeasurementSetting make(SettingLabel label, const BasisSpec& basis);
};

enum class MarginalProvenance { Exact, AhstReconstructed };

// Positive-port (mu) and negative-port (nu) marginals for the settings
// (identity, Hx, Hy) in that order. Marginals are sub-normalized; their
// traces are the port probabilities.
struct MarginalSet {
  std::array<Matrix, 3> mu;
  std::array<Matrix, 3> nu;
  MarginalProvenance provenance = MarginalProvenance::Exact;
};

// Applies the setting then the sorter as rho -> (F U) rho (F U)^dagger and
// slices the positive-port / negative-port blocks. rho_in lives on path 0
// of a single-path rail over the tomography basis the sorter was built on.
std::pair<Matrix, Matrix> simulate_setting(const RailDensity& rho_in,
                                           const MeasurementSetting& setting,
                                           const Circuit& fhs);

// Same marginals from projector algebra, P_{+-} (U rho U^dag) P_{+-},
// without any circuit; used to cross-check the simulation path.
std::pair<Matrix, Matrix> marginals_by_formula(const Matrix& rho,
                                               const Matrix& setting_unitary);

struct NoiseSpec {
  double photons = 0.0;
  uint64_t seed = 0;
};

// Intensity synthesis (optionally Poisson-sampled) followed by the
// single-helicity reconstruction at the marginal's dimension.
Matrix measure_marginal_ahst(const Matrix& port_marginal, Helicity helicity,
                             KernelCache& cache,
                             const std::optional<NoiseSpec>& noise = std::nullopt,
                             FieldCache* fields = nullptr, bool gram_correct = false);

// Block assembly of the full matrix from the six marginals; output
// Hermitized, not PSD-projected.
Matrix assemble_full_density(const MarginalSet& marginals, int ell_max);

struct QstConfig {
  int ell_max = 3;
  AhstConfig ahst;
  FhsVariant fhs_variant = FhsVariant::Slm;
  std::optional<NoiseSpec> noise;
  // With photon noise the weighted integral is truncated much earlier: the
  // exponential weight amplifies white counting noise, so a short window is
  // the noise-optimal estimator. Tuned for budgets around 1e7 photons.
  double noise_weight_cap = 1e5;
  bool psd_repair = false;
  bool exact_marginals = false;  // bypass the imaging stage (debugging aid)
  bool keep_images = false;      // retain per-setting intensity images

  // The reconstruction lattice actually used: ahst with the shortened
  // radial window when noise is active.
  AhstConfig effective_ahst() const;
};

struct TomographyDiagnostics {
  double truncation_radius = 0.0;
  // max deviation of the sampled, rescaled kernel Gram matrix from identity
  double orthogonality_residual = 0.0;
  double min_eigenvalue = 0.0;  // of the assembled matrix before repair
  std::array<double, 3> setting_trace{};  // tr mu_k + tr nu_k per setting
};

struct TomographyReport {
  Matrix rho_reconstructed;
  std::optional<Matrix> rho_truth;
  double fidelity = 0.0;
  double trace_distance = 0.0;
  bool psd_repaired = false;
  MarginalSet marginals;
  TomographyDiagnostics diagnostics;
  std::vector<std::pair<std::string, IntensityGrid>> images;
};

// The full pipeline: three settings through the sorter, six reconstructed
// marginals (always via the Gram-solved estimator, whose assembled trace
// stays within 1e-3 on the finite lattice), assembly, and comparison
// against the supplied truth. Deterministic given the config (and noise
// seed). A shared kernel cache avoids recomputing kernels across runs; it
// must match cfg.effective_ahst().
TomographyReport run_full_qst(const RailDensity& rho_truth, const QstConfig& cfg,
                              KernelCache* shared_cache = nullptr);
TomographyReport run_full_qst(const Matrix& rho_truth_modes, const QstConfig& cfg,
                              KernelCache* shared_cache = nullptr);

}  // namespace oam
