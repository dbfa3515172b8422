#include "oam/tomography.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oam/errors.hpp"

namespace oam {

namespace {

constexpr double kPi = std::numbers::pi;

void check_tomography_basis(const BasisSpec& basis, const char* who) {
  if (!basis.is_tomography_ordered() || basis.has_radial())
    throw std::invalid_argument(std::string(who) + ": needs a p = 0 tomography basis");
}

Matrix extract_port_block(const RailDensity& rho, const BasisSpec& out_basis, int path,
                          int sign, int n) {
  Matrix block(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      block(i, j) = rho.element(path, {sign * (i + 1), 0}, path, {sign * (j + 1), 0});
  (void)out_basis;
  return block;
}

}  // namespace

std::string to_string(SettingLabel label) {
  switch (label) {
    case SettingLabel::Identity: return "identity";
    case SettingLabel::Hx: return "hx";
    case SettingLabel::Hy: return "hy";
  }
  return "unknown";
}

MeasurementSetting MeasurementSetting::identity(const BasisSpec& basis) {
  check_tomography_basis(basis, "MeasurementSetting");
  return {SettingLabel::Identity, std::nullopt, Matrix::Identity(basis.dim(), basis.dim())};
}

MeasurementSetting MeasurementSetting::hx(const BasisSpec& basis) {
  check_tomography_basis(basis, "MeasurementSetting");
  Circuit c = gate_hx(basis);
  Matrix u = c.port_unitary(0, 0);
  if ((u - hx_block_matrix(basis.dim() / 2)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::logic_error("MeasurementSetting: Hx circuit block deviates from ideal");
  return {SettingLabel::Hx, std::move(c), std::move(u)};
}

MeasurementSetting MeasurementSetting::hy(const BasisSpec& basis) {
  check_tomography_basis(basis, "MeasurementSetting");
  Circuit c = gate_hy(basis);
  Matrix u = c.port_unitary(0, 0);
  if ((u - hy_block_matrix(basis.dim() / 2)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::logic_error("MeasurementSetting: Hy circuit block deviates from ideal");
  return {SettingLabel::Hy, std::move(c), std::move(u)};
}

MeasurementSetting MeasurementSetting::make(SettingLabel label, const BasisSpec& basis) {
  switch (label) {
    case SettingLabel::Identity: return identity(basis);
    case SettingLabel::Hx: return hx(basis);
    case SettingLabel::Hy: return hy(basis);
  }
  throw std::invalid_argument("MeasurementSetting: unknown label");
}

std::pair<Matrix, Matrix> simulate_setting(const RailDensity& rho_in,
                                           const MeasurementSetting& setting,
                                           const Circuit& fhs) {
  check_tomography_basis(rho_in.basis(), "simulate_setting");
  if (rho_in.n_paths() != 1)
    throw std::invalid_argument("simulate_setting: input beam must occupy a single path");
  if (!(fhs.input_basis() == rho_in.basis()))
    throw std::invalid_argument("simulate_setting: sorter basis differs from the state's");
  if (setting.unitary.rows() != rho_in.basis().dim())
    throw std::invalid_argument("simulate_setting: setting dimension mismatch");

  Matrix staged = setting.unitary * rho_in.path_block(0) * setting.unitary.adjoint();
  RailDensity rail = RailDensity::from_mode_density(fhs.input_basis(), fhs.n_paths(), 0, staged);
  RailDensity sorted = apply(fhs, rail);

  const int n = rho_in.basis().dim() / 2;
  Matrix mu = extract_port_block(sorted, fhs.output_basis(), fhs.port("+"), +1, n);
  Matrix nu = extract_port_block(sorted, fhs.output_basis(), fhs.port("-"), -1, n);
  return {std::move(mu), std::move(nu)};
}

std::pair<Matrix, Matrix> marginals_by_formula(const Matrix& rho,
                                               const Matrix& setting_unitary) {
  if (rho.rows() != rho.cols() || rho.rows() % 2 != 0)
    throw std::invalid_argument("marginals_by_formula: even-dimensional matrix required");
  const Eigen::Index n = rho.rows() / 2;
  Matrix evolved = setting_unitary * rho * setting_unitary.adjoint();
  return {evolved.topLeftCorner(n, n), evolved.bottomRightCorner(n, n)};
}

Matrix measure_marginal_ahst(const Matrix& port_marginal, Helicity helicity,
                             KernelCache& cache, const std::optional<NoiseSpec>& noise,
                             FieldCache* fields, bool gram_correct) {
  const int n = static_cast<int>(port_marginal.rows());
  IntensityGrid image =
      intensity_from_density(port_marginal, helicity, cache.config().grid, fields);
  if (noise) image = poisson_sample(image, noise->photons, noise->seed);
  return helicity == Helicity::Positive
             ? reconstruct_positive(image, n, cache, nullptr, 1, gram_correct)
             : reconstruct_negative(image, n, cache, nullptr, 1, gram_correct);
}

Matrix assemble_full_density(const MarginalSet& marginals, int ell_max) {
  for (const auto* set : {&marginals.mu, &marginals.nu})
    for (const Matrix& m : *set)
      if (m.rows() != ell_max || m.cols() != ell_max)
        throw std::invalid_argument("assemble_full_density: marginal dimension mismatch");
  const Complex half_one_minus_i(0.5, -0.5);
  Matrix x = marginals.mu[1] - Complex(0.0, 1.0) * marginals.mu[2] -
             half_one_minus_i * (marginals.mu[0] + marginals.nu[0]);
  BlockDecomposition blocks{marginals.mu[0], marginals.nu[0], x.adjoint()};
  return hermitize(block_assemble(blocks));
}

AhstConfig QstConfig::effective_ahst() const {
  AhstConfig effective = ahst;
  if (noise) effective.weight_cap = std::min(effective.weight_cap, noise_weight_cap);
  return effective;
}

TomographyReport run_full_qst(const RailDensity& rho_truth, const QstConfig& cfg,
                              KernelCache* shared_cache) {
  check_tomography_basis(rho_truth.basis(), "run_full_qst");
  if (rho_truth.n_paths() != 1)
    throw std::invalid_argument("run_full_qst: truth must occupy a single path");
  if (rho_truth.basis().ell_max() != cfg.ell_max || rho_truth.basis().dim() != 2 * cfg.ell_max)
    throw std::invalid_argument("run_full_qst: truth basis does not match ell_max");
  rho_truth.validate_physical(1e-10, 1e-10, -1e-9);

  const BasisSpec& basis = rho_truth.basis();
  const int n = cfg.ell_max;
  const AhstConfig effective = cfg.effective_ahst();
  // The pipeline always solves the measured Gram system: on the finite
  // lattice that is the estimator whose assembled trace stays within 1e-3,
  // and it coincides with the ideal-constant projection as the window grows.
  const bool gram_correct = true;

  KernelCache local_cache(effective);
  KernelCache& cache = shared_cache ? *shared_cache : local_cache;
  if (!(cache.config() == effective))
    throw std::invalid_argument(
        "run_full_qst: shared cache does not match the effective lattice config");
  FieldCache fields(effective.grid);

  Circuit fhs = full_helicity_sorter(basis, cfg.fhs_variant);

  TomographyReport report;
  report.marginals.provenance =
      cfg.exact_marginals ? MarginalProvenance::Exact : MarginalProvenance::AhstReconstructed;

  for (int k = 0; k < 3; ++k) {
    MeasurementSetting setting = MeasurementSetting::make(
        k == 0 ? SettingLabel::Identity : (k == 1 ? SettingLabel::Hx : SettingLabel::Hy),
        basis);
    auto [mu_exact, nu_exact] = simulate_setting(rho_truth, setting, fhs);
    report.diagnostics.setting_trace[static_cast<size_t>(k)] =
        mu_exact.trace().real() + nu_exact.trace().real();

    if (cfg.exact_marginals) {
      report.marginals.mu[static_cast<size_t>(k)] = std::move(mu_exact);
      report.marginals.nu[static_cast<size_t>(k)] = std::move(nu_exact);
      continue;
    }
    std::optional<NoiseSpec> mu_noise, nu_noise;
    if (cfg.noise) {
      mu_noise = NoiseSpec{cfg.noise->photons, cfg.noise->seed + 2 * static_cast<uint64_t>(k)};
      nu_noise =
          NoiseSpec{cfg.noise->photons, cfg.noise->seed + 2 * static_cast<uint64_t>(k) + 1};
    }
    if (cfg.keep_images) {
      IntensityGrid pos = intensity_from_density(mu_exact, Helicity::Positive,
                                                 effective.grid, &fields);
      IntensityGrid neg = intensity_from_density(nu_exact, Helicity::Negative,
                                                 effective.grid, &fields);
      if (mu_noise) pos = poisson_sample(pos, mu_noise->photons, mu_noise->seed);
      if (nu_noise) neg = poisson_sample(neg, nu_noise->photons, nu_noise->seed);
      report.images.emplace_back("setting_" + to_string(setting.label) + "_pos", pos);
      report.images.emplace_back("setting_" + to_string(setting.label) + "_neg", neg);
      report.marginals.mu[static_cast<size_t>(k)] =
          reconstruct_positive(pos, n, cache, nullptr, 1, gram_correct);
      report.marginals.nu[static_cast<size_t>(k)] =
          reconstruct_negative(neg, n, cache, nullptr, 1, gram_correct);
    } else {
      report.marginals.mu[static_cast<size_t>(k)] = measure_marginal_ahst(
          mu_exact, Helicity::Positive, cache, mu_noise, &fields, gram_correct);
      report.marginals.nu[static_cast<size_t>(k)] = measure_marginal_ahst(
          nu_exact, Helicity::Negative, cache, nu_noise, &fields, gram_correct);
    }
  }

  Matrix assembled = assemble_full_density(report.marginals, n);
  report.diagnostics.min_eigenvalue = min_eigenvalue(assembled);
  report.diagnostics.truncation_radius = cache.polar().r_max;
  {
    // Small sampled Gram residual as a per-run health figure.
    std::vector<std::pair<int, int>> pairs{{1, 1}, {n, n}, {1, n}};
    Matrix gram = kernel_gram(cache, pairs);
    const double ideal = 2.0 / (kPi * effective.grid.w0 * effective.grid.w0);
    report.diagnostics.orthogonality_residual =
        (gram / ideal - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  }

  if (cfg.psd_repair) {
    assembled = nearest_psd(assembled);
    report.psd_repaired = true;
  }
  report.rho_reconstructed = assembled;
  report.rho_truth = rho_truth.path_block(0);

  // Fidelity is defined on states; compare through the trace-normalized PSD
  // projection of the estimate so grid-induced slack cannot crash it.
  Matrix comparable = nearest_psd(assembled, false);
  comparable /= comparable.trace().real();
  report.fidelity = fidelity(comparable, *report.rho_truth, 1e-6, 1e-6);
  report.trace_distance = trace_distance(assembled, *report.rho_truth);
  return report;
}

TomographyReport run_full_qst(const Matrix& rho_truth_modes, const QstConfig& cfg,
                              KernelCache* shared_cache) {
  BasisSpec basis = make_basis(cfg.ell_max);
  return run_full_qst(RailDensity::from_mode_density(basis, 1, 0, rho_truth_modes), cfg,
                      shared_cache);
}

}  // namespace oam
