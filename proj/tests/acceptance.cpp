// Acceptance suite: one self-contained check per criterion, each printing a
// single [PASS]/[FAIL] line with its timing. Exit code is the number of
// failed criteria.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oam/circuits.hpp"
#include "oam/tomography.hpp"

using namespace oam;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      detail = msg;
    }
  }
  void note(const std::string& msg) {
    if (!detail.empty()) detail += "; ";
    detail += msg;
  }
};

AhstConfig reference_config() {
  AhstConfig cfg;
  cfg.grid = {512, 8.0, 1.0};
  return cfg;
}

// 1. Parity sorter and partial helicity sorter routing at ell_max = 8.
Check criterion_sorters() {
  Check c;
  BasisSpec b = make_basis(8);
  Circuit sorter = oam_sorter(kPi / 2.0, b);
  PortRoutingTable table = routing_table(sorter);
  for (const ModeIndex& m : b.modes()) {
    const RoutingRow& row = table.row(0, m);
    c.require(row.targets.size() == 1, "parity sorter split " + to_string(m));
    if (row.targets.size() != 1) continue;
    const RoutingTarget& t = row.targets.front();
    const int want = (std::abs(m.ell) % 2 == 0) ? sorter.port("a") : sorter.port("b");
    c.require(t.out_path == want, "parity sorter misrouted " + to_string(m));
    c.require(std::abs(std::abs(t.amplitude) - 1.0) <= 1e-12,
              "parity sorter amplitude off for " + to_string(m));
  }
  for (int k = 0; k < 32; ++k) {
    Circuit hs = partial_helicity_sorter(k * kPi / 32.0, b);
    PortRoutingTable ht = routing_table(hs);
    for (int l = 1; l <= 8; ++l) {
      const RoutingRow& row = ht.row(0, {-l, 0});
      for (const RoutingTarget& t : row.targets)
        if (t.out_path == hs.port("b"))
          c.require(std::abs(t.amplitude) < 1e-12, "negative mode reached port b");
    }
  }
  return c;
}

// 2. Cascade / SLM equivalence and component-count scaling.
Check criterion_cascade_equivalence() {
  Check c;
  for (int stages : {3, 4}) {
    const int lmax = std::min(14, (1 << stages) - 2);
    BasisSpec evens = BasisSpec::even_only(lmax);
    Circuit cascade = hs_even_cascade(stages, evens);
    Circuit slm = hs_even_slm(evens);
    PortRoutingTable tc = routing_table(cascade);
    PortRoutingTable ts = routing_table(slm);
    for (const ModeIndex& m : evens.modes()) {
      const RoutingRow& rc = tc.row(0, m);
      const RoutingRow& rs = ts.row(0, m);
      c.require(rc.targets.size() == 1 && rs.targets.size() == 1,
                "split routing for " + to_string(m));
      if (rc.targets.size() != 1 || rs.targets.size() != 1) continue;
      const bool cascade_plus = rc.targets.front().out_path == cascade.port("+");
      const bool slm_plus = rs.targets.front().out_path == slm.port("+");
      c.require(cascade_plus == slm_plus, "variants disagree on " + to_string(m));
      c.require(rc.targets.front().out_mode == m && rs.targets.front().out_mode == m,
                "mode label changed through a sorter");
    }
  }
  std::vector<int> costs;
  for (int n : {3, 4, 5})
    costs.push_back(element_count(hs_even_cascade(n, BasisSpec::even_only((1 << n) - 2))));
  c.require(costs[2] - 2 * costs[1] + costs[0] == 0, "cascade cost is not affine in N");
  c.require(element_count(hs_even_slm(BasisSpec::even_only(4))) ==
                element_count(hs_even_slm(BasisSpec::even_only(14))),
            "SLM sorter cost depends on the truncation");
  c.note("cascade costs N=3,4,5: " + std::to_string(costs[0]) + "," +
         std::to_string(costs[1]) + "," + std::to_string(costs[2]));
  return c;
}

// 3. Gate matrices against their block forms.
Check criterion_gates() {
  Check c;
  const int n = 8;
  BasisSpec b = make_basis(n);
  Matrix hx = gate_hx(b).port_unitary(0, 0);
  c.require((hx - hx_block_matrix(n)).cwiseAbs().maxCoeff() <= 1e-10, "Hx block mismatch");
  for (double theta : {kPi / 2.0, kPi}) {
    Matrix p = gate_phase(theta, b).port_unitary(0, 0);
    c.require((p - phase_block_matrix(theta, n)).cwiseAbs().maxCoeff() <= 1e-10,
              "P(theta) block mismatch");
  }
  Matrix hy = gate_hy(b).port_unitary(0, 0);
  c.require((hy - hy_block_matrix(n)).cwiseAbs().maxCoeff() <= 1e-10, "Hy block mismatch");
  Matrix p2 = gate_phase(kPi / 2.0, b).port_unitary(0, 0);
  c.require((hy - p2 * hx * p2).cwiseAbs().maxCoeff() <= 1e-12,
            "Hy != P(pi/2) Hx P(pi/2)");
  return c;
}

// 4. Weighted kernel orthogonality over all pairs with l <= 4.
Check criterion_kernel_gram(KernelCache& cache) {
  Check c;
  std::vector<std::pair<int, int>> pairs;
  for (int l1 = 0; l1 <= 4; ++l1)
    for (int l2 = 0; l2 <= 4; ++l2) pairs.push_back({l1, l2});
  Matrix gram = kernel_gram(cache, pairs);
  const double ideal = 2.0 / kPi;
  double worst_diag = 0.0, worst_off = 0.0;
  for (Eigen::Index a = 0; a < gram.rows(); ++a)
    for (Eigen::Index b = 0; b < gram.cols(); ++b) {
      if (a == b)
        worst_diag = std::max(worst_diag, std::abs(gram(a, a).real() / ideal - 1.0));
      else
        worst_off = std::max(worst_off, std::abs(gram(a, b)) / ideal);
    }
  c.require(worst_diag <= 0.01, "diagonal deviates by " + std::to_string(worst_diag));
  c.require(worst_off <= 0.01, "off-diagonal reaches " + std::to_string(worst_off));
  char buf[96];
  std::snprintf(buf, sizeof buf, "diag dev %.2e, off-diag %.2e of 2/(pi w0^2)", worst_diag,
                worst_off);
  c.note(buf);
  return c;
}

// 5. Single-helicity round trips at l <= 4.
Check criterion_round_trip(KernelCache& cache) {
  Check c;
  std::mt19937_64 rng(2024);
  double worst = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix rho = random_density(4, 1 + trial % 4, rng);
    IntensityGrid img = intensity_from_density(rho, Helicity::Positive, cache.config().grid);
    Matrix rec = reconstruct_positive(img, 4, cache);
    Matrix comparable = nearest_psd(rec, false);
    comparable /= comparable.trace().real();
    worst = std::min(worst, fidelity(comparable, rho, 1e-3, 1e-3));
  }
  c.require(worst >= 0.99, "round-trip fidelity dropped to " + std::to_string(worst));
  char buf[48];
  std::snprintf(buf, sizeof buf, "worst fidelity %.5f", worst);
  c.note(buf);
  return c;
}

// 6. Exact-marginal assembly oracle over 100 random states.
Check criterion_sigma_oracle() {
  Check c;
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    Matrix rho = random_density(2 * n, 1 + trial % (2 * n), rng);
    const Matrix settings[3] = {Matrix::Identity(2 * n, 2 * n), hx_block_matrix(n),
                                hy_block_matrix(n)};
    MarginalSet m;
    for (int k = 0; k < 3; ++k) {
      auto [mu, nu] = marginals_by_formula(rho, settings[k]);
      m.mu[static_cast<size_t>(k)] = mu;
      m.nu[static_cast<size_t>(k)] = nu;
    }
    worst = std::max(worst, frobenius_distance(assemble_full_density(m, n), rho));
  }
  c.require(worst <= 1e-9, "assembly error " + std::to_string(worst));
  c.note("verified orientation: cross block = (mu2 - i mu3 - (1-i)/2 (mu1+nu1))^dagger "
         "under rho -> U rho U^dagger");
  return c;
}

// 7. End-to-end tomography, noiseless and photon-noisy.
Check criterion_full_qst(KernelCache& reference) {
  Check c;
  QstConfig cfg;
  cfg.ell_max = 3;
  std::mt19937_64 rng(4242);
  std::vector<Matrix> states;
  double worst = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    states.push_back(random_density(6, 1 + trial % 6, rng));
    TomographyReport r = run_full_qst(states.back(), cfg, &reference);
    worst = std::min(worst, r.fidelity);
  }
  c.require(worst >= 0.99, "noiseless fidelity dropped to " + std::to_string(worst));

  QstConfig noisy = cfg;
  noisy.noise = NoiseSpec{1e7, 0};
  KernelCache noisy_cache(noisy.effective_ahst());
  double worst_mean = 1.0;
  for (int s = 0; s < 2; ++s) {
    double mean = 0.0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
      noisy.noise = NoiseSpec{1e7, 1000 * seed + 17};
      mean += run_full_qst(states[static_cast<size_t>(s)], noisy, &noisy_cache).fidelity / 10.0;
    }
    worst_mean = std::min(worst_mean, mean);
  }
  c.require(worst_mean >= 0.97,
            "noisy mean fidelity dropped to " + std::to_string(worst_mean));
  char buf[96];
  std::snprintf(buf, sizeof buf, "noiseless worst %.5f, 1e7-photon mean %.5f", worst,
                worst_mean);
  c.note(buf);
  return c;
}

// 8. The single-image degeneracy between the two helicities.
Check criterion_degeneracy() {
  Check c;
  GridSpec g = reference_config().grid;
  for (auto [l1, l2] : {std::pair{1, 2}, std::pair{2, 4}, std::pair{1, 3}}) {
    Matrix rho = Matrix::Zero(4, 4);
    rho(l1 - 1, l1 - 1) = 0.5;
    rho(l2 - 1, l2 - 1) = 0.5;
    rho(l1 - 1, l2 - 1) = Complex(0.25, 0.35);
    rho(l2 - 1, l1 - 1) = Complex(0.25, -0.35);
    IntensityGrid pos = intensity_from_density(rho, Helicity::Positive, g);
    IntensityGrid neg = intensity_from_density(rho.transpose(), Helicity::Negative, g);
    c.require((pos.values() - neg.values()).cwiseAbs().maxCoeff() <= 1e-10,
              "images distinguish the helicity-flipped coherences");
  }
  return c;
}

}  // namespace

int main() {
  KernelCache reference(reference_config());

  struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "sorter routing (parity + partial helicity)", 1.0, criterion_sorters},
      {2, "cascade/SLM equivalence and cost scaling", 5.0, criterion_cascade_equivalence},
      {3, "gate matrices vs block forms", 60.0, criterion_gates},
      {4, "weighted kernel orthogonality (l <= 4)", 60.0,
       [&] { return criterion_kernel_gram(reference); }},
      {5, "single-helicity round trips (l <= 4)", 120.0,
       [&] { return criterion_round_trip(reference); }},
      {6, "cross-block assembly oracle", 60.0, criterion_sigma_oracle},
      {7, "end-to-end tomography, noiseless + 1e7 photons", 600.0,
       [&] { return criterion_full_qst(reference); }},
      {8, "helicity-flip intensity degeneracy", 60.0, criterion_degeneracy},
  };

  int failures = 0;
  for (const Criterion& crit : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Check result = crit.run();
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > crit.time_limit_s) {
      result.ok = false;
      result.note("exceeded the " + std::to_string(crit.time_limit_s) + " s budget");
    }
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", result.ok ? "PASS" : "FAIL",
                crit.id, crit.name, elapsed, result.detail.empty() ? "" : " -- ",
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  return failures;
}
