#include <doctest.h>

#include <numbers>

#include "oam/circuits.hpp"
#include "oam/errors.hpp"

using namespace oam;

namespace {
constexpr double kPi = std::numbers::pi;

// The single routing target of (in path 0, mode); fails the test if the
// row is not a clean single-port exit.
RoutingTarget sole_target(const Circuit& c, ModeIndex m) {
  PortRoutingTable t = routing_table(c);
  const RoutingRow& row = t.row(0, m);
  REQUIRE(row.targets.size() == 1);
  return row.targets.front();
}

bool is_unitary(const Matrix& u, double tol = 1e-10) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() <=
             tol &&
         (u * u.adjoint() - Matrix::Identity(u.rows(), u.rows())).cwiseAbs().maxCoeff() <= tol;
}
}  // namespace

TEST_CASE("OAM sorter at beta=pi/2 splits parity with unit amplitudes") {
  Circuit c = oam_sorter(kPi / 2.0, make_basis(4));
  RoutingTarget even = sole_target(c, {2, 0});
  CHECK(even.out_path == c.port("a"));
  CHECK(std::abs(std::abs(even.amplitude) - 1.0) < 1e-14);
  RoutingTarget odd = sole_target(c, {3, 0});
  CHECK(odd.out_path == c.port("b"));
  CHECK(std::abs(std::abs(odd.amplitude) - 1.0) < 1e-14);
  CHECK(element_count(c) == 4);
}

TEST_CASE("OAM sorter at beta=0 leaves everything in one port") {
  Circuit c = oam_sorter(0.0, make_basis(3));
  for (const ModeIndex& m : c.input_basis().modes()) {
    RoutingTarget t = sole_target(c, m);
    CHECK(t.out_path == c.port("a"));
  }
}

TEST_CASE("OAM sorter at beta=pi/4 splits mod-4 classes") {
  BasisSpec b = BasisSpec::contiguous(-4, 4);
  Circuit c = oam_sorter(kPi / 4.0, b);
  // (1 +- e^{i l pi / 2}) / 2: l = 0 and l = 4 co-routed, l = 2 opposite.
  RoutingTarget zero = sole_target(c, {0, 0});
  RoutingTarget four = sole_target(c, {4, 0});
  RoutingTarget two = sole_target(c, {2, 0});
  CHECK(zero.out_path == four.out_path);
  CHECK(two.out_path != four.out_path);
}

TEST_CASE("radial sorter separates p parity at ell = 0") {
  BasisSpec b = BasisSpec::contiguous(-1, 1, 1);
  Circuit c = radial_mode_sorter(kPi / 2.0, b);
  RoutingTarget p0 = sole_target(c, {0, 0});
  RoutingTarget p1 = sole_target(c, {0, 1});
  CHECK(p0.out_path == c.port("a"));
  CHECK(p1.out_path == c.port("b"));
  CHECK(std::abs(std::abs(p1.amplitude) - 1.0) < 1e-14);

  SUBCASE("alpha = 0 is a single-port pass-through") {
    Circuit id = radial_mode_sorter(0.0, b);
    for (const ModeIndex& m : b.modes()) CHECK(sole_target(id, m).out_path == id.port("a"));
  }
  SUBCASE("|l| enters the interference weights") {
    // (|l| + 2p) pi/2 = pi/2 for l=1, p=0: an even split, unlike the clean
    // port-a exit of l=0, p=0.
    PortRoutingTable t = routing_table(c);
    const RoutingRow& row = t.row(0, {1, 0});
    REQUIRE(row.targets.size() == 2);
    for (const RoutingTarget& tgt : row.targets)
      CHECK(std::abs(tgt.amplitude) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(radial_mode_sorter(kPi / 2.0, make_basis(2)), std::invalid_argument);
}

TEST_CASE("partial helicity sorter never sends negative modes to port b") {
  BasisSpec b = make_basis(4);
  for (int k = 0; k < 32; ++k) {
    const double alpha = k * kPi / 32.0;
    Circuit c = partial_helicity_sorter(alpha, b);
    PortRoutingTable t = routing_table(c);
    for (int l = 1; l <= 4; ++l) {
      const RoutingRow& row = t.row(0, {-l, 0});
      for (const RoutingTarget& tgt : row.targets) {
        if (tgt.out_path == c.port("b")) CHECK(std::abs(tgt.amplitude) < 1e-12);
      }
    }
  }
}

TEST_CASE("HS(pi/2) moves odd positive modes to port b with unit modulus") {
  Circuit c = partial_helicity_sorter(kPi / 2.0, make_basis(3));
  RoutingTarget t = sole_target(c, {3, 0});
  CHECK(t.out_path == c.port("b"));
  CHECK(std::abs(std::abs(t.amplitude) - 1.0) < 1e-14);
}

TEST_CASE("HS(pi/4) peels l=2 but passes l=4") {
  Circuit c = partial_helicity_sorter(kPi / 4.0, make_basis(4));
  CHECK(sole_target(c, {2, 0}).out_path == c.port("b"));
  CHECK(sole_target(c, {4, 0}).out_path == c.port("a"));
}

TEST_CASE("hs_odd routing") {
  Circuit c = hs_odd(make_basis(5));
  CHECK(sole_target(c, {5, 0}).out_path == c.port("b"));
  CHECK(sole_target(c, {-5, 0}).out_path == c.port("a"));
  CHECK(sole_target(c, {4, 0}).out_path == c.port("a"));
}

TEST_CASE("hs_even_slm sorts even helicities through the shift sandwich") {
  BasisSpec evens = BasisSpec::even_only(4);
  Circuit c = hs_even_slm(evens);
  CHECK(c.widening());
  CHECK(c.is_isometry(1e-12));
  CHECK(sole_target(c, {4, 0}).out_path == c.port("+"));
  CHECK(sole_target(c, {-4, 0}).out_path == c.port("-"));
  RoutingTarget plus2 = sole_target(c, {2, 0});
  RoutingTarget minus2 = sole_target(c, {-2, 0});
  CHECK(plus2.out_path == c.port("+"));
  CHECK(minus2.out_path == c.port("-"));
  CHECK(std::abs(std::abs(plus2.amplitude) - 1.0) < 1e-14);
  CHECK(std::abs(std::abs(minus2.amplitude) - 1.0) < 1e-14);
  CHECK(plus2.out_mode == ModeIndex{2, 0});  // shift restored
}

TEST_CASE("hs_even_cascade N=3 peels and recombines the even classes") {
  BasisSpec evens = BasisSpec::even_only(6);
  Circuit c = hs_even_cascade(3, evens);
  CHECK(is_unitary(c.matrix(), 1e-12));
  for (int l : {2, 4, 6}) {
    RoutingTarget plus = sole_target(c, {l, 0});
    CHECK(plus.out_path == c.port("+"));
    CHECK(std::abs(plus.amplitude - Complex(1.0, 0.0)) < 1e-13);
    RoutingTarget minus = sole_target(c, {-l, 0});
    CHECK(minus.out_path == c.port("-"));
    CHECK(std::abs(minus.amplitude - Complex(1.0, 0.0)) < 1e-13);
  }
  SUBCASE("capacity and domain errors") {
    CHECK_THROWS_AS(hs_even_cascade(2, BasisSpec::even_only(6)), CapacityError);
    CHECK_THROWS_AS(hs_even_cascade(3, make_basis(3)), std::invalid_argument);
  }
}

TEST_CASE("cascade and SLM even sorters route identically on the common domain") {
  for (int stages : {3, 4}) {
    const int lmax = std::min(14, (1 << stages) - 2);
    BasisSpec evens = BasisSpec::even_only(lmax);
    Circuit cascade = hs_even_cascade(stages, evens);
    Circuit slm = hs_even_slm(evens);
    for (const ModeIndex& m : evens.modes()) {
      RoutingTarget a = sole_target(cascade, m);
      RoutingTarget b = sole_target(slm, m);
      const bool a_plus = a.out_path == cascade.port("+");
      const bool b_plus = b.out_path == slm.port("+");
      CHECK(a_plus == b_plus);
      CHECK(a.out_mode == m);
      CHECK(b.out_mode == m);
    }
  }
}

TEST_CASE("full helicity sorter realizes the ideal sort on both variants") {
  BasisSpec b = make_basis(3);
  for (FhsVariant variant : {FhsVariant::Slm, FhsVariant::Cascade}) {
    Circuit fhs = full_helicity_sorter(b, variant);
    CAPTURE(fhs.name());
    CHECK(fhs.is_isometry(1e-12));
    for (const ModeIndex& m : b.modes()) {
      RoutingTarget t = sole_target(fhs, m);
      CHECK(t.out_path == fhs.port(m.ell > 0 ? "+" : "-"));
      CHECK(t.out_mode == m);
      CHECK(std::abs(t.amplitude - Complex(1.0, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("cascade FHS columns equal the ideal sorting operator") {
  BasisSpec b = make_basis(5);
  Circuit fhs = full_helicity_sorter(b, FhsVariant::Cascade);
  Matrix expected = helicity_sort_columns(b, fhs.n_paths(), fhs.port("+"), fhs.port("-"));
  const int d = b.dim();
  Matrix got(fhs.matrix().rows(), d);
  for (int i = 0; i < d; ++i) got.col(i) = fhs.matrix().col(rail_index(0, i, d));
  CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a second sorter traversed from its output side undoes the first") {
  BasisSpec b = make_basis(3);
  Circuit fhs = full_helicity_sorter(b, FhsVariant::Cascade);
  Circuit round = fhs.then(fhs.adjoint());
  CHECK((round.matrix() - Matrix::Identity(round.matrix().rows(), round.matrix().cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  SUBCASE("the SLM variant satisfies the same identity at the matrix level") {
    Circuit slm = full_helicity_sorter(b, FhsVariant::Slm);
    Matrix g = slm.matrix().adjoint() * slm.matrix();
    CHECK((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ell = 0 port assignment differs between the FHS variants") {
  BasisSpec b = BasisSpec::contiguous(-2, 2);
  Circuit slm = full_helicity_sorter(b, FhsVariant::Slm);
  Circuit cascade = full_helicity_sorter(b, FhsVariant::Cascade);
  CHECK(sole_target(slm, {0, 0}).out_path == slm.port("+"));
  CHECK(sole_target(cascade, {0, 0}).out_path == cascade.port("-"));
}

TEST_CASE("gate_hx equals the block Hadamard exactly") {
  BasisSpec b = make_basis(3);
  Circuit hx = gate_hx(b);
  Matrix u = hx.port_unitary(0, 0);
  CHECK((u - hx_block_matrix(3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(is_unitary(hx.matrix(), 1e-10));
  SUBCASE("|+1> maps to (|1> + |-1>)/sqrt2") {
    Vector in = Vector::Zero(6);
    in(b.index_of({1, 0})) = 1.0;
    Vector out = u * in;
    CHECK(std::abs(out(b.index_of({1, 0})) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
    CHECK(std::abs(out(b.index_of({-1, 0})) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  }
  SUBCASE("involution") {
    CHECK((u * u - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gate_phase applies e^{i theta} to the negative block only") {
  BasisSpec b = make_basis(2);
  Circuit p = gate_phase(kPi, b);
  Matrix u = p.port_unitary(0, 0);
  CHECK((u - phase_block_matrix(kPi, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(u(b.index_of({-2, 0}), b.index_of({-2, 0})) - Complex(-1, 0)) < 1e-12);
  CHECK(std::abs(u(b.index_of({2, 0}), b.index_of({2, 0})) - Complex(1, 0)) < 1e-12);
  SUBCASE("theta = 0 is the identity") {
    Matrix id = gate_phase(0.0, b).port_unitary(0, 0);
    CHECK((id - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("P(pi/2)^2 = P(pi)") {
    Matrix q = gate_phase(kPi / 2.0, b).port_unitary(0, 0);
    CHECK((q * q - u).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gate_hy equals the block form and the P Hx P composition") {
  BasisSpec b = make_basis(3);
  Matrix hy = gate_hy(b).port_unitary(0, 0);
  CHECK((hy - hy_block_matrix(3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((hy * hy.adjoint() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  Matrix p = gate_phase(kPi / 2.0, b).port_unitary(0, 0);
  Matrix hx = gate_hx(b).port_unitary(0, 0);
  CHECK((hy - p * hx * p).cwiseAbs().maxCoeff() < 1e-12);
  SUBCASE("|+1> maps to (|1> + i|-1>)/sqrt2") {
    Vector in = Vector::Zero(6);
    in(b.index_of({1, 0})) = 1.0;
    Vector out = hy * in;
    CHECK(std::abs(out(b.index_of({-1, 0})) - Complex(0, 1 / std::sqrt(2.0))) < 1e-12);
  }
}

TEST_CASE("routing rows are norm-preserving") {
  for (const Circuit& c : {full_helicity_sorter(make_basis(3), FhsVariant::Slm),
                           gate_hx(make_basis(2)), oam_sorter(0.77, make_basis(3))}) {
    PortRoutingTable t = routing_table(c);
    for (const RoutingRow& row : t.rows())
      CHECK(row.norm_squared == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cascade cost is affine in the stage count, SLM cost is flat") {
  // second differences of the cascade cost vanish
  std::vector<int> costs;
  for (int n : {3, 4, 5})
    costs.push_back(element_count(hs_even_cascade(n, BasisSpec::even_only((1 << n) - 2))));
  CHECK(costs[2] - 2 * costs[1] + costs[0] == 0);
  // the SLM even sorter has the same cost at every truncation
  CHECK(element_count(hs_even_slm(BasisSpec::even_only(4))) ==
        element_count(hs_even_slm(BasisSpec::even_only(14))));
}

TEST_CASE("apply() runs states and densities through a circuit") {
  BasisSpec b = make_basis(2);
  Circuit fhs = full_helicity_sorter(b, FhsVariant::Cascade);
  RailState in = RailState::pure(b, fhs.n_paths(), 0, {2, 0});
  RailState out = apply(fhs, in);
  CHECK(std::abs(out.amplitude(fhs.port("+"), {2, 0}) - Complex(1, 0)) < 1e-12);
  RailDensity rho_out = apply(fhs, in.density());
  CHECK(rho_out.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gate constructors reject unusable bases") {
  CHECK_THROWS_AS(gate_hx(BasisSpec::contiguous(-2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(gate_hy(make_basis(2, true, 1)), std::invalid_argument);
}
