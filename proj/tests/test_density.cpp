#include <doctest.h>

#include <random>

#include "oam/density.hpp"

using namespace oam;

namespace {
Matrix pure_mode(const BasisSpec& b, ModeIndex m) {
  Vector v = Vector::Zero(b.dim());
  v(b.index_of(m)) = 1.0;
  return v * v.adjoint();
}
}  // namespace

TEST_CASE("fidelity of a state with itself is 1") {
  std::mt19937_64 rng(11);
  Matrix rho = random_density(4, 2, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fidelity of orthogonal pure states is 0") {
  BasisSpec b = make_basis(1);
  Matrix a = pure_mode(b, {1, 0});
  Matrix c = pure_mode(b, {-1, 0});
  CHECK(fidelity(a, c) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(a, c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fidelity of I/2 with a pure state in dim 2 is 1/2") {
  BasisSpec b = make_basis(1);
  Matrix mixed = Matrix::Identity(2, 2) / 2.0;
  CHECK(fidelity(mixed, pure_mode(b, {1, 0})) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fidelity is symmetric and rejects non-states") {
  std::mt19937_64 rng(7);
  Matrix a = random_density(6, 3, rng);
  Matrix b = random_density(6, 6, rng);
  CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)).epsilon(1e-7));
  Matrix not_psd = a;
  not_psd(0, 0) -= 0.5;  // breaks PSD and trace
  CHECK_THROWS_AS(fidelity(not_psd, b), PreconditionViolation);
}

TEST_CASE("trace distance of identical states is 0") {
  std::mt19937_64 rng(3);
  Matrix a = random_density(4, 4, rng);
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
}

TEST_CASE("block round trip is exact") {
  std::mt19937_64 rng(5);
  Matrix h = random_density(8, 8, rng);
  BlockDecomposition blocks = block_decompose(h);
  Matrix back = block_assemble(blocks);
  CHECK((back - h).cwiseAbs().maxCoeff() == 0.0);  // bitwise slice/reassembly
}

TEST_CASE("block decomposition of the identity") {
  BlockDecomposition blocks = block_decompose(Matrix::Identity(4, 4));
  CHECK(blocks.rho_plus.isApprox(Matrix::Identity(2, 2)));
  CHECK(blocks.rho_minus.isApprox(Matrix::Identity(2, 2)));
  CHECK(blocks.sigma.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("blocks of (|1>+|-1>)/sqrt2 are all 1/2") {
  BasisSpec b = make_basis(1);
  Vector v = Vector::Zero(2);
  v(b.index_of({1, 0})) = 1.0 / std::sqrt(2.0);
  v(b.index_of({-1, 0})) = 1.0 / std::sqrt(2.0);
  BlockDecomposition blocks = block_decompose(v * v.adjoint());
  CHECK(std::abs(blocks.rho_plus(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(blocks.rho_minus(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(blocks.sigma(0, 0) - 0.5) < 1e-15);
}

TEST_CASE("odd dimension rejected by block_decompose") {
  CHECK_THROWS_AS(block_decompose(Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("project_subspace on pure and mixed states") {
  BasisSpec b = make_basis(2);
  SUBCASE("|1><1| projects onto the positive block") {
    RailDensity rho = RailDensity::from_mode_density(b, 1, 0, pure_mode(b, {1, 0}));
    Matrix p = project_subspace(rho, Helicity::Positive, 0);
    CHECK(p(0, 0) == Complex(1.0, 0.0));
    CHECK(p.cwiseAbs().sum() == doctest::Approx(1.0));
    Matrix m = project_subspace(rho, Helicity::Negative, 0);
    CHECK(m.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("|-1><-1| has no positive part") {
    RailDensity rho = RailDensity::from_mode_density(b, 1, 0, pure_mode(b, {-1, 0}));
    CHECK(project_subspace(rho, Helicity::Positive, 0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("maximally mixed projects to diag(1/4,1/4)") {
    RailDensity rho = RailDensity::from_mode_density(b, 1, 0, Matrix::Identity(4, 4) / 4.0);
    Matrix p = project_subspace(rho, Helicity::Positive, 0);
    CHECK(p.isApprox(Matrix::Identity(2, 2) / 4.0, 1e-15));
  }
  SUBCASE("projection traces sum to the path trace") {
    std::mt19937_64 rng(17);
    Matrix full = random_density(4, 3, rng);
    RailDensity rho = RailDensity::from_mode_density(b, 2, 1, full);
    double tp = project_subspace(rho, Helicity::Positive, 1).trace().real();
    double tn = project_subspace(rho, Helicity::Negative, 1).trace().real();
    CHECK(tp + tn == doctest::Approx(rho.path_block(1).trace().real()).epsilon(1e-12));
  }
  SUBCASE("path out of range") {
    RailDensity rho = RailDensity::from_mode_density(b, 1, 0, Matrix::Identity(4, 4) / 4.0);
    CHECK_THROWS_AS(project_subspace(rho, Helicity::Positive, 2), std::invalid_argument);
  }
}

TEST_CASE("physical-state validation") {
  BasisSpec b = make_basis(1);
  std::mt19937_64 rng(2);
  RailDensity good = RailDensity::from_mode_density(b, 1, 0, random_density(2, 2, rng));
  CHECK_NOTHROW(good.validate_physical());
  Matrix bad = Matrix::Identity(2, 2);  // trace 2
  CHECK_THROWS_AS(RailDensity::from_mode_density(b, 1, 0, bad).validate_physical(),
                  PreconditionViolation);
}

TEST_CASE("RailState construction and normalization") {
  BasisSpec b = make_basis(1);
  RailState s = RailState::pure(b, 2, 0, {1, 0});
  CHECK(s.norm_squared() == doctest::Approx(1.0));
  CHECK(s.amplitude(0, {1, 0}) == Complex(1.0, 0.0));
  CHECK(s.density().trace() == doctest::Approx(1.0));
  Vector v = Vector::Zero(4);
  v(0) = 0.5;  // norm 0.25
  CHECK_THROWS_AS(RailState(b, 2, v), std::invalid_argument);
  CHECK_NOTHROW(RailState(b, 2, v, /*subnormalized=*/true));
}

TEST_CASE("nearest_psd clamps and renormalizes") {
  Matrix m(2, 2);
  m << Complex(1.2, 0), Complex(0, 0), Complex(0, 0), Complex(-0.2, 0);
  Matrix p = nearest_psd(m);
  CHECK(min_eigenvalue(p) >= 0.0);
  CHECK(p.trace().real() == doctest::Approx(1.0));
}
