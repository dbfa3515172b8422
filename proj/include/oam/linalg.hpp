// Dense complex linear-algebra helpers: Hermiticity checks, matrix square
// roots, Uhlmann fidelity, trace distance, PSD projection, random states.
//
// Free functions are templated on Eigen expressions so they compose with
// blocks and products without temporaries at the call site.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "oam/errors.hpp"

namespace oam {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <typename Derived>
Matrix hermitize(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / 2.0;
}

// Smallest eigenvalue of a Hermitian matrix.
template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Square root of a Hermitian PSD matrix; eigenvalues below zero are clamped.
template <typename Derived>
Matrix psd_sqrt(const Eigen::MatrixBase<Derived>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Nearest PSD matrix by eigenvalue clamping; optionally rescaled to keep the
// original trace (only meaningful when that trace is positive).
template <typename Derived>
Matrix nearest_psd(const Eigen::MatrixBase<Derived>& m, bool renormalize_trace = true) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  if (renormalize_trace) {
    double t0 = hermitize(m).trace().real();
    double t1 = out.trace().real();
    if (t1 > 0.0 && t0 > 0.0) out *= t0 / t1;
  }
  return out;
}

namespace detail {
template <typename Derived>
void check_state_pair(const Eigen::MatrixBase<Derived>& rho, double psd_tol,
                      double trace_tol, const char* who) {
  if (rho.rows() != rho.cols())
    throw PreconditionViolation(std::string(who) + ": matrix must be square");
  if (!is_hermitian(rho, 1e-8))
    throw PreconditionViolation(std::string(who) + ": matrix must be Hermitian");
  if (min_eigenvalue(rho) < -psd_tol)
    throw PreconditionViolation(std::string(who) + ": matrix not PSD within tolerance");
  if (std::abs(rho.trace().real() - 1.0) > trace_tol)
    throw PreconditionViolation(std::string(who) + ": trace must be 1 within tolerance");
}
}  // namespace detail

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two density
// matrices. Inputs must be Hermitian, PSD and unit-trace within the given
// tolerances; tiny negative eigenvalues inside tolerance are clamped.
template <typename D1, typename D2>
double fidelity(const Eigen::MatrixBase<D1>& rho, const Eigen::MatrixBase<D2>& sigma,
                double psd_tol = 1e-8, double trace_tol = 1e-8) {
  detail::check_state_pair(rho, psd_tol, trace_tol, "fidelity");
  detail::check_state_pair(sigma, psd_tol, trace_tol, "fidelity");
  Matrix sr = psd_sqrt(rho);
  Matrix inner = sr * hermitize(sigma) * sr;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(inner), Eigen::EigenvaluesOnly);
  double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(f * f, 1.0);
}

// Trace distance (1/2)||rho - sigma||_1 of two Hermitian matrices.
template <typename D1, typename D2>
double trace_distance(const Eigen::MatrixBase<D1>& rho, const Eigen::MatrixBase<D2>& sigma) {
  Matrix diff = hermitize(rho - sigma);
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

template <typename D1, typename D2>
double frobenius_distance(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b) {
  return (a - b).norm();
}

inline Complex random_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng)};
}

// Random rank-r density matrix from a Ginibre factor G: rho = G G^dag / tr.
Matrix random_density(int dim, int rank, std::mt19937_64& rng);

// Random Haar-ish pure state (normalized Gaussian vector).
Vector random_pure(int dim, std::mt19937_64& rng);

}  // namespace oam
