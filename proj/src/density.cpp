#include "oam/density.hpp"

#include <stdexcept>

namespace oam {

RailState::RailState(BasisSpec basis, int n_paths, Vector amplitudes, bool subnormalized)
    : basis_(std::move(basis)), n_paths_(n_paths), amplitudes_(std::move(amplitudes)),
      subnormalized_(subnormalized) {
  if (n_paths_ < 1) throw std::invalid_argument("RailState: n_paths must be >= 1");
  if (amplitudes_.size() != static_cast<Eigen::Index>(n_paths_) * basis_.dim())
    throw std::invalid_argument("RailState: amplitude vector has wrong length");
  if (!subnormalized_ && std::abs(norm_squared() - 1.0) > 1e-12)
    throw std::invalid_argument("RailState: physical state must have unit norm");
}

RailState RailState::pure(const BasisSpec& basis, int n_paths, int path, ModeIndex mode) {
  if (path < 0 || path >= n_paths) throw std::invalid_argument("RailState: path out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n_paths) * basis.dim());
  v(rail_index(path, basis.index_of(mode), basis.dim())) = 1.0;
  return RailState(basis, n_paths, std::move(v));
}

RailState RailState::from_mode_vector(const BasisSpec& basis, int n_paths, int path,
                                      const Vector& mode_amplitudes) {
  if (path < 0 || path >= n_paths) throw std::invalid_argument("RailState: path out of range");
  if (mode_amplitudes.size() != basis.dim())
    throw std::invalid_argument("RailState: mode vector has wrong length");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n_paths) * basis.dim());
  v.segment(static_cast<Eigen::Index>(path) * basis.dim(), basis.dim()) = mode_amplitudes;
  return RailState(basis, n_paths, std::move(v));
}

Complex RailState::amplitude(int path, ModeIndex mode) const {
  if (path < 0 || path >= n_paths_) throw std::invalid_argument("RailState: path out of range");
  return amplitudes_(rail_index(path, basis_.index_of(mode), basis_.dim()));
}

RailDensity RailState::density() const {
  return RailDensity(basis_, n_paths_, amplitudes_ * amplitudes_.adjoint());
}

RailDensity::RailDensity(BasisSpec basis, int n_paths, Matrix matrix)
    : basis_(std::move(basis)), n_paths_(n_paths), matrix_(std::move(matrix)) {
  if (n_paths_ < 1) throw std::invalid_argument("RailDensity: n_paths must be >= 1");
  const Eigen::Index d = static_cast<Eigen::Index>(n_paths_) * basis_.dim();
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw std::invalid_argument("RailDensity: matrix has wrong dimensions");
}

RailDensity RailDensity::from_mode_density(const BasisSpec& basis, int n_paths, int path,
                                           const Matrix& rho_modes) {
  if (path < 0 || path >= n_paths) throw std::invalid_argument("RailDensity: path out of range");
  if (rho_modes.rows() != basis.dim() || rho_modes.cols() != basis.dim())
    throw std::invalid_argument("RailDensity: mode density has wrong dimensions");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_paths) * basis.dim(),
                          static_cast<Eigen::Index>(n_paths) * basis.dim());
  m.block(static_cast<Eigen::Index>(path) * basis.dim(),
          static_cast<Eigen::Index>(path) * basis.dim(), basis.dim(), basis.dim()) = rho_modes;
  return RailDensity(basis, n_paths, std::move(m));
}

Matrix RailDensity::path_block(int path) const {
  if (path < 0 || path >= n_paths_) throw std::invalid_argument("RailDensity: path out of range");
  const int d = basis_.dim();
  return matrix_.block(static_cast<Eigen::Index>(path) * d,
                       static_cast<Eigen::Index>(path) * d, d, d);
}

Complex RailDensity::element(int path_r, ModeIndex mr, int path_c, ModeIndex mc) const {
  return matrix_(rail_index(path_r, basis_.index_of(mr), basis_.dim()),
                 rail_index(path_c, basis_.index_of(mc), basis_.dim()));
}

void RailDensity::validate_physical(double herm_tol, double trace_tol, double eig_floor) const {
  if (!is_hermitian(matrix_, herm_tol))
    throw PreconditionViolation("RailDensity: matrix not Hermitian");
  if (std::abs(trace() - 1.0) > trace_tol)
    throw PreconditionViolation("RailDensity: trace differs from 1");
  if (min_eigenvalue(matrix_) < eig_floor)
    throw PreconditionViolation("RailDensity: negative eigenvalue beyond tolerance");
}

BlockDecomposition block_decompose(const Matrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() % 2 != 0)
    throw std::invalid_argument("block_decompose: matrix side must be even");
  const Eigen::Index n = rho.rows() / 2;
  return {rho.topLeftCorner(n, n), rho.bottomRightCorner(n, n), rho.topRightCorner(n, n)};
}

Matrix block_assemble(const BlockDecomposition& blocks) {
  const Eigen::Index n = blocks.rho_plus.rows();
  if (blocks.rho_plus.cols() != n || blocks.rho_minus.rows() != n ||
      blocks.rho_minus.cols() != n || blocks.sigma.rows() != n || blocks.sigma.cols() != n)
    throw std::invalid_argument("block_assemble: inconsistent block dimensions");
  Matrix rho(2 * n, 2 * n);
  rho.topLeftCorner(n, n) = blocks.rho_plus;
  rho.topRightCorner(n, n) = blocks.sigma;
  rho.bottomLeftCorner(n, n) = blocks.sigma.adjoint();
  rho.bottomRightCorner(n, n) = blocks.rho_minus;
  return rho;
}

Matrix project_subspace(const RailDensity& rho, Helicity which, int path) {
  const BasisSpec& b = rho.basis();
  if (!b.is_tomography_ordered() || b.has_radial())
    throw std::invalid_argument("project_subspace: needs a p=0 tomography-ordered basis");
  const int n = b.dim() / 2;
  Matrix block = rho.path_block(path);
  return which == Helicity::Positive ? Matrix(block.topLeftCorner(n, n))
                                     : Matrix(block.bottomRightCorner(n, n));
}

}  // namespace oam
