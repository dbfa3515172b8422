// Path-tagged states and density matrices on a truncated OAM basis, the
// positive/negative block decomposition, and helicity-subspace projections.
#pragma once

#include <optional>

#include "oam/basis.hpp"
#include "oam/linalg.hpp"

namespace oam {

// Pure state on the rail space (paths (x) modes). Physical states are
// normalized; sub-normalized vectors (after projections) carry a flag.
class RailState {
 public:
  RailState(BasisSpec basis, int n_paths, Vector amplitudes, bool subnormalized = false);

  // |path> (x) |mode>
  static RailState pure(const BasisSpec& basis, int n_paths, int path, ModeIndex mode);
  // |path> (x) sum_i amps(i) |basis.mode(i)>
  static RailState from_mode_vector(const BasisSpec& basis, int n_paths, int path,
                                    const Vector& mode_amplitudes);

  const BasisSpec& basis() const { return basis_; }
  int n_paths() const { return n_paths_; }
  const Vector& amplitudes() const { return amplitudes_; }
  bool subnormalized() const { return subnormalized_; }

  Complex amplitude(int path, ModeIndex mode) const;
  double norm_squared() const { return amplitudes_.squaredNorm(); }

  class RailDensity density() const;

 private:
  BasisSpec basis_;
  int n_paths_;
  Vector amplitudes_;
  bool subnormalized_;
};

// Density matrix on the rail space.
class RailDensity {
 public:
  RailDensity(BasisSpec basis, int n_paths, Matrix matrix);

  // rho_modes placed on one path, vacuum elsewhere.
  static RailDensity from_mode_density(const BasisSpec& basis, int n_paths, int path,
                                       const Matrix& rho_modes);

  const BasisSpec& basis() const { return basis_; }
  int n_paths() const { return n_paths_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  double trace() const { return matrix_.trace().real(); }
  // Diagonal path block as a dim(basis) x dim(basis) matrix.
  Matrix path_block(int path) const;
  Complex element(int path_r, ModeIndex mr, int path_c, ModeIndex mc) const;

  // Hermitian within herm_tol, unit trace within trace_tol, eigenvalues
  // above eig_floor. Throws PreconditionViolation otherwise.
  void validate_physical(double herm_tol = 1e-12, double trace_tol = 1e-12,
                         double eig_floor = -1e-10) const;

 private:
  BasisSpec basis_;
  int n_paths_;
  Matrix matrix_;
};

// The helicity block structure of a matrix in tomography ordering:
//   [ rho_plus   sigma     ]
//   [ sigma^dag  rho_minus ]
struct BlockDecomposition {
  Matrix rho_plus;
  Matrix rho_minus;
  Matrix sigma;
};

BlockDecomposition block_decompose(const Matrix& rho);
Matrix block_assemble(const BlockDecomposition& blocks);

// P_{+-} rho P_{+-} restricted to one path, as the ell_max x ell_max block in
// tomography ordering. Not renormalized: the trace is the port probability.
Matrix project_subspace(const RailDensity& rho, Helicity which, int path);

}  // namespace oam
