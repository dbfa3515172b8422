// Unitary matrices of the primitive optical elements on the rail basis.
//
// Conventions (path action written on basis kets):
//   dove prism          D(beta)|l,p>   = e^{i 2 l beta} |-l,p>
//   dove prism pair     |l,p>          -> e^{i 2 l beta_rel} |l,p>
//   Gouy lens stack     |l,p>          -> e^{i (|l|+2p+1) alpha} |l,p>
//   balanced splitter   |a> -> (|a>+|b>)/sqrt2,  |b> -> (|a>-|b>)/sqrt2
//   SLM shift           |l,p>          -> |l+k,p>     (widens the basis)
//   phase plate         all modes on one path        -> e^{i theta} (...)
//   path swap           exchanges the contents of two paths
#pragma once

#include <Eigen/Dense>
#include <string>

#include "oam/basis.hpp"
#include "oam/linalg.hpp"

namespace oam {

enum class ElementKind {
  DovePrism,
  DovePrismPair,
  BalancedBeamSplitter,
  GouyStack,
  SlmShift,
  PhasePlate,
  PathSwap,
};

std::string to_string(ElementKind kind);

// A primitive element: unitary (isometric for SlmShift) on n_paths (x) basis,
// with provenance metadata and an optical-component count.
struct OpticalElement {
  ElementKind kind;
  double param = 0.0;  // beta / relative angle / alpha / theta / shift k
  int path = 0;
  int path2 = -1;  // second path for splitter and swap
  int cost = 1;    // components: 2 per prism pair, 3 per lens stack, else 1
  int n_paths = 1;
  BasisSpec basis_in;
  BasisSpec basis_out;  // == basis_in except for SlmShift
  Matrix matrix;        // (n_paths * dim_out) x (n_paths * dim_in)

  bool widening() const { return !(basis_out == basis_in); }
};

// Requires a basis symmetric in +-ell so the flip is closed.
OpticalElement dove_prism(double beta, int path, const BasisSpec& basis, int n_paths);
OpticalElement dove_prism_pair(double relative_angle, int path, const BasisSpec& basis,
                               int n_paths);
OpticalElement gouy_stack(double alpha, int path, const BasisSpec& basis, int n_paths);
OpticalElement beam_splitter(int path_a, int path_b, const BasisSpec& basis, int n_paths);
// k = +-1; the output basis is basis.widened_for_shift(k).
OpticalElement slm_shift(int k, int path, const BasisSpec& basis, int n_paths);
OpticalElement phase_plate(double theta, int path, const BasisSpec& basis, int n_paths);
OpticalElement path_swap(int path_a, int path_b, const BasisSpec& basis, int n_paths);

// Element traversed in reverse; defined for square (non-widening) elements.
OpticalElement adjoint(const OpticalElement& e);

}  // namespace oam
