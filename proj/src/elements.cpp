#include "oam/elements.hpp"

#include <cmath>
#include <stdexcept>

#include "oam/errors.hpp"

namespace oam {

namespace {

void check_path(int path, int n_paths, const char* who) {
  if (path < 0 || path >= n_paths)
    throw std::invalid_argument(std::string(who) + ": path out of range");
}

// Square element acting on one path as a mode->mode map with a phase;
// identity on every other path.
template <typename Action>
Matrix single_path_matrix(const BasisSpec& basis, int n_paths, int path, Action&& act) {
  const int d = basis.dim();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_paths) * d,
                          static_cast<Eigen::Index>(n_paths) * d);
  for (int q = 0; q < n_paths; ++q) {
    for (int i = 0; i < d; ++i) {
      if (q != path) {
        m(rail_index(q, i, d), rail_index(q, i, d)) = 1.0;
      } else {
        auto [target, phase] = act(basis.mode(i));
        m(rail_index(q, basis.index_of(target), d), rail_index(q, i, d)) = phase;
      }
    }
  }
  return m;
}

}  // namespace

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::DovePrism: return "DOVE_PRISM";
    case ElementKind::DovePrismPair: return "DOVE_PRISM_PAIR";
    case ElementKind::BalancedBeamSplitter: return "BBS";
    case ElementKind::GouyStack: return "GOUY_STACK";
    case ElementKind::SlmShift: return "SLM_SHIFT";
    case ElementKind::PhasePlate: return "PHASE_PLATE";
    case ElementKind::PathSwap: return "PATH_SWAP";
  }
  return "UNKNOWN";
}

OpticalElement dove_prism(double beta, int path, const BasisSpec& basis, int n_paths) {
  check_path(path, n_paths, "dove_prism");
  if (!basis.symmetric_in_ell())
    throw std::invalid_argument("dove_prism: basis must be symmetric in +-ell");
  OpticalElement e{ElementKind::DovePrism, beta, path, -1, 1, n_paths, basis, basis, {}};
  e.matrix = single_path_matrix(basis, n_paths, path, [beta](ModeIndex m) {
    return std::pair{ModeIndex{-m.ell, m.p}, std::polar(1.0, 2.0 * m.ell * beta)};
  });
  return e;
}

OpticalElement dove_prism_pair(double relative_angle, int path, const BasisSpec& basis,
                               int n_paths) {
  check_path(path, n_paths, "dove_prism_pair");
  OpticalElement e{ElementKind::DovePrismPair, relative_angle, path, -1, 2,
                   n_paths,                    basis,          basis, {}};
  e.matrix = single_path_matrix(basis, n_paths, path, [relative_angle](ModeIndex m) {
    return std::pair{m, std::polar(1.0, 2.0 * m.ell * relative_angle)};
  });
  return e;
}

OpticalElement gouy_stack(double alpha, int path, const BasisSpec& basis, int n_paths) {
  check_path(path, n_paths, "gouy_stack");
  OpticalElement e{ElementKind::GouyStack, alpha, path, -1, 3, n_paths, basis, basis, {}};
  e.matrix = single_path_matrix(basis, n_paths, path, [alpha](ModeIndex m) {
    return std::pair{m, std::polar(1.0, (std::abs(m.ell) + 2 * m.p + 1) * alpha)};
  });
  return e;
}

OpticalElement phase_plate(double theta, int path, const BasisSpec& basis, int n_paths) {
  check_path(path, n_paths, "phase_plate");
  OpticalElement e{ElementKind::PhasePlate, theta, path, -1, 1, n_paths, basis, basis, {}};
  e.matrix = single_path_matrix(basis, n_paths, path, [theta](ModeIndex m) {
    return std::pair{m, std::polar(1.0, theta)};
  });
  return e;
}

OpticalElement beam_splitter(int path_a, int path_b, const BasisSpec& basis, int n_paths) {
  check_path(path_a, n_paths, "beam_splitter");
  check_path(path_b, n_paths, "beam_splitter");
  if (path_a == path_b) throw std::invalid_argument("beam_splitter: paths must differ");
  const int d = basis.dim();
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_paths) * d,
                          static_cast<Eigen::Index>(n_paths) * d);
  for (int q = 0; q < n_paths; ++q) {
    if (q == path_a || q == path_b) continue;
    for (int i = 0; i < d; ++i) m(rail_index(q, i, d), rail_index(q, i, d)) = 1.0;
  }
  for (int i = 0; i < d; ++i) {
    m(rail_index(path_a, i, d), rail_index(path_a, i, d)) = s;
    m(rail_index(path_b, i, d), rail_index(path_a, i, d)) = s;
    m(rail_index(path_a, i, d), rail_index(path_b, i, d)) = s;
    m(rail_index(path_b, i, d), rail_index(path_b, i, d)) = -s;
  }
  OpticalElement e{ElementKind::BalancedBeamSplitter, 0.0, path_a, path_b, 1,
                   n_paths,                           basis, basis,  {}};
  e.matrix = std::move(m);
  return e;
}

OpticalElement path_swap(int path_a, int path_b, const BasisSpec& basis, int n_paths) {
  check_path(path_a, n_paths, "path_swap");
  check_path(path_b, n_paths, "path_swap");
  if (path_a == path_b) throw std::invalid_argument("path_swap: paths must differ");
  const int d = basis.dim();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_paths) * d,
                          static_cast<Eigen::Index>(n_paths) * d);
  for (int q = 0; q < n_paths; ++q) {
    int target = q == path_a ? path_b : (q == path_b ? path_a : q);
    for (int i = 0; i < d; ++i) m(rail_index(target, i, d), rail_index(q, i, d)) = 1.0;
  }
  OpticalElement e{ElementKind::PathSwap, 0.0, path_a, path_b, 1, n_paths, basis, basis, {}};
  e.matrix = std::move(m);
  return e;
}

OpticalElement slm_shift(int k, int path, const BasisSpec& basis, int n_paths) {
  check_path(path, n_paths, "slm_shift");
  if (k != 1 && k != -1) throw std::invalid_argument("slm_shift: k must be +-1");
  BasisSpec wide = basis.widened_for_shift(k);
  const int di = basis.dim();
  const int dw = wide.dim();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_paths) * dw,
                          static_cast<Eigen::Index>(n_paths) * di);
  for (int q = 0; q < n_paths; ++q) {
    for (int i = 0; i < di; ++i) {
      ModeIndex in = basis.mode(i);
      ModeIndex out = q == path ? ModeIndex{in.ell + k, in.p} : in;
      m(rail_index(q, wide.index_of(out), dw), rail_index(q, i, di)) = 1.0;
    }
  }
  OpticalElement e{ElementKind::SlmShift, static_cast<double>(k), path, -1, 1,
                   n_paths,               basis,                  wide, {}};
  e.matrix = std::move(m);
  return e;
}

OpticalElement adjoint(const OpticalElement& e) {
  if (e.widening())
    throw CapacityError("adjoint: undefined for basis-widening elements");
  OpticalElement r = e;
  r.matrix = e.matrix.adjoint();
  switch (e.kind) {
    case ElementKind::DovePrism:  // involution, parameter unchanged
    case ElementKind::BalancedBeamSplitter:
    case ElementKind::PathSwap:
      break;
    case ElementKind::DovePrismPair:
    case ElementKind::GouyStack:
    case ElementKind::PhasePlate:
    case ElementKind::SlmShift:
      r.param = -e.param;
      break;
  }
  return r;
}

}  // namespace oam
