// Sampled p = 0 Laguerre-Gaussian fields on a Cartesian grid.
//
// Field convention (beam waist w0):
//   f_l(r,phi) = sqrt(2 / (pi |l|! w0^2)) (sqrt2 r / w0)^{|l|}
//                e^{-r^2/w0^2} e^{i l phi},
// normalized so that the plane integral of |f_l|^2 is 1.
#pragma once

#include <map>

#include "oam/linalg.hpp"

namespace oam {

// Square sampling lattice: m x m pixel centers at ((i - m/2) dx, (j - m/2) dx)
// with half-width `extent` in units of the beam waist.
struct GridSpec {
  int m = 512;
  double extent = 8.0;
  double w0 = 1.0;

  double dx() const { return 2.0 * extent * w0 / m; }
  double coord(int j) const { return (j - m / 2) * dx(); }
  double samples_per_waist() const { return w0 / dx(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class LgField {
 public:
  LgField(int ell, const GridSpec& grid);

  int ell() const { return ell_; }
  const GridSpec& grid() const { return grid_; }
  // samples(ix, iy) = f_ell(x_ix, y_iy)
  const Matrix& samples() const { return samples_; }

 private:
  int ell_;
  GridSpec grid_;
  Matrix samples_;
};

// Throws ResolutionError when the grid undersamples the waist (< 16 samples
// per w0) or is too small for the ring radius of |ell|.
LgField lg_field(int ell, const GridSpec& grid);

// Memoizes fields per ell on one grid.
class FieldCache {
 public:
  explicit FieldCache(const GridSpec& grid) : grid_(grid) {}
  const GridSpec& grid() const { return grid_; }
  const LgField& get(int ell);

 private:
  GridSpec grid_;
  std::map<int, LgField> fields_;
};

}  // namespace oam
