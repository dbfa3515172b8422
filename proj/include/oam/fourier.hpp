// Centered discrete approximation of the continuous 2D Fourier transform
// F[g](k) = integral g(x) e^{-i 2 pi k.x} d^2x on a GridSpec lattice, with
// bilinear sampling in the frequency plane.
#pragma once

#include "oam/lg_modes.hpp"

namespace oam {

// Frequency-plane samples: values(i, j) ~ F[g] at
// k = ((i - m/2) dk, (j - m/2) dk), dk = 1 / (m_padded * dx).
struct FrequencyGrid {
  Matrix values;
  double dk = 0.0;
  int m = 0;

  Complex sample_bilinear(double kx, double ky) const;
  // Largest radius safely inside the bilinear stencil.
  double k_max() const { return (m / 2 - 2) * dk; }
};

// Zero-padding by `oversample` refines the frequency lattice without
// changing the transform (the fields vanish at the grid edge).
FrequencyGrid fft2_centered(const Matrix& g, const GridSpec& grid, int oversample = 1);
FrequencyGrid fft2_centered(const Eigen::MatrixXd& g, const GridSpec& grid,
                            int oversample = 1);

}  // namespace oam
