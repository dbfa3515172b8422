// Single-image density-matrix reconstruction in the Fourier domain.
//
// For a state confined to one helicity, the measured intensity
//   I(r,phi) = sum_{l1,l2} rho_{l1,l2} f_{l1} f*_{l2}
// transforms to F[I] = sum rho_{l1,l2} P_{l1,l2} with kernels
// P_{l1,l2} = F[f_{l1} f*_{l2}]. The kernels obey the weighted orthogonality
//   integral P_{l1,l2} P*_{l1',l2'} e^{pi^2 r_f^2 w0^2 / 2} r_f dr_f dphi_f
//     = (2 / (pi w0^2)) delta delta            (l >= 0),
// and P_{l1,l2} = P_{-l2,-l1}, so matrix elements follow from
//   rho_{l1,l2}   = (pi w0^2 / 2) integral F[I] P*_{l1,l2} (weight),
//   rho_{-l1,-l2} = (pi w0^2 / 2) integral F[I] P*_{l2,l1} (weight).
//
// Numerics: F[I] and the kernels go through the same centered FFT with
// zero-padding, are resampled bilinearly onto a polar lattice, and the
// weighted integral is a trapezoid rule in r_f times a periodic rectangle
// rule in phi_f. The weight grows as e^{u}, u = pi^2 r_f^2 w0^2 / 2, while
// every kernel decays as e^{-u}; the radial integral is truncated where the
// weight reaches `weight_cap`, and each factor in a product carries half
// the weight (e^{u/2}) so that no intermediate value is steeper than the
// final integrand.
#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "oam/basis.hpp"
#include "oam/fourier.hpp"
#include "oam/lg_modes.hpp"

namespace oam {

struct AhstConfig {
  GridSpec grid;
  int n_r = 384;             // radial quadrature intervals
  int n_phi = 256;           // azimuthal quadrature nodes
  double weight_cap = 1e12;  // truncation point of the exponential weight
  int fft_oversample = 2;

  friend bool operator==(const AhstConfig&, const AhstConfig&) = default;
};

// Radial nodes 0..r_max (n_r + 1 of them) and the azimuthal step.
struct PolarGrid {
  Eigen::VectorXd r;
  int n_phi = 0;
  double dr = 0.0;
  double dphi = 0.0;
  double r_max = 0.0;
};

// Throws TruncationError when the weight cap needs radii beyond the
// frequency lattice of the configured grid.
PolarGrid make_polar_grid(const AhstConfig& cfg);

// Sampled intensity with its lattice geometry. Values are clamped to be
// nonnegative; the plane integral approximates the marginal trace.
class IntensityGrid {
 public:
  IntensityGrid(Eigen::MatrixXd values, GridSpec grid);

  const Eigen::MatrixXd& values() const { return values_; }
  const GridSpec& grid() const { return grid_; }
  double integral() const { return values_.sum() * grid_.dx() * grid_.dx(); }

 private:
  Eigen::MatrixXd values_;
  GridSpec grid_;
};

// I = Re sum_ij marginal(i,j) f_{s(i)} f*_{s(j)} with s(i) = +-(i+1) for the
// chosen helicity. The marginal must be Hermitian; it may be sub-normalized.
IntensityGrid intensity_from_density(const Matrix& marginal, Helicity helicity,
                                     const GridSpec& grid, FieldCache* fields = nullptr);

// Photon-counting simulation: pixel counts ~ Poisson(photons * I * dA),
// returned as counts / (photons * dA). Deterministic for a fixed seed.
IntensityGrid poisson_sample(const IntensityGrid& ideal, double photons, uint64_t seed);

// One kernel on the polar frequency lattice, stored pre-multiplied by half
// the orthogonality weight e^{pi^2 r^2 w0^2 / 4}.
struct FourierKernel {
  int ell1 = 0;
  int ell2 = 0;
  Matrix half_weighted;  // (n_r + 1) x n_phi
};

// F[f_{l1} f*_{l2}] for arbitrary signs, computed literally.
FourierKernel fourier_kernel_direct(int ell1, int ell2, const AhstConfig& cfg);
// Nonnegative pairs directly; nonpositive pairs via P_{l1,l2} = P_{-l2,-l1}.
// Mixed-sign pairs are rejected.
FourierKernel fourier_kernel(int ell1, int ell2, const AhstConfig& cfg);

class KernelCache {
 public:
  explicit KernelCache(const AhstConfig& cfg);

  const AhstConfig& config() const { return cfg_; }
  const PolarGrid& polar() const { return polar_; }
  const FourierKernel& get(int ell1, int ell2);
  bool insert(FourierKernel kernel);  // false if already present
  std::size_t size() const { return kernels_.size(); }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [key, kernel] : kernels_) f(kernel);
  }

 private:
  AhstConfig cfg_;
  PolarGrid polar_;
  std::map<std::pair<int, int>, FourierKernel> kernels_;
};

// Matrix of weighted kernel inner products for the given index pairs;
// ideally (2 / (pi w0^2)) x identity.
Matrix kernel_gram(KernelCache& cache, const std::vector<std::pair<int, int>>& pairs);

struct ReconstructionInfo {
  double truncation_radius = 0.0;
  bool gram_corrected = false;
};

// Density-matrix elements rho_{l1,l2} for ell_min <= l <= ell_max from a
// positive-helicity intensity image; output Hermitized. Row/column i of the
// result corresponds to l = ell_min + i.
//
// With gram_correct = false the elements come from the ideal-constant
// projection (pi w0^2 / 2) <F[I], P_q>_w. With gram_correct = true they
// solve the measured Gram system G c = <F[I], P>_w instead, which removes
// the truncation bias of a finite radial window; the two coincide as the
// window grows. The corrected form is the noise-robust choice when the
// image carries photon noise and the window is short.
Matrix reconstruct_positive(const IntensityGrid& image, int ell_max, KernelCache& cache,
                            ReconstructionInfo* info = nullptr, int ell_min = 1,
                            bool gram_correct = false);
// Same for rho_{-l1,-l2} via the index-swapped kernels.
Matrix reconstruct_negative(const IntensityGrid& image, int ell_max, KernelCache& cache,
                            ReconstructionInfo* info = nullptr, int ell_min = 1,
                            bool gram_correct = false);

}  // namespace oam
