#include "oam/fourier.hpp"

#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace oam {

Complex FrequencyGrid::sample_bilinear(double kx, double ky) const {
  const double u = kx / dk + m / 2;
  const double v = ky / dk + m / 2;
  if (u < 0.0 || v < 0.0 || u > m - 1 || v > m - 1)
    throw std::out_of_range("FrequencyGrid: sample outside the frequency lattice");
  const int i0 = std::min(static_cast<int>(u), m - 2);
  const int j0 = std::min(static_cast<int>(v), m - 2);
  const double fu = u - i0;
  const double fv = v - j0;
  return (1 - fu) * (1 - fv) * values(i0, j0) + fu * (1 - fv) * values(i0 + 1, j0) +
         (1 - fu) * fv * values(i0, j0 + 1) + fu * fv * values(i0 + 1, j0 + 1);
}

FrequencyGrid fft2_centered(const Matrix& g, const GridSpec& grid, int oversample) {
  if (g.rows() != grid.m || g.cols() != grid.m)
    throw std::invalid_argument("fft2_centered: sample array does not match the grid");
  if (oversample < 1) throw std::invalid_argument("fft2_centered: oversample must be >= 1");
  if (grid.m % 2 != 0) throw std::invalid_argument("fft2_centered: grid size must be even");
  const int m = grid.m;
  const int p = m * oversample;
  const int off = (p - m) / 2;  // keeps x = 0 at index p/2

  Matrix padded = Matrix::Zero(p, p);
  padded.block(off, off, m, m) = g;

  Eigen::FFT<double> fft;
  Matrix stage(p, p);
  for (int c = 0; c < p; ++c)
    fft.fwd(stage.col(c).data(), padded.col(c).data(), p);
  Matrix staget = stage.transpose();
  for (int c = 0; c < p; ++c)
    fft.fwd(padded.col(c).data(), staget.col(c).data(), p);
  // padded now holds DFT2[g] transposed: padded(ky_index, kx_index).

  FrequencyGrid out;
  out.m = p;
  out.dk = 1.0 / (p * grid.dx());
  out.values.resize(p, p);
  const double scale = grid.dx() * grid.dx();
  for (int i = 0; i < p; ++i) {
    const int ii = (i + p / 2) % p;
    for (int j = 0; j < p; ++j) {
      const int jj = (j + p / 2) % p;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      out.values(i, j) = scale * sign * padded(jj, ii);
    }
  }
  return out;
}

FrequencyGrid fft2_centered(const Eigen::MatrixXd& g, const GridSpec& grid, int oversample) {
  return fft2_centered(Matrix(g.cast<Complex>()), grid, oversample);
}

}  // namespace oam
