#include "oam/ahst.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "oam/errors.hpp"

namespace oam {

namespace {

constexpr double kPi = std::numbers::pi;

double half_weight(double r, double w0) {
  return std::exp(kPi * kPi * r * r * w0 * w0 / 4.0);
}

// Polar resample of a frequency grid, times e^{u/2} at the exact nodes.
Matrix resample_half_weighted(const FrequencyGrid& f, const PolarGrid& polar, double w0) {
  Matrix out(polar.r.size(), polar.n_phi);
  for (int j = 0; j < polar.n_phi; ++j) {
    const double phi = j * polar.dphi;
    const double c = std::cos(phi), s = std::sin(phi);
    for (Eigen::Index i = 0; i < polar.r.size(); ++i) {
      const double r = polar.r(i);
      out(i, j) = f.sample_bilinear(r * c, r * s) * half_weight(r, w0);
    }
  }
  return out;
}

// Weighted polar inner product  sum a conj(b) r dr dphi  (both arrays carry
// e^{u/2} already, so the product carries the full weight).
Complex weighted_inner(const Matrix& a, const Matrix& b, const PolarGrid& polar) {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < polar.r.size(); ++i) {
    const double trap = (i == 0 || i + 1 == polar.r.size()) ? 0.5 : 1.0;
    const double measure = polar.r(i) * trap * polar.dr * polar.dphi;
    Complex row = 0.0;
    for (int j = 0; j < polar.n_phi; ++j) row += a(i, j) * std::conj(b(i, j));
    acc += measure * row;
  }
  return acc;
}

FrequencyGrid transform_intensity(const IntensityGrid& image, const AhstConfig& cfg) {
  if (!(image.grid() == cfg.grid))
    throw std::invalid_argument("reconstruct: image grid differs from the configured grid");
  return fft2_centered(image.values(), image.grid(), cfg.fft_oversample);
}

Matrix reconstruct_impl(const IntensityGrid& image, int ell_min, int ell_max,
                        KernelCache& cache, bool negative_helicity,
                        ReconstructionInfo* info, bool gram_correct) {
  if (ell_min < 0 || ell_max < ell_min)
    throw std::invalid_argument("reconstruct: need 0 <= ell_min <= ell_max");
  const AhstConfig& cfg = cache.config();
  const PolarGrid& polar = cache.polar();
  const double w0 = cfg.grid.w0;

  FrequencyGrid f = transform_intensity(image, cfg);
  Matrix ft = resample_half_weighted(f, polar, w0);

  const int n = ell_max - ell_min + 1;
  Matrix rho(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int l1 = ell_min + i, l2 = ell_min + j;
      // rho_{-l1,-l2} projects onto the (l2, l1) kernel.
      const FourierKernel& k = negative_helicity ? cache.get(l2, l1) : cache.get(l1, l2);
      rho(i, j) = weighted_inner(ft, k.half_weighted, polar);
    }
  }
  if (gram_correct) {
    // Solve G c = proj over the vectorized index pairs. For the negative
    // helicity the kernels of pair (i,j) are the swapped (l2, l1) ones.
    Matrix gram(n * n, n * n);
    for (int a = 0; a < n * n; ++a) {
      const int a1 = ell_min + a / n, a2 = ell_min + a % n;
      const FourierKernel& ka = negative_helicity ? cache.get(a2, a1) : cache.get(a1, a2);
      for (int b = 0; b < n * n; ++b) {
        const int b1 = ell_min + b / n, b2 = ell_min + b % n;
        const FourierKernel& kb = negative_helicity ? cache.get(b2, b1) : cache.get(b1, b2);
        gram(a, b) = weighted_inner(ka.half_weighted, kb.half_weighted, polar);
      }
    }
    Vector proj(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) proj(i * n + j) = rho(i, j);
    Vector solved = gram.ldlt().solve(proj);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rho(i, j) = solved(i * n + j);
  } else {
    rho *= kPi * w0 * w0 / 2.0;
  }
  if (info) {
    info->truncation_radius = polar.r_max;
    info->gram_corrected = gram_correct;
  }
  return hermitize(rho);
}

}  // namespace

PolarGrid make_polar_grid(const AhstConfig& cfg) {
  if (cfg.n_r < 8 || cfg.n_phi < 8)
    throw std::invalid_argument("AhstConfig: polar quadrature too coarse");
  if (cfg.weight_cap <= 1.0)
    throw std::invalid_argument("AhstConfig: weight_cap must exceed 1");
  const double w0 = cfg.grid.w0;
  // exp(pi^2 r^2 w0^2 / 2) = weight_cap
  const double r_needed = std::sqrt(2.0 * std::log(cfg.weight_cap)) / (kPi * w0);
  const double k_nyquist = 1.0 / (2.0 * cfg.grid.dx());
  const double r_supported = 0.95 * k_nyquist;
  if (r_needed > r_supported)
    throw TruncationError("weighted integral needs radius " + std::to_string(r_needed) +
                              " but the grid supports only " + std::to_string(r_supported) +
                              "; enlarge the grid or lower weight_cap",
                          r_supported);
  PolarGrid polar;
  polar.r_max = r_needed;
  polar.n_phi = cfg.n_phi;
  polar.dr = r_needed / cfg.n_r;
  polar.dphi = 2.0 * kPi / cfg.n_phi;
  polar.r.resize(cfg.n_r + 1);
  for (int i = 0; i <= cfg.n_r; ++i) polar.r(i) = i * polar.dr;
  return polar;
}

IntensityGrid::IntensityGrid(Eigen::MatrixXd values, GridSpec grid)
    : values_(std::move(values)), grid_(grid) {
  if (values_.rows() != grid_.m || values_.cols() != grid_.m)
    throw std::invalid_argument("IntensityGrid: values do not match the grid");
  if (values_.minCoeff() < -1e-12)
    throw std::invalid_argument("IntensityGrid: significantly negative intensity");
  values_ = values_.cwiseMax(0.0);
}

IntensityGrid intensity_from_density(const Matrix& marginal, Helicity helicity,
                                     const GridSpec& grid, FieldCache* fields) {
  const int n = static_cast<int>(marginal.rows());
  if (marginal.cols() != n) throw std::invalid_argument("intensity: marginal must be square");
  if (!is_hermitian(marginal, 1e-10))
    throw std::invalid_argument("intensity: marginal must be Hermitian");
  FieldCache local(grid);
  FieldCache& cache = fields ? *fields : local;
  const int sign = helicity == Helicity::Positive ? +1 : -1;

  Eigen::MatrixXd intensity = Eigen::MatrixXd::Zero(grid.m, grid.m);
  for (int i = 0; i < n; ++i) {
    const Matrix& fi = cache.get(sign * (i + 1)).samples();
    intensity += marginal(i, i).real() * fi.cwiseAbs2();
    for (int j = i + 1; j < n; ++j) {
      const Matrix& fj = cache.get(sign * (j + 1)).samples();
      // rho_ij f_i f_j^* + c.c.
      Matrix cross = marginal(i, j) * fi.cwiseProduct(fj.conjugate());
      intensity += 2.0 * cross.real();
    }
  }
  return IntensityGrid(intensity.cwiseMax(0.0), grid);
}

IntensityGrid poisson_sample(const IntensityGrid& ideal, double photons, uint64_t seed) {
  if (photons <= 0.0) throw std::invalid_argument("poisson_sample: photons must be > 0");
  const double da = ideal.grid().dx() * ideal.grid().dx();
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd counts(ideal.grid().m, ideal.grid().m);
  for (int j = 0; j < ideal.grid().m; ++j) {
    for (int i = 0; i < ideal.grid().m; ++i) {
      const double mean = photons * ideal.values()(i, j) * da;
      if (mean <= 0.0) {
        counts(i, j) = 0.0;
      } else {
        std::poisson_distribution<long> draw(mean);
        counts(i, j) = static_cast<double>(draw(rng)) / (photons * da);
      }
    }
  }
  return IntensityGrid(std::move(counts), ideal.grid());
}

FourierKernel fourier_kernel_direct(int ell1, int ell2, const AhstConfig& cfg) {
  FieldCache fields(cfg.grid);
  const Matrix& f1 = fields.get(ell1).samples();
  const Matrix& f2 = fields.get(ell2).samples();
  Matrix product = f1.cwiseProduct(f2.conjugate());
  FrequencyGrid f = fft2_centered(product, cfg.grid, cfg.fft_oversample);
  PolarGrid polar = make_polar_grid(cfg);
  return {ell1, ell2, resample_half_weighted(f, polar, cfg.grid.w0)};
}

FourierKernel fourier_kernel(int ell1, int ell2, const AhstConfig& cfg) {
  if (ell1 >= 0 && ell2 >= 0) return fourier_kernel_direct(ell1, ell2, cfg);
  if (ell1 <= 0 && ell2 <= 0) {
    FourierKernel k = fourier_kernel_direct(-ell2, -ell1, cfg);
    return {ell1, ell2, std::move(k.half_weighted)};
  }
  throw std::invalid_argument(
      "fourier_kernel: mixed-helicity pair has no single-helicity kernel");
}

KernelCache::KernelCache(const AhstConfig& cfg) : cfg_(cfg), polar_(make_polar_grid(cfg)) {}

const FourierKernel& KernelCache::get(int ell1, int ell2) {
  if (ell1 < 0 || ell2 < 0)
    throw std::invalid_argument("KernelCache: stores nonnegative index pairs only");
  auto it = kernels_.find({ell1, ell2});
  if (it == kernels_.end())
    it = kernels_.emplace(std::pair{ell1, ell2}, fourier_kernel(ell1, ell2, cfg_)).first;
  return it->second;
}

bool KernelCache::insert(FourierKernel kernel) {
  if (kernel.half_weighted.rows() != polar_.r.size() ||
      kernel.half_weighted.cols() != polar_.n_phi)
    throw std::invalid_argument("KernelCache: kernel does not match the polar lattice");
  return kernels_.emplace(std::pair{kernel.ell1, kernel.ell2}, std::move(kernel)).second;
}

Matrix kernel_gram(KernelCache& cache, const std::vector<std::pair<int, int>>& pairs) {
  const int n = static_cast<int>(pairs.size());
  Matrix gram(n, n);
  for (int a = 0; a < n; ++a) {
    const FourierKernel& ka = cache.get(pairs[static_cast<size_t>(a)].first,
                                        pairs[static_cast<size_t>(a)].second);
    for (int b = 0; b < n; ++b) {
      const FourierKernel& kb = cache.get(pairs[static_cast<size_t>(b)].first,
                                          pairs[static_cast<size_t>(b)].second);
      gram(a, b) = weighted_inner(ka.half_weighted, kb.half_weighted, cache.polar());
    }
  }
  return gram;
}

Matrix reconstruct_positive(const IntensityGrid& image, int ell_max, KernelCache& cache,
                            ReconstructionInfo* info, int ell_min, bool gram_correct) {
  return reconstruct_impl(image, ell_min, ell_max, cache, false, info, gram_correct);
}

Matrix reconstruct_negative(const IntensityGrid& image, int ell_max, KernelCache& cache,
                            ReconstructionInfo* info, int ell_min, bool gram_correct) {
  return reconstruct_impl(image, ell_min, ell_max, cache, true, info, gram_correct);
}

}  // namespace oam
