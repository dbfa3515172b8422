#include "oam/lg_modes.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oam/errors.hpp"

namespace oam {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_grid(int ell, const GridSpec& grid) {
  constexpr double kMinSamplesPerWaist = 16.0;
  if (grid.samples_per_waist() < kMinSamplesPerWaist) {
    const int min_m = static_cast<int>(std::ceil(2.0 * grid.extent * kMinSamplesPerWaist));
    throw ResolutionError("lg_field: grid resolves only " +
                          std::to_string(grid.samples_per_waist()) +
                          " samples per waist; need >= 16 (m >= " + std::to_string(min_m) +
                          " at this extent)");
  }
  const double needed = 4.0 * (1.0 + std::sqrt(static_cast<double>(std::abs(ell))) / 2.0);
  if (grid.extent < needed)
    throw ResolutionError("lg_field: extent " + std::to_string(grid.extent) +
                          " w0 too small for ell = " + std::to_string(ell) +
                          "; need >= " + std::to_string(needed) + " w0");
}

}  // namespace

LgField::LgField(int ell, const GridSpec& grid) : ell_(ell), grid_(grid) {
  check_grid(ell, grid);
  const int m = grid.m;
  const int a = std::abs(ell);
  const double w0 = grid.w0;
  const double norm = std::sqrt(2.0 / (std::numbers::pi * factorial(a) * w0 * w0));
  samples_.resize(m, m);
  for (int j = 0; j < m; ++j) {
    const double y = grid.coord(j);
    for (int i = 0; i < m; ++i) {
      const double x = grid.coord(i);
      const double r2 = x * x + y * y;
      const double radial =
          norm * std::pow(std::sqrt(2.0 * r2) / w0, a) * std::exp(-r2 / (w0 * w0));
      const double phi = (r2 > 0.0) ? std::atan2(y, x) : 0.0;
      samples_(i, j) = radial * std::polar(1.0, ell * phi);
    }
  }
}

LgField lg_field(int ell, const GridSpec& grid) { return LgField(ell, grid); }

const LgField& FieldCache::get(int ell) {
  auto it = fields_.find(ell);
  if (it == fields_.end()) it = fields_.emplace(ell, LgField(ell, grid_)).first;
  return it->second;
}

}  // namespace oam
