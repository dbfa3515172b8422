#include "oam/linalg.hpp"

namespace oam {

Matrix random_density(int dim, int rank, std::mt19937_64& rng) {
  if (dim < 1 || rank < 1 || rank > dim)
    throw std::invalid_argument("random_density: need 1 <= rank <= dim");
  Matrix g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = random_gaussian(rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Vector random_pure(int dim, std::mt19937_64& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = random_gaussian(rng);
  v.normalize();
  return v;
}

}  // namespace oam
