#pragma once

#include "gsbench/lanczos.hpp"
#include "gsbench/pauli.hpp"

namespace gsbench {

struct GroundState {
  double energy = 0.0;
  Vector state;
};

// Exact ground state by dense diagonalization up to 10 sites, Lanczos with a
// 1e-12 residual tolerance for 11-14 sites.
inline GroundState exact_ground(const PauliHamiltonian& h) {
  const int n = h.num_sites();
  if (n > 14) throw ValidationError("exact_ground capped at 14 sites");
  if (n <= 10) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.to_dense());
    return {es.eigenvalues()[0], es.eigenvectors().col(0)};
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(h.dimension());
  auto matvec = [&](const Vector& v) { return h.apply(v); };
  // deterministic start vector with overlap on every basis state
  Vector start(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    start[i] = Complex(1.0 + 1e-3 * std::cos(double(i)), 1e-3 * std::sin(0.7 * double(i)));
  start.normalize();
  auto r = lanczos_ground(matvec, dim, start, 1e-12, 40, 400);
  return {r.eigenvalue, r.eigenvector};
}

}  // namespace gsbench
