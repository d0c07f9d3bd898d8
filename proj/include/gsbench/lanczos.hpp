#pragma once

#include <functional>
#include <random>
#include <vector>

#include "gsbench/common.hpp"

namespace gsbench {

struct LanczosResult {
  double eigenvalue = 0.0;
  Vector eigenvector;
  double residual = 0.0;
  int matvecs = 0;
};

// Restarted Lanczos for the lowest eigenpair of a Hermitian operator given as
// a matvec. Builds Krylov subspaces of size ncv with full reorthogonalization
// (cheap at these subspace sizes, avoids ghost eigenvalues), restarts from
// the current Ritz vector, and stops when ||H v - lambda v|| <= tol * max(1, |lambda|).
template <typename MatVec>
LanczosResult lanczos_ground(const MatVec& matvec, Eigen::Index dim, Vector start,
                             double tol, int ncv, int max_restarts = 200,
                             std::uint64_t breakdown_seed = 0x5eed) {
  if (ncv < 2) throw ValidationError("lanczos needs ncv >= 2");
  if (dim == 1) {
    Vector unit = Vector::Ones(1);
    Vector hv = matvec(unit);
    return {hv[0].real(), unit, 0.0, 1};
  }

  std::mt19937_64 rng(breakdown_seed);
  auto random_vector = [&]() {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
    v.normalize();
    return v;
  };

  Vector v = start.size() == dim ? start : random_vector();
  double nv = v.norm();
  if (nv < 1e-14) v = random_vector();
  else v /= nv;

  LanczosResult result;
  result.eigenvector = v;

  const int m = std::min<int>(ncv, static_cast<int>(dim));
  std::vector<Vector> basis;
  basis.reserve(m);

  for (int restart = 0; restart < max_restarts; ++restart) {
    basis.clear();
    basis.push_back(v);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    int built = 0;
    for (int j = 0; j < m; ++j) {
      Vector w = matvec(basis[j]);
      ++result.matvecs;
      alpha[j] = std::real(basis[j].dot(w));
      // full reorthogonalization, twice for stability
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k <= j; ++k) w -= basis[k].dot(w) * basis[k];
      built = j + 1;
      if (j + 1 == m) break;
      const double b = w.norm();
      if (b < 1e-13) {
        // invariant subspace: diagonalize what we have, else restart random
        break;
      }
      beta[j] = b;
      basis.push_back(w / b);
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
      tri(j, j) = alpha[j];
      if (j + 1 < built) {
        tri(j, j + 1) = beta[j];
        tri(j + 1, j) = beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    Vector ritz = Vector::Zero(dim);
    for (int j = 0; j < built; ++j) ritz += y[j] * basis[j];
    ritz.normalize();
    const double lambda = es.eigenvalues()[0];
    Vector hv = matvec(ritz);
    ++result.matvecs;
    const double res = (hv - lambda * ritz).norm();

    result.eigenvalue = lambda;
    result.eigenvector = ritz;
    result.residual = res;
    if (res <= tol * std::max(1.0, std::abs(lambda))) return result;

    if (built < 2) {
      v = random_vector();  // breakdown: restart from a fresh vector
    } else {
      v = ritz;
    }
  }
  return result;
}

}  // namespace gsbench
