#pragma once

#include <limits>

#include "gsbench/mps.hpp"

namespace gsbench {

namespace detail {

// von Neumann entropy in nats from a Hermitian density matrix.
inline double von_neumann_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

}  // namespace detail

// Pairwise mutual information I_ij = S_i + S_j - S_ij from one- and two-site
// reduced density matrices, computed with canonical-form transfer
// contractions. The diagonal is masked with NaN; tiny negative values within
// -1e-10 are clamped to zero.
inline RealMatrix mutual_information(const MatrixProductState& input) {
  MatrixProductState mps = input;  // center moves during the computation
  const int L = mps.length();
  mps.check_consistent();
  if (!mps.center) mps.canonicalize(0);
  if (std::abs(mps.norm() - 1.0) > 1e-8)
    throw ValidationError("mutual_information requires a normalized state");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  RealMatrix mi = RealMatrix::Constant(L, L, nan);
  std::vector<double> s1(L, 0.0);
  RealMatrix s_pair = RealMatrix::Zero(L, L);

  mps.move_center(0);
  for (int i = 0; i < L; ++i) {
    mps.move_center(i);
    const auto& c = mps.sites[i];
    // rho_i(s, s') = Tr(C[s] C[s']^H); environments are isometric
    Matrix rho = Matrix::Zero(2, 2);
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp)
        rho(s, sp) = (c.block[s] * c.block[sp].adjoint()).trace();
    s1[i] = detail::von_neumann_entropy(rho);

    // transfer the open pair (s, s') to every j > i
    // E[s][sp](r, r') = sum_l conj(C[s](l, r)) C[sp](l, r')
    std::array<std::array<Matrix, 2>, 2> E;
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp) E[s][sp] = c.block[s].adjoint() * c.block[sp];

    for (int j = i + 1; j < L; ++j) {
      const auto& b = mps.sites[j];  // right-canonical for j > center
      Matrix rho2 = Matrix::Zero(4, 4);
      for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp)
          for (int u = 0; u < 2; ++u)
            for (int up = 0; up < 2; ++up)
              rho2(2 * s + u, 2 * sp + up) =
                  (b.block[u].adjoint() * E[s][sp] * b.block[up]).trace();
      s_pair(i, j) = detail::von_neumann_entropy(rho2);

      if (j + 1 < L) {
        std::array<std::array<Matrix, 2>, 2> En;
        for (int s = 0; s < 2; ++s)
          for (int sp = 0; sp < 2; ++sp) {
            En[s][sp] = b.block[0].adjoint() * E[s][sp] * b.block[0];
            En[s][sp] += b.block[1].adjoint() * E[s][sp] * b.block[1];
          }
        E = std::move(En);
      }
    }
  }

  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) {
      double v = s1[i] + s1[j] - s_pair(i, j);
      if (v < 0.0 && v > -1e-10) v = 0.0;
      mi(i, j) = v;
      mi(j, i) = v;
    }
  return mi;
}

// Absolute entrywise error between two MI matrices; diagonal stays masked.
inline RealMatrix mi_error(const RealMatrix& candidate, const RealMatrix& reference) {
  if (candidate.rows() != reference.rows() || candidate.cols() != reference.cols())
    throw ValidationError("MI matrices must have the same shape");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  RealMatrix err = RealMatrix::Constant(candidate.rows(), candidate.cols(), nan);
  for (Eigen::Index i = 0; i < candidate.rows(); ++i)
    for (Eigen::Index j = 0; j < candidate.cols(); ++j)
      if (i != j) err(i, j) = std::abs(candidate(i, j) - reference(i, j));
  return err;
}

}  // namespace gsbench
