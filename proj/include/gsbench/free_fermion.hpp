#pragma once

#include <Eigen/SVD>

#include "gsbench/pauli.hpp"

namespace gsbench {

namespace detail {

// Ground energy of a quadratic fermion Hamiltonian
//   H = sum_ij A_ij c^dag_i c_j + 1/2 sum_ij (B_ij c^dag_i c^dag_j + h.c.) + Ec
// with A symmetric, B antisymmetric (both real). The single-particle energies
// are the singular values of A - B, and E0 = Ec + Tr(A)/2 - sum(sv)/2.
inline double quadratic_fermion_ground(const RealMatrix& A, const RealMatrix& B, double Ec) {
  Eigen::JacobiSVD<RealMatrix> svd(A - B);
  return Ec + 0.5 * A.trace() - 0.5 * svd.singularValues().sum();
}

}  // namespace detail

inline bool is_xx_type(const SpinChainSpec& s) {
  return s.Jz == 0.0 && s.hx == 0.0 && s.hz == 0.0 && s.Jx == s.Jy;
}

inline bool is_tfim_type(const SpinChainSpec& s) {
  return s.Jx == 0.0 && s.Jy == 0.0 && s.hz == 0.0;
}

// Exact open-chain ground energy for the two free-fermion families of the
// spin-chain benchmark:
//  - XX type (Jz=hx=hz=0, Jx=Jy): hopping chain, single-particle energies
//    Jx cos(k pi/(L+1)); the filled negative modes give the ground energy.
//  - TFIM type (Jx=Jy=hz=0): ZZ coupling plus transverse field, solved via
//    the pairing (Bogoliubov) form after a global spin rotation.
inline double free_fermion_ground_energy(const SpinChainSpec& spec) {
  spec.validate();
  const int L = spec.L;
  if (is_xx_type(spec)) {
    RealMatrix A = RealMatrix::Zero(L, L);
    for (int i = 0; i + 1 < L; ++i) A(i, i + 1) = A(i + 1, i) = spec.Jx / 2.0;
    return detail::quadratic_fermion_ground(A, RealMatrix::Zero(L, L), 0.0);
  }
  if (is_tfim_type(spec)) {
    // Jz S^z S^z - hx S^x  ~  a XX - b Z with a = Jz/4, b = hx/2.
    const double a = spec.Jz / 4.0;
    const double b = spec.hx / 2.0;
    RealMatrix A = RealMatrix::Zero(L, L);
    RealMatrix B = RealMatrix::Zero(L, L);
    for (int i = 0; i < L; ++i) A(i, i) = 2.0 * b;
    for (int i = 0; i + 1 < L; ++i) {
      A(i, i + 1) = A(i + 1, i) = a;
      B(i, i + 1) = a;
      B(i + 1, i) = -a;
    }
    return detail::quadratic_fermion_ground(A, B, -b * L);
  }
  throw ValidationError("spec is neither XX type (Jz=hx=hz=0, Jx=Jy) nor TFIM type (Jx=Jy=hz=0)");
}

}  // namespace gsbench
