#pragma once

#include <bit>
#include <string>

#include "gsbench/common.hpp"

namespace gsbench {

// Site k maps to bit (n-1-k): bitstring "0110" is basis index 0b0110.
inline Vector basis_state(const std::string& bitstring) {
  const int n = static_cast<int>(bitstring.size());
  if (n < 1 || n > 24) throw ValidationError("bitstring length out of range");
  std::size_t idx = 0;
  for (char c : bitstring) {
    if (c != '0' && c != '1') throw ValidationError("bitstring must be over {0,1}");
    idx = (idx << 1) | (c == '1');
  }
  Vector v = Vector::Zero(std::size_t(1) << n);
  v[idx] = 1.0;
  return v;
}

namespace detail {
inline std::size_t site_bit(int num_sites, int site) {
  return std::size_t(1) << (num_sites - 1 - site);
}
}  // namespace detail

// Ry(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
inline void apply_ry(Vector& v, int num_sites, int site, double theta) {
  const std::size_t bit = detail::site_bit(num_sites, site);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  const std::size_t dim = v.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const Complex a0 = v[i], a1 = v[i | bit];
    v[i] = c * a0 - s * a1;
    v[i | bit] = s * a0 + c * a1;
  }
}

// Rz(t) = diag(exp(-i t/2), exp(i t/2))
inline void apply_rz(Vector& v, int num_sites, int site, double theta) {
  const std::size_t bit = detail::site_bit(num_sites, site);
  const Complex p0 = std::polar(1.0, -theta / 2), p1 = std::polar(1.0, theta / 2);
  const std::size_t dim = v.size();
  for (std::size_t i = 0; i < dim; ++i) v[i] *= (i & bit) ? p1 : p0;
}

inline void apply_cnot(Vector& v, int num_sites, int control, int target) {
  const std::size_t cbit = detail::site_bit(num_sites, control);
  const std::size_t tbit = detail::site_bit(num_sites, target);
  const std::size_t dim = v.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(v[i], v[i | tbit]);
  }
}

// P|v> for a single Pauli string with unit coefficient.
inline Vector apply_pauli_string(const std::string& letters, const Vector& v) {
  const int n = static_cast<int>(letters.size());
  std::size_t flip_mask = 0, z_mask = 0;
  int y_count = 0;
  for (int k = 0; k < n; ++k) {
    const std::size_t bit = detail::site_bit(n, k);
    switch (letters[k]) {
      case 'X': flip_mask |= bit; break;
      case 'Y': flip_mask |= bit; z_mask |= bit; ++y_count; break;
      case 'Z': z_mask |= bit; break;
      case 'I': break;
      default: throw ValidationError("invalid Pauli letter");
    }
  }
  Complex base = 1.0;
  switch (y_count & 3) {
    case 1: base = Complex(0, 1); break;
    case 2: base = -1.0; break;
    case 3: base = Complex(0, -1); break;
    default: break;
  }
  const std::size_t dim = v.size();
  Vector out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const int parity = std::popcount(i & z_mask) & 1;
    out[i ^ flip_mask] = (parity ? -base : base) * v[i];
  }
  return out;
}

// exp(-i theta P)|v> = cos(theta) v - i sin(theta) P v, valid since P^2 = I.
inline void apply_pauli_rotation(Vector& v, const std::string& letters, double theta) {
  Vector pv = apply_pauli_string(letters, v);
  v = std::cos(theta) * v - Complex(0, 1) * std::sin(theta) * pv;
}

}  // namespace gsbench
