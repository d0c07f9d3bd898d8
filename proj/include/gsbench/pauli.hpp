#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gsbench/common.hpp"

namespace gsbench {

// One weighted Pauli string. `letters` has one character from {I,X,Y,Z} per
// site; site 0 is the leftmost letter and the most significant qubit.
struct PauliTerm {
  double coefficient = 0.0;
  std::string letters;
};

inline bool valid_pauli_letters(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
  });
}

// Hermitian operator H = sum_l c_l P_l on num_sites qubits. Terms are merged
// by letter string, zero coefficients dropped, and kept in lexicographic
// order, so equal operators have equal representations.
class PauliHamiltonian {
 public:
  PauliHamiltonian(int num_sites, std::vector<PauliTerm> terms)
      : num_sites_(num_sites) {
    if (num_sites < 1) throw ValidationError("num_sites must be positive");
    std::map<std::string, double> merged;
    for (const auto& t : terms) {
      if (!std::isfinite(t.coefficient))
        throw ValidationError("non-finite coefficient in Pauli term");
      if (static_cast<int>(t.letters.size()) != num_sites)
        throw ValidationError("Pauli term length " + std::to_string(t.letters.size()) +
                              " does not match num_sites " + std::to_string(num_sites));
      if (!valid_pauli_letters(t.letters))
        throw ValidationError("invalid Pauli letter in term '" + t.letters + "'");
      merged[t.letters] += t.coefficient;
    }
    for (const auto& [letters, coeff] : merged) {
      if (coeff != 0.0) terms_.push_back({coeff, letters});
    }
  }

  int num_sites() const { return num_sites_; }
  std::size_t dimension() const { return std::size_t(1) << num_sites_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  // Matrix-free action H*v, term by term.
  Vector apply(const Vector& v) const {
    if (static_cast<std::size_t>(v.size()) != dimension())
      throw ValidationError("state dimension does not match 2^num_sites");
    Vector out = Vector::Zero(v.size());
    const int n = num_sites_;
    for (const auto& term : terms_) {
      std::size_t flip_mask = 0;
      std::size_t z_mask = 0;  // sites contributing a (1-2b) sign
      int y_count = 0;
      for (int k = 0; k < n; ++k) {
        const std::size_t bit = std::size_t(1) << (n - 1 - k);
        switch (term.letters[k]) {
          case 'X': flip_mask |= bit; break;
          case 'Y': flip_mask |= bit; z_mask |= bit; ++y_count; break;
          case 'Z': z_mask |= bit; break;
          default: break;
        }
      }
      // Global i^y_count from Y letters; per-basis sign from Z/Y bits.
      Complex base = term.coefficient;
      switch (y_count & 3) {
        case 1: base *= Complex(0, 1); break;
        case 2: base *= -1.0; break;
        case 3: base *= Complex(0, -1); break;
        default: break;
      }
      const std::size_t dim = dimension();
      for (std::size_t i = 0; i < dim; ++i) {
        const int parity = std::popcount(i & z_mask) & 1;
        const Complex amp = parity ? -base : base;
        out[i ^ flip_mask] += amp * v[i];
      }
    }
    return out;
  }

  // Dense matrix, for oracles and small systems only.
  Matrix to_dense() const {
    if (num_sites_ > 14) throw ValidationError("to_dense capped at 14 sites");
    const std::size_t dim = dimension();
    Matrix h = Matrix::Zero(dim, dim);
    Vector basis = Vector::Zero(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      basis.setZero();
      basis[j] = 1.0;
      h.col(j) = apply(basis);
    }
    return h;
  }

 private:
  int num_sites_;
  std::vector<PauliTerm> terms_;
};

// Open-boundary spin-1/2 chain couplings:
//   H = sum_i sum_a J_a S_i^a S_{i+1}^a - sum_i (h_x S_i^x + h_z S_i^z),
// with S^a = sigma^a / 2.
struct SpinChainSpec {
  int L = 2;
  double Jx = 0.0, Jy = 0.0, Jz = 0.0;
  double hx = 0.0, hz = 0.0;

  void validate() const {
    if (L < 2) throw ValidationError("spin chain needs L >= 2");
    for (double c : {Jx, Jy, Jz, hx, hz})
      if (!std::isfinite(c)) throw ValidationError("non-finite spin chain coupling");
  }
};

inline PauliHamiltonian build_spin_chain(const SpinChainSpec& spec) {
  spec.validate();
  std::vector<PauliTerm> terms;
  const int L = spec.L;
  auto bond = [&](int i, char a, double J) {
    if (J == 0.0) return;
    std::string s(L, 'I');
    s[i] = a;
    s[i + 1] = a;
    terms.push_back({J / 4.0, s});  // S^a S^a = (sigma/2)(sigma/2)
  };
  auto field = [&](int i, char a, double h) {
    if (h == 0.0) return;
    std::string s(L, 'I');
    s[i] = a;
    terms.push_back({-h / 2.0, s});
  };
  for (int i = 0; i + 1 < L; ++i) {
    bond(i, 'X', spec.Jx);
    bond(i, 'Y', spec.Jy);
    bond(i, 'Z', spec.Jz);
  }
  for (int i = 0; i < L; ++i) {
    field(i, 'X', spec.hx);
    field(i, 'Z', spec.hz);
  }
  return PauliHamiltonian(L, std::move(terms));
}

// Text format: one `<coefficient> <letters>` per line, '#' comments and blank
// lines ignored.
inline PauliHamiltonian parse_hamiltonian_text(const std::string& text) {
  std::vector<PauliTerm> terms;
  int num_sites = -1;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string coeff_str, letters, extra;
    if (!(ls >> coeff_str)) continue;  // blank
    if (!(ls >> letters))
      throw ValidationError("line " + std::to_string(lineno) + ": expected '<coefficient> <letters>'");
    if (ls >> extra)
      throw ValidationError("line " + std::to_string(lineno) + ": trailing content '" + extra + "'");
    double coeff;
    std::size_t pos = 0;
    try {
      coeff = std::stod(coeff_str, &pos);
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(lineno) + ": bad coefficient '" + coeff_str + "'");
    }
    if (pos != coeff_str.size() || !std::isfinite(coeff))
      throw ValidationError("line " + std::to_string(lineno) + ": bad coefficient '" + coeff_str + "'");
    if (!valid_pauli_letters(letters))
      throw ValidationError("line " + std::to_string(lineno) + ": letters must be from {I,X,Y,Z}");
    if (num_sites < 0) num_sites = static_cast<int>(letters.size());
    if (static_cast<int>(letters.size()) != num_sites)
      throw ValidationError("line " + std::to_string(lineno) + ": inconsistent term length");
    terms.push_back({coeff, letters});
  }
  if (num_sites < 0) throw ValidationError("no Pauli terms in input");
  return PauliHamiltonian(num_sites, std::move(terms));
}

// Canonical writer: lexicographic term order, 17 significant digits.
// write(parse(text)) is a fixed point of parse/write.
inline std::string write_hamiltonian_text(const PauliHamiltonian& h) {
  std::string out;
  for (const auto& t : h.terms()) {
    out += format_real(t.coefficient);
    out += ' ';
    out += t.letters;
    out += '\n';
  }
  return out;
}

}  // namespace gsbench
