#pragma once

#include <vector>

#include "gsbench/mps.hpp"
#include "gsbench/pauli.hpp"

namespace gsbench {

// MPO for the open spin chain, bond dimension 2 + (#nonzero couplings) <= 5.
// Channel 0 is the vacuum, the last channel is the completed string; channel
// 1+j carries the open bond for the j-th active coupling.
class MpoOperator {
 public:
  struct SiteOp {
    Eigen::Index wl = 0, wr = 0;
    std::vector<Eigen::Matrix2cd> ops;  // wl x wr grid, row-major
    std::vector<bool> nonzero;

    const Eigen::Matrix2cd& at(Eigen::Index a, Eigen::Index b) const { return ops[a * wr + b]; }
    bool present(Eigen::Index a, Eigen::Index b) const { return nonzero[a * wr + b]; }
    void set(Eigen::Index a, Eigen::Index b, const Eigen::Matrix2cd& m) {
      ops[a * wr + b] = m;
      nonzero[a * wr + b] = true;
    }
  };

  std::vector<SiteOp> sites;
  int length() const { return static_cast<int>(sites.size()); }

  // Dense matrix (site 0 most significant); tests only.
  Matrix to_dense() const {
    const int L = length();
    if (L > 12) throw ValidationError("mpo to_dense capped at 12 sites");
    const Eigen::Index dim = Eigen::Index(1) << L;
    // accumulate channel-resolved operators left to right
    std::vector<Matrix> acc(sites[0].wr);
    std::vector<bool> live(sites[0].wr, false);
    for (Eigen::Index b = 0; b < sites[0].wr; ++b) {
      if (!sites[0].present(0, b)) continue;
      acc[b] = sites[0].at(0, b);
      live[b] = true;
    }
    for (int k = 1; k < L; ++k) {
      const auto& w = sites[k];
      std::vector<Matrix> next(w.wr);
      std::vector<bool> nlive(w.wr, false);
      for (Eigen::Index b = 0; b < w.wr; ++b) {
        for (Eigen::Index a = 0; a < w.wl; ++a) {
          if (!live[a] || !w.present(a, b)) continue;
          if (!nlive[b]) {
            next[b] = Matrix::Zero(acc[a].rows() * 2, acc[a].cols() * 2);
            nlive[b] = true;
          }
          // kron(acc[a], op): the new site is the least significant factor
          for (Eigen::Index i = 0; i < acc[a].rows(); ++i)
            for (Eigen::Index j = 0; j < acc[a].cols(); ++j)
              next[b].block(i * 2, j * 2, 2, 2) += acc[a](i, j) * w.at(a, b);
        }
      }
      acc = std::move(next);
      live = std::move(nlive);
    }
    if (!live[0]) return Matrix::Zero(dim, dim);
    return acc[0];
  }
};

inline MpoOperator build_mpo(const SpinChainSpec& spec) {
  spec.validate();
  const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd Sx, Sy, Sz;
  Sx << 0, 0.5, 0.5, 0;
  Sy << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
  Sz << 0.5, 0, 0, -0.5;

  struct Coupling {
    double J;
    Eigen::Matrix2cd op;
  };
  std::vector<Coupling> couplings;
  if (spec.Jx != 0.0) couplings.push_back({spec.Jx, Sx});
  if (spec.Jy != 0.0) couplings.push_back({spec.Jy, Sy});
  if (spec.Jz != 0.0) couplings.push_back({spec.Jz, Sz});
  const Eigen::Index w = 2 + static_cast<Eigen::Index>(couplings.size());

  Eigen::Matrix2cd field = -spec.hx * Sx - spec.hz * Sz;
  const bool has_field = spec.hx != 0.0 || spec.hz != 0.0;

  auto make_site = [&](Eigen::Index wl, Eigen::Index wr, bool first, bool last) {
    MpoOperator::SiteOp site;
    site.wl = wl;
    site.wr = wr;
    site.ops.assign(wl * wr, Eigen::Matrix2cd::Zero());
    site.nonzero.assign(wl * wr, false);
    const Eigen::Index row0 = 0;           // vacuum channel on the left
    const Eigen::Index colz = wr - 1;      // completed channel on the right
    if (!last) site.set(row0, 0, I);
    if (!first) site.set(wl - 1, colz, I);
    if (has_field) site.set(row0, colz, field);
    for (std::size_t j = 0; j < couplings.size(); ++j) {
      if (!last) site.set(row0, 1 + j, couplings[j].J * couplings[j].op);
      if (!first) site.set(1 + j, colz, couplings[j].op);
    }
    return site;
  };

  MpoOperator mpo;
  for (int k = 0; k < spec.L; ++k) {
    const bool first = k == 0, last = k == spec.L - 1;
    mpo.sites.push_back(make_site(first ? 1 : w, last ? 1 : w, first, last));
  }
  return mpo;
}

// Environment blocks for <psi|H|psi>-type contractions: one (chi x chi)
// matrix per MPO channel, indexed (bra, ket).
struct EnvBlock {
  std::vector<Matrix> channel;
  std::vector<bool> live;

  static EnvBlock boundary() {
    EnvBlock e;
    e.channel = {Matrix::Ones(1, 1)};
    e.live = {true};
    return e;
  }
};

// Grow a left environment through site k.
inline EnvBlock env_absorb_left(const EnvBlock& env, const MpoOperator::SiteOp& w,
                                const SiteTensor& t) {
  EnvBlock out;
  out.channel.assign(w.wr, Matrix());
  out.live.assign(w.wr, false);
  const Eigen::Index dr = t.right();
  for (Eigen::Index a = 0; a < w.wl; ++a) {
    if (a >= static_cast<Eigen::Index>(env.live.size()) || !env.live[a]) continue;
    std::array<Matrix, 2> ea;  // E_a * A[s]
    for (int s = 0; s < 2; ++s) ea[s] = env.channel[a] * t.block[s];
    for (Eigen::Index b = 0; b < w.wr; ++b) {
      if (!w.present(a, b)) continue;
      const auto& op = w.at(a, b);
      for (int sp = 0; sp < 2; ++sp) {
        Matrix acc;
        bool have = false;
        for (int s = 0; s < 2; ++s) {
          if (op(sp, s) == Complex(0, 0)) continue;
          if (!have) {
            acc = op(sp, s) * ea[s];
            have = true;
          } else {
            acc += op(sp, s) * ea[s];
          }
        }
        if (!have) continue;
        Matrix contrib = t.block[sp].adjoint() * acc;
        if (!out.live[b]) {
          out.channel[b] = std::move(contrib);
          out.live[b] = true;
        } else {
          out.channel[b] += contrib;
        }
      }
    }
  }
  for (Eigen::Index b = 0; b < w.wr; ++b)
    if (!out.live[b]) out.channel[b] = Matrix::Zero(dr, dr);
  return out;
}

// Grow a right environment through site k.
inline EnvBlock env_absorb_right(const EnvBlock& env, const MpoOperator::SiteOp& w,
                                 const SiteTensor& t) {
  EnvBlock out;
  out.channel.assign(w.wl, Matrix());
  out.live.assign(w.wl, false);
  const Eigen::Index dl = t.left();
  for (Eigen::Index b = 0; b < w.wr; ++b) {
    if (b >= static_cast<Eigen::Index>(env.live.size()) || !env.live[b]) continue;
    std::array<Matrix, 2> rb;  // B[s] * R_b (ket side), still needs bra contraction
    for (int s = 0; s < 2; ++s) rb[s] = t.block[s] * env.channel[b].transpose();
    for (Eigen::Index a = 0; a < w.wl; ++a) {
      if (!w.present(a, b)) continue;
      const auto& op = w.at(a, b);
      for (int sp = 0; sp < 2; ++sp) {
        Matrix acc;
        bool have = false;
        for (int s = 0; s < 2; ++s) {
          if (op(sp, s) == Complex(0, 0)) continue;
          if (!have) {
            acc = op(sp, s) * rb[s];
            have = true;
          } else {
            acc += op(sp, s) * rb[s];
          }
        }
        if (!have) continue;
        // out(a)(i_bra, i_ket) = sum_s' conj(B[s'](i_bra, r_bra)) acc(i_ket, r_bra)
        Matrix contrib = t.block[sp].conjugate() * acc.transpose();
        if (!out.live[a]) {
          out.channel[a] = std::move(contrib);
          out.live[a] = true;
        } else {
          out.channel[a] += contrib;
        }
      }
    }
  }
  for (Eigen::Index a = 0; a < w.wl; ++a)
    if (!out.live[a]) out.channel[a] = Matrix::Zero(dl, dl);
  return out;
}

// <psi|H|psi> with H in MPO form; psi need not be normalized.
inline double mpo_expectation(const MatrixProductState& mps, const MpoOperator& mpo) {
  if (mps.length() != mpo.length()) throw ValidationError("MPS/MPO length mismatch");
  EnvBlock env = EnvBlock::boundary();
  for (int k = 0; k < mps.length(); ++k) env = env_absorb_left(env, mpo.sites[k], mps.sites[k]);
  return env.channel[0](0, 0).real();
}

inline double mps_norm2(const MatrixProductState& mps) {
  Matrix e = Matrix::Ones(1, 1);
  for (const auto& t : mps.sites) {
    Matrix next = t.block[0].adjoint() * e * t.block[0];
    next += t.block[1].adjoint() * e * t.block[1];
    e = std::move(next);
  }
  return e(0, 0).real();
}

}  // namespace gsbench
