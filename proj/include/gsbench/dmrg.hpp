#pragma once

#include <Eigen/SVD>

#include "gsbench/budget.hpp"
#include "gsbench/lanczos.hpp"
#include "gsbench/mpo.hpp"
#include "gsbench/mps.hpp"
#include "gsbench/rng.hpp"

namespace gsbench {

struct MpsInitSpec {
  MpsInit kind = MpsInit::random;
  Eigen::Index bond = 1;
  std::uint64_t seed = 0;
};

struct DmrgStage {
  enum class Method { dmrg1, dmrg2 };
  Method method = Method::dmrg2;
  std::vector<Eigen::Index> bond_schedule;  // per sweep, last value repeated
  double cutoff = 1e-10;                    // relative squared-Schmidt-weight threshold
  double eig_tol = 1e-6;                    // local Lanczos tolerance
  int max_sweeps = 4;
  int ncv = 4;
  MpsInitSpec init;

  void validate() const {
    if (bond_schedule.empty()) throw ValidationError("bond schedule must be non-empty");
    for (auto b : bond_schedule)
      if (b < 1) throw ValidationError("bond schedule entries must be positive");
    if (!(cutoff >= 0.0 && cutoff < 1.0)) throw ValidationError("cutoff must be in [0, 1)");
    if (!(eig_tol > 0.0)) throw ValidationError("eig_tol must be positive");
    if (max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
    if (ncv < 2) throw ValidationError("ncv must be >= 2");
    if (init.bond < 1) throw ValidationError("init bond must be >= 1");
  }

  Eigen::Index schedule_bond(int sweep_index) const {  // 0-based
    const auto i = std::min<std::size_t>(sweep_index, bond_schedule.size() - 1);
    return bond_schedule[i];
  }
};

inline const char* to_string(DmrgStage::Method m) {
  return m == DmrgStage::Method::dmrg1 ? "dmrg1" : "dmrg2";
}

struct DmrgProtocol {
  std::vector<DmrgStage> stages;

  void validate() const {
    if (stages.empty()) throw ValidationError("DMRG protocol needs at least one stage");
    if (stages.front().init.kind == MpsInit::inherit)
      throw ValidationError("first stage cannot inherit its initial state");
    for (const auto& s : stages) s.validate();
  }
};

struct SweepRecord {
  int stage = 0;
  int sweep = 0;  // 1-based within the stage
  double energy = 0.0;
  Eigen::Index max_bond = 1;
  double elapsed_s = 0.0;
};

struct DmrgResult {
  MatrixProductState state;
  double final_energy = 0.0;
  std::vector<SweepRecord> sweep_trace;
  bool budget_truncated = false;
};

namespace detail {

// Effective-Hamiltonian application on one or two sites. Local tensors are
// stored column-major as (chi_l) x (s1 [s2] r) with r fastest.
class LocalProblem {
 public:
  LocalProblem(const EnvBlock& lenv, const EnvBlock& renv,
               const MpoOperator::SiteOp* w1, const MpoOperator::SiteOp* w2,
               Eigen::Index dl, Eigen::Index dr)
      : lenv_(lenv), renv_(renv), w1_(w1), w2_(w2), dl_(dl), dr_(dr),
        two_site_(w2 != nullptr), cols_((two_site_ ? 4 : 2) * dr) {}

  Eigen::Index size() const { return dl_ * cols_; }

  Vector apply(const Vector& v) const {
    Eigen::Map<const Matrix> psi(v.data(), dl_, cols_);
    Vector out_v = Vector::Zero(size());
    Eigen::Map<Matrix> out(out_v.data(), dl_, cols_);

    const Eigen::Index s1_stride = cols_ / 2;

    // left environments
    std::vector<Matrix> T(w1_->wl);
    std::vector<char> tlive(w1_->wl, 0);
    for (Eigen::Index a = 0; a < w1_->wl; ++a) {
      if (!lenv_.live[a]) continue;
      T[a] = lenv_.channel[a] * psi;
      tlive[a] = 1;
    }

    // first MPO site mixes s1
    std::vector<Matrix> U(w1_->wr);
    std::vector<char> ulive(w1_->wr, 0);
    for (Eigen::Index a = 0; a < w1_->wl; ++a) {
      if (!tlive[a]) continue;
      for (Eigen::Index b = 0; b < w1_->wr; ++b) {
        if (!w1_->present(a, b)) continue;
        const auto& op = w1_->at(a, b);
        if (!ulive[b]) {
          U[b] = Matrix::Zero(dl_, cols_);
          ulive[b] = 1;
        }
        for (int sp = 0; sp < 2; ++sp)
          for (int s = 0; s < 2; ++s) {
            const Complex c = op(sp, s);
            if (c == Complex(0, 0)) continue;
            U[b].middleCols(sp * s1_stride, s1_stride) +=
                c * T[a].middleCols(s * s1_stride, s1_stride);
          }
      }
    }

    // second MPO site mixes s2 (two-site problems)
    std::vector<Matrix> V;
    std::vector<char> vlive;
    const Eigen::Index wr_end = two_site_ ? w2_->wr : w1_->wr;
    if (two_site_) {
      V.assign(wr_end, Matrix());
      vlive.assign(wr_end, 0);
      for (Eigen::Index b = 0; b < w2_->wl; ++b) {
        if (!ulive[b]) continue;
        for (Eigen::Index c = 0; c < w2_->wr; ++c) {
          if (!w2_->present(b, c)) continue;
          const auto& op = w2_->at(b, c);
          if (!vlive[c]) {
            V[c] = Matrix::Zero(dl_, cols_);
            vlive[c] = 1;
          }
          for (int sp = 0; sp < 2; ++sp)
            for (int s = 0; s < 2; ++s) {
              const Complex cc = op(sp, s);
              if (cc == Complex(0, 0)) continue;
              for (int s1 = 0; s1 < 2; ++s1)
                V[c].middleCols(s1 * s1_stride + sp * dr_, dr_) +=
                    cc * U[b].middleCols(s1 * s1_stride + s * dr_, dr_);
            }
        }
      }
    } else {
      V = std::move(U);
      vlive = std::move(ulive);
    }

    // right environments close each channel
    const Eigen::Index nblocks = cols_ / dr_;
    for (Eigen::Index c = 0; c < wr_end; ++c) {
      if (!vlive[c] || !renv_.live[c]) continue;
      const Matrix rt = renv_.channel[c].transpose();
      for (Eigen::Index q = 0; q < nblocks; ++q)
        out.middleCols(q * dr_, dr_) += V[c].middleCols(q * dr_, dr_) * rt;
    }
    return out_v;
  }

 private:
  const EnvBlock& lenv_;
  const EnvBlock& renv_;
  const MpoOperator::SiteOp* w1_;
  const MpoOperator::SiteOp* w2_;
  Eigen::Index dl_, dr_;
  bool two_site_;
  Eigen::Index cols_;
};

struct TruncationResult {
  Matrix left;              // (2*dl) x keep, orthonormal columns
  Matrix right;             // keep x (2*dr), orthonormal rows
  Eigen::VectorXd weights;  // kept singular values, renormalized to unit norm
};

// SVD split of a two-site block with the relative squared-weight cutoff
// (discard lambda_k^2 < cutoff * sum lambda^2) and a hard bond cap.
inline TruncationResult split_two_site(const Matrix& theta, double cutoff,
                                       Eigen::Index max_bond) {
  Eigen::BDCSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double total = sv.squaredNorm();
  Eigen::Index keep = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (k >= max_bond) break;
    if (k > 0 && sv[k] * sv[k] < cutoff * total) break;
    ++keep;
  }
  keep = std::max<Eigen::Index>(keep, 1);
  TruncationResult r;
  r.left = svd.matrixU().leftCols(keep);
  r.right = svd.matrixV().leftCols(keep).adjoint();
  r.weights = sv.head(keep);
  const double kept_norm = r.weights.norm();
  if (kept_norm > 0) r.weights /= kept_norm;
  return r;
}

inline std::uint64_t lanczos_restart_seed(std::size_t stage, int sweep, int site) {
  return mix_seed(0x1a9c305ULL, stage * 1000003ULL + sweep * 131ULL, site);
}

}  // namespace detail

// Staged DMRG ground-state search. A sweep is a left-to-right then
// right-to-left pass. dmrg2 optimizes two-site blocks and truncates by cutoff
// and the sweep's max bond; dmrg1 optimizes single sites at fixed bond, with
// the schedule realized by zero-padding. Wall budgets are checked at every
// local update, quanta budgets per sweep; exhaustion mid-sweep returns the
// last completed canonical state.
inline DmrgResult run_dmrg(const SpinChainSpec& spec, const DmrgProtocol& protocol,
                           Budget budget) {
  protocol.validate();
  spec.validate();
  BudgetClock clock(budget);
  const MpoOperator mpo = build_mpo(spec);
  const int L = spec.L;

  DmrgResult result;
  MatrixProductState mps;
  bool have_state = false;

  MatrixProductState snapshot;
  double snapshot_energy = 0.0;
  bool have_snapshot = false;

  std::vector<EnvBlock> lenv(L + 1), renv(L + 1);

  auto renormalize_and_rebuild = [&]() {
    mps.canonicalize(0);
    const double n = mps.norm();
    if (n < 1e-300) throw EvaluationError("MPS norm collapsed during DMRG");
    mps.scale_center(1.0 / n);
    renv[L] = EnvBlock::boundary();
    for (int k = L - 1; k >= 1; --k)
      renv[k] = env_absorb_right(renv[k + 1], mpo.sites[k], mps.sites[k]);
    lenv[0] = EnvBlock::boundary();
  };

  for (std::size_t stage_idx = 0; stage_idx < protocol.stages.size() && !result.budget_truncated;
       ++stage_idx) {
    const DmrgStage& stage = protocol.stages[stage_idx];
    if (stage.init.kind == MpsInit::inherit) {
      if (!have_state) throw ValidationError("inherit init without a previous stage");
      mps.pad_bonds(stage.schedule_bond(0));
    } else {
      mps = init_mps(stage.init.kind, L, stage.init.bond, stage.init.seed);
    }
    have_state = true;
    renormalize_and_rebuild();

    const bool two_site = stage.method == DmrgStage::Method::dmrg2;

    for (int sweep = 1; sweep <= stage.max_sweeps; ++sweep) {
      if (clock.exhausted()) {
        result.budget_truncated = true;
        break;
      }
      const Eigen::Index bond_max = stage.schedule_bond(sweep - 1);
      if (!two_site && mps.pad_bonds(bond_max)) renormalize_and_rebuild();

      double last_ritz = 0.0;
      bool aborted = false;

      auto local_solve = [&](int k) {
        const Eigen::Index dl = mps.sites[k].left();
        const Eigen::Index dr = two_site ? mps.sites[k + 1].right() : mps.sites[k].right();
        detail::LocalProblem problem(lenv[k], renv[k + (two_site ? 2 : 1)], &mpo.sites[k],
                                     two_site ? &mpo.sites[k + 1] : nullptr, dl, dr);
        Vector v0(problem.size());
        Eigen::Map<Matrix> v0m(v0.data(), dl, problem.size() / dl);
        if (two_site) {
          const auto& t2 = mps.sites[k + 1];
          for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
              v0m.middleCols(s1 * 2 * dr + s2 * dr, dr) = mps.sites[k].block[s1] * t2.block[s2];
        } else {
          v0m.leftCols(dr) = mps.sites[k].block[0];
          v0m.rightCols(dr) = mps.sites[k].block[1];
        }
        auto matvec = [&](const Vector& x) { return problem.apply(x); };
        auto res = lanczos_ground(matvec, problem.size(), v0, stage.eig_tol, stage.ncv, 8,
                                  detail::lanczos_restart_seed(stage_idx, sweep, k));
        last_ritz = res.eigenvalue;
        return res.eigenvector;
      };

      auto split_and_move = [&](int k, const Vector& theta_vec, bool moving_right) {
        const Eigen::Index dl = mps.sites[k].left();
        const Eigen::Index dr = mps.sites[k + 1].right();
        // repack (l)(s1 s2 r) -> (s1*dl + l) x (s2*dr + r)
        Eigen::Map<const Matrix> tm(theta_vec.data(), dl, 4 * dr);
        Matrix theta(2 * dl, 2 * dr);
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2)
            theta.block(s1 * dl, s2 * dr, dl, dr) = tm.middleCols(s1 * 2 * dr + s2 * dr, dr);
        auto tr = detail::split_two_site(theta, stage.cutoff, bond_max);
        for (int s = 0; s < 2; ++s) {
          mps.sites[k].block[s] = tr.left.middleRows(s * dl, dl);
          mps.sites[k + 1].block[s] = tr.right.middleCols(s * dr, dr);
        }
        if (moving_right) {
          for (int s = 0; s < 2; ++s)
            mps.sites[k + 1].block[s] = tr.weights.asDiagonal() * mps.sites[k + 1].block[s];
          mps.center = k + 1;
          lenv[k + 1] = env_absorb_left(lenv[k], mpo.sites[k], mps.sites[k]);
        } else {
          for (int s = 0; s < 2; ++s)
            mps.sites[k].block[s] = mps.sites[k].block[s] * tr.weights.asDiagonal();
          mps.center = k;
          renv[k + 1] = env_absorb_right(renv[k + 2], mpo.sites[k + 1], mps.sites[k + 1]);
        }
      };

      auto one_site_update = [&](int k, const Vector& v, bool moving_right) {
        const Eigen::Index dr = mps.sites[k].right();
        Eigen::Map<const Matrix> vm(v.data(), mps.sites[k].left(), 2 * dr);
        mps.sites[k].block[0] = vm.leftCols(dr);
        mps.sites[k].block[1] = vm.rightCols(dr);
        mps.center = k;
        if (moving_right && k + 1 < L) {
          mps.left_normalize_site(k);
          mps.center = k + 1;
          lenv[k + 1] = env_absorb_left(lenv[k], mpo.sites[k], mps.sites[k]);
        } else if (!moving_right && k > 0) {
          mps.right_normalize_site(k);
          mps.center = k - 1;
          renv[k] = env_absorb_right(renv[k + 1], mpo.sites[k], mps.sites[k]);
        }
      };

      auto wall_exceeded = [&]() {
        return budget.mode == Budget::Mode::wall_time && clock.exhausted();
      };

      const int last_left = two_site ? L - 2 : L - 1;
      for (int k = 0; k <= last_left && !aborted; ++k) {
        if (wall_exceeded()) { aborted = true; break; }
        Vector v = local_solve(k);
        if (two_site) split_and_move(k, v, true);
        else one_site_update(k, v, true);
      }
      for (int k = last_left; k >= 0 && !aborted; --k) {
        if (wall_exceeded()) { aborted = true; break; }
        Vector v = local_solve(k);
        if (two_site) split_and_move(k, v, false);
        else one_site_update(k, v, false);
      }

      if (aborted) {
        result.budget_truncated = true;
        break;
      }
      clock.consume();  // one sweep
      snapshot = mps;
      snapshot_energy = last_ritz;
      have_snapshot = true;
      result.sweep_trace.push_back({static_cast<int>(stage_idx), sweep, last_ritz,
                                    mps.max_bond(), clock.elapsed_seconds()});
    }
  }

  if (result.budget_truncated && have_snapshot) {
    result.state = std::move(snapshot);
    result.final_energy = snapshot_energy;
  } else {
    if (!have_snapshot) result.budget_truncated = true;
    result.state = std::move(mps);
    const double n2 = mps_norm2(result.state);
    if (n2 < 1e-300) throw EvaluationError("DMRG produced a zero state");
    result.final_energy = mpo_expectation(result.state, mpo) / n2;
  }
  return result;
}

}  // namespace gsbench
