#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "gsbench/common.hpp"

namespace gsbench {

// Rank-3 MPS site tensor (left bond x physical(2) x right bond), stored as
// one matrix per physical index.
struct SiteTensor {
  std::array<Matrix, 2> block;

  Eigen::Index left() const { return block[0].rows(); }
  Eigen::Index right() const { return block[0].cols(); }

  static SiteTensor zero(Eigen::Index l, Eigen::Index r) {
    SiteTensor t;
    t.block[0] = Matrix::Zero(l, r);
    t.block[1] = Matrix::Zero(l, r);
    return t;
  }
};

class MatrixProductState {
 public:
  std::vector<SiteTensor> sites;
  std::optional<int> center;  // canonical center, if established

  int length() const { return static_cast<int>(sites.size()); }

  // interior bond dimensions (length L-1)
  std::vector<Eigen::Index> bond_dims() const {
    std::vector<Eigen::Index> dims;
    for (int k = 0; k + 1 < length(); ++k) dims.push_back(sites[k].right());
    return dims;
  }

  Eigen::Index max_bond() const {
    Eigen::Index m = 1;
    for (auto d : bond_dims()) m = std::max(m, d);
    return m;
  }

  void check_consistent() const {
    if (sites.empty()) throw ValidationError("empty MPS");
    if (sites.front().left() != 1 || sites.back().right() != 1)
      throw ValidationError("boundary bonds must be 1");
    for (int k = 0; k + 1 < length(); ++k)
      if (sites[k].right() != sites[k + 1].left())
        throw ValidationError("adjacent bond dimensions do not match");
  }

  // With a canonical center, the global norm is the center tensor norm.
  double norm() const {
    if (!center) throw ValidationError("norm requires a canonical center");
    const auto& t = sites[*center];
    return std::sqrt(t.block[0].squaredNorm() + t.block[1].squaredNorm());
  }

  void scale_center(double factor) {
    if (!center) throw ValidationError("scale_center requires a canonical center");
    sites[*center].block[0] *= factor;
    sites[*center].block[1] *= factor;
  }

  // QR left-normalization of site k; the R factor is absorbed into site k+1.
  void left_normalize_site(int k) {
    auto& t = sites[k];
    const Eigen::Index dl = t.left(), dr = t.right();
    Matrix m(2 * dl, dr);
    m.topRows(dl) = t.block[0];
    m.bottomRows(dl) = t.block[1];
    Eigen::HouseholderQR<Matrix> qr(m);
    const Eigen::Index r = std::min(2 * dl, dr);
    Matrix q = qr.householderQ() * Matrix::Identity(2 * dl, r);
    Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    t.block[0] = q.topRows(dl);
    t.block[1] = q.bottomRows(dl);
    if (k + 1 < length()) {
      sites[k + 1].block[0] = rr * sites[k + 1].block[0];
      sites[k + 1].block[1] = rr * sites[k + 1].block[1];
    } else {
      // final site: the 1x1 remainder carries norm and phase; keep it
      t.block[0] *= rr(0, 0);
      t.block[1] *= rr(0, 0);
    }
  }

  // LQ right-normalization of site k; the L factor is absorbed into site k-1.
  void right_normalize_site(int k) {
    auto& t = sites[k];
    const Eigen::Index dl = t.left(), dr = t.right();
    Matrix m(dl, 2 * dr);
    m.leftCols(dr) = t.block[0];
    m.rightCols(dr) = t.block[1];
    Eigen::HouseholderQR<Matrix> qr(m.adjoint());
    const Eigen::Index r = std::min(dl, 2 * dr);
    Matrix q = (qr.householderQ() * Matrix::Identity(2 * dr, r)).adjoint();
    Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Matrix l = rr.adjoint();
    t.block[0] = q.leftCols(dr);
    t.block[1] = q.rightCols(dr);
    if (k > 0) {
      sites[k - 1].block[0] = sites[k - 1].block[0] * l;
      sites[k - 1].block[1] = sites[k - 1].block[1] * l;
    } else {
      t.block[0] *= l(0, 0);
      t.block[1] *= l(0, 0);
    }
  }

  // Establish mixed-canonical form with the center at `c` by full QR sweeps.
  void canonicalize(int c) {
    if (c < 0 || c >= length()) throw ValidationError("canonical center out of range");
    for (int k = 0; k < c; ++k) left_normalize_site(k);
    for (int k = length() - 1; k > c; --k) right_normalize_site(k);
    center = c;
  }

  void move_center(int to) {
    if (!center) {
      canonicalize(to);
      return;
    }
    while (*center < to) {
      left_normalize_site(*center);
      center = *center + 1;
    }
    while (*center > to) {
      right_normalize_site(*center);
      center = *center - 1;
    }
  }

  // Dense statevector (site 0 = most significant bit); for tests and oracles.
  Vector to_dense() const {
    if (length() > 20) throw ValidationError("to_dense capped at 20 sites");
    Matrix coeff = Matrix::Ones(1, 1);
    for (const auto& t : sites) {
      const Eigen::Index rows = coeff.rows(), dr = t.right();
      Matrix next(rows * 2, dr);
      next.topRows(rows) = coeff * t.block[0];
      next.bottomRows(rows) = coeff * t.block[1];
      // interleave so that this site's physical index is the next bit
      Matrix shuffled(rows * 2, dr);
      for (Eigen::Index i = 0; i < rows; ++i) {
        shuffled.row(2 * i) = next.row(i);
        shuffled.row(2 * i + 1) = next.row(rows + i);
      }
      coeff = shuffled;
    }
    return coeff.col(0);
  }

  // Zero-pad interior bonds up to min(target, physical cap) and restore
  // canonical form at site 0. Returns whether anything changed.
  bool pad_bonds(Eigen::Index target) {
    const int L = length();
    bool changed = false;
    for (int k = 0; k + 1 < L; ++k) {
      const Eigen::Index cap = physical_bond_cap(L, k);
      const Eigen::Index want = std::min<Eigen::Index>(target, cap);
      const Eigen::Index cur = sites[k].right();
      if (cur >= want) continue;
      changed = true;
      for (int s = 0; s < 2; ++s) {
        Matrix nb = Matrix::Zero(sites[k].block[s].rows(), want);
        nb.leftCols(cur) = sites[k].block[s];
        sites[k].block[s] = std::move(nb);
        Matrix nb2 = Matrix::Zero(want, sites[k + 1].block[s].cols());
        nb2.topRows(cur) = sites[k + 1].block[s];
        sites[k + 1].block[s] = std::move(nb2);
      }
    }
    if (changed) {
      center.reset();
      canonicalize(0);
    }
    return changed;
  }

  static Eigen::Index physical_bond_cap(int L, int bond_index) {
    // bond between sites k and k+1 carries at most min(2^(k+1), 2^(L-k-1))
    const int left_sites = bond_index + 1;
    const int right_sites = L - bond_index - 1;
    const int e = std::min({left_sites, right_sites, 40});
    return Eigen::Index(1) << std::min(e, 30);
  }
};

enum class MpsInit { inherit, random, neel, plus, minus, product_up, product_down };

inline const char* to_string(MpsInit k) {
  switch (k) {
    case MpsInit::inherit: return "inherit";
    case MpsInit::random: return "random";
    case MpsInit::neel: return "neel";
    case MpsInit::plus: return "plus";
    case MpsInit::minus: return "minus";
    case MpsInit::product_up: return "product_up";
    case MpsInit::product_down: return "product_down";
  }
  return "?";
}

// Product and random initial states. Product states are built at bond 1 and
// zero-padded to the requested bond; random states draw complex gaussian
// tensors at the given bond and are normalized.
inline MatrixProductState init_mps(MpsInit kind, int L, Eigen::Index bond, std::uint64_t seed) {
  if (L < 2) throw ValidationError("init_mps needs L >= 2");
  if (bond < 1) throw ValidationError("init_mps needs bond >= 1");
  if (kind == MpsInit::inherit) throw ValidationError("inherit is not a constructible init");

  MatrixProductState mps;
  if (kind == MpsInit::random) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < L; ++k) {
      const Eigen::Index dl = k == 0 ? 1 : std::min(bond, MatrixProductState::physical_bond_cap(L, k - 1));
      const Eigen::Index dr = k == L - 1 ? 1 : std::min(bond, MatrixProductState::physical_bond_cap(L, k));
      SiteTensor t = SiteTensor::zero(dl, dr);
      for (int s = 0; s < 2; ++s)
        for (Eigen::Index i = 0; i < dl; ++i)
          for (Eigen::Index j = 0; j < dr; ++j) t.block[s](i, j) = Complex(g(rng), g(rng));
      mps.sites.push_back(std::move(t));
    }
    mps.canonicalize(0);
    const double n = mps.norm();
    if (n < 1e-300) throw EvaluationError("random MPS collapsed to zero");
    mps.scale_center(1.0 / n);
    return mps;
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < L; ++k) {
    SiteTensor t = SiteTensor::zero(1, 1);
    switch (kind) {
      case MpsInit::neel: t.block[k % 2 == 0 ? 0 : 1](0, 0) = 1.0; break;
      case MpsInit::plus:
        t.block[0](0, 0) = inv_sqrt2;
        t.block[1](0, 0) = inv_sqrt2;
        break;
      case MpsInit::minus:
        t.block[0](0, 0) = inv_sqrt2;
        t.block[1](0, 0) = -inv_sqrt2;
        break;
      case MpsInit::product_up: t.block[0](0, 0) = 1.0; break;
      case MpsInit::product_down: t.block[1](0, 0) = 1.0; break;
      default: throw ValidationError("invalid MPS init kind");
    }
    mps.sites.push_back(std::move(t));
  }
  mps.center = 0;
  if (bond > 1) mps.pad_bonds(bond);
  else mps.canonicalize(0);
  return mps;
}

}  // namespace gsbench
