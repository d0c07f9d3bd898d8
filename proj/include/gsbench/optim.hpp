#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "gsbench/common.hpp"

namespace gsbench {

// Thrown by a budget-wrapped objective to unwind the optimizer; the caller
// keeps the best point seen so far. Control flow, not an error.
struct BudgetExhausted {};

struct OptimizerSpec {
  enum class Kind { linear_trust_region, line_search_cyclic, simplex };
  Kind kind = Kind::linear_trust_region;
  double rhobeg = 0.5;   // initial step / trust radius
  double tol = 1e-8;     // convergence tolerance on f (and final radius)
  double xtol = 1e-8;    // parameter-space tolerance (line searches, simplex size)
  int max_steps = 4096;  // cap on objective evaluations
  std::uint64_t seed = 0;

  void validate() const {
    if (!(rhobeg > 0)) throw ValidationError("optimizer rhobeg must be positive");
    if (!(tol > 0)) throw ValidationError("optimizer tol must be positive");
    if (!(xtol > 0)) throw ValidationError("optimizer xtol must be positive");
    if (max_steps < 1) throw ValidationError("optimizer max_steps must be >= 1");
  }
};

inline const char* to_string(OptimizerSpec::Kind k) {
  switch (k) {
    case OptimizerSpec::Kind::linear_trust_region: return "linear_trust_region";
    case OptimizerSpec::Kind::line_search_cyclic: return "line_search_cyclic";
    case OptimizerSpec::Kind::simplex: return "simplex";
  }
  return "?";
}

namespace detail {

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Nelder-Mead with standard reflection/expansion/contraction/shrink moves.
inline void minimize_simplex(const OptimizerSpec& spec, const Objective& f, Eigen::VectorXd x0) {
  const int n = static_cast<int>(x0.size());
  int evals = 0;
  auto call = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  vals[0] = call(x0);
  for (int i = 0; i < n; ++i) {
    pts[i + 1][i] += spec.rhobeg;
    if (evals >= spec.max_steps) return;
    vals[i + 1] = call(pts[i + 1]);
  }
  std::vector<int> order(n + 1);
  while (evals < spec.max_steps) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order[0], worst = order[n], second = order[std::max(0, n - 1)];

    double diam = 0.0;
    for (int i = 1; i <= n; ++i) diam = std::max(diam, (pts[order[i]] - pts[best]).norm());
    if (vals[worst] - vals[best] <= spec.tol && diam <= spec.xtol) return;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = call(xr);
    if (fr < vals[best]) {
      if (evals >= spec.max_steps) { pts[worst] = xr; vals[worst] = fr; continue; }
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = call(xe);
      if (fe < fr) { pts[worst] = xe; vals[worst] = fe; }
      else { pts[worst] = xr; vals[worst] = fr; }
    } else if (fr < vals[second]) {
      pts[worst] = xr; vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      Eigen::VectorXd xc;
      if (outside) xc = centroid + 0.5 * (xr - centroid);
      else xc = centroid - 0.5 * (centroid - pts[worst]);
      if (evals >= spec.max_steps) return;
      const double fc = call(xc);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc; vals[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          if (evals >= spec.max_steps) return;
          vals[i] = call(pts[i]);
        }
      }
    }
  }
}

// Golden-section line search along direction d with bracketing from step h0.
inline double line_minimize(const Objective& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& d, double f0, double h0, double xtol,
                            int& evals, int max_evals, double& fmin) {
  auto g = [&](double a) {
    ++evals;
    return f(x + a * d);
  };
  double a = 0.0, fa = f0;
  double b = h0, fb;
  if (evals >= max_evals) { fmin = fa; return 0.0; }
  fb = g(b);
  if (fb > fa) {  // try the other side
    b = -h0;
    if (evals >= max_evals) { fmin = fa; return 0.0; }
    fb = g(b);
    if (fb > fa) {  // bracketed already: [b, -b] with interior a=0
      double lo = std::min(b, -b), hi = std::max(b, -b);
      double flo = (lo == b) ? fb : fa, fhi = (lo == b) ? fa : fb;
      (void)flo; (void)fhi;
      // golden shrink on [lo, hi]
      const double gr = 0.6180339887498949;
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      if (evals + 2 > max_evals) { fmin = fa; return 0.0; }
      double f1 = g(x1), f2 = g(x2);
      while (hi - lo > xtol && evals < max_evals) {
        if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = g(x1); }
        else { lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = g(x2); }
      }
      const double am = (f1 < f2) ? x1 : x2;
      fmin = std::min(f1, f2);
      if (fa <= fmin) { fmin = fa; return 0.0; }
      return am;
    }
  }
  // expand downhill: a=0 -> b, growing
  double c = b * 2.618033988749895, fc;
  while (true) {
    if (evals >= max_evals) break;
    fc = g(c);
    if (fc >= fb) break;
    a = b; fa = fb;
    b = c; fb = fc;
    c = b + (b - a) * 1.618033988749895;
  }
  // golden shrink on [a, c] around b
  double lo = std::min(a, c), hi = std::max(a, c);
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  if (evals + 2 > max_evals) { fmin = fb; return b; }
  double f1 = g(x1), f2 = g(x2);
  while (hi - lo > xtol * (1.0 + std::abs(lo) + std::abs(hi)) && evals < max_evals) {
    if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = g(x1); }
    else { lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = g(x2); }
  }
  double am = (f1 < f2) ? x1 : x2;
  double fm = std::min(f1, f2);
  if (fb < fm) { am = b; fm = fb; }
  if (fa < fm) { am = a; fm = fa; }
  fmin = fm;
  return am;
}

// Powell-style cyclic direction-set method with direction replacement.
inline void minimize_line_search_cyclic(const OptimizerSpec& spec, const Objective& f,
                                        Eigen::VectorXd x) {
  const int n = static_cast<int>(x.size());
  int evals = 0;
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < n; ++i) dirs.push_back(Eigen::VectorXd::Unit(n, i));
  ++evals;
  double fx = f(x);
  double step = spec.rhobeg;
  while (evals < spec.max_steps) {
    const Eigen::VectorXd x_start = x;
    const double f_start = fx;
    double biggest_drop = 0.0;
    int drop_index = -1;
    for (int i = 0; i < n && evals < spec.max_steps; ++i) {
      double fmin = fx;
      const double alpha = line_minimize(f, x, dirs[i], fx, step, spec.xtol, evals,
                                         spec.max_steps, fmin);
      if (fmin < fx) {
        if (fx - fmin > biggest_drop) { biggest_drop = fx - fmin; drop_index = i; }
        x += alpha * dirs[i];
        fx = fmin;
      }
    }
    // direction-set update: replace the direction of largest decrease with the
    // net displacement, then minimize along it once
    Eigen::VectorXd net = x - x_start;
    const double net_norm = net.norm();
    if (drop_index >= 0 && net_norm > 1e-300 && evals < spec.max_steps) {
      net /= net_norm;
      double fmin = fx;
      const double alpha = line_minimize(f, x, net, fx, step, spec.xtol, evals,
                                         spec.max_steps, fmin);
      if (fmin < fx) {
        x += alpha * net;
        fx = fmin;
      }
      dirs[drop_index] = net;
    }
    if (2.0 * (f_start - fx) <= spec.tol * (std::abs(f_start) + std::abs(fx)) + 1e-300) {
      if (step <= spec.xtol) return;
      step = std::max(step * 0.25, spec.xtol);  // refine bracketing scale before giving up
    }
  }
}

// COBYLA-flavoured unconstrained scheme: keep a simplex of n+1 points, fit a
// linear model, take a steepest-descent step of length rho, and shrink rho
// when progress stalls. Stops at rho < tol or the evaluation cap.
inline void minimize_linear_trust_region(const OptimizerSpec& spec, const Objective& f,
                                         Eigen::VectorXd x0) {
  const int n = static_cast<int>(x0.size());
  int evals = 0;
  auto call = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };

  double rho = spec.rhobeg;
  const double rho_end = std::min(spec.tol, spec.rhobeg);

  Eigen::VectorXd best = x0;
  double fbest = call(best);

  std::vector<Eigen::VectorXd> offsets(n);
  std::vector<double> foff(n);
  auto rebuild = [&]() -> bool {
    for (int i = 0; i < n; ++i) {
      offsets[i] = best;
      offsets[i][i] += rho;
      if (evals >= spec.max_steps) return false;
      foff[i] = call(offsets[i]);
      if (foff[i] < fbest) {
        std::swap(offsets[i], best);
        std::swap(foff[i], fbest);
      }
    }
    return true;
  };
  if (!rebuild()) return;

  Eigen::MatrixXd D(n, n);
  Eigen::VectorXd dF(n);
  int stall = 0;
  while (evals < spec.max_steps && rho >= rho_end) {
    for (int i = 0; i < n; ++i) {
      D.row(i) = (offsets[i] - best).transpose();
      dF[i] = foff[i] - fbest;
    }
    Eigen::VectorXd g = D.fullPivLu().solve(dF);
    const double gnorm = g.norm();
    if (!std::isfinite(gnorm) || gnorm < 1e-300) {
      rho *= 0.5;
      if (rho < rho_end || !rebuild()) return;
      continue;
    }
    Eigen::VectorXd trial = best - (rho / gnorm) * g;
    if (evals >= spec.max_steps) return;
    const double ftrial = call(trial);
    // replace the worst offset to keep the model local
    int worst = 0;
    for (int i = 1; i < n; ++i)
      if (foff[i] > foff[worst]) worst = i;
    if (ftrial < fbest) {
      offsets[worst] = best;
      foff[worst] = fbest;
      best = trial;
      fbest = ftrial;
      stall = 0;
    } else {
      if (ftrial < foff[worst]) {
        offsets[worst] = trial;
        foff[worst] = ftrial;
      }
      if (++stall >= 2) {
        stall = 0;
        rho *= 0.5;
        if (rho < rho_end || !rebuild()) return;
      }
    }
    // keep simplex within a few trust radii of the incumbent
    double maxdist = 0.0;
    for (int i = 0; i < n; ++i) maxdist = std::max(maxdist, (offsets[i] - best).norm());
    if (maxdist > 8.0 * rho && !rebuild()) return;
  }
}

}  // namespace detail

// Runs the optimizer named by the spec. The objective may throw
// BudgetExhausted to stop early; callers track the best point seen.
inline void minimize(const OptimizerSpec& spec, const detail::Objective& f,
                     const Eigen::VectorXd& x0) {
  spec.validate();
  if (x0.size() == 0) throw ValidationError("cannot optimize zero parameters");
  try {
    switch (spec.kind) {
      case OptimizerSpec::Kind::simplex: detail::minimize_simplex(spec, f, x0); break;
      case OptimizerSpec::Kind::line_search_cyclic:
        detail::minimize_line_search_cyclic(spec, f, x0);
        break;
      case OptimizerSpec::Kind::linear_trust_region:
        detail::minimize_linear_trust_region(spec, f, x0);
        break;
    }
  } catch (const BudgetExhausted&) {
    // best-seen bookkeeping lives with the caller
  }
}

}  // namespace gsbench
