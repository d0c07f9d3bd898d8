#pragma once

#include <cmath>
#include <vector>

#include "gsbench/budget.hpp"
#include "gsbench/common.hpp"
#include "gsbench/rng.hpp"

namespace gsbench {

struct HsField {
  double mu = 0.0;     // weight, >= 0
  Matrix projector;    // Hermitian idempotent, mutually orthogonal across fields
};

// H = diag(one_body) - 1/2 sum_g mu_g P_g + shift * I, up to the dropped-field
// residual when field_cutoff > 0.
struct HsFactorization {
  RealVector one_body;
  std::vector<HsField> fields;
  double shift = 0.0;
  Eigen::Index dim = 0;
  double factorization_residual = 0.0;  // 1/2 * sum of dropped mu
  Matrix source;                        // the Hamiltonian that was factorized
};

inline HsFactorization factorize(const Matrix& h, double field_cutoff) {
  const Eigen::Index dim = h.rows();
  if (dim < 1 || dim != h.cols()) throw ValidationError("factorize needs a square matrix");
  if (dim > 64) throw ValidationError("factorize capped at dimension 64");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("factorize needs a Hermitian matrix (to 1e-10)");
  if (field_cutoff < 0) throw ValidationError("field cutoff must be non-negative");

  HsFactorization f;
  f.dim = dim;
  f.source = h;
  f.one_body = h.diagonal().real();

  Matrix k = h;
  k.diagonal().setZero();
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const double lmax = es.eigenvalues().maxCoeff();
  f.shift = lmax + 1e-6;

  // M = 2(diag + shift I - H) = 2(shift I - K) shares K's eigenvectors.
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double mu = 2.0 * (f.shift - es.eigenvalues()[i]);
    if (mu < -1e-10 * std::max(1.0, std::abs(lmax)))
      throw EvaluationError("negative field weight after shift");
    if (mu <= 0.0) continue;
    if (mu < field_cutoff) {
      f.factorization_residual += 0.5 * mu;
      continue;
    }
    const Vector u = es.eigenvectors().col(i);
    f.fields.push_back({mu, u * u.adjoint()});
  }
  return f;
}

// One auxiliary-field propagator sample
//   B(x) = exp(-dt/2 H1) exp(sqrt(dt) sum_g x_g sqrt(mu_g) P_g) exp(-dt/2 H1)
// with x ~ N(0,1)^nfields. The middle exponential is closed-form on the
// commuting projector basis: I + sum_g (exp(sqrt(dt) x_g sqrt(mu_g)) - 1) P_g.
inline Matrix sample_propagator(const HsFactorization& f, double dt, std::mt19937_64& rng) {
  if (dt < 0) throw ValidationError("propagator timestep must be >= 0");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix mid = Matrix::Identity(f.dim, f.dim);
  const double sq = std::sqrt(dt);
  for (const auto& field : f.fields) {
    const double x = normal(rng);
    mid += (std::exp(sq * x * std::sqrt(field.mu)) - 1.0) * field.projector;
  }
  Eigen::VectorXd d = (-0.5 * dt * f.one_body).array().exp();
  return d.asDiagonal() * mid * d.asDiagonal();
}

struct TrialSpec {
  enum class Kind { diagonal_ground, uniform, exact, custom };
  Kind kind = Kind::diagonal_ground;
  Vector custom;
};

inline const char* to_string(TrialSpec::Kind k) {
  switch (k) {
    case TrialSpec::Kind::diagonal_ground: return "diagonal_ground";
    case TrialSpec::Kind::uniform: return "uniform";
    case TrialSpec::Kind::exact: return "exact";
    case TrialSpec::Kind::custom: return "custom";
  }
  return "?";
}

struct ProjectorConfig {
  int walkers_per_rank = 32;
  int num_ranks = 1;  // emulated multiplier
  int steps_per_block = 25;
  int num_blocks = 40;
  double timestep = 0.005;
  double field_cutoff = 1e-5;
  int stabilize_freq = 5;
  int pop_control_freq = 5;
  TrialSpec trial;
  std::uint64_t seed = 0;

  void validate() const {
    if (walkers_per_rank < 1) throw ValidationError("walkers_per_rank must be positive");
    if (num_ranks < 1) throw ValidationError("num_ranks must be positive");
    if (steps_per_block < 1) throw ValidationError("steps_per_block must be positive");
    if (num_blocks < 1) throw ValidationError("num_blocks must be positive");
    if (!(timestep > 0) || !std::isfinite(timestep))
      throw ValidationError("timestep must be positive");
    if (field_cutoff < 0) throw ValidationError("field_cutoff must be non-negative");
    if (stabilize_freq < 1) throw ValidationError("stabilize_freq must be positive");
    if (pop_control_freq < 1) throw ValidationError("pop_control_freq must be positive");
  }

  long long total_walkers() const {
    return static_cast<long long>(walkers_per_rank) * num_ranks;
  }
};

// C_stoch = N_w * N_steps * N_blocks.
inline long long stochastic_cost(const ProjectorConfig& c) {
  c.validate();
  return c.total_walkers() * c.steps_per_block * c.num_blocks;
}

struct WalkerEnsemble {
  std::vector<Vector> states;
  std::vector<double> weights;
};

struct RunTrace {
  std::vector<double> block_energies;
  std::vector<double> total_weight_history;  // one entry per completed block
  double pe_mean = 0.0;
  double pe_std = 0.0;
  double live_score = 0.0;
  double lambda = 5.0;
  long long stochastic_cost = 0;
  bool budget_truncated = false;
};

// Fixed-budget live objective: mean + lambda * sample std over the final
// ceil(n/2) block energies.
inline double live_score(const std::vector<double>& block_energies, double lambda) {
  const std::size_t n = block_energies.size();
  if (n < 2) throw EvaluationError("live_score needs at least 2 blocks");
  const std::size_t m = (n + 1) / 2;
  double mean = 0.0;
  for (std::size_t i = n - m; i < n; ++i) mean += block_energies[i];
  mean /= m;
  double var = 0.0;
  for (std::size_t i = n - m; i < n; ++i)
    var += (block_energies[i] - mean) * (block_energies[i] - mean);
  const double stddev = m > 1 ? std::sqrt(var / (m - 1)) : 0.0;
  return mean + lambda * stddev;
}

inline double live_score(const RunTrace& trace, double lambda) {
  return live_score(trace.block_energies, lambda);
}

inline Vector make_trial(const TrialSpec& trial, const Matrix& h) {
  const Eigen::Index dim = h.rows();
  switch (trial.kind) {
    case TrialSpec::Kind::diagonal_ground: {
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < dim; ++i)
        if (h(i, i).real() < h(best, best).real()) best = i;
      Vector v = Vector::Zero(dim);
      v[best] = 1.0;
      return v;
    }
    case TrialSpec::Kind::uniform:
      return Vector::Constant(dim, 1.0 / std::sqrt(double(dim)));
    case TrialSpec::Kind::exact: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      return es.eigenvectors().col(0);
    }
    case TrialSpec::Kind::custom: {
      if (trial.custom.size() != dim)
        throw ValidationError("custom trial dimension does not match Hamiltonian");
      const double n = trial.custom.norm();
      if (n < 1e-14) throw ValidationError("custom trial vector is zero");
      return trial.custom / n;
    }
  }
  throw ValidationError("invalid trial kind");
}

namespace detail {

// Systematic (comb) resampling with a single uniform offset; resets every
// weight to the mean while preserving the total exactly.
inline void systematic_resample(WalkerEnsemble& ensemble, double u01) {
  const std::size_t n = ensemble.states.size();
  double total = 0.0;
  for (double w : ensemble.weights) total += w;
  const double step = total / double(n);
  std::vector<Vector> new_states;
  new_states.reserve(n);
  double cum = ensemble.weights[0];
  std::size_t idx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = (double(k) + u01) * step;
    while (cum < target && idx + 1 < n) cum += ensemble.weights[++idx];
    new_states.push_back(ensemble.states[idx]);
  }
  ensemble.states = std::move(new_states);
  ensemble.weights.assign(n, step);
}

}  // namespace detail

// Walker propagation with stabilization and population control at fixed
// cadences; records one weighted mixed-estimator energy per block. Budget
// exhaustion truncates at a block boundary and scores what was sampled.
// Per-(step, walker) RNG streams are derived by index, so any parallel
// execution order reproduces the sequential samples bit for bit.
inline RunTrace run_projector(const HsFactorization& fact, const ProjectorConfig& config,
                              Budget budget, double lambda = 5.0) {
  config.validate();
  BudgetClock clock(budget);
  const Eigen::Index dim = fact.dim;
  const long long nw = config.total_walkers();

  const Vector trial = make_trial(config.trial, fact.source);
  const Vector h_trial = fact.source.adjoint() * trial;  // <psi_T| H

  WalkerEnsemble ensemble;
  ensemble.states.assign(nw, trial);
  ensemble.weights.assign(nw, 1.0);

  RunTrace trace;
  trace.lambda = lambda;
  trace.stochastic_cost = stochastic_cost(config);

  long long global_step = 0;
  long long resample_events = 0;

  for (int block = 0; block < config.num_blocks; ++block) {
    if (clock.exhausted()) {
      trace.budget_truncated = true;
      break;
    }
    for (int step = 0; step < config.steps_per_block; ++step) {
      ++global_step;
      for (long long w = 0; w < nw; ++w) {
        auto rng = make_engine(config.seed, static_cast<std::uint64_t>(global_step),
                               static_cast<std::uint64_t>(w));
        ensemble.states[w] = sample_propagator(fact, config.timestep, rng) * ensemble.states[w];
      }
      if (global_step % config.stabilize_freq == 0) {
        for (long long w = 0; w < nw; ++w) {
          const double nrm = ensemble.states[w].norm();
          if (!std::isfinite(nrm) || nrm <= 0.0)
            throw EvaluationError("walker norm degenerate during stabilization");
          ensemble.weights[w] *= nrm;
          ensemble.states[w] /= nrm;
        }
      }
      if (global_step % config.pop_control_freq == 0) {
        auto rng = make_engine(config.seed, 0xc011ec7ULL, static_cast<std::uint64_t>(resample_events++));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        detail::systematic_resample(ensemble, u(rng));
      }
      for (double w : ensemble.weights)
        if (!std::isfinite(w)) throw EvaluationError("walker weight overflow");
    }
    Complex num = 0.0, den = 0.0;
    for (long long w = 0; w < nw; ++w) {
      num += ensemble.weights[w] * h_trial.dot(ensemble.states[w]);
      den += ensemble.weights[w] * trial.dot(ensemble.states[w]);
    }
    if (std::abs(den) < 1e-14)
      throw EvaluationError("trial state orthogonal to the walker ensemble");
    trace.block_energies.push_back((num / den).real());
    double total_weight = 0.0;
    for (double w : ensemble.weights) total_weight += w;
    trace.total_weight_history.push_back(total_weight);
    clock.consume();  // one block
  }

  if (trace.block_energies.size() < 2)
    throw EvaluationError("projector run produced fewer than 2 blocks");
  const std::size_t n = trace.block_energies.size();
  const std::size_t m = (n + 1) / 2;
  double mean = 0.0;
  for (std::size_t i = n - m; i < n; ++i) mean += trace.block_energies[i];
  mean /= m;
  double var = 0.0;
  for (std::size_t i = n - m; i < n; ++i)
    var += (trace.block_energies[i] - mean) * (trace.block_energies[i] - mean);
  trace.pe_mean = mean;
  trace.pe_std = m > 1 ? std::sqrt(var / (m - 1)) : 0.0;
  trace.live_score = trace.pe_mean + lambda * trace.pe_std;
  return trace;
}

}  // namespace gsbench
