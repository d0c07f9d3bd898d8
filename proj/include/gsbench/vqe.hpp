#pragma once

#include <optional>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "gsbench/budget.hpp"
#include "gsbench/optim.hpp"
#include "gsbench/pauli.hpp"
#include "gsbench/statevector.hpp"

namespace gsbench {

struct PoolGenerator {
  int tie = 0;            // parameter index this generator is tied to
  std::string letters;    // Hermitian Pauli string
};

struct InitPolicy {
  enum class Kind { gaussian, zeros, warm_start };
  Kind kind = Kind::gaussian;
  double scale = 0.1;         // gaussian only
  Eigen::VectorXd warm;       // warm_start only
};

struct AnsatzSpec {
  enum class Family { hea_ryrz_ring, pauli_pool };
  Family family = Family::hea_ryrz_ring;
  int layers = 1;                      // hea only
  std::vector<PoolGenerator> pool;     // pauli_pool only
  std::string reference_bitstring;
  InitPolicy init;
  std::uint64_t seed = 0;

  int num_sites() const { return static_cast<int>(reference_bitstring.size()); }

  int num_params() const {
    if (family == Family::hea_ryrz_ring) return 2 * num_sites() * layers;
    int maxtie = -1;
    for (const auto& g : pool) maxtie = std::max(maxtie, g.tie);
    return maxtie + 1;
  }

  void validate() const {
    const int n = num_sites();
    if (n < 1) throw ValidationError("ansatz needs a reference bitstring");
    for (char c : reference_bitstring)
      if (c != '0' && c != '1') throw ValidationError("reference bitstring must be over {0,1}");
    if (family == Family::hea_ryrz_ring) {
      if (layers < 1) throw ValidationError("hea ansatz needs layers >= 1");
    } else {
      const int p = num_params();
      std::vector<bool> seen(std::max(p, 0), false);
      for (const auto& g : pool) {
        if (g.tie < 0) throw ValidationError("pool tie indices must be non-negative");
        if (static_cast<int>(g.letters.size()) != n)
          throw ValidationError("pool generator length does not match reference");
        if (!valid_pauli_letters(g.letters))
          throw ValidationError("pool generator letters must be from {I,X,Y,Z}");
        seen[g.tie] = true;
      }
      for (int t = 0; t < p; ++t)
        if (!seen[t])
          throw ValidationError("tying map must be surjective onto 0.." + std::to_string(p - 1));
    }
    if (init.kind == InitPolicy::Kind::warm_start &&
        init.warm.size() != num_params())
      throw ValidationError("warm start vector length does not match parameter count");
  }
};

struct VqeProtocol {
  AnsatzSpec ansatz;
  OptimizerSpec optimizer;

  void validate() const {
    ansatz.validate();
    optimizer.validate();
  }
};

struct VqeResult {
  Eigen::VectorXd best_params;
  double best_energy = 0.0;
  std::optional<double> delta_e;
  std::vector<std::pair<int, double>> evaluation_trace;  // (evaluation index, energy)
  int evaluations_used = 0;
};

inline Vector prepare_state(const AnsatzSpec& ansatz, const Eigen::VectorXd& params) {
  ansatz.validate();
  if (params.size() != ansatz.num_params())
    throw ValidationError("parameter vector length does not match ansatz");
  const int n = ansatz.num_sites();
  Vector state = basis_state(ansatz.reference_bitstring);
  if (ansatz.family == AnsatzSpec::Family::hea_ryrz_ring) {
    int p = 0;
    for (int layer = 0; layer < ansatz.layers; ++layer) {
      for (int site = 0; site < n; ++site) {
        apply_ry(state, n, site, params[p++]);
        apply_rz(state, n, site, params[p++]);
      }
      if (n > 1)
        for (int site = 0; site < n; ++site) apply_cnot(state, n, site, (site + 1) % n);
    }
  } else {
    for (const auto& g : ansatz.pool) apply_pauli_rotation(state, g.letters, params[g.tie]);
  }
  return state;
}

// Rayleigh quotient <psi|H|psi> / <psi|psi>.
inline double energy(const PauliHamiltonian& h, const Vector& state) {
  const double nrm2 = state.squaredNorm();
  if (nrm2 <= 0.0) throw ValidationError("energy of a zero vector is undefined");
  return std::real(state.dot(h.apply(state))) / nrm2;
}

inline Eigen::VectorXd initial_parameters(const AnsatzSpec& ansatz) {
  const int p = ansatz.num_params();
  switch (ansatz.init.kind) {
    case InitPolicy::Kind::zeros: return Eigen::VectorXd::Zero(p);
    case InitPolicy::Kind::warm_start: return ansatz.init.warm;
    case InitPolicy::Kind::gaussian: {
      std::mt19937_64 rng(ansatz.seed);
      std::normal_distribution<double> g(0.0, ansatz.init.scale);
      Eigen::VectorXd x(p);
      for (int i = 0; i < p; ++i) x[i] = g(rng);
      return x;
    }
  }
  return Eigen::VectorXd::Zero(p);
}

inline VqeResult run_vqe(const PauliHamiltonian& h, const VqeProtocol& protocol, Budget budget,
                         std::optional<double> reference_energy = std::nullopt) {
  protocol.validate();
  if (h.num_sites() != protocol.ansatz.num_sites())
    throw ValidationError("hamiltonian and ansatz disagree on site count");
  BudgetClock clock(budget);

  VqeResult result;
  Eigen::VectorXd x0 = initial_parameters(protocol.ansatz);

  auto raw_energy = [&](const Eigen::VectorXd& x) {
    return energy(h, prepare_state(protocol.ansatz, x));
  };

  // initial point is always evaluated and not charged against the budget
  result.evaluation_trace.emplace_back(0, raw_energy(x0));
  result.best_params = x0;
  result.best_energy = result.evaluation_trace.front().second;

  auto tracked = [&](const Eigen::VectorXd& x) {
    if (clock.exhausted()) throw BudgetExhausted{};
    clock.consume();
    const double e = raw_energy(x);
    result.evaluation_trace.emplace_back(static_cast<int>(result.evaluation_trace.size()), e);
    if (e < result.best_energy) {  // ties keep the first-seen evaluation
      result.best_energy = e;
      result.best_params = x;
    }
    return e;
  };

  minimize(protocol.optimizer, tracked, x0);

  result.evaluations_used = static_cast<int>(result.evaluation_trace.size());
  if (reference_energy) result.delta_e = std::abs(result.best_energy - *reference_energy);
  return result;
}

// Empirical trainability diagnostic: variance of dE/dtheta_0 over uniform
// parameter draws in [-pi, pi], central differences with step 1e-4.
inline double gradient_variance(const PauliHamiltonian& h, const AnsatzSpec& ansatz,
                                int num_samples, std::uint64_t seed) {
  ansatz.validate();
  if (ansatz.num_params() < 1) throw ValidationError("gradient_variance needs >= 1 parameter");
  if (num_samples < 2) throw ValidationError("gradient_variance needs num_samples >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  const double step = 1e-4;
  std::vector<double> grads(num_samples);
  for (int s = 0; s < num_samples; ++s) {
    Eigen::VectorXd x(ansatz.num_params());
    for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
    Eigen::VectorXd xp = x, xm = x;
    xp[0] += step;
    xm[0] -= step;
    grads[s] = (energy(h, prepare_state(ansatz, xp)) - energy(h, prepare_state(ansatz, xm))) /
               (2 * step);
  }
  double mean = 0.0;
  for (double g : grads) mean += g;
  mean /= num_samples;
  double var = 0.0;
  for (double g : grads) var += (g - mean) * (g - mean);
  return var / (num_samples - 1);
}

// Built-in pools for spin chains. Hopping ties the XX and YY strings on each
// bond to one parameter; exchange adds the ZZ string to the same tie.
inline std::vector<PoolGenerator> make_hopping_pool(int L, int rounds) {
  if (L < 2 || rounds < 1) throw ValidationError("hopping pool needs L >= 2, rounds >= 1");
  std::vector<PoolGenerator> pool;
  int tie = 0;
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i + 1 < L; ++i, ++tie) {
      std::string xx(L, 'I'), yy(L, 'I');
      xx[i] = xx[i + 1] = 'X';
      yy[i] = yy[i + 1] = 'Y';
      pool.push_back({tie, xx});
      pool.push_back({tie, yy});
    }
  }
  return pool;
}

inline std::vector<PoolGenerator> make_exchange_pool(int L, int rounds) {
  if (L < 2 || rounds < 1) throw ValidationError("exchange pool needs L >= 2, rounds >= 1");
  std::vector<PoolGenerator> pool;
  int tie = 0;
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i + 1 < L; ++i, ++tie) {
      std::string xx(L, 'I'), yy(L, 'I'), zz(L, 'I');
      xx[i] = xx[i + 1] = 'X';
      yy[i] = yy[i + 1] = 'Y';
      zz[i] = zz[i + 1] = 'Z';
      pool.push_back({tie, xx});
      pool.push_back({tie, yy});
      pool.push_back({tie, zz});
    }
  }
  return pool;
}

// Singlet-dressing pool for antiferromagnetic chains: tied hopping plus a
// tied Z phase turn a staggered reference into bond singlets, then alternating
// odd/even tied exchange rounds act within the total-spin-zero sector.
// Parameters: 2 + 2 * rounds.
inline std::vector<PoolGenerator> make_dressed_exchange_pool(int L, int rounds) {
  if (L < 2 || rounds < 1) throw ValidationError("dressed pool needs L >= 2, rounds >= 1");
  std::vector<PoolGenerator> pool;
  auto bond = [&](char a, int i) {
    std::string s(L, 'I');
    s[i] = a;
    s[i + 1] = a;
    return s;
  };
  for (int i = 0; i + 1 < L; i += 2) {
    pool.push_back({0, bond('X', i)});
    pool.push_back({0, bond('Y', i)});
  }
  for (int i = 1; i < L; i += 2) {
    std::string s(L, 'I');
    s[i] = 'Z';
    pool.push_back({1, s});
  }
  int tie = 2;
  for (int r = 0; r < rounds; ++r) {
    for (int i = 1; i + 1 < L; i += 2)
      for (char a : {'X', 'Y', 'Z'}) pool.push_back({tie, bond(a, i)});
    ++tie;
    for (int i = 0; i + 1 < L; i += 2)
      for (char a : {'X', 'Y', 'Z'}) pool.push_back({tie, bond(a, i)});
    ++tie;
  }
  return pool;
}

// Pool file format: one `<tie_index> <letters>` per line, '#' comments.
inline std::vector<PoolGenerator> parse_pool_text(const std::string& text) {
  std::vector<PoolGenerator> pool;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long tie;
    std::string letters, extra;
    if (!(ls >> tie)) continue;
    if (!(ls >> letters) || (ls >> extra))
      throw ValidationError("pool line " + std::to_string(lineno) +
                            ": expected '<tie_index> <letters>'");
    if (tie < 0) throw ValidationError("pool line " + std::to_string(lineno) + ": negative tie");
    pool.push_back({static_cast<int>(tie), letters});
  }
  if (pool.empty()) throw ValidationError("pool file has no generators");
  return pool;
}

}  // namespace gsbench
