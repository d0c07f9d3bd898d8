#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gsbench/budget.hpp"
#include "gsbench/dmrg.hpp"
#include "gsbench/pauli.hpp"
#include "gsbench/projector.hpp"
#include "gsbench/vqe.hpp"

namespace gsbench {

using nlohmann::json;

// Strict object parsing: unknown keys are errors (anti-typo rule), missing
// required keys are errors naming the key.
inline void check_keys(const json& j, const std::vector<std::string>& allowed,
                       const std::string& context) {
  if (!j.is_object()) throw ValidationError(context + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ValidationError(context + ": unknown key \"" + it.key() + "\"");
  }
}

inline const json& require_key(const json& j, const std::string& key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(context + ": missing required key \"" + key + "\"");
  return *it;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

// ---- spin chains ----

inline json spec_to_json(const SpinChainSpec& s) {
  return {{"L", s.L}, {"Jx", s.Jx}, {"Jy", s.Jy}, {"Jz", s.Jz}, {"hx", s.hx}, {"hz", s.hz}};
}

inline SpinChainSpec spec_from_json(const json& j) {
  check_keys(j, {"L", "Jx", "Jy", "Jz", "hx", "hz"}, "spin chain spec");
  SpinChainSpec s;
  s.L = require_key(j, "L", "spin chain spec").get<int>();
  s.Jx = get_or(j, "Jx", 0.0);
  s.Jy = get_or(j, "Jy", 0.0);
  s.Jz = get_or(j, "Jz", 0.0);
  s.hx = get_or(j, "hx", 0.0);
  s.hz = get_or(j, "hz", 0.0);
  s.validate();
  return s;
}

// ---- budgets ----

inline json budget_to_json(const Budget& b) {
  return {{"mode", b.mode == Budget::Mode::wall_time ? "wall_time" : "quanta"},
          {"value", b.value}};
}

inline Budget budget_from_json(const json& j) {
  check_keys(j, {"mode", "value"}, "budget");
  const std::string mode = require_key(j, "mode", "budget").get<std::string>();
  Budget b;
  if (mode == "wall_time") b.mode = Budget::Mode::wall_time;
  else if (mode == "quanta") b.mode = Budget::Mode::quanta;
  else throw ValidationError("budget: mode must be wall_time or quanta");
  b.value = require_key(j, "value", "budget").get<double>();
  b.validate();
  return b;
}

// ---- DMRG ----

inline MpsInit mps_init_from_name(const std::string& name) {
  if (name == "inherit") return MpsInit::inherit;
  if (name == "random") return MpsInit::random;
  if (name == "neel") return MpsInit::neel;
  if (name == "plus") return MpsInit::plus;
  if (name == "minus") return MpsInit::minus;
  if (name == "product_up") return MpsInit::product_up;
  if (name == "product_down") return MpsInit::product_down;
  throw ValidationError("unknown MPS init kind \"" + name + "\"");
}

inline json dmrg_stage_to_json(const DmrgStage& s) {
  json bonds = json::array();
  for (auto b : s.bond_schedule) bonds.push_back(static_cast<long long>(b));
  return {{"method", to_string(s.method)},
          {"bond_schedule", bonds},
          {"cutoff", s.cutoff},
          {"eig_tol", s.eig_tol},
          {"max_sweeps", s.max_sweeps},
          {"ncv", s.ncv},
          {"init", {{"kind", to_string(s.init.kind)},
                    {"bond", static_cast<long long>(s.init.bond)},
                    {"seed", s.init.seed}}}};
}

inline DmrgStage dmrg_stage_from_json(const json& j) {
  check_keys(j, {"method", "bond_schedule", "cutoff", "eig_tol", "max_sweeps", "ncv", "init"},
             "dmrg stage");
  DmrgStage s;
  const std::string method = require_key(j, "method", "dmrg stage").get<std::string>();
  if (method == "dmrg1") s.method = DmrgStage::Method::dmrg1;
  else if (method == "dmrg2") s.method = DmrgStage::Method::dmrg2;
  else throw ValidationError("dmrg stage: method must be dmrg1 or dmrg2");
  s.bond_schedule.clear();
  for (const auto& b : require_key(j, "bond_schedule", "dmrg stage"))
    s.bond_schedule.push_back(b.get<long long>());
  s.cutoff = get_or(j, "cutoff", 1e-10);
  s.eig_tol = get_or(j, "eig_tol", 1e-6);
  s.max_sweeps = get_or(j, "max_sweeps", 4);
  s.ncv = get_or(j, "ncv", 4);
  if (j.contains("init")) {
    const json& init = j.at("init");
    check_keys(init, {"kind", "bond", "seed"}, "dmrg stage init");
    s.init.kind = mps_init_from_name(require_key(init, "kind", "dmrg stage init").get<std::string>());
    s.init.bond = get_or<long long>(init, "bond", 1);
    s.init.seed = get_or<std::uint64_t>(init, "seed", 0);
  }
  s.validate();
  return s;
}

inline json dmrg_protocol_to_json(const DmrgProtocol& p) {
  json stages = json::array();
  for (const auto& s : p.stages) stages.push_back(dmrg_stage_to_json(s));
  return {{"stages", stages}};
}

inline DmrgProtocol dmrg_protocol_from_json(const json& j) {
  check_keys(j, {"stages"}, "dmrg protocol");
  DmrgProtocol p;
  for (const auto& s : require_key(j, "stages", "dmrg protocol")) p.stages.push_back(dmrg_stage_from_json(s));
  p.validate();
  return p;
}

// ---- VQE ----

inline json optimizer_to_json(const OptimizerSpec& o) {
  return {{"kind", to_string(o.kind)}, {"rhobeg", o.rhobeg}, {"tol", o.tol},
          {"xtol", o.xtol}, {"max_steps", o.max_steps}, {"seed", o.seed}};
}

inline OptimizerSpec optimizer_from_json(const json& j) {
  check_keys(j, {"kind", "rhobeg", "tol", "xtol", "max_steps", "seed"}, "optimizer");
  OptimizerSpec o;
  const std::string kind = require_key(j, "kind", "optimizer").get<std::string>();
  if (kind == "linear_trust_region") o.kind = OptimizerSpec::Kind::linear_trust_region;
  else if (kind == "line_search_cyclic") o.kind = OptimizerSpec::Kind::line_search_cyclic;
  else if (kind == "simplex") o.kind = OptimizerSpec::Kind::simplex;
  else throw ValidationError("optimizer: unknown kind \"" + kind + "\"");
  o.rhobeg = get_or(j, "rhobeg", 0.5);
  o.tol = get_or(j, "tol", 1e-8);
  o.xtol = get_or(j, "xtol", 1e-8);
  o.max_steps = get_or(j, "max_steps", 4096);
  o.seed = get_or<std::uint64_t>(j, "seed", 0);
  o.validate();
  return o;
}

inline json ansatz_to_json(const AnsatzSpec& a) {
  json init;
  switch (a.init.kind) {
    case InitPolicy::Kind::zeros: init = {{"policy", "zeros"}}; break;
    case InitPolicy::Kind::gaussian: init = {{"policy", "gaussian"}, {"scale", a.init.scale}}; break;
    case InitPolicy::Kind::warm_start: {
      json warm = json::array();
      for (Eigen::Index i = 0; i < a.init.warm.size(); ++i) warm.push_back(a.init.warm[i]);
      init = {{"policy", "warm_start"}, {"vector", warm}};
      break;
    }
  }
  json out = {{"family", a.family == AnsatzSpec::Family::hea_ryrz_ring ? "hea_ryrz_ring" : "pauli_pool"},
              {"reference", a.reference_bitstring},
              {"init", init},
              {"seed", a.seed}};
  if (a.family == AnsatzSpec::Family::hea_ryrz_ring) {
    out["layers"] = a.layers;
  } else {
    json pool = json::array();
    for (const auto& g : a.pool) pool.push_back({{"tie", g.tie}, {"letters", g.letters}});
    out["pool"] = pool;
  }
  return out;
}

inline AnsatzSpec ansatz_from_json(const json& j) {
  check_keys(j, {"family", "layers", "pool", "builtin_pool", "reference", "init", "seed"},
             "ansatz");
  AnsatzSpec a;
  const std::string family = require_key(j, "family", "ansatz").get<std::string>();
  a.reference_bitstring = require_key(j, "reference", "ansatz").get<std::string>();
  if (family == "hea_ryrz_ring") {
    a.family = AnsatzSpec::Family::hea_ryrz_ring;
    a.layers = get_or(j, "layers", 1);
    if (j.contains("pool") || j.contains("builtin_pool"))
      throw ValidationError("ansatz: hea_ryrz_ring takes no pool");
  } else if (family == "pauli_pool") {
    a.family = AnsatzSpec::Family::pauli_pool;
    if (j.contains("layers")) throw ValidationError("ansatz: pauli_pool takes no layers");
    if (j.contains("pool") == j.contains("builtin_pool"))
      throw ValidationError("ansatz: pauli_pool needs exactly one of pool/builtin_pool");
    if (j.contains("pool")) {
      for (const auto& g : j.at("pool")) {
        check_keys(g, {"tie", "letters"}, "pool generator");
        a.pool.push_back({require_key(g, "tie", "pool generator").get<int>(),
                          require_key(g, "letters", "pool generator").get<std::string>()});
      }
    } else {
      const json& bp = j.at("builtin_pool");
      check_keys(bp, {"kind", "rounds"}, "builtin pool");
      const std::string kind = require_key(bp, "kind", "builtin pool").get<std::string>();
      const int rounds = get_or(bp, "rounds", 1);
      const int L = static_cast<int>(a.reference_bitstring.size());
      if (kind == "hopping") a.pool = make_hopping_pool(L, rounds);
      else if (kind == "exchange") a.pool = make_exchange_pool(L, rounds);
      else if (kind == "dressed_exchange") a.pool = make_dressed_exchange_pool(L, rounds);
      else throw ValidationError("builtin pool: unknown kind \"" + kind + "\"");
    }
  } else {
    throw ValidationError("ansatz: unknown family \"" + family + "\"");
  }
  if (j.contains("init")) {
    const json& init = j.at("init");
    check_keys(init, {"policy", "scale", "vector"}, "ansatz init");
    const std::string policy = require_key(init, "policy", "ansatz init").get<std::string>();
    if (policy == "zeros") a.init.kind = InitPolicy::Kind::zeros;
    else if (policy == "gaussian") {
      a.init.kind = InitPolicy::Kind::gaussian;
      a.init.scale = get_or(init, "scale", 0.1);
    } else if (policy == "warm_start") {
      a.init.kind = InitPolicy::Kind::warm_start;
      const json& warm = require_key(init, "vector", "ansatz init");
      a.init.warm.resize(warm.size());
      for (std::size_t i = 0; i < warm.size(); ++i) a.init.warm[i] = warm[i].get<double>();
    } else {
      throw ValidationError("ansatz init: unknown policy \"" + policy + "\"");
    }
  }
  a.seed = get_or<std::uint64_t>(j, "seed", 0);
  a.validate();
  return a;
}

inline json vqe_protocol_to_json(const VqeProtocol& p) {
  return {{"ansatz", ansatz_to_json(p.ansatz)}, {"optimizer", optimizer_to_json(p.optimizer)}};
}

inline VqeProtocol vqe_protocol_from_json(const json& j) {
  check_keys(j, {"ansatz", "optimizer"}, "vqe protocol");
  VqeProtocol p;
  p.ansatz = ansatz_from_json(require_key(j, "ansatz", "vqe protocol"));
  p.optimizer = optimizer_from_json(require_key(j, "optimizer", "vqe protocol"));
  p.validate();
  return p;
}

// ---- projector ----

inline json projector_config_to_json(const ProjectorConfig& c) {
  json trial;
  if (c.trial.kind == TrialSpec::Kind::custom) {
    json v = json::array();
    for (Eigen::Index i = 0; i < c.trial.custom.size(); ++i)
      v.push_back({c.trial.custom[i].real(), c.trial.custom[i].imag()});
    trial = {{"kind", "custom"}, {"vector", v}};
  } else {
    trial = {{"kind", to_string(c.trial.kind)}};
  }
  return {{"walkers_per_rank", c.walkers_per_rank},
          {"num_ranks", c.num_ranks},
          {"steps_per_block", c.steps_per_block},
          {"num_blocks", c.num_blocks},
          {"timestep", c.timestep},
          {"field_cutoff", c.field_cutoff},
          {"stabilize_freq", c.stabilize_freq},
          {"pop_control_freq", c.pop_control_freq},
          {"trial", trial},
          {"seed", c.seed}};
}

inline ProjectorConfig projector_config_from_json(const json& j) {
  check_keys(j,
             {"walkers_per_rank", "num_ranks", "steps_per_block", "num_blocks", "timestep",
              "field_cutoff", "stabilize_freq", "pop_control_freq", "trial", "seed"},
             "projector config");
  ProjectorConfig c;
  c.walkers_per_rank = get_or(j, "walkers_per_rank", 32);
  c.num_ranks = get_or(j, "num_ranks", 1);
  c.steps_per_block = get_or(j, "steps_per_block", 25);
  c.num_blocks = get_or(j, "num_blocks", 40);
  c.timestep = get_or(j, "timestep", 0.005);
  c.field_cutoff = get_or(j, "field_cutoff", 1e-5);
  c.stabilize_freq = get_or(j, "stabilize_freq", 5);
  c.pop_control_freq = get_or(j, "pop_control_freq", 5);
  if (j.contains("trial")) {
    const json& t = j.at("trial");
    check_keys(t, {"kind", "vector"}, "trial");
    const std::string kind = require_key(t, "kind", "trial").get<std::string>();
    if (kind == "diagonal_ground") c.trial.kind = TrialSpec::Kind::diagonal_ground;
    else if (kind == "uniform") c.trial.kind = TrialSpec::Kind::uniform;
    else if (kind == "exact") c.trial.kind = TrialSpec::Kind::exact;
    else if (kind == "custom") {
      c.trial.kind = TrialSpec::Kind::custom;
      const json& v = require_key(t, "vector", "trial");
      c.trial.custom.resize(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != 2)
          throw ValidationError("trial vector entries must be [re, im] pairs");
        c.trial.custom[i] = Complex(v[i][0].get<double>(), v[i][1].get<double>());
      }
    } else {
      throw ValidationError("trial: unknown kind \"" + kind + "\"");
    }
  }
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.validate();
  return c;
}

}  // namespace gsbench
