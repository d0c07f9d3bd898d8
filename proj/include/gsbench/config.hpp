#pragma once

#include <filesystem>

#include "gsbench/campaign.hpp"
#include "gsbench/io.hpp"

namespace gsbench {

struct ProposerSpec {
  enum class Kind { builtin, scripted, external };
  Kind kind = Kind::builtin;
  std::uint64_t seed = 0;       // builtin
  std::string path;             // scripted
  std::string command;          // external
};

struct CampaignConfig {
  Family family = Family::dmrg;
  BenchmarkInstance instance;
  Protocol baseline;
  ProposerSpec proposer;
  int iterations = 10;
  Budget budget = Budget::quanta(4);
  double lambda = 5.0;
  bool accept_ties = true;
  std::filesystem::path output_dir = ".";

  std::unique_ptr<Proposer> make_proposer() const {
    switch (proposer.kind) {
      case ProposerSpec::Kind::builtin:
        return std::make_unique<BuiltinMutationProposer>(proposer.seed);
      case ProposerSpec::Kind::scripted:
        return std::make_unique<ScriptedProposer>(proposer.path);
      case ProposerSpec::Kind::external:
        break;  // constructed by the CLI, which owns process lifetime
    }
    throw ValidationError("external proposers are constructed by the caller");
  }
};

inline json problem_to_json(const BenchmarkInstance& instance) {
  json j = {{"name", instance.id}};
  if (instance.is_chain()) {
    j["kind"] = "spin_chain";
    j["spec"] = spec_to_json(instance.chain());
  } else {
    j["kind"] = "hamiltonian";
    j["terms"] = write_hamiltonian_text(std::get<PauliHamiltonian>(instance.problem));
  }
  return j;
}

inline BenchmarkInstance problem_from_json(const json& j) {
  check_keys(j, {"name", "kind", "spec", "terms", "path"}, "problem");
  BenchmarkInstance instance;
  instance.id = require_key(j, "name", "problem").get<std::string>();
  const std::string kind = require_key(j, "kind", "problem").get<std::string>();
  if (kind == "spin_chain") {
    if (j.contains("terms") || j.contains("path"))
      throw ValidationError("problem: spin_chain takes only \"spec\"");
    instance.problem = spec_from_json(require_key(j, "spec", "problem"));
  } else if (kind == "hamiltonian") {
    if (j.contains("spec")) throw ValidationError("problem: hamiltonian takes no \"spec\"");
    if (j.contains("terms") == j.contains("path"))
      throw ValidationError("problem: hamiltonian needs exactly one of terms/path");
    if (j.contains("terms"))
      instance.problem = parse_hamiltonian_text(j.at("terms").get<std::string>());
    else
      instance.problem = parse_hamiltonian_text(read_text_file(j.at("path").get<std::string>()));
  } else {
    throw ValidationError("problem: kind must be spin_chain or hamiltonian");
  }
  return instance;
}

inline json proposer_to_json(const ProposerSpec& p) {
  switch (p.kind) {
    case ProposerSpec::Kind::builtin: return {{"kind", "builtin"}, {"seed", p.seed}};
    case ProposerSpec::Kind::scripted: return {{"kind", "scripted"}, {"path", p.path}};
    case ProposerSpec::Kind::external: return {{"kind", "external"}, {"command", p.command}};
  }
  return {};
}

inline ProposerSpec proposer_from_json(const json& j) {
  check_keys(j, {"kind", "seed", "path", "command"}, "proposer");
  ProposerSpec p;
  const std::string kind = require_key(j, "kind", "proposer").get<std::string>();
  if (kind == "builtin") {
    p.kind = ProposerSpec::Kind::builtin;
    p.seed = get_or<std::uint64_t>(j, "seed", 0);
  } else if (kind == "scripted") {
    p.kind = ProposerSpec::Kind::scripted;
    p.path = require_key(j, "path", "proposer").get<std::string>();
  } else if (kind == "external") {
    p.kind = ProposerSpec::Kind::external;
    p.command = require_key(j, "command", "proposer").get<std::string>();
  } else {
    throw ValidationError("proposer: kind must be builtin, scripted, or external");
  }
  return p;
}

inline json campaign_config_to_json(const CampaignConfig& c) {
  json j = {{"family", to_string(c.family)},
            {"problem", problem_to_json(c.instance)},
            {"baseline", protocol_to_json(c.baseline)},
            {"proposer", proposer_to_json(c.proposer)},
            {"iterations", c.iterations},
            {"budget", budget_to_json(c.budget)},
            {"tie_policy", c.accept_ties ? "accept_ties" : "reject_ties"},
            {"output_dir", c.output_dir.string()}};
  if (c.family == Family::projector) j["lambda"] = c.lambda;
  return j;
}

// Strict campaign-config parser: unknown keys anywhere are errors; family and
// payload must agree; lambda is a projector-only knob.
inline CampaignConfig parse_campaign_config(const json& j) {
  check_keys(j,
             {"family", "problem", "baseline", "proposer", "iterations", "budget", "lambda",
              "tie_policy", "output_dir"},
             "campaign config");
  CampaignConfig c;
  c.family = family_from_name(require_key(j, "family", "campaign config").get<std::string>());
  c.instance = problem_from_json(require_key(j, "problem", "campaign config"));
  c.baseline = protocol_from_json(c.family, require_key(j, "baseline", "campaign config"));
  if (c.baseline.problem_ref.empty()) c.baseline.problem_ref = c.instance.id;
  if (c.baseline.problem_ref != c.instance.id)
    throw ValidationError("campaign config: baseline problem \"" + c.baseline.problem_ref +
                          "\" does not match problem name \"" + c.instance.id + "\"");
  c.proposer = proposer_from_json(require_key(j, "proposer", "campaign config"));
  c.iterations = get_or(j, "iterations", 10);
  if (c.iterations < 0) throw ValidationError("campaign config: iterations must be >= 0");
  if (j.contains("budget")) c.budget = budget_from_json(j.at("budget"));
  if (j.contains("lambda")) {
    if (c.family != Family::projector)
      throw ValidationError("campaign config: lambda applies to the projector family only");
    c.lambda = j.at("lambda").get<double>();
  }
  if (j.contains("tie_policy")) {
    const std::string tie = j.at("tie_policy").get<std::string>();
    if (tie == "accept_ties") c.accept_ties = true;
    else if (tie == "reject_ties") c.accept_ties = false;
    else throw ValidationError("campaign config: tie_policy must be accept_ties or reject_ties");
  }
  c.output_dir = get_or<std::string>(j, "output_dir", ".");
  c.baseline.validate();
  return c;
}

inline CampaignConfig parse_campaign_config_file(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return parse_campaign_config(j);
}

// Single-run bench config: a problem plus one per-family payload.
struct BenchConfig {
  Family family = Family::dmrg;
  BenchmarkInstance instance;
  Protocol protocol;
  Budget budget = Budget::seconds(20);
  double lambda = 5.0;
};

inline BenchConfig parse_bench_config(const json& j, Family family) {
  check_keys(j, {"problem", "protocol", "budget", "lambda"}, "bench config");
  BenchConfig c;
  c.family = family;
  c.instance = problem_from_json(require_key(j, "problem", "bench config"));
  c.protocol.family = family;
  c.protocol.problem_ref = c.instance.id;
  payload_from_json(c.protocol, require_key(j, "protocol", "bench config"));
  if (j.contains("budget")) c.budget = budget_from_json(j.at("budget"));
  if (j.contains("lambda")) {
    if (family != Family::projector)
      throw ValidationError("bench config: lambda applies to the projector family only");
    c.lambda = j.at("lambda").get<double>();
  }
  return c;
}

}  // namespace gsbench
