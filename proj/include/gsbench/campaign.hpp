#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <variant>

#include "gsbench/dmrg.hpp"
#include "gsbench/exact.hpp"
#include "gsbench/io.hpp"
#include "gsbench/json_io.hpp"
#include "gsbench/projector.hpp"
#include "gsbench/vqe.hpp"

namespace gsbench {

enum class Family { vqe, dmrg, projector };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::vqe: return "vqe";
    case Family::dmrg: return "dmrg";
    case Family::projector: return "projector";
  }
  return "?";
}

inline Family family_from_name(const std::string& name) {
  if (name == "vqe") return Family::vqe;
  if (name == "dmrg") return Family::dmrg;
  if (name == "projector") return Family::projector;
  throw ValidationError("unknown family \"" + name + "\"");
}

// A benchmark target: either a spin-chain spec or an explicit Hamiltonian.
struct BenchmarkInstance {
  std::string id;
  std::variant<SpinChainSpec, PauliHamiltonian> problem;

  bool is_chain() const { return std::holds_alternative<SpinChainSpec>(problem); }

  const SpinChainSpec& chain() const {
    if (!is_chain()) throw ValidationError("benchmark \"" + id + "\" is not a spin chain");
    return std::get<SpinChainSpec>(problem);
  }

  PauliHamiltonian hamiltonian() const {
    if (is_chain()) return build_spin_chain(chain());
    return std::get<PauliHamiltonian>(problem);
  }
};

// The decision variables of one candidate: a per-family payload bound to a
// benchmark instance.
struct Protocol {
  Family family = Family::dmrg;
  std::variant<VqeProtocol, DmrgProtocol, ProjectorConfig> payload;
  std::string problem_ref;
  std::string label;

  void validate() const {
    switch (family) {
      case Family::vqe:
        if (!std::holds_alternative<VqeProtocol>(payload))
          throw ValidationError("protocol family/payload mismatch");
        std::get<VqeProtocol>(payload).validate();
        break;
      case Family::dmrg:
        if (!std::holds_alternative<DmrgProtocol>(payload))
          throw ValidationError("protocol family/payload mismatch");
        std::get<DmrgProtocol>(payload).validate();
        break;
      case Family::projector:
        if (!std::holds_alternative<ProjectorConfig>(payload))
          throw ValidationError("protocol family/payload mismatch");
        std::get<ProjectorConfig>(payload).validate();
        break;
    }
  }
};

inline json payload_to_json(const Protocol& p) {
  switch (p.family) {
    case Family::vqe: return vqe_protocol_to_json(std::get<VqeProtocol>(p.payload));
    case Family::dmrg: return dmrg_protocol_to_json(std::get<DmrgProtocol>(p.payload));
    case Family::projector:
      return projector_config_to_json(std::get<ProjectorConfig>(p.payload));
  }
  return {};
}

inline void payload_from_json(Protocol& p, const json& j) {
  switch (p.family) {
    case Family::vqe: p.payload = vqe_protocol_from_json(j); break;
    case Family::dmrg: p.payload = dmrg_protocol_from_json(j); break;
    case Family::projector: p.payload = projector_config_from_json(j); break;
  }
}

inline json protocol_to_json(const Protocol& p) {
  return {{"problem", p.problem_ref}, {"label", p.label}, {"payload", payload_to_json(p)}};
}

inline Protocol protocol_from_json(Family family, const json& j) {
  check_keys(j, {"problem", "label", "payload"}, "protocol");
  Protocol p;
  p.family = family;
  p.problem_ref = get_or<std::string>(j, "problem", "");
  p.label = get_or<std::string>(j, "label", "");
  payload_from_json(p, require_key(j, "payload", "protocol"));
  return p;
}

// ---- scoring ----

struct ScoreOutcome {
  std::optional<double> score;
  std::string detail;       // failure reason or empty
  double elapsed_record = 0.0;
};

// Lower is better for every family: VQE scores the best energy, DMRG the
// final energy, the projector its live score. Evaluation crashes become
// failure outcomes, not exceptions.
inline ScoreOutcome score_candidate(const Protocol& protocol, const BenchmarkInstance& instance,
                                    Budget budget, double lambda = 5.0,
                                    std::optional<double> vqe_reference = std::nullopt) {
  ScoreOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    protocol.validate();
    budget.validate();
    switch (protocol.family) {
      case Family::vqe: {
        auto h = instance.hamiltonian();
        auto r = run_vqe(h, std::get<VqeProtocol>(protocol.payload), budget, vqe_reference);
        out.score = r.best_energy;
        out.elapsed_record = budget.mode == Budget::Mode::quanta
                                 ? static_cast<double>(r.evaluations_used - 1)
                                 : elapsed();
        break;
      }
      case Family::dmrg: {
        auto r = run_dmrg(instance.chain(), std::get<DmrgProtocol>(protocol.payload), budget);
        out.score = r.final_energy;
        out.elapsed_record = budget.mode == Budget::Mode::quanta
                                 ? static_cast<double>(r.sweep_trace.size())
                                 : elapsed();
        break;
      }
      case Family::projector: {
        auto h = instance.hamiltonian();
        if (h.num_sites() > 6)
          throw ValidationError("projector benchmarks are capped at 6 sites (dim 64)");
        const auto& config = std::get<ProjectorConfig>(protocol.payload);
        auto fact = factorize(h.to_dense(), config.field_cutoff);
        auto trace = run_projector(fact, config, budget, lambda);
        out.score = trace.live_score;
        out.elapsed_record = budget.mode == Budget::Mode::quanta
                                 ? static_cast<double>(trace.block_energies.size())
                                 : elapsed();
        break;
      }
    }
    // cooperative wall budgets tolerate a 10% grace overrun, then the
    // candidate is abandoned as failed
    if (budget.mode == Budget::Mode::wall_time && elapsed() > 1.1 * budget.value) {
      out.score.reset();
      out.detail = "wall budget exceeded beyond grace";
    }
  } catch (const std::exception& e) {
    out.score.reset();
    out.detail = e.what();
    out.elapsed_record = budget.mode == Budget::Mode::quanta ? 0.0 : elapsed();
  }
  return out;
}

// 100 * (prev - cur) / |prev|; positive means improvement for minimization.
// Undefined (absent) when the previous score is zero.
inline std::optional<double> relative_gain(double prev_score, double score) {
  if (prev_score == 0.0 || !std::isfinite(prev_score)) return std::nullopt;
  return 100.0 * (prev_score - score) / std::abs(prev_score);
}

// ---- archive ----

struct CandidateRecord {
  int iteration = 0;
  Protocol protocol;
  std::optional<double> score;
  bool accepted = false;
  std::optional<double> relative_gain_pct;
  std::string summary;
  std::uint64_t seed = 0;
  double elapsed_s = 0.0;
};

inline json record_to_json(const CandidateRecord& r) {
  json j = {{"iteration", r.iteration},
            {"family", to_string(r.protocol.family)},
            {"protocol", protocol_to_json(r.protocol)},
            {"score", r.score ? json(*r.score) : json(nullptr)},
            {"accepted", r.accepted},
            {"relative_gain_pct", r.relative_gain_pct ? json(*r.relative_gain_pct) : json(nullptr)},
            {"summary", r.summary},
            {"seed", r.seed},
            {"elapsed_s", r.elapsed_s}};
  return j;
}

inline CandidateRecord record_from_json(const json& j) {
  check_keys(j,
             {"iteration", "family", "protocol", "score", "accepted", "relative_gain_pct",
              "summary", "seed", "elapsed_s"},
             "candidate record");
  CandidateRecord r;
  r.iteration = require_key(j, "iteration", "candidate record").get<int>();
  const Family family = family_from_name(require_key(j, "family", "candidate record").get<std::string>());
  r.protocol = protocol_from_json(family, require_key(j, "protocol", "candidate record"));
  const json& s = require_key(j, "score", "candidate record");
  if (!s.is_null()) r.score = s.get<double>();
  r.accepted = require_key(j, "accepted", "candidate record").get<bool>();
  const json& g = require_key(j, "relative_gain_pct", "candidate record");
  if (!g.is_null()) r.relative_gain_pct = g.get<double>();
  r.summary = get_or<std::string>(j, "summary", "");
  r.seed = get_or<std::uint64_t>(j, "seed", 0);
  r.elapsed_s = get_or(j, "elapsed_s", 0.0);
  return r;
}

// Append-only campaign history with derived bookkeeping.
struct CampaignArchive {
  std::vector<CandidateRecord> records;

  int accepted_count() const {
    int n = 0;
    for (const auto& r : records)
      if (r.iteration > 0 && r.accepted) ++n;
    return n;
  }

  int rejected_count() const {
    int n = 0;
    for (const auto& r : records)
      if (r.iteration > 0 && !r.accepted) ++n;
    return n;
  }

  std::optional<double> best_score() const {
    std::optional<double> best;
    for (const auto& r : records)
      if (r.score && (!best || *r.score < *best)) best = *r.score;
    return best;
  }

  int best_iteration() const {
    int bi = -1;
    std::optional<double> best;
    for (const auto& r : records)
      if (r.score && (!best || *r.score < *best)) {
        best = *r.score;
        bi = r.iteration;
      }
    return bi;
  }

  // prefix minima over scored records
  std::vector<double> running_best() const {
    std::vector<double> out;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
      if (r.score) best = std::min(best, *r.score);
      out.push_back(best);
    }
    return out;
  }
};

inline std::string archive_to_jsonl(const CampaignArchive& archive) {
  std::string out;
  for (const auto& r : archive.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

inline CampaignArchive archive_from_jsonl(const std::string& text) {
  CampaignArchive archive;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    archive.records.push_back(record_from_json(json::parse(line)));
  }
  return archive;
}

// ---- proposers ----

struct Proposal {
  Protocol protocol;
  std::string summary;
};

class Proposer {
 public:
  virtual ~Proposer() = default;
  // Returns the next candidate given the archive so far and the current best
  // protocol; nullopt means this iteration fails (and the loop continues).
  virtual std::optional<Proposal> propose(const CampaignArchive& archive,
                                          const Protocol& best) = 0;
};

namespace detail {

struct Lever {
  std::string path;  // '/'-separated keys into the payload object
  enum class Kind { number, integer, choice, schedule } kind;
  double lo = 0.0, hi = 0.0;
  std::vector<json> choices;
};

inline std::vector<Lever> default_levers(Family family) {
  using K = Lever::Kind;
  switch (family) {
    case Family::vqe:
      return {
          {"optimizer/kind", K::choice, 0, 0,
           {json("linear_trust_region"), json("line_search_cyclic"), json("simplex")}},
          {"optimizer/rhobeg", K::number, 1e-12, 1e3, {}},
          {"optimizer/tol", K::number, 1e-15, 1.0, {}},
          {"optimizer/xtol", K::number, 1e-15, 1.0, {}},
          {"optimizer/max_steps", K::integer, 1, 1e6, {}},
          {"ansatz/layers", K::integer, 1, 64, {}},
          {"ansatz/init/scale", K::number, 1e-6, 10.0, {}},
      };
    case Family::dmrg:
      // paths are resolved inside the final stage object
      return {
          {"method", K::choice, 0, 0, {json("dmrg1"), json("dmrg2")}},
          {"bond_schedule", K::schedule, 1, 4096, {}},
          {"cutoff", K::number, 1e-16, 0.5, {}},
          {"eig_tol", K::number, 1e-14, 0.1, {}},
          {"max_sweeps", K::integer, 1, 1000, {}},
          {"ncv", K::integer, 2, 64, {}},
          {"init/kind", K::choice, 0, 0,
           {json("random"), json("neel"), json("plus"), json("minus"), json("product_up"),
            json("product_down")}},
          {"init/bond", K::integer, 1, 256, {}},
      };
    case Family::projector:
      return {
          {"walkers_per_rank", K::integer, 1, 1e6, {}},
          {"steps_per_block", K::integer, 1, 1e6, {}},
          {"num_blocks", K::integer, 2, 1e6, {}},
          {"timestep", K::number, 1e-8, 10.0, {}},
          {"field_cutoff", K::number, 0.0, 1.0, {}},
          {"stabilize_freq", K::integer, 1, 1e6, {}},
          {"pop_control_freq", K::integer, 1, 1e6, {}},
          {"trial/kind", K::choice, 0, 0,
           {json("diagonal_ground"), json("uniform"), json("exact")}},
      };
  }
  return {};
}

inline json* resolve_path(json& root, const std::string& path) {
  json* node = &root;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const std::string key = path.substr(start, slash == std::string::npos ? std::string::npos
                                                                          : slash - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (slash == std::string::npos) return node;
    start = slash + 1;
  }
  return nullptr;
}

}  // namespace detail

// Deterministic single-lever mutation proposer: numeric levers move by a
// multiplicative factor from {0.5, 0.8, 1.25, 2} (clamped to validity), enum
// levers pick uniformly among the alternatives, schedules append/extend/trim.
// DMRG mutations apply to the final stage.
class BuiltinMutationProposer : public Proposer {
 public:
  BuiltinMutationProposer(std::uint64_t seed, std::vector<detail::Lever> levers = {})
      : rng_(seed), levers_(std::move(levers)) {}

  std::optional<Proposal> propose(const CampaignArchive&, const Protocol& best) override {
    json payload = payload_to_json(best);
    json* scope = &payload;
    if (best.family == Family::dmrg) {
      json& stages = payload.at("stages");
      scope = &stages[stages.size() - 1];
    }
    auto levers = levers_.empty() ? detail::default_levers(best.family) : levers_;
    if (levers.empty()) throw ValidationError("empty lever table");

    // applicable levers: path resolves in the current payload
    std::vector<std::size_t> applicable;
    for (std::size_t i = 0; i < levers.size(); ++i)
      if (detail::resolve_path(*scope, levers[i].path) != nullptr) applicable.push_back(i);
    if (applicable.empty()) return std::nullopt;

    const auto& lever = levers[applicable[rng_() % applicable.size()]];
    json* slot = detail::resolve_path(*scope, lever.path);
    std::string summary;

    switch (lever.kind) {
      case detail::Lever::Kind::number: {
        static const double factors[4] = {0.5, 0.8, 1.25, 2.0};
        const double f = factors[rng_() % 4];
        const double old = slot->get<double>();
        const double mutated = std::clamp(old * f, lever.lo, lever.hi);
        *slot = mutated;
        summary = "set " + lever.path + " " + format_real(old) + " -> " + format_real(mutated);
        break;
      }
      case detail::Lever::Kind::integer: {
        static const double factors[4] = {0.5, 0.8, 1.25, 2.0};
        const double f = factors[rng_() % 4];
        const long long old = slot->get<long long>();
        long long mutated = std::llround(static_cast<double>(old) * f);
        mutated = std::clamp<long long>(mutated, static_cast<long long>(lever.lo),
                                        static_cast<long long>(lever.hi));
        *slot = mutated;
        summary = "set " + lever.path + " " + std::to_string(old) + " -> " + std::to_string(mutated);
        break;
      }
      case detail::Lever::Kind::choice: {
        const json current = *slot;
        std::vector<json> alternatives;
        for (const auto& c : lever.choices)
          if (c != current) alternatives.push_back(c);
        if (alternatives.empty()) return std::nullopt;
        const json pick = alternatives[rng_() % alternatives.size()];
        *slot = pick;
        summary = "set " + lever.path + " " + current.dump() + " -> " + pick.dump();
        break;
      }
      case detail::Lever::Kind::schedule: {
        auto& arr = *slot;
        if (!arr.is_array() || arr.empty()) return std::nullopt;
        const int op = arr.size() > 1 ? static_cast<int>(rng_() % 3) : static_cast<int>(rng_() % 2);
        if (op == 0) {  // append a grown entry
          const long long last = arr.back().get<long long>();
          const long long next = std::min<long long>(
              last + std::max<long long>(1, std::llround(last / 3.0)),
              static_cast<long long>(lever.hi));
          arr.push_back(next);
          summary = "append " + std::to_string(next) + " to " + lever.path;
        } else if (op == 1) {  // extend: repeat the last entry
          arr.push_back(arr.back());
          summary = "extend " + lever.path + " with " + arr.back().dump();
        } else {  // trim
          arr.erase(arr.size() - 1);
          summary = "trim last entry of " + lever.path;
        }
        break;
      }
    }

    Proposal proposal;
    proposal.protocol = best;
    payload_from_json(proposal.protocol, payload);  // re-validates
    proposal.summary = summary;
    return proposal;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<detail::Lever> levers_;
};

// Replays candidate payloads from a JSONL file: {"payload": {...}, "summary": "..."}.
class ScriptedProposer : public Proposer {
 public:
  explicit ScriptedProposer(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      lines_.push_back(json::parse(line));
    }
  }

  std::optional<Proposal> propose(const CampaignArchive&, const Protocol& best) override {
    if (next_ >= lines_.size()) return std::nullopt;  // exhausted: fails from here on
    const json& j = lines_[next_++];
    check_keys(j, {"payload", "summary"}, "scripted proposal");
    Proposal p;
    p.protocol = best;
    payload_from_json(p.protocol, require_key(j, "payload", "scripted proposal"));
    p.summary = get_or<std::string>(j, "summary", "scripted candidate");
    return p;
  }

 private:
  std::vector<json> lines_;
  std::size_t next_ = 0;
};

// ---- the loop ----

struct CampaignOptions {
  int iterations = 10;
  Budget budget = Budget::quanta(4);
  double lambda = 5.0;       // projector live-score weight
  bool accept_ties = true;
  std::uint64_t base_seed = 0;
  std::filesystem::path log_path;  // empty: no persistence
};

// Mutate-score-archive loop: scores the baseline as iteration 0, then asks
// the proposer for one candidate per iteration, accepting strict improvements
// (and ties when configured). Accepted candidates become the proposer's
// working base. Every record is appended and flushed, regardless of outcome.
inline CampaignArchive run_campaign(const BenchmarkInstance& instance, const Protocol& baseline,
                                    Proposer& proposer, const CampaignOptions& options) {
  if (options.iterations < 0) throw ValidationError("iterations must be >= 0");
  baseline.validate();

  std::ofstream log;
  if (!options.log_path.empty()) {
    if (options.log_path.has_parent_path())
      std::filesystem::create_directories(options.log_path.parent_path());
    log.open(options.log_path, std::ios::binary | std::ios::trunc);
    if (!log) throw ValidationError("cannot write campaign log " + options.log_path.string());
  }
  auto flush_record = [&](const CandidateRecord& r) {
    if (!log.is_open()) return;
    log << record_to_json(r).dump() << '\n';
    log.flush();
  };

  // a frozen exact reference lets VQE candidates report delta_e
  std::optional<double> vqe_reference;
  if (baseline.family == Family::vqe) {
    auto h = instance.hamiltonian();
    if (h.num_sites() <= 14) vqe_reference = exact_ground(h).energy;
  }

  CampaignArchive archive;

  auto outcome0 = score_candidate(baseline, instance, options.budget, options.lambda, vqe_reference);
  if (!outcome0.score)
    throw EvaluationError("baseline failed to score: " + outcome0.detail);

  CandidateRecord rec0;
  rec0.iteration = 0;
  rec0.protocol = baseline;
  rec0.score = outcome0.score;
  rec0.accepted = true;
  rec0.summary = baseline.label.empty() ? "baseline" : baseline.label;
  rec0.seed = options.base_seed;
  rec0.elapsed_s = outcome0.elapsed_record;
  archive.records.push_back(rec0);
  flush_record(rec0);

  double best = *outcome0.score;
  Protocol best_protocol = baseline;
  double prev_scored = best;

  for (int t = 1; t <= options.iterations; ++t) {
    CandidateRecord rec;
    rec.iteration = t;
    rec.seed = options.base_seed + static_cast<std::uint64_t>(t);
    rec.protocol = best_protocol;

    std::optional<Proposal> proposal;
    std::string proposer_error;
    try {
      proposal = proposer.propose(archive, best_protocol);
      if (proposal &&
          (proposal->protocol.family != baseline.family ||
           proposal->protocol.problem_ref != baseline.problem_ref)) {
        proposal.reset();
        proposer_error = "proposer changed the benchmark binding";
      }
    } catch (const std::exception& e) {
      proposer_error = e.what();
    }

    if (!proposal) {
      rec.accepted = false;
      rec.summary = proposer_error.empty() ? "proposer failure: no candidate" :
                                             "proposer failure: " + proposer_error;
      archive.records.push_back(rec);
      flush_record(rec);
      continue;
    }

    rec.protocol = proposal->protocol;
    rec.summary = proposal->summary;
    auto outcome = score_candidate(proposal->protocol, instance, options.budget, options.lambda,
                                   vqe_reference);
    rec.elapsed_s = outcome.elapsed_record;
    if (outcome.score) {
      rec.score = outcome.score;
      rec.relative_gain_pct = relative_gain(prev_scored, *outcome.score);
      rec.accepted = *outcome.score < best || (options.accept_ties && *outcome.score == best);
      if (rec.accepted) {
        best = *outcome.score;
        best_protocol = proposal->protocol;
      }
      prev_scored = *outcome.score;
    } else {
      rec.accepted = false;
      if (!outcome.detail.empty()) rec.summary += " [failed: " + outcome.detail + "]";
    }
    archive.records.push_back(rec);
    flush_record(rec);
  }
  return archive;
}

// Structured report: running best, per-iteration scores, A/R counts, and the
// baseline/best protocol echoes.
inline json summarize(const CampaignArchive& archive) {
  if (archive.records.empty()) throw ValidationError("cannot summarize an empty archive");
  json scores = json::array();
  for (const auto& r : archive.records) scores.push_back(r.score ? json(*r.score) : json(nullptr));
  json running = json::array();
  for (double b : archive.running_best())
    running.push_back(std::isfinite(b) ? json(b) : json(nullptr));

  const auto& baseline = archive.records.front();
  const CandidateRecord* best_rec = &baseline;
  for (const auto& r : archive.records)
    if (r.score && (!best_rec->score || *r.score < *best_rec->score)) best_rec = &r;

  return {{"iterations", static_cast<int>(archive.records.size()) - 1},
          {"accepted", archive.accepted_count()},
          {"rejected", archive.rejected_count()},
          {"baseline_score", baseline.score ? json(*baseline.score) : json(nullptr)},
          {"best_score", archive.best_score() ? json(*archive.best_score()) : json(nullptr)},
          {"best_iteration", archive.best_iteration()},
          {"scores", scores},
          {"running_best", running},
          {"baseline_protocol", protocol_to_json(baseline.protocol)},
          {"best_protocol", protocol_to_json(best_rec->protocol)}};
}

}  // namespace gsbench
