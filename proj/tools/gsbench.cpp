// gsbench: ground-state protocol benchmarks and the mutate-score-archive
// campaign loop behind them.
//
// Subcommands: oracle ed|ff, bench vqe|dmrg|projector, reference make,
// campaign run, report. Exit codes: 0 success, 2 validation error,
// 3 evaluation failure, 4 budget-zero.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "gsbench/config.hpp"
#include "gsbench/exact.hpp"
#include "gsbench/external_proposer.hpp"
#include "gsbench/free_fermion.hpp"
#include "gsbench/reference.hpp"
#include "gsbench/report.hpp"

namespace {

using namespace gsbench;

SpinChainSpec parse_couplings(int length, const std::string& couplings) {
  SpinChainSpec spec;
  spec.L = length;
  std::stringstream ss(couplings);
  std::string cell;
  std::vector<double> values;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ValidationError("bad coupling value '" + cell + "'");
    }
  }
  if (values.size() != 5)
    throw ValidationError("--couplings needs five values Jx,Jy,Jz,hx,hz");
  spec.Jx = values[0];
  spec.Jy = values[1];
  spec.Jz = values[2];
  spec.hx = values[3];
  spec.hz = values[4];
  spec.validate();
  return spec;
}

struct BudgetFlags {
  std::optional<double> seconds;
  std::optional<double> quanta;

  void attach(CLI::App* cmd) {
    cmd->add_option("--budget-seconds", seconds, "wall-time budget in seconds");
    cmd->add_option("--budget-quanta", quanta, "deterministic budget in checkpoint units");
  }

  Budget resolve(Budget fallback) const {
    if (seconds && quanta) throw ValidationError("choose one of --budget-seconds/--budget-quanta");
    if (seconds) return Budget::seconds(*seconds);
    if (quanta) return Budget::quanta(*quanta);
    return fallback;
  }
};

void apply_seed_override(Protocol& protocol, std::uint64_t seed) {
  switch (protocol.family) {
    case Family::vqe: {
      auto& p = std::get<VqeProtocol>(protocol.payload);
      p.ansatz.seed = seed;
      p.optimizer.seed = seed;
      break;
    }
    case Family::dmrg: {
      auto& p = std::get<DmrgProtocol>(protocol.payload);
      for (auto& stage : p.stages) stage.init.seed = seed;
      break;
    }
    case Family::projector: {
      std::get<ProjectorConfig>(protocol.payload).seed = seed;
      break;
    }
  }
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void emit(const std::filesystem::path& dir, const std::string& name, const std::string& body) {
  write_text_file(dir / name, body);
}

int run_oracle(bool free_fermion, int length, const std::string& couplings,
               const std::string& hamiltonian_file) {
  json out;
  if (!hamiltonian_file.empty()) {
    if (free_fermion) throw ValidationError("oracle ff works on spin-chain specs only");
    auto h = parse_hamiltonian_text(read_text_file(hamiltonian_file));
    auto g = exact_ground(h);
    out = {{"energy", g.energy}, {"num_sites", h.num_sites()}, {"method", "exact"}};
  } else {
    auto spec = parse_couplings(length, couplings);
    if (free_fermion) {
      out = {{"energy", free_fermion_ground_energy(spec)},
             {"num_sites", spec.L},
             {"method", "free_fermion"}};
    } else {
      auto g = exact_ground(build_spin_chain(spec));
      out = {{"energy", g.energy}, {"num_sites", spec.L}, {"method", "exact"}};
    }
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int run_bench(Family family, const std::string& config_path, const BudgetFlags& budget_flags,
              std::optional<std::uint64_t> seed, std::optional<double> lambda,
              const std::string& out_dir) {
  auto config = parse_bench_config(load_json(config_path), family);
  const Budget budget = budget_flags.resolve(config.budget);
  if (seed) apply_seed_override(config.protocol, *seed);
  if (lambda) {
    if (family != Family::projector)
      throw ValidationError("--lambda applies to the projector family only");
    config.lambda = *lambda;
  }
  const std::filesystem::path dir = out_dir;

  switch (family) {
    case Family::vqe: {
      auto h = config.instance.hamiltonian();
      std::optional<double> reference;
      if (h.num_sites() <= 14) reference = exact_ground(h).energy;
      auto r = run_vqe(h, std::get<VqeProtocol>(config.protocol.payload), budget, reference);
      emit(dir, "evaluations.csv", evaluations_csv(r.evaluation_trace));
      json summary = {{"best_energy", r.best_energy},
                      {"delta_e", r.delta_e ? json(*r.delta_e) : json(nullptr)},
                      {"reference_energy", reference ? json(*reference) : json(nullptr)},
                      {"evaluations_used", r.evaluations_used}};
      emit(dir, "summary.json", summary.dump(2) + "\n");
      std::cout << summary.dump() << "\n";
      return 0;
    }
    case Family::dmrg: {
      auto r = run_dmrg(config.instance.chain(), std::get<DmrgProtocol>(config.protocol.payload),
                        budget);
      emit(dir, "sweeps.csv", sweeps_csv(r.sweep_trace));
      json summary = {{"final_energy", r.final_energy},
                      {"max_bond", static_cast<long long>(r.state.max_bond())},
                      {"sweeps", static_cast<long long>(r.sweep_trace.size())},
                      {"budget_truncated", r.budget_truncated}};
      emit(dir, "summary.json", summary.dump(2) + "\n");
      std::cout << summary.dump() << "\n";
      return 0;
    }
    case Family::projector: {
      auto h = config.instance.hamiltonian();
      if (h.num_sites() > 6) throw ValidationError("projector benchmarks cap at 6 sites");
      const auto& pc = std::get<ProjectorConfig>(config.protocol.payload);
      auto fact = factorize(h.to_dense(), pc.field_cutoff);
      auto trace = run_projector(fact, pc, budget, config.lambda);
      emit(dir, "blocks.csv", blocks_csv(trace));
      json summary = trace_summary_json(trace, stochastic_cost(pc));
      emit(dir, "summary.json", summary.dump(2) + "\n");
      std::cout << summary.dump() << "\n";
      return 0;
    }
  }
  return 2;
}

int run_reference_make(const std::string& config_path, const BudgetFlags& budget_flags,
                       const std::string& out_dir) {
  const json j = load_json(config_path);
  check_keys(j, {"problem", "protocol", "budget"}, "reference config");
  auto instance = problem_from_json(require_key(j, "problem", "reference config"));
  auto protocol = dmrg_protocol_from_json(require_key(j, "protocol", "reference config"));
  Budget budget = Budget::seconds(600);
  if (j.contains("budget")) budget = budget_from_json(j.at("budget"));
  budget = budget_flags.resolve(budget);

  auto bundle = make_reference(instance.chain(), protocol, budget);
  save_reference(bundle, out_dir);
  json out = {{"energy", bundle.energy}, {"fingerprint", bundle.fingerprint},
              {"dir", out_dir}};
  std::cout << out.dump() << "\n";
  return 0;
}

int run_campaign_cmd(const std::string& config_path, const BudgetFlags& budget_flags,
                     std::optional<std::uint64_t> seed, std::optional<double> lambda,
                     const std::string& out_dir) {
  auto config = parse_campaign_config_file(config_path);
  if (seed) config.proposer.seed = *seed;
  if (lambda) {
    if (config.family != Family::projector)
      throw ValidationError("--lambda applies to the projector family only");
    config.lambda = *lambda;
  }
  config.budget = budget_flags.resolve(config.budget);
  const std::filesystem::path dir =
      out_dir.empty() ? config.output_dir : std::filesystem::path(out_dir);

  std::unique_ptr<Proposer> proposer;
  if (config.proposer.kind == ProposerSpec::Kind::external)
    proposer = std::make_unique<ExternalProposer>(config.proposer.command);
  else
    proposer = config.make_proposer();

  CampaignOptions options;
  options.iterations = config.iterations;
  options.budget = config.budget;
  options.lambda = config.lambda;
  options.accept_ties = config.accept_ties;
  options.base_seed = config.proposer.seed;
  options.log_path = dir / "archive.jsonl";

  auto archive = run_campaign(config.instance, config.baseline, *proposer, options);
  auto report = summarize(archive);
  emit(dir, "summary.json", report.dump(2) + "\n");
  emit(dir, "running_best.csv", running_best_csv(archive));
  emit(dir, "config.json", campaign_config_to_json(config).dump(2) + "\n");
  std::cout << report.dump() << "\n";
  return 0;
}

int run_report(const std::string& archive_path, const std::string& trace_path,
               const std::string& mi_path, const std::string& mi_ref_path, double lambda,
               const std::string& out_dir) {
  const std::filesystem::path dir = out_dir;
  const int selected =
      int(!archive_path.empty()) + int(!trace_path.empty()) + int(!mi_path.empty());
  if (selected != 1)
    throw ValidationError("report needs exactly one of --archive / --trace / --mi");

  if (!archive_path.empty()) {
    auto archive = archive_from_jsonl(read_text_file(archive_path));
    emit(dir, "running_best.csv", running_best_csv(archive));
    auto report = summarize(archive);
    emit(dir, "summary.json", report.dump(2) + "\n");
    std::cout << report.dump() << "\n";
    return 0;
  }
  if (!trace_path.empty()) {
    auto trace = blocks_from_csv(read_text_file(trace_path));
    const double score = live_score(trace.block_energies, lambda);
    const std::size_t n = trace.block_energies.size();
    const std::size_t m = (n + 1) / 2;
    double mean = 0.0;
    for (std::size_t i = n - m; i < n; ++i) mean += trace.block_energies[i];
    mean /= m;
    double var = 0.0;
    for (std::size_t i = n - m; i < n; ++i)
      var += (trace.block_energies[i] - mean) * (trace.block_energies[i] - mean);
    json summary = {{"live_score", score},
                    {"pe_mean", mean},
                    {"pe_std", m > 1 ? std::sqrt(var / (m - 1)) : 0.0},
                    {"lambda", lambda},
                    {"blocks", static_cast<long long>(n)},
                    {"pe_start_index", static_cast<long long>(n - m)}};
    emit(dir, "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump() << "\n";
    return 0;
  }
  if (mi_ref_path.empty())
    throw ValidationError("report --mi also needs --mi-ref");
  auto candidate = matrix_from_csv(read_text_file(mi_path));
  auto reference = matrix_from_csv(read_text_file(mi_ref_path));
  emit(dir, "mi_error.csv", matrix_to_csv(mi_error(candidate, reference)));
  std::cout << json{{"written", (dir / "mi_error.csv").string()}}.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ground-state protocol benchmarks and autoresearch campaigns"};
  app.require_subcommand(1);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact and free-fermion reference energies");
  oracle->require_subcommand(1);
  int length = 2;
  std::string couplings = "1,1,1,0,0";
  std::string hamiltonian_file;
  auto* oracle_ed = oracle->add_subcommand("ed", "exact diagonalization (<= 14 sites)");
  oracle_ed->add_option("--length", length, "chain length");
  oracle_ed->add_option("--couplings", couplings, "Jx,Jy,Jz,hx,hz");
  oracle_ed->add_option("--hamiltonian-file", hamiltonian_file, "Pauli term file");
  auto* oracle_ff = oracle->add_subcommand("ff", "free-fermion oracle (XX / TFIM families)");
  oracle_ff->add_option("--length", length, "chain length");
  oracle_ff->add_option("--couplings", couplings, "Jx,Jy,Jz,hx,hz");

  // bench
  auto* bench = app.add_subcommand("bench", "run one protocol under a fixed budget");
  bench->require_subcommand(1);
  std::string bench_config, bench_out = ".";
  BudgetFlags bench_budget;
  std::optional<std::uint64_t> bench_seed;
  std::optional<double> bench_lambda;
  for (const char* name : {"vqe", "dmrg", "projector"}) {
    auto* sub = bench->add_subcommand(name, std::string("run a ") + name + " protocol");
    sub->add_option("--config", bench_config, "bench config JSON")->required();
    sub->add_option("--out", bench_out, "output directory");
    sub->add_option("--seed", bench_seed, "override payload seeds");
    sub->add_option("--lambda", bench_lambda, "projector live-score weight");
    bench_budget.attach(sub);
  }

  // reference
  auto* reference = app.add_subcommand("reference", "frozen DMRG reference bundles");
  std::string ref_config, ref_out = "reference_bundle";
  BudgetFlags ref_budget;
  auto* ref_make = reference->add_subcommand("make", "build and persist a reference bundle");
  ref_make->add_option("--config", ref_config, "problem + dmrg protocol JSON")->required();
  ref_make->add_option("--out", ref_out, "bundle directory");
  ref_budget.attach(ref_make);

  // campaign
  auto* campaign = app.add_subcommand("campaign", "mutate-score-archive loops");
  std::string camp_config, camp_out;
  BudgetFlags camp_budget;
  std::optional<std::uint64_t> camp_seed;
  std::optional<double> camp_lambda;
  auto* camp_run = campaign->add_subcommand("run", "run a campaign from a config file");
  camp_run->add_option("--config", camp_config, "campaign config JSON")->required();
  camp_run->add_option("--out", camp_out, "output directory (overrides config)");
  camp_run->add_option("--seed", camp_seed, "override the proposer seed");
  camp_run->add_option("--lambda", camp_lambda, "projector live-score weight");
  camp_budget.attach(camp_run);

  // report
  auto* report = app.add_subcommand("report", "re-emit artifacts from stored outputs");
  std::string rep_archive, rep_trace, rep_mi, rep_mi_ref, rep_out = ".";
  double rep_lambda = 5.0;
  report->add_option("--archive", rep_archive, "campaign archive JSONL");
  report->add_option("--trace", rep_trace, "projector blocks CSV");
  report->add_option("--mi", rep_mi, "candidate MI matrix CSV");
  report->add_option("--mi-ref", rep_mi_ref, "reference MI matrix CSV");
  report->add_option("--lambda", rep_lambda, "live-score weight for --trace");
  report->add_option("--out", rep_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (oracle_ed->parsed()) return run_oracle(false, length, couplings, hamiltonian_file);
    if (oracle_ff->parsed()) return run_oracle(true, length, couplings, "");
    if (bench->parsed()) {
      Family family = Family::vqe;
      if (bench->get_subcommand("dmrg")->parsed()) family = Family::dmrg;
      if (bench->get_subcommand("projector")->parsed()) family = Family::projector;
      return run_bench(family, bench_config, bench_budget, bench_seed, bench_lambda, bench_out);
    }
    if (ref_make->parsed()) return run_reference_make(ref_config, ref_budget, ref_out);
    if (camp_run->parsed())
      return run_campaign_cmd(camp_config, camp_budget, camp_seed, camp_lambda, camp_out);
    if (report->parsed())
      return run_report(rep_archive, rep_trace, rep_mi, rep_mi_ref, rep_lambda, rep_out);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "evaluation failure: " << e.what() << "\n";
    return 3;
  }
}
