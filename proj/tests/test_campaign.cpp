#include <filesystem>

#include "doctest.h"
#include "gsbench/campaign.hpp"
#include "gsbench/external_proposer.hpp"

using namespace gsbench;

namespace {

Protocol dmrg_baseline(const std::string& problem_ref) {
  // weak low-bond starting protocol: dmrg1, random init bond 2, bonds 4-6-8
  DmrgStage s;
  s.method = DmrgStage::Method::dmrg1;
  s.bond_schedule = {4, 6, 8};
  s.cutoff = 1e-6;
  s.eig_tol = 1e-3;
  s.max_sweeps = 6;
  s.ncv = 4;
  s.init = {MpsInit::random, 2, 0};
  Protocol p;
  p.family = Family::dmrg;
  p.payload = DmrgProtocol{{s}};
  p.problem_ref = problem_ref;
  p.label = "dmrg1 low-bond baseline";
  return p;
}

BenchmarkInstance xxx_chain(int L) {
  return {"xxx_L" + std::to_string(L), SpinChainSpec{L, 1, 1, 1, 0, 0}};
}

class FixedProposer : public Proposer {
 public:
  explicit FixedProposer(std::vector<Proposal> seq) : seq_(std::move(seq)) {}
  std::optional<Proposal> propose(const CampaignArchive&, const Protocol&) override {
    if (i_ >= seq_.size()) return std::nullopt;
    return seq_[i_++];
  }

 private:
  std::vector<Proposal> seq_;
  std::size_t i_ = 0;
};

class EchoProposer : public Proposer {  // always proposes the baseline again
 public:
  explicit EchoProposer(Protocol baseline) : baseline_(std::move(baseline)) {}
  std::optional<Proposal> propose(const CampaignArchive&, const Protocol&) override {
    return Proposal{baseline_, "echo baseline"};
  }

 private:
  Protocol baseline_;
};

}  // namespace

TEST_SUITE_BEGIN("campaign");

TEST_CASE("relative gain matches the archived log percentages") {
  auto g1 = relative_gain(9.932e-3, 2.4e-4);
  REQUIRE(g1.has_value());
  CHECK(std::abs(*g1 - 97.58) < 0.005);
  auto g2 = relative_gain(-1.121930, -1.122448);
  REQUIRE(g2.has_value());
  CHECK(std::abs(*g2 - 0.0462) < 0.005);
  CHECK(*relative_gain(1.5, 1.5) == doctest::Approx(0.0));
  CHECK(!relative_gain(0.0, 1.0).has_value());
}

TEST_CASE("score_candidate dispatches per family") {
  auto instance = xxx_chain(6);

  SUBCASE("dmrg scores the final energy") {
    auto proto = dmrg_baseline(instance.id);
    auto out = score_candidate(proto, instance, Budget::quanta(6));
    REQUIRE(out.score.has_value());
    auto direct = run_dmrg(instance.chain(), std::get<DmrgProtocol>(proto.payload), Budget::quanta(6));
    CHECK(*out.score == direct.final_energy);
  }

  SUBCASE("vqe zero-quanta budget scores the initial point") {
    Protocol p;
    p.family = Family::vqe;
    p.problem_ref = instance.id;
    VqeProtocol v;
    v.ansatz.family = AnsatzSpec::Family::hea_ryrz_ring;
    v.ansatz.layers = 2;
    v.ansatz.reference_bitstring = "010101";
    v.ansatz.init = {InitPolicy::Kind::gaussian, 0.1, {}};
    v.ansatz.seed = 42;
    p.payload = v;
    auto out = score_candidate(p, instance, Budget::quanta(0));
    REQUIRE(out.score.has_value());
    auto h = instance.hamiltonian();
    const double expect = energy(h, prepare_state(v.ansatz, initial_parameters(v.ansatz)));
    CHECK(*out.score == expect);
  }

  SUBCASE("projector delegates to the live score") {
    BenchmarkInstance tiny{"xxx_L2", SpinChainSpec{2, 1, 1, 1, 0, 0}};
    Protocol p;
    p.family = Family::projector;
    p.problem_ref = tiny.id;
    ProjectorConfig c;
    c.walkers_per_rank = 8;
    c.num_ranks = 1;
    c.steps_per_block = 10;
    c.num_blocks = 8;
    c.timestep = 0.01;
    c.trial.kind = TrialSpec::Kind::uniform;
    c.seed = 5;
    p.payload = c;
    auto out = score_candidate(p, tiny, Budget::quanta(8), 5.0);
    REQUIRE(out.score.has_value());
    auto fact = factorize(tiny.hamiltonian().to_dense(), c.field_cutoff);
    auto trace = run_projector(fact, c, Budget::quanta(8), 5.0);
    CHECK(*out.score == trace.live_score);
    CHECK(*out.score == doctest::Approx(live_score(trace, 5.0)));
  }

  SUBCASE("evaluation crash becomes a failure outcome") {
    auto proto = dmrg_baseline("wrong");
    BenchmarkInstance file_based{"file", parse_hamiltonian_text("1.0 ZZ")};
    auto out = score_candidate(proto, file_based, Budget::quanta(2));
    CHECK(!out.score.has_value());
    CHECK(!out.detail.empty());
  }
}

TEST_CASE("echo proposer: ties accepted by default, best unchanged") {
  auto instance = xxx_chain(6);
  auto baseline = dmrg_baseline(instance.id);
  EchoProposer proposer(baseline);
  CampaignOptions options;
  options.iterations = 4;
  options.budget = Budget::quanta(6);
  options.base_seed = 7;
  auto archive = run_campaign(instance, baseline, proposer, options);
  REQUIRE(archive.records.size() == 5);
  const double base_score = *archive.records[0].score;
  for (const auto& r : archive.records) {
    REQUIRE(r.score.has_value());
    CHECK(*r.score == base_score);
    CHECK(r.accepted);  // accept-ties default
  }
  CHECK(archive.best_iteration() == 0);

  CampaignOptions strict = options;
  strict.accept_ties = false;
  EchoProposer proposer2(baseline);
  auto archive2 = run_campaign(instance, baseline, proposer2, strict);
  for (const auto& r : archive2.records)
    if (r.iteration > 0) CHECK(!r.accepted);
}

TEST_CASE("improving sequence: prefix minima decrease at accepted records") {
  auto instance = xxx_chain(16);
  auto baseline = dmrg_baseline(instance.id);
  {
    // keep the baseline visibly unconverged
    auto& stage = std::get<DmrgProtocol>(baseline.payload).stages[0];
    stage.bond_schedule = {4};
    stage.max_sweeps = 2;
  }

  auto improved = baseline;
  {
    auto& stage = std::get<DmrgProtocol>(improved.payload).stages[0];
    stage.method = DmrgStage::Method::dmrg2;
    stage.bond_schedule = {8, 12, 16};
    stage.eig_tol = 1e-6;
    stage.max_sweeps = 4;
    stage.init = {MpsInit::neel, 2, 0};
  }
  auto best = improved;
  {
    auto& stage = std::get<DmrgProtocol>(best.payload).stages[0];
    stage.bond_schedule = {16, 24, 32};
    stage.cutoff = 1e-12;
    stage.eig_tol = 1e-9;
    stage.max_sweeps = 8;
  }
  FixedProposer proposer({{improved, "dmrg2 neel"}, {best, "grow bonds"}});
  CampaignOptions options;
  options.iterations = 3;  // third proposal exhausts the script -> failed iteration
  options.budget = Budget::quanta(8);
  auto archive = run_campaign(instance, baseline, proposer, options);
  REQUIRE(archive.records.size() == 4);
  CHECK(archive.records[1].accepted);
  CHECK(archive.records[2].accepted);
  CHECK(!archive.records[3].accepted);
  CHECK(!archive.records[3].score.has_value());
  CHECK(!archive.records[3].relative_gain_pct.has_value());
  CHECK(*archive.records[2].score < *archive.records[1].score);
  CHECK(*archive.records[1].score < *archive.records[0].score);
  auto rb = archive.running_best();
  for (std::size_t i = 1; i < rb.size(); ++i) CHECK(rb[i] <= rb[i - 1]);
  // relative gains recorded against the previous scored iteration
  REQUIRE(archive.records[1].relative_gain_pct.has_value());
  REQUIRE(archive.records[2].relative_gain_pct.has_value());
  const double prev = *archive.records[1].score;
  const double cur = *archive.records[2].score;
  CHECK(*archive.records[2].relative_gain_pct ==
        doctest::Approx(100.0 * (prev - cur) / std::abs(prev)).epsilon(1e-12));
}

TEST_CASE("builtin mutation proposer: valid, deterministic, one lever at a time") {
  auto baseline = dmrg_baseline("xxx_L16");

  SUBCASE("always yields a valid protocol") {
    BuiltinMutationProposer proposer(42);
    CampaignArchive empty;
    Protocol current = baseline;
    for (int i = 0; i < 40; ++i) {
      auto p = proposer.propose(empty, current);
      REQUIRE(p.has_value());
      p->protocol.validate();
      CHECK(p->protocol.family == Family::dmrg);
      CHECK(!p->summary.empty());
    }
  }

  SUBCASE("identical seeds give identical proposal streams") {
    BuiltinMutationProposer a(99), b(99);
    CampaignArchive empty;
    for (int i = 0; i < 20; ++i) {
      auto pa = a.propose(empty, baseline);
      auto pb = b.propose(empty, baseline);
      REQUIRE(pa.has_value());
      REQUIRE(pb.has_value());
      CHECK(payload_to_json(pa->protocol) == payload_to_json(pb->protocol));
      CHECK(pa->summary == pb->summary);
    }
  }

  SUBCASE("projector timestep mutations stay in the factor set") {
    Protocol p;
    p.family = Family::projector;
    p.problem_ref = "x";
    ProjectorConfig c;
    c.timestep = 0.005;
    p.payload = c;
    BuiltinMutationProposer proposer(7);
    CampaignArchive empty;
    const std::vector<double> allowed = {0.0025, 0.004, 0.00625, 0.01};
    int timestep_mutations = 0;
    for (int i = 0; i < 200; ++i) {
      auto prop = proposer.propose(empty, p);
      REQUIRE(prop.has_value());
      const auto& cfg = std::get<ProjectorConfig>(prop->protocol.payload);
      if (cfg.timestep != c.timestep) {
        ++timestep_mutations;
        bool ok = false;
        for (double a : allowed)
          if (std::abs(cfg.timestep - a) < 1e-15) ok = true;
        CHECK(ok);
      }
    }
    CHECK(timestep_mutations > 0);
  }
}

TEST_CASE("archive persistence: JSONL round trip and replay determinism") {
  auto instance = xxx_chain(8);
  auto baseline = dmrg_baseline(instance.id);
  const auto dir = std::filesystem::temp_directory_path() / "gsbench_campaign_test";
  std::filesystem::create_directories(dir);
  const auto log_path = dir / "archive.jsonl";

  CampaignOptions options;
  options.iterations = 6;
  options.budget = Budget::quanta(4);
  options.base_seed = 11;
  options.log_path = log_path;

  BuiltinMutationProposer proposer(11);
  auto archive = run_campaign(instance, baseline, proposer, options);

  const std::string bytes1 = read_text_file(log_path);
  auto loaded = archive_from_jsonl(bytes1);
  REQUIRE(loaded.records.size() == archive.records.size());
  for (std::size_t i = 0; i < loaded.records.size(); ++i) {
    CHECK(record_to_json(loaded.records[i]) == record_to_json(archive.records[i]));
  }
  CHECK(archive_to_jsonl(loaded) == bytes1);

  // quanta-mode campaigns are byte-reproducible
  BuiltinMutationProposer proposer2(11);
  auto archive2 = run_campaign(instance, baseline, proposer2, options);
  CHECK(read_text_file(log_path) == bytes1);
  CHECK(archive_to_jsonl(archive2) == bytes1);
}

TEST_CASE("summarize: structure and idempotence through persistence") {
  auto instance = xxx_chain(6);
  auto baseline = dmrg_baseline(instance.id);
  EchoProposer proposer(baseline);
  CampaignOptions options;
  options.iterations = 3;
  options.budget = Budget::quanta(4);
  auto archive = run_campaign(instance, baseline, proposer, options);

  auto report = summarize(archive);
  CHECK(report["iterations"] == 3);
  CHECK(report["accepted"].get<int>() + report["rejected"].get<int>() == 3);
  CHECK(report["best_iteration"] == 0);
  auto report2 = summarize(archive_from_jsonl(archive_to_jsonl(archive)));
  CHECK(report == report2);

  CampaignArchive empty;
  CHECK_THROWS_AS(summarize(empty), ValidationError);
}

TEST_CASE("baseline failure aborts the campaign") {
  BenchmarkInstance bad{"file", parse_hamiltonian_text("1.0 ZZ")};
  auto baseline = dmrg_baseline("file");  // DMRG needs a chain spec
  EchoProposer proposer(baseline);
  CampaignOptions options;
  options.iterations = 1;
  CHECK_THROWS_AS(run_campaign(bad, baseline, proposer, options), EvaluationError);
}

TEST_CASE("external proposer over pipes, including timeout behaviour") {
  auto instance = xxx_chain(6);
  auto baseline = dmrg_baseline(instance.id);

  SUBCASE("well-behaved command proposes payload echoes") {
    // read one request line, emit the baseline payload back
    const std::string cmd =
        "python3 -c \""
        "import sys, json\n"
        "for line in sys.stdin:\n"
        "    req = json.loads(line)\n"
        "    payload = req['best_protocol']['payload']\n"
        "    print(json.dumps({'payload': payload, 'summary': 'pipe echo'}), flush=True)\n"
        "\"";
    ExternalProposer proposer(cmd);
    CampaignOptions options;
    options.iterations = 2;
    options.budget = Budget::quanta(3);
    auto archive = run_campaign(instance, baseline, proposer, options);
    REQUIRE(archive.records.size() == 3);
    CHECK(archive.records[1].score.has_value());
    CHECK(archive.records[1].summary == "pipe echo");
  }

  SUBCASE("dead command fails iterations without aborting the loop") {
    ExternalProposer proposer("false", 500);
    CampaignOptions options;
    options.iterations = 2;
    options.budget = Budget::quanta(2);
    auto archive = run_campaign(instance, baseline, proposer, options);
    REQUIRE(archive.records.size() == 3);
    CHECK(!archive.records[1].score.has_value());
    CHECK(!archive.records[2].score.has_value());
    CHECK(archive.records[0].score.has_value());
  }
}

TEST_SUITE_END();
