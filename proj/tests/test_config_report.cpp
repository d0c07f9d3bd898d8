#include <filesystem>

#include "doctest.h"
#include "gsbench/config.hpp"
#include "gsbench/reference.hpp"
#include "gsbench/report.hpp"

using namespace gsbench;

namespace {

json minimal_dmrg_campaign() {
  // Table S2 baseline values: dmrg1, random init bond 2, bonds 4-6-8,
  // cutoff 1e-6, tol 1e-3, sweeps 6, ncv 4
  return json::parse(R"({
    "family": "dmrg",
    "problem": {"name": "xxx_L16", "kind": "spin_chain",
                "spec": {"L": 16, "Jx": 1, "Jy": 1, "Jz": 1, "hx": 0, "hz": 0}},
    "baseline": {"problem": "xxx_L16", "label": "baseline",
                 "payload": {"stages": [{"method": "dmrg1",
                                          "bond_schedule": [4, 6, 8],
                                          "cutoff": 1e-6,
                                          "eig_tol": 1e-3,
                                          "max_sweeps": 6,
                                          "ncv": 4,
                                          "init": {"kind": "random", "bond": 2, "seed": 0}}]}},
    "proposer": {"kind": "builtin", "seed": 5},
    "iterations": 4,
    "budget": {"mode": "quanta", "value": 6},
    "tie_policy": "accept_ties",
    "output_dir": "out"
  })");
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal dmrg campaign config parses and echoes canonically") {
  auto config = parse_campaign_config(minimal_dmrg_campaign());
  CHECK(config.family == Family::dmrg);
  CHECK(config.instance.id == "xxx_L16");
  CHECK(config.iterations == 4);
  CHECK(config.accept_ties);
  const auto& stage = std::get<DmrgProtocol>(config.baseline.payload).stages.at(0);
  CHECK(stage.method == DmrgStage::Method::dmrg1);
  CHECK(stage.bond_schedule == std::vector<Eigen::Index>{4, 6, 8});
  CHECK(stage.cutoff == 1e-6);
  CHECK(stage.ncv == 4);

  // parse(emit(parse(x))) == parse(x): canonicalization is idempotent
  json echoed = campaign_config_to_json(config);
  auto config2 = parse_campaign_config(echoed);
  CHECK(campaign_config_to_json(config2) == echoed);
}

TEST_CASE("unknown keys are rejected by name at every level") {
  auto j = minimal_dmrg_campaign();
  j["timstep"] = 1;
  CHECK_THROWS_WITH_AS(parse_campaign_config(j), doctest::Contains("timstep"), ValidationError);

  auto j2 = minimal_dmrg_campaign();
  j2["baseline"]["payload"]["stages"][0]["cutof"] = 1e-6;
  CHECK_THROWS_WITH_AS(parse_campaign_config(j2), doctest::Contains("cutof"), ValidationError);

  auto j3 = minimal_dmrg_campaign();
  j3["problem"]["speck"] = 1;
  CHECK_THROWS_WITH_AS(parse_campaign_config(j3), doctest::Contains("speck"), ValidationError);
}

TEST_CASE("missing keys and cross-field mismatches") {
  auto j = minimal_dmrg_campaign();
  j.erase("baseline");
  CHECK_THROWS_WITH_AS(parse_campaign_config(j), doctest::Contains("baseline"), ValidationError);

  auto j2 = minimal_dmrg_campaign();
  j2["baseline"]["problem"] = "other";
  CHECK_THROWS_AS(parse_campaign_config(j2), ValidationError);

  auto j3 = minimal_dmrg_campaign();
  j3["lambda"] = 5.0;  // projector-only knob
  CHECK_THROWS_AS(parse_campaign_config(j3), ValidationError);

  auto j4 = minimal_dmrg_campaign();
  j4["family"] = "vqe";  // payload is a dmrg protocol
  CHECK_THROWS_AS(parse_campaign_config(j4), ValidationError);
}

TEST_CASE("hamiltonian problems parse from inline terms") {
  json j = {{"name", "pair"}, {"kind", "hamiltonian"}, {"terms", "0.5 XX\n0.5 YY\n"}};
  auto instance = problem_from_json(j);
  CHECK(!instance.is_chain());
  CHECK(instance.hamiltonian().num_sites() == 2);
  CHECK_THROWS_AS(instance.chain(), ValidationError);
}

TEST_CASE("builtin pool expansion inside ansatz JSON") {
  json j = {{"family", "pauli_pool"},
            {"reference", "010101"},
            {"builtin_pool", {{"kind", "dressed_exchange"}, {"rounds", 3}}},
            {"init", {{"policy", "zeros"}}},
            {"seed", 0}};
  auto a = ansatz_from_json(j);
  CHECK(a.num_params() == 8);
  a.validate();
  json j2 = j;
  j2["builtin_pool"]["kind"] = "hoppin";
  CHECK_THROWS_AS(ansatz_from_json(j2), ValidationError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("report");

TEST_CASE("MI matrix CSV round trip keeps nan diagonal and full precision") {
  RealMatrix m = RealMatrix::Random(5, 5);
  for (int i = 0; i < 5; ++i) m(i, i) = std::numeric_limits<double>::quiet_NaN();
  auto text = matrix_to_csv(m);
  auto back = matrix_from_csv(text);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i == j) CHECK(std::isnan(back(i, j)));
      else CHECK(back(i, j) == m(i, j));
    }
}

TEST_CASE("projector blocks CSV round-trips and rescoring matches") {
  auto h = build_spin_chain({2, 1, 1, 1, 0, 0}).to_dense();
  auto fact = factorize(h, 1e-5);
  ProjectorConfig c;
  c.walkers_per_rank = 8;
  c.steps_per_block = 5;
  c.num_blocks = 8;
  c.timestep = 0.01;
  c.trial.kind = TrialSpec::Kind::diagonal_ground;
  c.seed = 4;
  auto trace = run_projector(fact, c, Budget::quanta(8), 5.0);

  auto csv = blocks_csv(trace);
  auto back = blocks_from_csv(csv);
  REQUIRE(back.block_energies.size() == trace.block_energies.size());
  for (std::size_t i = 0; i < back.block_energies.size(); ++i)
    CHECK(back.block_energies[i] == trace.block_energies[i]);
  // re-scoring the exported blocks reproduces the archived score
  CHECK(live_score(back.block_energies, 5.0) == trace.live_score);

  RunTrace empty;
  CHECK_THROWS_AS(blocks_csv(empty), ValidationError);
}

TEST_CASE("running-best CSV emits prefix minima") {
  CampaignArchive archive;
  auto mk = [](int i, std::optional<double> s) {
    CandidateRecord r;
    r.iteration = i;
    r.score = s;
    r.protocol.family = Family::dmrg;
    r.protocol.payload = DmrgProtocol{};
    return r;
  };
  archive.records = {mk(0, -1.0), mk(1, -0.5), mk(2, std::nullopt), mk(3, -2.0)};
  auto csv = running_best_csv(archive);
  CHECK(csv ==
        "iteration,score,best_score\n"
        "0,-1,-1\n"
        "1,-0.5,-1\n"
        "2,,-1\n"
        "3,-2,-2\n");
  CampaignArchive empty;
  CHECK_THROWS_AS(running_best_csv(empty), ValidationError);
}

TEST_CASE("reference bundle: persistence is deterministic, energy checks out") {
  SpinChainSpec spec{8, 1, 1, 1, 0, 0};
  DmrgStage s;
  s.method = DmrgStage::Method::dmrg2;
  s.bond_schedule = {16, 24};
  s.cutoff = 1e-13;
  s.eig_tol = 1e-10;
  s.max_sweeps = 6;
  s.ncv = 6;
  s.init = {MpsInit::neel, 1, 0};
  DmrgProtocol protocol{{s}};

  auto bundle = make_reference(spec, protocol, Budget::quanta(6));
  const double exact = exact_ground(build_spin_chain(spec)).energy;
  CHECK(std::abs(bundle.energy - exact) < 1e-10);

  const auto dir = std::filesystem::temp_directory_path() / "gsbench_ref_test";
  std::filesystem::remove_all(dir);
  save_reference(bundle, dir);
  auto loaded = load_reference(dir);
  CHECK(loaded.energy == bundle.energy);
  CHECK(loaded.fingerprint == bundle.fingerprint);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (i == j) CHECK(std::isnan(loaded.mi(i, j)));
      else CHECK(loaded.mi(i, j) == bundle.mi(i, j));
    }

  // regenerating with identical inputs reproduces the bundle bit-exactly
  auto bundle2 = make_reference(spec, protocol, Budget::quanta(6));
  const auto dir2 = std::filesystem::temp_directory_path() / "gsbench_ref_test2";
  std::filesystem::remove_all(dir2);
  save_reference(bundle2, dir2);
  CHECK(read_text_file(dir / "meta.json") == read_text_file(dir2 / "meta.json"));
  CHECK(read_text_file(dir / "mi.csv") == read_text_file(dir2 / "mi.csv"));

  // a reference protocol must end in dmrg2
  DmrgStage one = s;
  one.method = DmrgStage::Method::dmrg1;
  CHECK_THROWS_AS(make_reference(spec, DmrgProtocol{{one}}, Budget::quanta(4)), ValidationError);
  // and the budget must allow at least one sweep
  CHECK_THROWS_AS(make_reference(spec, protocol, Budget::quanta(0)), EvaluationError);
}

TEST_SUITE_END();
