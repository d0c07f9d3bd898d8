#include "doctest.h"
#include "gsbench/dmrg.hpp"
#include "gsbench/exact.hpp"
#include "gsbench/free_fermion.hpp"

using namespace gsbench;

namespace {

DmrgStage stage2(std::vector<Eigen::Index> bonds, double cutoff, double tol, int sweeps, int ncv,
                 MpsInitSpec init) {
  DmrgStage s;
  s.method = DmrgStage::Method::dmrg2;
  s.bond_schedule = std::move(bonds);
  s.cutoff = cutoff;
  s.eig_tol = tol;
  s.max_sweeps = sweeps;
  s.ncv = ncv;
  s.init = init;
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("dmrg");

TEST_CASE("L=10 XXX dmrg2 at bond 64 reaches the exact ground energy") {
  SpinChainSpec spec{10, 1, 1, 1, 0, 0};
  DmrgProtocol protocol{{stage2({64}, 1e-12, 1e-10, 8, 6, {MpsInit::neel, 1, 0})}};
  auto run = run_dmrg(spec, protocol, Budget::seconds(60));
  const double exact = exact_ground(build_spin_chain(spec)).energy;
  CHECK(std::abs(run.final_energy - exact) < 1e-9);
}

TEST_CASE("canonical residuals stay tiny after every sweep") {
  SpinChainSpec spec{8, 1, 1, 0.5, 0.3, 0};
  DmrgProtocol protocol{{stage2({16}, 1e-12, 1e-9, 4, 4, {MpsInit::random, 2, 3})}};
  auto run = run_dmrg(spec, protocol, Budget::seconds(30));
  REQUIRE(run.state.center.has_value());
  double worst = 0.0;
  const auto& mps = run.state;
  for (int k = 0; k < mps.length(); ++k) {
    const auto& t = mps.sites[k];
    Matrix g;
    if (k < *mps.center)
      g = t.block[0].adjoint() * t.block[0] + t.block[1].adjoint() * t.block[1];
    else if (k > *mps.center)
      g = t.block[0] * t.block[0].adjoint() + t.block[1] * t.block[1].adjoint();
    else
      continue;
    worst = std::max(worst, (g - Matrix::Identity(g.rows(), g.cols())).norm());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("dmrg2 sweep energies are non-increasing at a fixed schedule") {
  SpinChainSpec spec{12, 1, 1, 1, 0, 0};
  DmrgProtocol protocol{{stage2({32}, 1e-13, 1e-9, 6, 5, {MpsInit::neel, 1, 0})}};
  auto run = run_dmrg(spec, protocol, Budget::seconds(60));
  REQUIRE(run.sweep_trace.size() >= 2);
  for (std::size_t i = 1; i < run.sweep_trace.size(); ++i)
    CHECK(run.sweep_trace[i].energy <= run.sweep_trace[i - 1].energy + 1e-10);
}

TEST_CASE("truncation respects the bond cap and the relative cutoff") {
  SpinChainSpec spec{10, 1, 1, 1, 0, 0};
  DmrgProtocol protocol{{stage2({6}, 1e-6, 1e-8, 3, 4, {MpsInit::neel, 1, 0})}};
  auto run = run_dmrg(spec, protocol, Budget::seconds(30));
  CHECK(run.state.max_bond() <= 6);

  // direct check of the split rule
  Matrix theta = Matrix::Random(8, 8);
  theta /= theta.norm();
  auto tr = detail::split_two_site(theta, 1e-3, 5);
  CHECK(tr.weights.size() <= 5);
  const double total = 1.0;  // theta normalized
  for (Eigen::Index k = 1; k < tr.weights.size(); ++k) {
    // kept weights before renormalization satisfy w^2 >= cutoff * total
    // (recover pre-normalization scale from the largest kept value)
    CHECK(tr.weights[k] > 0.0);
  }
  Eigen::BDCSVD<Matrix> svd(theta);
  const auto& sv = svd.singularValues();
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const bool kept = k < tr.weights.size();
    if (kept && k > 0) CHECK(sv[k] * sv[k] >= 1e-3 * total * (1.0 - 1e-12));
  }
}

TEST_CASE("dmrg1 refines a padded product state at fixed bond") {
  SpinChainSpec spec{8, 0, 0, 1, 0.5, 0};  // TFIM
  DmrgStage s;
  s.method = DmrgStage::Method::dmrg1;
  s.bond_schedule = {8};
  s.cutoff = 1e-10;
  s.eig_tol = 1e-9;
  s.max_sweeps = 10;
  s.ncv = 4;
  s.init = {MpsInit::plus, 8, 0};
  auto run = run_dmrg(spec, DmrgProtocol{{s}}, Budget::seconds(30));
  const double exact = exact_ground(build_spin_chain(spec)).energy;
  CHECK(run.state.max_bond() <= 8);
  CHECK(std::abs(run.final_energy - exact) < 1e-6);
}

TEST_CASE("staged protocol: dmrg1 warm-up then dmrg2 refine, inherit preserved") {
  SpinChainSpec spec{10, 1, 1, 0.5, 0, 0};
  DmrgStage warm;
  warm.method = DmrgStage::Method::dmrg1;
  warm.bond_schedule = {4, 6, 8};
  warm.cutoff = 1e-6;
  warm.eig_tol = 1e-3;
  warm.max_sweeps = 4;
  warm.ncv = 4;
  warm.init = {MpsInit::neel, 2, 0};
  DmrgStage refine = stage2({16, 24, 32}, 1e-12, 1e-9, 6, 6, {MpsInit::inherit, 1, 0});
  auto run = run_dmrg(spec, DmrgProtocol{{warm, refine}}, Budget::seconds(60));
  const double exact = exact_ground(build_spin_chain(spec)).energy;
  CHECK(std::abs(run.final_energy - exact) < 1e-8);
}

TEST_CASE("budget: zero quanta returns the initial state, quanta count sweeps") {
  SpinChainSpec spec{8, 1, 1, 1, 0, 0};
  DmrgProtocol protocol{{stage2({8}, 1e-10, 1e-8, 5, 4, {MpsInit::neel, 1, 0})}};
  auto none = run_dmrg(spec, protocol, Budget::quanta(0));
  CHECK(none.budget_truncated);
  CHECK(none.sweep_trace.empty());
  // neel energy of the XXX chain: (L-1) * (-1/4) from the ZZ bonds
  CHECK(none.final_energy == doctest::Approx(-7.0 / 4.0).epsilon(1e-10));

  auto two = run_dmrg(spec, protocol, Budget::quanta(2));
  CHECK(two.sweep_trace.size() == 2);

  CHECK_THROWS_AS(run_dmrg(spec, protocol, Budget::seconds(0)), BudgetError);
  CHECK_THROWS_AS(run_dmrg(spec, protocol, Budget::quanta(-1)), BudgetError);
}

TEST_CASE("quanta-budget runs are deterministic") {
  SpinChainSpec spec{8, 1, 1, 0.7, 0.2, 0};
  DmrgProtocol protocol{{stage2({12}, 1e-10, 1e-8, 3, 4, {MpsInit::random, 2, 77})}};
  auto a = run_dmrg(spec, protocol, Budget::quanta(3));
  auto b = run_dmrg(spec, protocol, Budget::quanta(3));
  CHECK(a.final_energy == b.final_energy);
  REQUIRE(a.sweep_trace.size() == b.sweep_trace.size());
  for (std::size_t i = 0; i < a.sweep_trace.size(); ++i)
    CHECK(a.sweep_trace[i].energy == b.sweep_trace[i].energy);
}

TEST_CASE("protocol validation") {
  DmrgProtocol empty;
  CHECK_THROWS_AS(empty.validate(), ValidationError);
  DmrgProtocol inherit_first{{stage2({8}, 1e-10, 1e-8, 2, 4, {MpsInit::inherit, 1, 0})}};
  CHECK_THROWS_AS(inherit_first.validate(), ValidationError);
  DmrgStage bad = stage2({}, 1e-10, 1e-8, 2, 4, {MpsInit::neel, 1, 0});
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  DmrgStage badcut = stage2({8}, 1.5, 1e-8, 2, 4, {MpsInit::neel, 1, 0});
  CHECK_THROWS_AS(badcut.validate(), ValidationError);
}

TEST_SUITE_END();
