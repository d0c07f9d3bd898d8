#include <random>

#include "doctest.h"
#include "gsbench/exact.hpp"
#include "gsbench/free_fermion.hpp"

using namespace gsbench;

TEST_SUITE_BEGIN("exact");

TEST_CASE("single-site Z ground state is |1> at energy -1") {
  PauliHamiltonian z(1, {{1.0, "Z"}});
  auto g = exact_ground(z);
  CHECK(g.energy == doctest::Approx(-1.0));
  CHECK(std::abs(g.state[1]) == doctest::Approx(1.0));
}

TEST_CASE("L=2 XXX singlet energy is -0.75") {
  auto h = build_spin_chain({2, 1, 1, 1, 0, 0});
  auto g = exact_ground(h);
  CHECK(g.energy == doctest::Approx(-0.75).epsilon(1e-12));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.to_dense());
  CHECK(g.energy == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-12));
}

TEST_CASE("L=10 XXX matches an independent dense diagonalization to 1e-10") {
  auto h = build_spin_chain({10, 1, 1, 1, 0, 0});
  auto g = exact_ground(h);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.to_dense());
  CHECK(std::abs(g.energy - es.eigenvalues()[0]) < 1e-10);
}

TEST_CASE("Lanczos path (L=11) agrees with dense diagonalization") {
  auto h = build_spin_chain({11, 1, 1, 0.5, 0.3, 0.0});
  auto g = exact_ground(h);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.to_dense());
  CHECK(std::abs(g.energy - es.eigenvalues()[0]) < 1e-9);
  CHECK(g.state.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigenpair residual below 1e-8 through 12 sites") {
  for (int L : {8, 12}) {
    auto h = build_spin_chain({L, 1, 1, 1, 0.2, 0.1});
    auto g = exact_ground(h);
    const double res = (h.apply(g.state) - g.energy * g.state).norm();
    CHECK(res <= 1e-8);
  }
}

TEST_CASE("size cap enforced") {
  SpinChainSpec spec{15, 1, 1, 1, 0, 0};
  CHECK_THROWS_AS(exact_ground(build_spin_chain(spec)), ValidationError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("free_fermion");

TEST_CASE("XX chain with two sites gives -1/2") {
  CHECK(free_fermion_ground_energy({2, 1, 1, 0, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("oracle equals exact diagonalization on solvable families up to L=12") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int L : {3, 6, 9, 12}) {
    SpinChainSpec xx{L, 0, 0, 0, 0, 0};
    xx.Jx = xx.Jy = u(rng);
    CHECK(std::abs(free_fermion_ground_energy(xx) - exact_ground(build_spin_chain(xx)).energy) < 1e-10);

    SpinChainSpec tfim{L, 0, 0, u(rng), u(rng), 0};
    CHECK(std::abs(free_fermion_ground_energy(tfim) - exact_ground(build_spin_chain(tfim)).energy) < 1e-10);
  }
  // negative couplings stay exact
  SpinChainSpec xneg{8, -1.3, -1.3, 0, 0, 0};
  CHECK(std::abs(free_fermion_ground_energy(xneg) - exact_ground(build_spin_chain(xneg)).energy) < 1e-10);
}

TEST_CASE("L=64 chains reproduce the archived reference energies") {
  CHECK(std::abs(free_fermion_ground_energy({64, 1, 1, 0, 0, 0}) - (-20.192157)) <= 1e-4);
  CHECK(std::abs(free_fermion_ground_energy({64, 0, 0, 1, 0.5, 0}) - (-20.281495)) <= 1e-4);
}

TEST_CASE("non-solvable specs are rejected") {
  CHECK_THROWS_AS(free_fermion_ground_energy({4, 1, 1, 1, 0, 0}), ValidationError);
  CHECK_THROWS_AS(free_fermion_ground_energy({4, 1, 0.5, 0, 0, 0}), ValidationError);
  CHECK_THROWS_AS(free_fermion_ground_energy({4, 1, 1, 0, 0, 0.2}), ValidationError);
}

TEST_SUITE_END();
