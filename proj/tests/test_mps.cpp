#include "doctest.h"
#include "gsbench/exact.hpp"
#include "gsbench/mpo.hpp"
#include "gsbench/mps.hpp"

using namespace gsbench;

namespace {

// isometry residuals of a mixed-canonical MPS
double canonical_residual(const MatrixProductState& mps) {
  REQUIRE(mps.center.has_value());
  double worst = 0.0;
  for (int k = 0; k < mps.length(); ++k) {
    const auto& t = mps.sites[k];
    if (k < *mps.center) {
      Matrix g = t.block[0].adjoint() * t.block[0] + t.block[1].adjoint() * t.block[1];
      worst = std::max(worst, (g - Matrix::Identity(g.rows(), g.cols())).norm());
    } else if (k > *mps.center) {
      Matrix g = t.block[0] * t.block[0].adjoint() + t.block[1] * t.block[1].adjoint();
      worst = std::max(worst, (g - Matrix::Identity(g.rows(), g.cols())).norm());
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("mps");

TEST_CASE("neel init expands to |0101...>") {
  auto mps = init_mps(MpsInit::neel, 4, 1, 0);
  Vector dense = mps.to_dense();
  Vector expect = Vector::Zero(16);
  expect[0b0101] = 1.0;
  CHECK((dense - expect).norm() < 1e-14);
}

TEST_CASE("plus init on two sites has all amplitudes 1/2") {
  auto mps = init_mps(MpsInit::plus, 2, 1, 0);
  Vector dense = mps.to_dense();
  for (int i = 0; i < 4; ++i) CHECK(std::abs(dense[i] - Complex(0.5, 0.0)) < 1e-14);
  auto minus = init_mps(MpsInit::minus, 2, 1, 0).to_dense();
  CHECK(std::abs(minus[0] - Complex(0.5, 0)) < 1e-14);
  CHECK(std::abs(minus[1] + Complex(0.5, 0)) < 1e-14);
  CHECK(std::abs(minus[3] - Complex(0.5, 0)) < 1e-14);
}

TEST_CASE("product init respects padding, stays normalized and canonical") {
  auto mps = init_mps(MpsInit::neel, 6, 8, 0);
  CHECK(mps.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(canonical_residual(mps) < 1e-12);
  auto dims = mps.bond_dims();
  CHECK(dims[0] == 2);
  CHECK(dims[1] == 4);
  CHECK(dims[2] == 8);
  Vector dense = mps.to_dense();
  Vector expect = Vector::Zero(64);
  expect[0b010101] = 1.0;
  CHECK((dense - expect).norm() < 1e-12);
}

TEST_CASE("random init is seed-deterministic and normalized") {
  auto a = init_mps(MpsInit::random, 5, 4, 12345);
  auto b = init_mps(MpsInit::random, 5, 4, 12345);
  for (int k = 0; k < 5; ++k)
    for (int s = 0; s < 2; ++s)
      CHECK((a.sites[k].block[s] - b.sites[k].block[s]).norm() == 0.0);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  auto c = init_mps(MpsInit::random, 5, 4, 999);
  CHECK((a.to_dense() - c.to_dense()).norm() > 1e-6);
}

TEST_CASE("canonicalization preserves the dense state and moves the center") {
  auto mps = init_mps(MpsInit::random, 6, 6, 42);
  Vector before = mps.to_dense();
  mps.move_center(3);
  CHECK(canonical_residual(mps) < 1e-12);
  CHECK((mps.to_dense() - before).norm() < 1e-12);
  mps.move_center(0);
  CHECK((mps.to_dense() - before).norm() < 1e-12);
  CHECK(mps.norm() == doctest::Approx(before.norm()).epsilon(1e-12));
}

TEST_CASE("init validation") {
  CHECK_THROWS_AS(init_mps(MpsInit::inherit, 4, 1, 0), ValidationError);
  CHECK_THROWS_AS(init_mps(MpsInit::neel, 1, 1, 0), ValidationError);
  CHECK_THROWS_AS(init_mps(MpsInit::neel, 4, 0, 0), ValidationError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("mpo");

TEST_CASE("L=2 XXX MPO matches the Pauli construction") {
  SpinChainSpec spec{2, 1, 1, 1, 0, 0};
  auto mpo = build_mpo(spec);
  auto dense_mpo = mpo.to_dense();
  auto dense_pauli = build_spin_chain(spec).to_dense();
  CHECK((dense_mpo - dense_pauli).norm() < 1e-12);
}

TEST_CASE("TFIM MPO has bond dimension 3") {
  auto mpo = build_mpo({8, 0, 0, 1, 0.5, 0});
  for (int k = 1; k + 1 < 8; ++k) {
    CHECK(mpo.sites[k].wl == 3);
    CHECK(mpo.sites[k].wr == 3);
  }
  CHECK(mpo.sites[0].wl == 1);
  CHECK(mpo.sites[7].wr == 1);
}

TEST_CASE("MPO dense matches Pauli dense across coupling patterns") {
  for (SpinChainSpec spec : {SpinChainSpec{3, 1, 0.5, 0.25, 0.7, 0.3},
                             SpinChainSpec{5, 0, 0, 1, 0.5, 0},
                             SpinChainSpec{4, 1, 1, 0, 0, 0.2}}) {
    auto mpo = build_mpo(spec);
    CHECK((mpo.to_dense() - build_spin_chain(spec).to_dense()).norm() < 1e-12);
  }
}

TEST_CASE("MPO expectation on a random MPS matches the dense quadratic form") {
  SpinChainSpec spec{12, 1, 1, 0.5, 0.2, 0.1};
  auto mpo = build_mpo(spec);
  auto mps = init_mps(MpsInit::random, 12, 5, 7);
  const double via_env = mpo_expectation(mps, mpo) / mps_norm2(mps);
  Vector dense = mps.to_dense();
  auto h = build_spin_chain(spec);
  const double via_dense = std::real(dense.dot(h.apply(dense))) / dense.squaredNorm();
  CHECK(via_env == doctest::Approx(via_dense).epsilon(1e-10));
}

TEST_SUITE_END();
