#include <cmath>

#include "doctest.h"
#include "gsbench/optim.hpp"

using namespace gsbench;

namespace {

struct Tracker {
  Eigen::VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  int evals = 0;

  detail::Objective wrap(const detail::Objective& f) {
    return [this, f](const Eigen::VectorXd& x) {
      ++evals;
      const double v = f(x);
      if (v < best_f) {
        best_f = v;
        best_x = x;
      }
      return v;
    };
  }
};

double quadratic(const Eigen::VectorXd& x) {
  Eigen::VectorXd c(3);
  c << 1.0, -2.0, 0.5;
  return (x - c).squaredNorm() + 3.0;
}

double rosenbrock2(const Eigen::VectorXd& x) {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST_SUITE_BEGIN("optim");

TEST_CASE("all three optimizers minimize a shifted quadratic") {
  for (auto kind : {OptimizerSpec::Kind::simplex, OptimizerSpec::Kind::line_search_cyclic,
                    OptimizerSpec::Kind::linear_trust_region}) {
    OptimizerSpec spec;
    spec.kind = kind;
    spec.rhobeg = 0.5;
    spec.tol = 1e-10;
    spec.xtol = 1e-9;
    spec.max_steps = 4000;
    Tracker t;
    minimize(spec, t.wrap(quadratic), Eigen::VectorXd::Zero(3));
    INFO("kind = ", to_string(kind));
    CHECK(t.best_f == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(t.evals <= 4000);
  }
}

TEST_CASE("line-search and simplex handle the Rosenbrock valley") {
  for (auto kind : {OptimizerSpec::Kind::simplex, OptimizerSpec::Kind::line_search_cyclic}) {
    OptimizerSpec spec;
    spec.kind = kind;
    spec.rhobeg = 0.5;
    spec.tol = 1e-12;
    spec.xtol = 1e-10;
    spec.max_steps = 6000;
    Tracker t;
    minimize(spec, t.wrap(rosenbrock2), Eigen::VectorXd::Zero(2));
    INFO("kind = ", to_string(kind));
    CHECK(t.best_f < 1e-6);
  }
}

TEST_CASE("budget exhaustion unwinds cleanly and keeps the best point") {
  OptimizerSpec spec;
  spec.kind = OptimizerSpec::Kind::simplex;
  spec.max_steps = 100000;
  Tracker t;
  auto limited = [&](const Eigen::VectorXd& x) {
    if (t.evals >= 25) throw BudgetExhausted{};
    return t.wrap(quadratic)(x);
  };
  minimize(spec, limited, Eigen::VectorXd::Zero(3));
  CHECK(t.evals == 25);
  CHECK(std::isfinite(t.best_f));
}

TEST_CASE("spec validation") {
  OptimizerSpec bad;
  bad.rhobeg = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = OptimizerSpec{};
  bad.max_steps = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  OptimizerSpec ok;
  CHECK_THROWS_AS(minimize(ok, [](const Eigen::VectorXd&) { return 0.0; }, Eigen::VectorXd()),
                  ValidationError);
}

TEST_CASE("deterministic: repeated runs produce identical trajectories") {
  for (auto kind : {OptimizerSpec::Kind::simplex, OptimizerSpec::Kind::line_search_cyclic,
                    OptimizerSpec::Kind::linear_trust_region}) {
    OptimizerSpec spec;
    spec.kind = kind;
    spec.max_steps = 300;
    std::vector<double> seq1, seq2;
    auto run = [&](std::vector<double>& seq) {
      minimize(spec, [&](const Eigen::VectorXd& x) {
        const double v = rosenbrock2(x);
        seq.push_back(v);
        return v;
      }, Eigen::VectorXd::Zero(2));
    };
    run(seq1);
    run(seq2);
    CHECK(seq1 == seq2);
  }
}

TEST_SUITE_END();
