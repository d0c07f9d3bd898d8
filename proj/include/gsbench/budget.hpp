#pragma once

#include <chrono>
#include <cmath>

#include "gsbench/common.hpp"

namespace gsbench {

// Fixed evaluation budget. Wall-time budgets are enforced cooperatively at
// evaluator checkpoints; quanta budgets count checkpoint units (optimizer
// evaluations for VQE, sweeps for DMRG, blocks for the projector) and make
// runs fully deterministic. A quanta value of 0 is legal and means "initial
// point only": the free baseline evaluation still happens.
struct Budget {
  enum class Mode { wall_time, quanta };
  Mode mode = Mode::wall_time;
  double value = 0.0;

  static Budget seconds(double s) { return {Mode::wall_time, s}; }
  static Budget quanta(double n) { return {Mode::quanta, n}; }

  void validate() const {
    if (!std::isfinite(value)) throw BudgetError("budget value must be finite");
    if (mode == Mode::wall_time && value <= 0.0)
      throw BudgetError("wall-time budget must be positive");
    if (mode == Mode::quanta && value < 0.0)
      throw BudgetError("quanta budget must be non-negative");
  }
};

class BudgetClock {
 public:
  explicit BudgetClock(Budget budget) : budget_(budget) {
    budget_.validate();
    start_ = std::chrono::steady_clock::now();
  }

  bool exhausted() const {
    if (budget_.mode == Budget::Mode::quanta)
      return static_cast<double>(used_) >= budget_.value;
    return elapsed_seconds() >= budget_.value;
  }

  // One checkpoint unit of work was done.
  void consume(long long n = 1) { used_ += n; }

  double elapsed_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  long long quanta_used() const { return used_; }
  const Budget& budget() const { return budget_; }

  // Deterministic bookkeeping value for archives: quanta consumed in quanta
  // mode, wall seconds otherwise.
  double elapsed_record() const {
    if (budget_.mode == Budget::Mode::quanta) return static_cast<double>(used_);
    return elapsed_seconds();
  }

 private:
  Budget budget_;
  std::chrono::steady_clock::time_point start_;
  long long used_ = 0;
};

}  // namespace gsbench
