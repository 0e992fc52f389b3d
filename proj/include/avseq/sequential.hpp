#pragma once

#include <optional>
#include <span>
#include <vector>

#include "avseq/strategies.hpp"
#include "avseq/types.hpp"

namespace avseq {

// ---------------------------------------------------------------------------
// Ville-threshold test: reject as soon as W_t > 1/alpha (strict inequality).
// ---------------------------------------------------------------------------

struct TestOutcome {
  double alpha = 0.05;
  double log_threshold = 0.0;  // log(1/alpha)
  std::optional<int> rejected_at;
  double running_max_log_wealth = 0.0;
  double final_log_wealth = 0.0;
  int steps_consumed = 0;
  long degenerate_rows = 0;
  std::vector<double> log_wealth_path;  // position i holds log W_{i+1}

  bool rejected() const { return rejected_at.has_value(); }
};

// Incremental runner for streaming input; processes one observation at a
// time with memory owned by the strategy state.
class TestRunner {
 public:
  TestRunner(FamilySpec fam, Algo algo, double alpha, bool stop_at_rejection = true,
             std::optional<double> gradient_bound = std::nullopt, bool record_path = true);

  // Returns false once the runner has stopped consuming (after rejection
  // with stop_at_rejection).
  bool feed(const Observation& x);
  bool stopped() const { return stopped_; }
  const StrategyState& state() const { return state_; }
  StrategyState& state() { return state_; }
  TestOutcome outcome() const;

 private:
  StrategyState state_;
  double alpha_;
  double log_threshold_;
  bool stop_at_rejection_;
  bool record_path_;
  bool stopped_ = false;
  std::optional<int> rejected_at_;
  std::vector<double> path_;
};

TestOutcome run_test(const FamilySpec& fam, Algo algo, std::span<const Observation> stream,
                     double alpha, bool continue_after_rejection = false,
                     std::optional<double> gradient_bound = std::nullopt);

// Set-valued null over a finite grid K of null values: the e-process
// M_t = min over the grid of the per-null wealths. Rejects at the first
// current-time crossing M_t > 1/alpha.
TestOutcome run_set_test(std::span<const FamilySpec> fams, Algo algo,
                         std::span<const Observation> stream, double alpha,
                         bool continue_after_rejection = false);

// ---------------------------------------------------------------------------
// Confidence sequences by test inversion over a candidate grid.
// ---------------------------------------------------------------------------

struct GridHull {
  Vector lo, hi;  // per-axis interval hull of the surviving candidates
  int members = 0;
};

class ConfidenceGrid {
 public:
  // One family + strategy per candidate null value; all candidates advance
  // on the same observations.
  ConfidenceGrid(std::vector<FamilySpec> fams, Algo algo, double alpha);

  void update(const Observation& x);

  int t() const { return t_; }
  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<uint8_t>& mask() const { return mask_; }
  const Vector& candidate(int i) const { return states_[static_cast<std::size_t>(i)].fam.lambda0; }
  double running_max_log_wealth(int i) const {
    return states_[static_cast<std::size_t>(i)].running_max_log_wealth;
  }
  double log_wealth(int i) const { return states_[static_cast<std::size_t>(i)].log_wealth; }
  bool contains(const Vector& lambda, double tol = 1e-12) const;
  GridHull hull() const;

 private:
  std::vector<StrategyState> states_;
  std::vector<uint8_t> mask_;
  double alpha_;
  double log_threshold_;
  int t_ = 0;
};

// Evenly spaced candidate grid over a box, resolution points per axis.
std::vector<Vector> lambda_grid(const Vector& lo, const Vector& hi, int resolution);

}  // namespace avseq
