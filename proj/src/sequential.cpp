#include "avseq/sequential.hpp"

#include <algorithm>
#include <cmath>

namespace avseq {

TestRunner::TestRunner(FamilySpec fam, Algo algo, double alpha, bool stop_at_rejection,
                       std::optional<double> gradient_bound, bool record_path)
    : state_(StrategyState::make(algo, std::move(fam), gradient_bound)),
      alpha_(alpha),
      log_threshold_(std::log(1.0 / alpha)),
      stop_at_rejection_(stop_at_rejection),
      record_path_(record_path) {
  if (!(alpha > 0 && alpha < 1)) throw ParamError("alpha must be in (0,1)");
}

bool TestRunner::feed(const Observation& x) {
  if (stopped_) return false;
  step(state_, x);
  if (record_path_) path_.push_back(state_.log_wealth);
  if (!rejected_at_ && state_.log_wealth > log_threshold_) {
    rejected_at_ = state_.t;
    if (stop_at_rejection_) stopped_ = true;
  }
  return !stopped_;
}

TestOutcome TestRunner::outcome() const {
  TestOutcome out;
  out.alpha = alpha_;
  out.log_threshold = log_threshold_;
  out.rejected_at = rejected_at_;
  out.running_max_log_wealth = state_.running_max_log_wealth;
  out.final_log_wealth = state_.log_wealth;
  out.steps_consumed = state_.t;
  out.degenerate_rows = state_.degenerate_rows;
  out.log_wealth_path = path_;
  return out;
}

TestOutcome run_test(const FamilySpec& fam, Algo algo, std::span<const Observation> stream,
                     double alpha, bool continue_after_rejection,
                     std::optional<double> gradient_bound) {
  TestRunner runner(fam, algo, alpha, !continue_after_rejection, gradient_bound);
  for (const auto& x : stream) {
    if (!runner.feed(x)) break;
  }
  return runner.outcome();
}

TestOutcome run_set_test(std::span<const FamilySpec> fams, Algo algo,
                         std::span<const Observation> stream, double alpha,
                         bool continue_after_rejection) {
  if (fams.empty()) throw ParamError("set test needs a nonempty null grid");
  if (!(alpha > 0 && alpha < 1)) throw ParamError("alpha must be in (0,1)");
  std::vector<StrategyState> states;
  states.reserve(fams.size());
  for (const auto& fam : fams) states.push_back(StrategyState::make(algo, fam));

  TestOutcome out;
  out.alpha = alpha;
  out.log_threshold = std::log(1.0 / alpha);
  double running_max = 0.0;
  for (const auto& x : stream) {
    double min_log_wealth = kInf;
    for (auto& st : states) {
      step(st, x);
      min_log_wealth = std::min(min_log_wealth, st.log_wealth);
    }
    ++out.steps_consumed;
    out.log_wealth_path.push_back(min_log_wealth);
    running_max = std::max(running_max, min_log_wealth);
    // M^K is an e-process, not a supermartingale: the decision uses the
    // current-time crossing.
    if (!out.rejected_at && min_log_wealth > out.log_threshold) {
      out.rejected_at = out.steps_consumed;
      if (!continue_after_rejection) break;
    }
  }
  out.running_max_log_wealth = running_max;
  out.final_log_wealth = out.log_wealth_path.empty() ? 0.0 : out.log_wealth_path.back();
  for (const auto& st : states) out.degenerate_rows += st.degenerate_rows;
  return out;
}

// ---------------------------------------------------------------------------
// ConfidenceGrid
// ---------------------------------------------------------------------------

ConfidenceGrid::ConfidenceGrid(std::vector<FamilySpec> fams, Algo algo, double alpha)
    : alpha_(alpha), log_threshold_(std::log(1.0 / alpha)) {
  if (!(alpha > 0 && alpha < 1)) throw ParamError("alpha must be in (0,1)");
  if (fams.empty()) throw ParamError("confidence grid needs candidates");
  states_.reserve(fams.size());
  for (auto& fam : fams) {
    auto st = StrategyState::make(algo, std::move(fam));
    st.keep_history = false;
    states_.push_back(std::move(st));
  }
  mask_.assign(states_.size(), 1);  // C_0 = entire grid: all wealths are 1
}

void ConfidenceGrid::update(const Observation& x) {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    step(states_[i], x);
    if (mask_[i] && states_[i].running_max_log_wealth > log_threshold_) mask_[i] = 0;
  }
  ++t_;
}

bool ConfidenceGrid::contains(const Vector& lambda, double tol) const {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (mask_[i] && (states_[i].fam.lambda0 - lambda).norm() <= tol) return true;
  }
  return false;
}

GridHull ConfidenceGrid::hull() const {
  GridHull h;
  const int k = states_.front().fam.functional.k;
  h.lo = Vector::Constant(k, kInf);
  h.hi = Vector::Constant(k, -kInf);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!mask_[i]) continue;
    ++h.members;
    h.lo = h.lo.cwiseMin(states_[i].fam.lambda0);
    h.hi = h.hi.cwiseMax(states_[i].fam.lambda0);
  }
  return h;
}

std::vector<Vector> lambda_grid(const Vector& lo, const Vector& hi, int resolution) {
  if (resolution < 1) throw ParamError("grid resolution must be >= 1");
  if (lo.size() != hi.size()) throw ParamError("grid bounds size mismatch");
  const int k = static_cast<int>(lo.size());
  std::vector<Vector> out;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  for (;;) {
    Vector v(k);
    for (int i = 0; i < k; ++i) {
      v[i] = resolution == 1 ? 0.5 * (lo[i] + hi[i])
                             : lo[i] + (hi[i] - lo[i]) * idx[static_cast<std::size_t>(i)] /
                                           (resolution - 1);
    }
    out.push_back(v);
    int i = 0;
    while (i < k && ++idx[static_cast<std::size_t>(i)] == resolution) {
      idx[static_cast<std::size_t>(i++)] = 0;
    }
    if (i == k) break;
  }
  return out;
}

}  // namespace avseq
