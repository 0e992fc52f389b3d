#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avseq/families.hpp"
#include "avseq/types.hpp"

namespace avseq {

enum class Algo { Ftl, FtrlProx, Ogd, Ftlp };

std::string algo_id(Algo a);
Algo parse_algo(const std::string& id);

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  // First trial step size; 0 picks 1. Warm-started FTL passes ~1/t here
  // since the summed objective's curvature grows linearly with the history.
  double initial_step = 0.0;
};

// Deterministic projected-gradient ascent of a concave objective over the
// domain, warm-started at theta0. Terminates when the iterate stops moving
// (tolerance `tol`); raises SolverFailure at the iteration cap.
Vector pgd_maximize(const std::function<double(const Vector&)>& value,
                    const std::function<Vector(const Vector&)>& gradient,
                    const ThetaDomain& domain, Vector theta0, const SolverOptions& opts = {});

using Predictive = std::vector<std::pair<Observation, double>>;

// ---------------------------------------------------------------------------
// Running log-wealth objective theta -> log L_t^theta, accumulated as compact
// sufficient statistics: sub-psi identifiable families reduce to (sum m, sum
// v); sub-psi elicitable families with quadratic scores reduce to moment
// matrices; bounded families keep one small record per observation.
// ---------------------------------------------------------------------------

class WealthObjective {
 public:
  WealthObjective() = default;
  explicit WealthObjective(const FamilySpec& fam);

  void add(const FamilySpec& fam, const Observation& x, int step);
  long count() const { return t_; }
  // log L_t^theta; -inf if theta is inadmissible for the realized data.
  double value(const FamilySpec& fam, const Vector& theta) const;
  Vector gradient(const FamilySpec& fam, const Vector& theta) const;

  const Vector& m_sum() const { return m_sum_; }
  double v_sum() const { return v_sum_; }

  // Sum over the history of the score gaps s(lambda0,x) - s(lambda,x); only
  // meaningful for the sub-psi elicitable modes.
  double gap_sum(const FamilySpec& fam, const Vector& lambda) const;
  Vector gap_gradient(const FamilySpec& fam, const Vector& lambda) const;

 private:
  enum class Mode { BoundedIdent, BoundedElic, SubPsiElicQuadMean, SubPsiElicQuadReg, SubPsiElicGeneral, SubPsiIdent };
  Mode mode_ = Mode::BoundedIdent;
  int k_ = 1;
  long t_ = 0;
  double v_sum_ = 0;
  std::vector<double> m_flat_;  // BoundedIdent: k doubles per obs
  Vector m_sum_;
  std::vector<double> x_flat_;  // BoundedElic / SubPsiElicGeneral: scalar obs
  std::vector<double> s0_;      // matching s(lambda0, x_i)
  double s0_sum_ = 0;
  double sx_ = 0, sxx_ = 0;     // quadratic mean-score stats
  Matrix xx_;                   // quadratic regression stats
  Vector xy_;
  double yy_ = 0;
};

// ---------------------------------------------------------------------------
// Strategy state: the predictable bet theta_next, the wealth ledger, and the
// per-algorithm history. One state per stream; distinct streams may run in
// parallel.
// ---------------------------------------------------------------------------

struct StrategyState {
  Algo algo = Algo::Ftl;
  FamilySpec fam;
  SolverOptions solver;
  double G = 1.0;
  double diam = 1.0;
  Vector theta_next;
  int t = 0;
  double log_wealth = 0.0;
  double running_max_log_wealth = 0.0;
  long degenerate_rows = 0;
  bool concavity_warning = false;
  bool check_data_range = true;
  WealthObjective objective;
  // FTRL-proximal quadratic-regularizer statistics.
  double sigma_sum = 0.0;
  Vector sigma_theta_sum;
  // FTLP predictive supplier; empirical measure when unset.
  std::function<Predictive(const StrategyState&)> predictive;
  // Raw observations, kept for the FTLP empirical measure and diagnostics.
  std::vector<Observation> history;
  bool keep_history = true;

  static StrategyState make(Algo algo, FamilySpec fam,
                            std::optional<double> gradient_bound = std::nullopt);
};

// Consumes one observation: charges the increment at the current predictable
// bet, then updates the bet using information up to and including x.
double step(StrategyState& state, const Observation& x);

// Bet updates (pure with respect to the state's histories).
Vector ftl_update(const StrategyState& state);
Vector ftrl_update(const StrategyState& state);
Vector ogd_update(const StrategyState& state, const Vector& loss_subgradient);
Vector ftlp_update(const StrategyState& state, const Predictive& predictive);

// max_theta log L_t^theta: closed form when available, grid-refined in one or
// two dimensions, projected gradient otherwise.
double best_fixed_log_wealth(const StrategyState& state);
double regret(const StrategyState& state);

// ---------------------------------------------------------------------------
// Static predictable mixtures.
// ---------------------------------------------------------------------------

struct MixtureWeights {
  std::vector<Vector> atoms;
  std::vector<double> probs;

  static MixtureWeights dirac(Vector theta);
  static MixtureWeights uniform(std::vector<Vector> atoms);
  static MixtureWeights make(std::vector<Vector> atoms, std::vector<double> probs);
};

// log of the mixed multiplicative increment, max-shift stabilized.
double mixture_step(const MixtureWeights& weights, const FamilySpec& fam, const Observation& x,
                    int step = 1);

}  // namespace avseq
