#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avseq/rng.hpp"
#include "avseq/sequential.hpp"
#include "avseq/types.hpp"

namespace avseq {

// ---------------------------------------------------------------------------
// Data generators. Streams are deterministic functions of the seed via the
// Philox counter generator.
// ---------------------------------------------------------------------------

struct Generator {
  enum class Kind { IidBeta, IidGaussian, Ar1, DiscreteIid };

  Kind kind = Kind::IidBeta;
  double a = 2, b = 5;                  // Beta
  double mu = 0, sigma = 1;             // Gaussian
  double ar_beta = 0.5;                 // AR(1) coefficient
  double noise_var = 0.8;               // AR(1) innovation variance
  bool stationary_start = true;         // X_0 ~ N(0, var/(1-beta^2))
  std::vector<double> atoms, probs;     // DiscreteIid

  static Generator iid_beta(double a, double b);
  static Generator iid_gaussian(double mu, double sigma);
  static Generator ar1(double beta, double noise_var, bool stationary_start = true);
  static Generator discrete_iid(std::vector<double> atoms, std::vector<double> probs);

  std::vector<Observation> generate(int n, Rng& rng) const;
  std::vector<Observation> generate(int n, std::uint64_t seed) const;
};

// ---------------------------------------------------------------------------
// Experiment presets: full wiring of generator, functional, family, strategy,
// level, horizon, and figure grids.
// ---------------------------------------------------------------------------

struct ExperimentPreset {
  std::string name;
  Generator gen;
  FamilySpec fam;
  Algo algo = Algo::Ftl;
  double alpha = 0.05;
  int horizon = 500;
  Vector truth;  // ground-truth functional value under the generator

  // Null-value grid for the log-wealth surface / confidence set figures.
  Vector grid_lo, grid_hi;
  int grid_resolution = 61;
  std::vector<int> snapshot_times;
  // Running confidence band (AR(1) preset).
  bool running_band = false;
  int band_resolution = 101;

  // Builds the family for a candidate null value on the figure grid;
  // returns nullopt for inadmissible grid cells.
  std::optional<FamilySpec> candidate_family(const Vector& lambda) const;

  static ExperimentPreset by_name(const std::string& name);
  static std::vector<std::string> names();
};

struct PresetResult {
  TestOutcome outcome;
  std::vector<std::string> files_written;
};

// Runs the preset and writes the figure-backing bundle under
// <out_dir>/<name>/<seed>/: path.csv, surface*.csv (and confseq.csv for the
// band preset), summary.json, config.txt.
PresetResult run_preset(const ExperimentPreset& preset, std::uint64_t seed,
                        const std::string& out_dir);

// ---------------------------------------------------------------------------
// Monte Carlo harness.
// ---------------------------------------------------------------------------

struct MonteCarloConfig {
  std::string scenario;
  Algo algo = Algo::Ftl;
  int replications = 200;
  int horizon = 500;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0: hardware concurrency
  std::vector<int> checkpoints;  // sub-horizons for frequency/regret tables
  int regret_sample = 8;         // replications used for the regret table
};

struct MonteCarloSummary {
  std::string scenario;
  std::string algo;
  int replications = 0;
  int horizon = 0;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;

  double rejection_frequency = 0.0;
  double binomial_margin = 0.0;  // 2 sqrt(alpha(1-alpha)/n)
  std::optional<double> median_rejection_time;
  std::map<int, double> rejection_by_horizon;
  std::map<int, double> regret_over_t;  // mean Regret_T / T at checkpoints
  std::optional<double> coverage_frequency;
  bool monotone_confidence_sets = true;
  long degenerate_rows = 0;
};

// Available scenario ids: null_bounded_elic, null_bounded_ident,
// null_subpsi_elic, null_subpsi_ident, alt_mean_sd_beta, alt_var_cvar_beta,
// alt_ar1, coverage_ar1.
std::vector<std::string> monte_carlo_scenarios();

// Builds the scenario's generator and family. Null scenarios satisfy the
// tested null exactly; alt scenarios reuse the experiment presets.
struct ScenarioSpec {
  Generator gen;
  FamilySpec fam;
  bool is_null = false;
  bool coverage = false;
  Vector coverage_truth;
  Vector band_lo, band_hi;
  int band_resolution = 101;
};
ScenarioSpec scenario_spec(const std::string& id);

MonteCarloSummary monte_carlo(const MonteCarloConfig& config);

// Deterministic per-replication generator seed stream id.
Rng replication_rng(std::uint64_t master_seed, const std::string& scenario, std::uint64_t rep);

}  // namespace avseq
