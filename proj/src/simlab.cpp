#include "avseq/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "avseq/functionals.hpp"
#include "avseq/io.hpp"

namespace avseq {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

Generator Generator::iid_beta(double a, double b) {
  if (!(a > 0 && b > 0)) throw ParamError("beta parameters must be positive");
  Generator g;
  g.kind = Kind::IidBeta;
  g.a = a;
  g.b = b;
  return g;
}

Generator Generator::iid_gaussian(double mu, double sigma) {
  if (!(sigma > 0)) throw ParamError("gaussian sigma must be positive");
  Generator g;
  g.kind = Kind::IidGaussian;
  g.mu = mu;
  g.sigma = sigma;
  return g;
}

Generator Generator::ar1(double beta, double noise_var, bool stationary_start) {
  if (!(noise_var > 0)) throw ParamError("AR(1) noise variance must be positive");
  Generator g;
  g.kind = Kind::Ar1;
  g.ar_beta = beta;
  g.noise_var = noise_var;
  g.stationary_start = stationary_start;
  return g;
}

Generator Generator::discrete_iid(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw ParamError("discrete generator needs matching nonempty atoms/probs");
  }
  double sum = 0;
  for (double p : probs) {
    if (p < 0) throw ParamError("negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParamError("probabilities must sum to 1");
  Generator g;
  g.kind = Kind::DiscreteIid;
  g.atoms = std::move(atoms);
  g.probs = std::move(probs);
  return g;
}

std::vector<Observation> Generator::generate(int n, Rng& rng) const {
  if (n < 1) throw ParamError("generate needs n >= 1");
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(n));
  switch (kind) {
    case Kind::IidBeta:
      for (int i = 0; i < n; ++i) out.emplace_back(rng.beta(a, b));
      break;
    case Kind::IidGaussian:
      for (int i = 0; i < n; ++i) out.emplace_back(rng.gaussian(mu, sigma));
      break;
    case Kind::Ar1: {
      const double sd = std::sqrt(noise_var);
      double x;
      if (stationary_start) {
        if (!(std::abs(ar_beta) < 1)) {
          throw ParamError("stationary AR(1) start needs |beta| < 1");
        }
        x = rng.gaussian(0.0, std::sqrt(noise_var / (1.0 - ar_beta * ar_beta)));
      } else {
        x = 0.0;
      }
      for (int i = 0; i < n; ++i) {
        const double next = ar_beta * x + rng.gaussian(0.0, sd);
        // Regression packing: response first, then the covariate.
        out.emplace_back(next, x);
        x = next;
      }
      break;
    }
    case Kind::DiscreteIid:
      for (int i = 0; i < n; ++i) {
        out.emplace_back(atoms[static_cast<std::size_t>(rng.categorical(probs))]);
      }
      break;
  }
  return out;
}

std::vector<Observation> Generator::generate(int n, std::uint64_t seed) const {
  Rng rng(seed);
  return generate(n, rng);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> axis_names(const Functional& f) {
  switch (f.id) {
    case FunctionalId::Mean:
    case FunctionalId::Quantile:
      return {"lambda"};
    case FunctionalId::MeanSd:
      return {"lambda_mu", "lambda_sigma"};
    case FunctionalId::VarCvar:
      return {"lambda_var", "lambda_cvar"};
    case FunctionalId::Regression: {
      std::vector<std::string> names;
      for (int i = 1; i <= f.k; ++i) names.push_back("beta_" + std::to_string(i));
      return names;
    }
  }
  return {"lambda"};
}

constexpr double kAr1DataBound = 14.0;

}  // namespace

std::vector<std::string> ExperimentPreset::names() {
  return {"mean_sd_beta", "var_cvar_beta", "ar1_coeff"};
}

ExperimentPreset ExperimentPreset::by_name(const std::string& name) {
  ExperimentPreset p;
  p.name = name;
  if (name == "mean_sd_beta") {
    p.gen = Generator::iid_beta(2, 5);
    Functional f = Functional::mean_sd(Interval{0, 1});
    const Vector lambda0 = (Vector(2) << 0.4, 0.4).finished();
    p.fam = FamilySpec::bounded_identifiable(
        f, lambda0, fit_bounded_domain(FamilyKind::BoundedIdentifiable, f, lambda0));
    p.truth = true_value(f, ReferenceDistribution::beta(2, 5));
    p.horizon = 500;
    p.grid_lo = Vector::Zero(2);
    p.grid_hi = Vector::Constant(2, 1.0);
    p.snapshot_times = {50};
    return p;
  }
  if (name == "var_cvar_beta") {
    p.gen = Generator::iid_beta(2, 5);
    Functional f = Functional::var_cvar(0.05, Interval{0, 1});
    const Vector lambda0 = (Vector(2) << 0.2, 0.1).finished();
    p.fam = FamilySpec::bounded_identifiable(
        f, lambda0, fit_bounded_domain(FamilyKind::BoundedIdentifiable, f, lambda0));
    p.truth = true_value(f, ReferenceDistribution::beta(2, 5));
    p.horizon = 500;
    p.grid_lo = Vector::Zero(2);
    p.grid_hi = Vector::Constant(2, 1.0);
    // The figure caption and its body text disagree on the snapshot time, so
    // both snapshots are emitted.
    p.snapshot_times = {50, 150};
    return p;
  }
  if (name == "ar1_coeff") {
    p.gen = Generator::ar1(0.5, 0.8);
    Functional f = Functional::regression(1, Interval{-kAr1DataBound, kAr1DataBound});
    const Vector lambda0 = Vector::Constant(1, 0.65);
    p.fam = FamilySpec::subpsi_identifiable(
        f, lambda0, PsiSpec::gaussian(1.0), VarianceProcess::unit(),
        ThetaDomain::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)), UMode::Norm);
    p.truth = Vector::Constant(1, 0.5);
    p.horizon = 1000;
    p.grid_lo = Vector::Zero(1);
    p.grid_hi = Vector::Constant(1, 1.0);
    p.running_band = true;
    p.band_resolution = 101;
    return p;
  }
  std::string known;
  for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

std::optional<FamilySpec> ExperimentPreset::candidate_family(const Vector& lambda) const {
  const Functional& f = fam.functional;
  if (!lambda_in_domain(f, lambda)) return std::nullopt;
  try {
    switch (fam.kind) {
      case FamilyKind::BoundedIdentifiable:
        return FamilySpec::bounded_identifiable(
            f, lambda, fit_bounded_domain(FamilyKind::BoundedIdentifiable, f, lambda));
      case FamilyKind::BoundedElicitable:
        return FamilySpec::bounded_elicitable(
            f, lambda, fit_bounded_domain(FamilyKind::BoundedElicitable, f, lambda));
      case FamilyKind::SubPsiIdentifiable:
        return FamilySpec::subpsi_identifiable(f, lambda, *fam.psi, fam.variance,
                                               fam.theta_domain, fam.u_mode, fam.fixed_u);
      case FamilyKind::SubPsiElicitable:
        return FamilySpec::subpsi_elicitable(f, lambda, *fam.psi, fam.variance, fam.theta_domain,
                                             fam.u_mode, fam.fixed_u);
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// run_preset
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::string> preset_config(const ExperimentPreset& p, std::uint64_t seed,
                                                 const std::string& out_dir) {
  std::map<std::string, std::string> kv;
  kv["command"] = "experiment";
  kv["preset"] = p.name;
  kv["seed"] = std::to_string(seed);
  kv["alpha"] = format_double(p.alpha);
  kv["horizon"] = std::to_string(p.horizon);
  kv["strategy"] = algo_id(p.algo);
  kv["out"] = out_dir;
  return kv;
}

}  // namespace

PresetResult run_preset(const ExperimentPreset& preset, std::uint64_t seed,
                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_dir) / preset.name / std::to_string(seed);
  fs::create_directories(dir);

  Rng rng = replication_rng(seed, "preset/" + preset.name, 0);
  const auto stream = preset.gen.generate(preset.horizon, rng);

  PresetResult result;

  // Wealth path at the preset's null, run to the full horizon so the figure
  // shows the path beyond the crossing.
  StrategyState state = StrategyState::make(preset.algo, preset.fam);
  const double log_threshold = std::log(1.0 / preset.alpha);
  std::optional<int> rejected_at;
  std::string path_csv;
  {
    std::vector<std::string> header = {"t", "log_wealth", "running_max_log_wealth",
                                       "log_threshold", "rejected"};
    for (const auto& n : axis_names(preset.fam.functional)) header.push_back("theta_" + n);
    path_csv += join_csv_row(header);
  }
  for (const auto& x : stream) {
    const Vector bet = state.theta_next;
    step(state, x);
    if (!rejected_at && state.log_wealth > log_threshold) rejected_at = state.t;
    std::vector<std::string> row = {std::to_string(state.t), format_double(state.log_wealth),
                                    format_double(state.running_max_log_wealth),
                                    format_double(log_threshold), rejected_at ? "1" : "0"};
    for (int i = 0; i < bet.size(); ++i) row.push_back(format_double(bet[i]));
    path_csv += join_csv_row(row);
  }
  const std::string path_file = (dir / "path.csv").string();
  write_text_file(path_file, path_csv);
  result.files_written.push_back(path_file);

  TestOutcome outcome;
  outcome.alpha = preset.alpha;
  outcome.log_threshold = log_threshold;
  outcome.rejected_at = rejected_at;
  outcome.running_max_log_wealth = state.running_max_log_wealth;
  outcome.final_log_wealth = state.log_wealth;
  outcome.steps_consumed = state.t;
  outcome.degenerate_rows = state.degenerate_rows;
  result.outcome = outcome;

  // Log-wealth surface over the null grid at the snapshot times, with the
  // confidence-set membership mask.
  if (!preset.snapshot_times.empty()) {
    std::vector<FamilySpec> fams;
    std::vector<Vector> lambdas;
    for (const auto& lam :
         lambda_grid(preset.grid_lo, preset.grid_hi, preset.grid_resolution)) {
      if (auto fam = preset.candidate_family(lam)) {
        fams.push_back(std::move(*fam));
        lambdas.push_back(lam);
      }
    }
    ConfidenceGrid grid(std::move(fams), preset.algo, preset.alpha);
    std::vector<int> snaps = preset.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    for (int t = 1; t <= preset.horizon && next_snap < snaps.size(); ++t) {
      grid.update(stream[static_cast<std::size_t>(t - 1)]);
      while (next_snap < snaps.size() && snaps[next_snap] == t) {
        std::string csv;
        std::vector<std::string> header = axis_names(preset.fam.functional);
        header.push_back("log_wealth");
        header.push_back("in_confidence_set");
        csv += join_csv_row(header);
        for (int i = 0; i < grid.size(); ++i) {
          std::vector<std::string> row;
          for (int j = 0; j < lambdas[static_cast<std::size_t>(i)].size(); ++j) {
            row.push_back(format_double(lambdas[static_cast<std::size_t>(i)][j]));
          }
          row.push_back(format_double(grid.log_wealth(i)));
          row.push_back(grid.mask()[static_cast<std::size_t>(i)] ? "1" : "0");
          csv += join_csv_row(row);
        }
        const std::string fname =
            (dir / ("surface_t" + std::to_string(t) + ".csv")).string();
        write_text_file(fname, csv);
        result.files_written.push_back(fname);
        ++next_snap;
      }
    }
  }

  // Running confidence band over the candidate grid.
  if (preset.running_band) {
    std::vector<FamilySpec> fams;
    std::vector<Vector> lambdas;
    for (const auto& lam : lambda_grid(preset.grid_lo, preset.grid_hi, preset.band_resolution)) {
      if (auto fam = preset.candidate_family(lam)) {
        fams.push_back(std::move(*fam));
        lambdas.push_back(lam);
      }
    }
    ConfidenceGrid grid(std::move(fams), preset.algo, preset.alpha);
    std::string csv;
    csv += join_csv_row({"t", "hull_lo", "hull_hi", "members", "covers_truth", "mask"});
    for (int t = 1; t <= preset.horizon; ++t) {
      grid.update(stream[static_cast<std::size_t>(t - 1)]);
      const GridHull hull = grid.hull();
      std::string mask;
      mask.reserve(static_cast<std::size_t>(grid.size()));
      bool covers = false;
      for (int i = 0; i < grid.size(); ++i) {
        mask += grid.mask()[static_cast<std::size_t>(i)] ? '1' : '0';
        if (grid.mask()[static_cast<std::size_t>(i)] &&
            (lambdas[static_cast<std::size_t>(i)] - preset.truth).norm() < 1e-12) {
          covers = true;
        }
      }
      csv += join_csv_row({std::to_string(t),
                           format_double(hull.members ? hull.lo[0] : std::nan("")),
                           format_double(hull.members ? hull.hi[0] : std::nan("")),
                           std::to_string(hull.members), covers ? "1" : "0", mask});
    }
    const std::string fname = (dir / "confseq.csv").string();
    write_text_file(fname, csv);
    result.files_written.push_back(fname);
  }

  // Resolved config + summary.
  const auto kv = preset_config(preset, seed, out_dir);
  const std::string config_file = (dir / "config.txt").string();
  write_text_file(config_file, render_config(kv));
  result.files_written.push_back(config_file);

  json summary;
  summary["preset"] = preset.name;
  summary["seed"] = seed;
  summary["alpha"] = preset.alpha;
  summary["horizon"] = preset.horizon;
  summary["strategy"] = algo_id(preset.algo);
  summary["functional"] = preset.fam.functional.str_id();
  summary["family"] = family_kind_id(preset.fam.kind);
  {
    json lam0 = json::array();
    for (int i = 0; i < preset.fam.lambda0.size(); ++i) lam0.push_back(preset.fam.lambda0[i]);
    summary["null_value"] = lam0;
    json tr = json::array();
    for (int i = 0; i < preset.truth.size(); ++i) tr.push_back(preset.truth[i]);
    summary["truth"] = tr;
  }
  summary["log_threshold"] = log_threshold;
  summary["rejected"] = rejected_at.has_value();
  if (rejected_at) summary["rejected_at"] = *rejected_at;
  summary["final_log_wealth"] = state.log_wealth;
  summary["running_max_log_wealth"] = state.running_max_log_wealth;
  summary["degenerate_rows"] = state.degenerate_rows;
  if (state.concavity_warning) {
    summary["concavity_warning"] =
        "family is not certified concave; FTL carries no regret guarantee";
  }
  {
    json cfg;
    for (const auto& [k, v] : kv) cfg[k] = v;
    summary["config"] = cfg;
  }
  {
    json files = json::array();
    for (const auto& f : result.files_written) files.push_back(f);
    summary["files"] = files;
  }
  const std::string summary_file = (dir / "summary.json").string();
  write_text_file(summary_file, summary.dump(2) + "\n");
  result.files_written.push_back(summary_file);
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo scenarios
// ---------------------------------------------------------------------------

std::vector<std::string> monte_carlo_scenarios() {
  return {"null_bounded_elic",  "null_bounded_ident", "null_subpsi_elic", "null_subpsi_ident",
          "alt_mean_sd_beta",   "alt_var_cvar_beta",  "alt_ar1",          "coverage_ar1"};
}

ScenarioSpec scenario_spec(const std::string& id) {
  ScenarioSpec s;
  if (id == "null_bounded_elic") {
    // Mean of Beta(2,5) data: the null value 2/7 is exact.
    s.gen = Generator::iid_beta(2, 5);
    Functional f = Functional::mean(Interval{0, 1});
    const Vector lambda0 = Vector::Constant(1, 2.0 / 7.0);
    s.fam = FamilySpec::bounded_elicitable(
        f, lambda0, fit_bounded_domain(FamilyKind::BoundedElicitable, f, lambda0));
    s.is_null = true;
    return s;
  }
  if (id == "null_bounded_ident") {
    // (mean, sd) of Beta(2,5): (2/7, sqrt(5/196)) exactly.
    s.gen = Generator::iid_beta(2, 5);
    Functional f = Functional::mean_sd(Interval{0, 1});
    const Vector lambda0 = (Vector(2) << 2.0 / 7.0, std::sqrt(5.0 / 196.0)).finished();
    s.fam = FamilySpec::bounded_identifiable(
        f, lambda0, fit_bounded_domain(FamilyKind::BoundedIdentifiable, f, lambda0));
    s.is_null = true;
    return s;
  }
  if (id == "null_subpsi_elic") {
    // Mean of N(0,1) data at the true mean; the score-gap family over
    // |lambda| <= 1/2 is sub-Gaussian with sigma_psi = 1/2.
    s.gen = Generator::iid_gaussian(0, 1);
    Functional f = Functional::mean(Interval{-12, 12});
    const Vector lambda0 = Vector::Zero(1);
    const ThetaDomain dom =
        ThetaDomain::box(Vector::Constant(1, -0.5), Vector::Constant(1, 0.5)).with_u(0.0, 1.0);
    s.fam = FamilySpec::subpsi_elicitable(f, lambda0, PsiSpec::gaussian(0.5),
                                          VarianceProcess::unit(), dom, UMode::Joint);
    s.is_null = true;
    return s;
  }
  if (id == "null_subpsi_ident") {
    // AR(1) tested at the true coefficient.
    s.gen = Generator::ar1(0.5, 0.8);
    Functional f = Functional::regression(1, Interval{-kAr1DataBound, kAr1DataBound});
    const Vector lambda0 = Vector::Constant(1, 0.5);
    s.fam = FamilySpec::subpsi_identifiable(
        f, lambda0, PsiSpec::gaussian(1.0), VarianceProcess::unit(),
        ThetaDomain::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)), UMode::Norm);
    s.is_null = true;
    return s;
  }
  if (id == "alt_mean_sd_beta" || id == "alt_var_cvar_beta" || id == "alt_ar1") {
    const std::string preset_name = id == "alt_mean_sd_beta"  ? "mean_sd_beta"
                                    : id == "alt_var_cvar_beta" ? "var_cvar_beta"
                                                                : "ar1_coeff";
    const ExperimentPreset p = ExperimentPreset::by_name(preset_name);
    s.gen = p.gen;
    s.fam = p.fam;
    s.is_null = false;
    return s;
  }
  if (id == "coverage_ar1") {
    const ExperimentPreset p = ExperimentPreset::by_name("ar1_coeff");
    s.gen = p.gen;
    s.fam = p.fam;
    s.coverage = true;
    s.coverage_truth = p.truth;
    s.band_lo = p.grid_lo;
    s.band_hi = p.grid_hi;
    s.band_resolution = p.band_resolution;
    return s;
  }
  std::string known;
  for (const auto& n : monte_carlo_scenarios()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown scenario '" + id + "' (known: " + known + ")");
}

Rng replication_rng(std::uint64_t master_seed, const std::string& scenario, std::uint64_t rep) {
  return Rng::derive(master_seed, hash64(scenario), rep);
}

// ---------------------------------------------------------------------------
// Monte Carlo harness
// ---------------------------------------------------------------------------

namespace {

struct RepResult {
  std::optional<int> rejected_at;
  bool covered = true;
  bool monotone = true;
  long degenerate_rows = 0;
  std::map<int, double> regret_over_t;  // filled for the regret sample only
};

}  // namespace

MonteCarloSummary monte_carlo(const MonteCarloConfig& config) {
  if (config.replications < 1) throw ParamError("need at least one replication");
  const ScenarioSpec spec = scenario_spec(config.scenario);
  const std::string stream_id = config.scenario + "/" + algo_id(config.algo);
  const double log_threshold = std::log(1.0 / config.alpha);

  std::vector<int> checkpoints = config.checkpoints;
  checkpoints.erase(std::remove_if(checkpoints.begin(), checkpoints.end(),
                                   [&](int c) { return c < 1 || c > config.horizon; }),
                    checkpoints.end());
  std::sort(checkpoints.begin(), checkpoints.end());

  std::vector<RepResult> results(static_cast<std::size_t>(config.replications));
  std::atomic<int> next_rep{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker_body = [&](int rep) {
    RepResult& out = results[static_cast<std::size_t>(rep)];
      Rng rng = replication_rng(config.master_seed, stream_id,
                                static_cast<std::uint64_t>(rep));
      const auto stream = spec.gen.generate(config.horizon, rng);

      if (spec.coverage) {
        std::vector<FamilySpec> fams;
        std::vector<Vector> lambdas;
        for (const auto& lam : lambda_grid(spec.band_lo, spec.band_hi, spec.band_resolution)) {
          fams.push_back(FamilySpec::subpsi_identifiable(
              spec.fam.functional, lam, *spec.fam.psi, spec.fam.variance, spec.fam.theta_domain,
              spec.fam.u_mode, spec.fam.fixed_u));
          lambdas.push_back(lam);
        }
        ConfidenceGrid grid(std::move(fams), config.algo, config.alpha);
        std::vector<uint8_t> prev_mask = grid.mask();
        for (const auto& x : stream) {
          grid.update(x);
          for (std::size_t i = 0; i < prev_mask.size(); ++i) {
            if (!prev_mask[i] && grid.mask()[i]) out.monotone = false;
          }
          prev_mask = grid.mask();
          bool covers = false;
          for (std::size_t i = 0; i < lambdas.size(); ++i) {
            if (grid.mask()[i] && (lambdas[i] - spec.coverage_truth).norm() < 1e-12) {
              covers = true;
              break;
            }
          }
          if (!covers) {
            out.covered = false;
            break;
          }
        }
        return;
      }

      const bool want_regret = rep < config.regret_sample && !checkpoints.empty();
      StrategyState state = StrategyState::make(config.algo, spec.fam);
      state.keep_history = false;
      std::size_t next_cp = 0;
      for (const auto& x : stream) {
        step(state, x);
        if (!out.rejected_at && state.log_wealth > log_threshold) {
          out.rejected_at = state.t;
          if (!want_regret) break;  // stop at rejection
        }
        if (want_regret && next_cp < checkpoints.size() && state.t == checkpoints[next_cp]) {
          out.regret_over_t[checkpoints[next_cp]] =
              regret(state) / static_cast<double>(state.t);
          ++next_cp;
        }
      }
      out.degenerate_rows = state.degenerate_rows;
  };

  const auto worker = [&]() {
    for (;;) {
      const int rep = next_rep.fetch_add(1);
      if (rep >= config.replications) return;
      try {
        worker_body(rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, config.replications));
  {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  MonteCarloSummary summary;
  summary.scenario = config.scenario;
  summary.algo = algo_id(config.algo);
  summary.replications = config.replications;
  summary.horizon = config.horizon;
  summary.alpha = config.alpha;
  summary.master_seed = config.master_seed;
  summary.binomial_margin =
      2.0 * std::sqrt(config.alpha * (1.0 - config.alpha) / config.replications);

  if (spec.coverage) {
    int covered = 0;
    bool monotone = true;
    for (const auto& r : results) {
      covered += r.covered ? 1 : 0;
      monotone = monotone && r.monotone;
    }
    summary.coverage_frequency = static_cast<double>(covered) / config.replications;
    summary.monotone_confidence_sets = monotone;
    return summary;
  }

  int rejected = 0;
  std::vector<int> rejection_times;
  for (const auto& r : results) {
    summary.degenerate_rows += r.degenerate_rows;
    if (r.rejected_at) {
      ++rejected;
      rejection_times.push_back(*r.rejected_at);
    }
  }
  summary.rejection_frequency = static_cast<double>(rejected) / config.replications;
  if (!rejection_times.empty()) {
    std::sort(rejection_times.begin(), rejection_times.end());
    summary.median_rejection_time =
        rejection_times[rejection_times.size() / 2];
  }
  for (int cp : checkpoints) {
    int count = 0;
    for (const auto& r : results) {
      if (r.rejected_at && *r.rejected_at <= cp) ++count;
    }
    summary.rejection_by_horizon[cp] = static_cast<double>(count) / config.replications;
  }
  if (!checkpoints.empty() && config.regret_sample > 0) {
    for (int cp : checkpoints) {
      double acc = 0;
      int n = 0;
      for (const auto& r : results) {
        const auto it = r.regret_over_t.find(cp);
        if (it != r.regret_over_t.end()) {
          acc += it->second;
          ++n;
        }
      }
      if (n > 0) summary.regret_over_t[cp] = acc / n;
    }
  }
  return summary;
}

}  // namespace avseq
