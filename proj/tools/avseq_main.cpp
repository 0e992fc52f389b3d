// avseq: anytime-valid sequential tests and confidence sequences for
// elicitable and identifiable functionals.
//
// Subcommands:
//   test        run one Ville-threshold test on generated or file data
//   confseq     run a grid-inverted confidence sequence (1-d grids)
//   experiment  reproduce a named experiment preset (figure-backing bundle)
//   montecarlo  replicate a scenario and summarize rejection/coverage rates

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avseq/io.hpp"
#include "avseq/sequential.hpp"
#include "avseq/simlab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace avseq;

namespace {

// ---------------------------------------------------------------------------
// Resolved configuration: defaults < config file < command line.
// ---------------------------------------------------------------------------

struct Resolver {
  std::map<std::string, std::string> file_kv;
  std::map<std::string, std::string> resolved;

  void load_file(const std::string& path) {
    if (!path.empty()) file_kv = load_config_file(path);
  }
  std::string get(const std::string& key, const std::string& fallback, bool cli_set,
                  const std::string& cli_value) {
    std::string v = fallback;
    const auto it = file_kv.find(key);
    if (it != file_kv.end()) v = it->second;
    if (cli_set) v = cli_value;
    resolved[key] = v;
    return v;
  }
};

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("option " + key + ": '" + v + "' is not a number");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("option " + key + ": '" + v + "' is not an integer");
  }
}

Vector parse_vector(const std::string& key, const std::string& v) {
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(to_double(key, item));
  if (vals.empty()) throw ConfigError("option " + key + " is empty");
  Vector out(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<int>(i)] = vals[i];
  return out;
}

void validate_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must be in (0,1)");
}

// ---------------------------------------------------------------------------
// CSV / stdin observation sources.
// ---------------------------------------------------------------------------

bool numeric_row(const std::string& line) {
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      std::stod(cell, &pos);
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

Observation parse_row(const std::string& line, int expected_dim, long lineno) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(cell, &pos);
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) throw std::invalid_argument(cell);
      vals.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError("malformed CSV cell '" + cell + "' on line " + std::to_string(lineno));
    }
  }
  if (static_cast<int>(vals.size()) != expected_dim) {
    throw ConfigError("line " + std::to_string(lineno) + " has " +
                      std::to_string(vals.size()) + " columns, expected " +
                      std::to_string(expected_dim));
  }
  Vector v(expected_dim);
  for (int i = 0; i < expected_dim; ++i) v[i] = vals[static_cast<std::size_t>(i)];
  return Observation(std::move(v));
}

// Feeds observations one at a time; never buffers the stream.
void for_each_observation(std::istream& in, int dim,
                          const std::function<bool(const Observation&)>& fn) {
  std::string line;
  long lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && !numeric_row(line)) {  // optional header
      first = false;
      continue;
    }
    first = false;
    if (!fn(parse_row(line, dim, lineno))) return;
  }
}

// ---------------------------------------------------------------------------
// Family construction from the resolved config.
// ---------------------------------------------------------------------------

FamilySpec build_family(const std::map<std::string, std::string>& kv) {
  const auto need = [&](const std::string& key) -> std::string {
    const auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) throw ConfigError("missing option " + key);
    return it->second;
  };
  const auto get = [&](const std::string& key, const std::string& dflt) -> std::string {
    const auto it = kv.find(key);
    return it == kv.end() || it->second.empty() ? dflt : it->second;
  };

  Functional f = Functional::parse(need("functional"));
  if (!get("data_range", "").empty()) {
    const Vector r = parse_vector("data_range", get("data_range", ""));
    if (r.size() != 2) throw ConfigError("data_range needs lo,hi");
    // Rebuild through the factory so the parameter box tracks the range.
    const Interval range{r[0], r[1]};
    switch (f.id) {
      case FunctionalId::Mean:
        f = Functional::mean(range);
        break;
      case FunctionalId::Quantile:
        f = Functional::quantile(f.alpha, range);
        break;
      case FunctionalId::Regression:
        f = Functional::regression(f.k, range);
        break;
      case FunctionalId::MeanSd:
        f = Functional::mean_sd(range);
        break;
      case FunctionalId::VarCvar:
        f = Functional::var_cvar(f.alpha, range);
        break;
    }
  }
  const Vector lambda0 = parse_vector("null", need("null"));
  const FamilyKind kind = parse_family_kind(need("family"));
  const double scale = to_double("theta_scale", get("theta_scale", "0.5"));

  switch (kind) {
    case FamilyKind::BoundedElicitable:
      return FamilySpec::bounded_elicitable(f, lambda0,
                                            fit_bounded_domain(kind, f, lambda0, scale));
    case FamilyKind::BoundedIdentifiable:
      return FamilySpec::bounded_identifiable(f, lambda0,
                                              fit_bounded_domain(kind, f, lambda0, scale));
    case FamilyKind::SubPsiElicitable: {
      const PsiSpec psi = PsiSpec::parse(get("psi", "gaussian:1.0"));
      const double hw = to_double("theta_halfwidth", get("theta_halfwidth", "0.5"));
      const double u_cap = to_double(
          "u_cap", get("u_cap", format_double(std::min(1.0, psi.u_max / 2.0))));
      Vector lo = lambda0.array() - hw;
      Vector hi = lambda0.array() + hw;
      for (int i = 0; i < f.k; ++i) {
        lo[i] = std::max(lo[i], f.lambda_lo[i]);
        hi[i] = std::min(hi[i], f.lambda_hi[i]);
      }
      return FamilySpec::subpsi_elicitable(f, lambda0, psi, VarianceProcess::unit(),
                                           ThetaDomain::box(lo, hi).with_u(0.0, u_cap),
                                           UMode::Joint);
    }
    case FamilyKind::SubPsiIdentifiable: {
      const PsiSpec psi = PsiSpec::parse(get("psi", "gaussian:1.0"));
      const double hw = to_double("theta_halfwidth", get("theta_halfwidth", "1.0"));
      const ThetaDomain dom =
          ThetaDomain::box(Vector::Constant(f.k, -hw), Vector::Constant(f.k, hw));
      const std::string mode = get("u_mode", "norm");
      if (mode == "norm") {
        return FamilySpec::subpsi_identifiable(f, lambda0, psi, VarianceProcess::unit(), dom,
                                               UMode::Norm);
      }
      if (mode == "fixed") {
        return FamilySpec::subpsi_identifiable(f, lambda0, psi, VarianceProcess::unit(), dom,
                                               UMode::Fixed, to_double("u", get("u", "1.0")));
      }
      if (mode == "joint") {
        const double u_cap = to_double(
            "u_cap", get("u_cap", format_double(std::min(1.0, psi.u_max / 2.0))));
        return FamilySpec::subpsi_identifiable(f, lambda0, psi, VarianceProcess::unit(),
                                               dom.with_u(0.0, u_cap), UMode::Joint);
      }
      throw ConfigError("u_mode must be norm, fixed or joint");
    }
  }
  throw ConfigError("unreachable family kind");
}

void write_summary_and_config(const fs::path& dir, const json& summary,
                              const std::map<std::string, std::string>& resolved) {
  write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
  write_text_file((dir / "config.txt").string(), render_config(resolved));
}

json outcome_json(const TestOutcome& out) {
  json j;
  j["alpha"] = out.alpha;
  j["log_threshold"] = out.log_threshold;
  j["rejected"] = out.rejected();
  if (out.rejected_at) j["rejected_at"] = *out.rejected_at;
  j["running_max_log_wealth"] = out.running_max_log_wealth;
  j["final_log_wealth"] = out.final_log_wealth;
  j["steps_consumed"] = out.steps_consumed;
  j["degenerate_rows"] = out.degenerate_rows;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommand: test
// ---------------------------------------------------------------------------

struct TestArgs {
  std::string config_file, preset, functional, null_value, family, psi, strategy = "ftl";
  std::string data, out = "runs", data_range, u_mode, theta_scale, theta_halfwidth, u_cap, u;
  double alpha = 0.05;
  long seed = 1, horizon = 500, regret_every = 0;
  bool continue_after = false;
  bool jsonl = false;
};

int run_cmd_test(const TestArgs& a, const std::map<std::string, bool>& cli_set) {
  Resolver r;
  r.load_file(a.config_file);
  const auto s = [&](const std::string& key, const std::string& dflt, const std::string& val) {
    return r.get(key, dflt, cli_set.count(key) ? cli_set.at(key) : false, val);
  };
  const std::string preset_name = s("preset", "", a.preset);
  const double alpha = to_double("alpha", s("alpha", "0.05", format_double(a.alpha)));
  validate_alpha(alpha);
  const long seed = to_long("seed", s("seed", "1", std::to_string(a.seed)));
  const long horizon = to_long("horizon", s("horizon", "500", std::to_string(a.horizon)));
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  const std::string data = s("data", "", a.data);
  const std::string out_root = s("out", "runs", a.out);
  const std::string strategy = s("strategy", "ftl", a.strategy);
  const bool cont = s("continue", "0", a.continue_after ? "1" : "0") == "1";
  r.resolved["command"] = "test";

  FamilySpec fam;
  Generator gen;
  bool has_gen = false;
  std::string name = "custom";
  if (!preset_name.empty()) {
    ExperimentPreset p = ExperimentPreset::by_name(preset_name);
    fam = p.fam;
    gen = p.gen;
    has_gen = true;
    name = preset_name;
  } else {
    s("functional", "", a.functional);
    s("null", "", a.null_value);
    s("family", "", a.family);
    s("psi", "", a.psi);
    s("data_range", "", a.data_range);
    s("u_mode", "", a.u_mode);
    s("theta_scale", "", a.theta_scale);
    s("theta_halfwidth", "", a.theta_halfwidth);
    s("u_cap", "", a.u_cap);
    s("u", "", a.u);
    std::map<std::string, std::string> kv = r.resolved;
    for (auto it = kv.begin(); it != kv.end();) {
      it = it->second.empty() ? kv.erase(it) : std::next(it);
    }
    fam = build_family(kv);
  }
  const Algo algo = parse_algo(strategy);

  const fs::path dir = fs::path(out_root) / "test" / name / std::to_string(seed);
  fs::create_directories(dir);

  TestRunner runner(fam, algo, alpha, /*stop_at_rejection=*/!cont,
                    /*gradient_bound=*/std::nullopt, /*record_path=*/false);
  // Rows are streamed straight to disk; only FTLP needs the raw history for
  // its empirical predictive measure.
  runner.state().keep_history = algo == Algo::Ftlp;

  std::ofstream path_out(dir / "path.csv", std::ios::binary);
  path_out << "t,log_wealth,running_max_log_wealth,log_threshold,rejected\n";
  const long regret_every = to_long("regret_every", s("regret_every", "0",
                                                      std::to_string(a.regret_every)));
  const auto emit_row = [&](const TestRunner& tr) {
    const auto& st = tr.state();
    path_out << st.t << ',' << format_double(st.log_wealth) << ','
             << format_double(st.running_max_log_wealth) << ','
             << format_double(std::log(1.0 / alpha)) << ','
             << (tr.outcome().rejected() ? '1' : '0') << '\n';
    if (a.jsonl) {
      json row;
      row["t"] = st.t;
      json theta = json::array();
      for (int i = 0; i < st.theta_next.size(); ++i) theta.push_back(st.theta_next[i]);
      row["theta"] = theta;
      row["log_wealth"] = st.log_wealth;
      if (regret_every > 0 && st.t % regret_every == 0) row["regret"] = regret(st);
      row["rejected"] = tr.outcome().rejected();
      std::cout << row.dump() << "\n";
    }
  };

  if (!data.empty()) {
    const int dim = fam.functional.obs_dim;
    long fed = 0;
    const auto feed = [&](const Observation& obs) {
      const bool more = runner.feed(obs);
      emit_row(runner);
      return more && ++fed < horizon;
    };
    if (data == "-") {
      for_each_observation(std::cin, dim, feed);
    } else {
      std::ifstream in(data);
      if (!in) throw ConfigError("cannot open data file '" + data + "'");
      for_each_observation(in, dim, feed);
    }
  } else {
    if (!has_gen) throw ConfigError("no data source: give --preset or --data");
    Rng rng = replication_rng(static_cast<std::uint64_t>(seed), "preset/" + name, 0);
    const auto stream = gen.generate(static_cast<int>(horizon), rng);
    for (const auto& x : stream) {
      const bool more = runner.feed(x);
      emit_row(runner);
      if (!more) break;
    }
  }

  const TestOutcome out = runner.outcome();
  json summary = outcome_json(out);
  summary["name"] = name;
  summary["seed"] = seed;
  summary["functional"] = fam.functional.str_id();
  summary["family"] = family_kind_id(fam.kind);
  summary["strategy"] = algo_id(algo);
  if (runner.state().concavity_warning) {
    summary["concavity_warning"] =
        "family is not certified concave; FTL carries no regret guarantee";
  }
  json cfg;
  for (const auto& [k, v] : r.resolved) cfg[k] = v;
  summary["config"] = cfg;
  write_summary_and_config(dir, summary, r.resolved);
  std::cerr << "wrote " << (dir / "summary.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Subcommand: confseq
// ---------------------------------------------------------------------------

struct ConfseqArgs {
  std::string config_file, preset, functional, family, psi, strategy = "ftl";
  std::string data, out = "runs", grid = "0:1:101", data_range, u_mode, theta_halfwidth;
  double alpha = 0.05;
  long seed = 1, horizon = 1000;
  bool jsonl = false;
};

int run_cmd_confseq(const ConfseqArgs& a, const std::map<std::string, bool>& cli_set) {
  Resolver r;
  r.load_file(a.config_file);
  const auto s = [&](const std::string& key, const std::string& dflt, const std::string& val) {
    return r.get(key, dflt, cli_set.count(key) ? cli_set.at(key) : false, val);
  };
  const std::string preset_name = s("preset", "", a.preset);
  const double alpha = to_double("alpha", s("alpha", "0.05", format_double(a.alpha)));
  validate_alpha(alpha);
  const long seed = to_long("seed", s("seed", "1", std::to_string(a.seed)));
  const long horizon = to_long("horizon", s("horizon", "1000", std::to_string(a.horizon)));
  const std::string grid_spec = s("grid", "0:1:101", a.grid);
  const std::string out_root = s("out", "runs", a.out);
  const std::string strategy = s("strategy", "ftl", a.strategy);
  r.resolved["command"] = "confseq";

  // Grid spec lo:hi:resolution (1-d candidate grids).
  double glo, ghi;
  int gres;
  {
    std::vector<std::string> parts;
    std::stringstream ss(grid_spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("grid must be lo:hi:resolution");
    glo = to_double("grid", parts[0]);
    ghi = to_double("grid", parts[1]);
    gres = static_cast<int>(to_long("grid", parts[2]));
    if (gres < 1) throw ConfigError("grid resolution must be >= 1");
  }

  if (preset_name.empty()) throw ConfigError("confseq needs --preset (ar1_coeff)");
  ExperimentPreset p = ExperimentPreset::by_name(preset_name);
  if (p.fam.functional.k != 1) {
    throw ConfigError("confseq supports one-dimensional functionals; use `experiment` for surfaces");
  }
  const Algo algo = parse_algo(strategy);

  std::vector<FamilySpec> fams;
  std::vector<Vector> lambdas;
  for (const auto& lam : lambda_grid(Vector::Constant(1, glo), Vector::Constant(1, ghi), gres)) {
    if (auto fam = p.candidate_family(lam)) {
      fams.push_back(std::move(*fam));
      lambdas.push_back(lam);
    }
  }
  ConfidenceGrid grid(std::move(fams), algo, alpha);

  Rng rng = replication_rng(static_cast<std::uint64_t>(seed), "preset/" + p.name, 0);
  const auto stream = p.gen.generate(static_cast<int>(horizon), rng);

  const fs::path dir = fs::path(out_root) / "confseq" / p.name / std::to_string(seed);
  fs::create_directories(dir);
  std::ofstream csv(dir / "confseq.csv", std::ios::binary);
  csv << "t,hull_lo,hull_hi,members,mask\n";
  for (const auto& x : stream) {
    grid.update(x);
    const GridHull h = grid.hull();
    std::string mask;
    for (int i = 0; i < grid.size(); ++i) mask += grid.mask()[static_cast<std::size_t>(i)] ? '1' : '0';
    csv << grid.t() << ',' << format_double(h.members ? h.lo[0] : std::nan("")) << ','
        << format_double(h.members ? h.hi[0] : std::nan("")) << ',' << h.members << ',' << mask
        << '\n';
    if (a.jsonl) {
      json row;
      row["t"] = grid.t();
      json wealth = json::array();
      for (int i = 0; i < grid.size(); ++i) wealth.push_back(grid.log_wealth(i));
      row["log_wealth"] = wealth;
      row["C_t_mask"] = mask;
      std::cout << row.dump() << "\n";
    }
  }
  csv.close();

  json summary;
  summary["preset"] = p.name;
  summary["seed"] = seed;
  summary["alpha"] = alpha;
  summary["horizon"] = horizon;
  summary["grid"] = grid_spec;
  summary["strategy"] = algo_id(algo);
  summary["final_members"] = grid.hull().members;
  json cfg;
  for (const auto& [k, v] : r.resolved) cfg[k] = v;
  summary["config"] = cfg;
  write_summary_and_config(dir, summary, r.resolved);
  std::cerr << "wrote " << (dir / "confseq.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Subcommand: experiment
// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string config_file, preset, out = "runs", strategy;
  double alpha = 0.05;
  long seed = 1, horizon = 0;
};

int run_cmd_experiment(const ExperimentArgs& a, const std::map<std::string, bool>& cli_set) {
  Resolver r;
  r.load_file(a.config_file);
  const auto s = [&](const std::string& key, const std::string& dflt, const std::string& val) {
    return r.get(key, dflt, cli_set.count(key) ? cli_set.at(key) : false, val);
  };
  const std::string preset_name = s("preset", "", a.preset);
  if (preset_name.empty()) throw ConfigError("experiment needs --preset");
  ExperimentPreset p = ExperimentPreset::by_name(preset_name);
  p.alpha = to_double("alpha", s("alpha", format_double(p.alpha), format_double(a.alpha)));
  validate_alpha(p.alpha);
  const long seed = to_long("seed", s("seed", "1", std::to_string(a.seed)));
  const long horizon =
      to_long("horizon", s("horizon", std::to_string(p.horizon), std::to_string(a.horizon)));
  if (horizon >= 1) p.horizon = static_cast<int>(horizon);
  const std::string strategy = s("strategy", algo_id(p.algo), a.strategy);
  p.algo = parse_algo(strategy);
  const std::string out_root = s("out", "runs", a.out);

  const PresetResult res = run_preset(p, static_cast<std::uint64_t>(seed), out_root);
  std::cerr << "preset " << p.name << " seed " << seed
            << (res.outcome.rejected() ? " rejected at t=" + std::to_string(*res.outcome.rejected_at)
                                       : " did not reject")
            << "; " << res.files_written.size() << " files under " << out_root << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Subcommand: montecarlo
// ---------------------------------------------------------------------------

struct MonteCarloArgs {
  std::string config_file, scenario, strategy = "ftl", out = "mc_summary.json", checkpoints;
  double alpha = 0.05;
  long seed = 1, horizon = 500, reps = 200, threads = 0;
};

int run_cmd_montecarlo(const MonteCarloArgs& a, const std::map<std::string, bool>& cli_set) {
  Resolver r;
  r.load_file(a.config_file);
  const auto s = [&](const std::string& key, const std::string& dflt, const std::string& val) {
    return r.get(key, dflt, cli_set.count(key) ? cli_set.at(key) : false, val);
  };
  MonteCarloConfig cfg;
  cfg.scenario = s("scenario", "", a.scenario);
  if (cfg.scenario.empty()) {
    std::string known;
    for (const auto& n : monte_carlo_scenarios()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("montecarlo needs --scenario (known: " + known + ")");
  }
  cfg.algo = parse_algo(s("strategy", "ftl", a.strategy));
  cfg.alpha = to_double("alpha", s("alpha", "0.05", format_double(a.alpha)));
  validate_alpha(cfg.alpha);
  cfg.replications = static_cast<int>(to_long("reps", s("reps", "200", std::to_string(a.reps))));
  if (cfg.replications < 1) throw ConfigError("reps must be >= 1");
  cfg.horizon = static_cast<int>(to_long("horizon", s("horizon", "500", std::to_string(a.horizon))));
  cfg.master_seed = static_cast<std::uint64_t>(to_long("seed", s("seed", "1", std::to_string(a.seed))));
  cfg.threads = static_cast<int>(to_long("threads", s("threads", "0", std::to_string(a.threads))));
  const std::string cps = s("checkpoints", "", a.checkpoints);
  if (!cps.empty()) {
    std::stringstream ss(cps);
    std::string item;
    while (std::getline(ss, item, ',')) {
      cfg.checkpoints.push_back(static_cast<int>(to_long("checkpoints", item)));
    }
  }
  const std::string out_file = s("out", "mc_summary.json", a.out);
  r.resolved["command"] = "montecarlo";

  const MonteCarloSummary sum = monte_carlo(cfg);

  json j;
  j["scenario"] = sum.scenario;
  j["strategy"] = sum.algo;
  j["replications"] = sum.replications;
  j["horizon"] = sum.horizon;
  j["alpha"] = sum.alpha;
  j["master_seed"] = sum.master_seed;
  j["binomial_margin"] = sum.binomial_margin;
  if (sum.coverage_frequency) {
    j["coverage_frequency"] = *sum.coverage_frequency;
    j["monotone_confidence_sets"] = sum.monotone_confidence_sets;
  } else {
    j["rejection_frequency"] = sum.rejection_frequency;
    if (sum.median_rejection_time) j["median_rejection_time"] = *sum.median_rejection_time;
    if (!sum.rejection_by_horizon.empty()) {
      json by;
      for (const auto& [t, f] : sum.rejection_by_horizon) by[std::to_string(t)] = f;
      j["rejection_by_horizon"] = by;
    }
    if (!sum.regret_over_t.empty()) {
      json rt;
      for (const auto& [t, v] : sum.regret_over_t) rt[std::to_string(t)] = v;
      j["regret_over_t"] = rt;
    }
    j["degenerate_rows"] = sum.degenerate_rows;
  }
  json cfgj;
  for (const auto& [k, v] : r.resolved) cfgj[k] = v;
  j["config"] = cfgj;

  write_text_file(out_file, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime-valid sequential testing for elicitable functionals"};
  app.require_subcommand(1);

  TestArgs ta;
  ConfseqArgs ca;
  ExperimentArgs ea;
  MonteCarloArgs ma;

  auto* t = app.add_subcommand("test", "run one sequential test");
  t->add_option("--config", ta.config_file, "flat key=value config file");
  t->add_option("--preset", ta.preset, "experiment preset name");
  t->add_option("--functional", ta.functional, "functional id (mean, quantile:0.05, ...)");
  t->add_option("--null", ta.null_value, "null value lambda0 (comma separated)");
  t->add_option("--family", ta.family, "family kind id");
  t->add_option("--psi", ta.psi, "psi id (gaussian:1.0, hoeffding:0:1)");
  t->add_option("--strategy", ta.strategy, "ftl | ftrl | ogd | ftlp");
  t->add_option("--alpha", ta.alpha, "level in (0,1)");
  t->add_option("--seed", ta.seed, "generator seed");
  t->add_option("--horizon", ta.horizon, "maximum stream length");
  t->add_option("--data", ta.data, "CSV path or - for stdin (default: preset generator)");
  t->add_option("--data-range", ta.data_range, "declared data range lo,hi");
  t->add_option("--u-mode", ta.u_mode, "sub-psi parametrization: norm | fixed | joint");
  t->add_option("--theta-scale", ta.theta_scale, "bounded-domain fit scale in (0,1]");
  t->add_option("--theta-halfwidth", ta.theta_halfwidth, "sub-psi bet box half-width");
  t->add_option("--u-cap", ta.u_cap, "joint parametrization u upper bound");
  t->add_option("--u", ta.u, "fixed-u value");
  t->add_option("--out", ta.out, "output root directory");
  t->add_option("--regret-every", ta.regret_every, "attach regret to every Nth JSON row");
  t->add_flag("--continue", ta.continue_after, "keep consuming after rejection");
  t->add_flag("--jsonl", ta.jsonl, "stream per-step JSON lines to stdout");

  auto* c = app.add_subcommand("confseq", "grid-inverted confidence sequence");
  c->add_option("--config", ca.config_file, "flat key=value config file");
  c->add_option("--preset", ca.preset, "experiment preset name (1-d functional)");
  c->add_option("--grid", ca.grid, "candidate grid lo:hi:resolution");
  c->add_option("--strategy", ca.strategy, "ftl | ftrl | ogd | ftlp");
  c->add_option("--alpha", ca.alpha, "level in (0,1)");
  c->add_option("--seed", ca.seed, "generator seed");
  c->add_option("--horizon", ca.horizon, "stream length");
  c->add_option("--out", ca.out, "output root directory");
  c->add_flag("--jsonl", ca.jsonl, "stream per-step JSON lines to stdout");

  auto* e = app.add_subcommand("experiment", "figure-backing preset bundle");
  e->add_option("--config", ea.config_file, "flat key=value config file");
  e->add_option("--preset", ea.preset, "mean_sd_beta | var_cvar_beta | ar1_coeff");
  e->add_option("--alpha", ea.alpha, "level in (0,1)");
  e->add_option("--seed", ea.seed, "generator seed");
  e->add_option("--horizon", ea.horizon, "override preset horizon");
  e->add_option("--strategy", ea.strategy, "override preset strategy");
  e->add_option("--out", ea.out, "output root directory");

  auto* m = app.add_subcommand("montecarlo", "replicate a scenario");
  m->add_option("--config", ma.config_file, "flat key=value config file");
  m->add_option("--scenario", ma.scenario, "scenario id");
  m->add_option("--strategy", ma.strategy, "ftl | ftrl | ogd | ftlp");
  m->add_option("--alpha", ma.alpha, "level in (0,1)");
  m->add_option("--seed", ma.seed, "master seed");
  m->add_option("--horizon", ma.horizon, "per-replication stream length");
  m->add_option("--reps", ma.reps, "replication count");
  m->add_option("--threads", ma.threads, "worker threads (0 = hardware)");
  m->add_option("--checkpoints", ma.checkpoints, "comma-separated sub-horizons");
  m->add_option("--out", ma.out, "summary JSON path");

  CLI11_PARSE(app, argc, argv);

  const auto cli_flags = [](CLI::App* sub) {
    std::map<std::string, bool> set;
    for (const auto* opt : sub->get_options()) {
      std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames()[0];
      for (auto& ch : name) {
        if (ch == '-') ch = '_';
      }
      if (!name.empty()) set[name] = opt->count() > 0;
    }
    return set;
  };

  try {
    if (t->parsed()) return run_cmd_test(ta, cli_flags(t));
    if (c->parsed()) return run_cmd_confseq(ca, cli_flags(c));
    if (e->parsed()) return run_cmd_experiment(ea, cli_flags(e));
    if (m->parsed()) return run_cmd_montecarlo(ma, cli_flags(m));
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
