#include "avseq/tail_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace avseq {

PsiSpec PsiSpec::gaussian(double sigma) {
  if (!(sigma > 0)) throw ParamError("gaussian psi needs sigma > 0");
  PsiSpec s;
  s.kind = Kind::Gaussian;
  s.sigma = sigma;
  s.u_max = kInf;
  return s;
}

PsiSpec PsiSpec::hoeffding(double a, double b) {
  if (!(b > a)) throw ParamError("hoeffding psi needs b > a");
  PsiSpec s;
  s.kind = Kind::Hoeffding;
  s.a = a;
  s.b = b;
  s.u_max = kInf;
  return s;
}

PsiSpec PsiSpec::custom(std::vector<double> us, std::vector<double> vals, double u_max) {
  if (us.size() != vals.size() || us.size() < 2) throw ParamError("custom psi table too small");
  if (!(u_max > 0) || !std::isfinite(u_max)) throw ParamError("custom psi needs finite u_max > 0");
  if (us.front() != 0.0 || vals.front() != 0.0) throw ParamError("psi(0) must be 0");
  for (std::size_t i = 1; i < us.size(); ++i) {
    if (us[i] <= us[i - 1]) throw ParamError("psi table abscissae must increase");
    if (vals[i] < 0) throw ParamError("psi must be nonnegative");
  }
  // Spot-check convexity of the interpolant on the table.
  for (std::size_t i = 2; i < us.size(); ++i) {
    const double s0 = (vals[i - 1] - vals[i - 2]) / (us[i - 1] - us[i - 2]);
    const double s1 = (vals[i] - vals[i - 1]) / (us[i] - us[i - 1]);
    if (s1 + 1e-12 < s0) throw ParamError("psi table is not convex");
  }
  PsiSpec s;
  s.kind = Kind::CustomTable;
  s.table_u = std::move(us);
  s.table_v = std::move(vals);
  s.u_max = u_max;
  return s;
}

PsiSpec PsiSpec::parse(const std::string& id) {
  std::vector<std::string> parts;
  std::stringstream ss(id);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty psi id");
  try {
    if (parts[0] == "gaussian" && parts.size() == 2) return gaussian(std::stod(parts[1]));
    if (parts[0] == "hoeffding" && parts.size() == 3) {
      return hoeffding(std::stod(parts[1]), std::stod(parts[2]));
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("malformed numeric argument in psi id '" + id + "'");
  }
  throw ConfigError("unknown psi id '" + id + "' (known: gaussian:s, hoeffding:a:b)");
}

std::string PsiSpec::str_id() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Gaussian:
      os << "gaussian:" << sigma;
      break;
    case Kind::Hoeffding:
      os << "hoeffding:" << a << ":" << b;
      break;
    case Kind::CustomTable:
      os << "custom[" << table_u.size() << "]";
      break;
  }
  return os.str();
}

double psi_eval(const PsiSpec& spec, double u) {
  if (u < 0 || u >= spec.u_max) {
    throw RangeError("psi argument " + std::to_string(u) + " outside [0, u_max)");
  }
  switch (spec.kind) {
    case PsiSpec::Kind::Gaussian:
      return 0.5 * spec.sigma * spec.sigma * u * u;
    case PsiSpec::Kind::Hoeffding: {
      const double w = spec.b - spec.a;
      return u * u * w * w / 8.0;
    }
    case PsiSpec::Kind::CustomTable: {
      const auto& us = spec.table_u;
      const auto& vs = spec.table_v;
      if (u <= us.front()) return vs.front();
      if (u >= us.back()) {
        // extrapolate with the last slope (keeps convexity)
        const double s = (vs.back() - vs[vs.size() - 2]) / (us.back() - us[us.size() - 2]);
        return vs.back() + s * (u - us.back());
      }
      const auto it = std::upper_bound(us.begin(), us.end(), u);
      const std::size_t i = static_cast<std::size_t>(it - us.begin());
      const double w = (u - us[i - 1]) / (us[i] - us[i - 1]);
      return vs[i - 1] + w * (vs[i] - vs[i - 1]);
    }
  }
  throw RangeError("unreachable psi kind");
}

namespace {

// Golden-section maximization of a concave function on [lo, hi].
double golden_max(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = fn(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return std::max({fn(xm), f1, f2, fn(lo)});
}

}  // namespace

double psi_conjugate(const PsiSpec& spec, double c) {
  if (!std::isfinite(c)) throw ParamError("psi_conjugate needs finite c");
  if (spec.kind == PsiSpec::Kind::Gaussian) {
    return c <= 0 ? 0.0 : c * c / (2.0 * spec.sigma * spec.sigma);
  }
  if (c <= 0) return 0.0;  // psi >= 0 and psi(0) = 0: supremum at u = 0
  const auto objective = [&](double u) { return u * c - psi_eval(spec, u); };
  // Bracket the maximizer: expand until the objective starts decreasing or
  // u_max is hit.
  double hi = 1.0;
  const double cap = std::isfinite(spec.u_max) ? std::nexttoward(spec.u_max, 0.0) : kInf;
  while (hi < cap && objective(hi * 2.0 < cap ? hi * 2.0 : cap) > objective(hi)) {
    hi = hi * 2.0 < cap ? hi * 2.0 : cap;
    if (hi >= cap) break;
    if (hi > 1e12) throw RangeError("psi_conjugate bracket diverged; psi grows too slowly");
  }
  const double upper = std::min(2.0 * hi, cap);
  return golden_max(objective, 0.0, upper, 1e-10);
}

VarianceProcess VarianceProcess::custom(std::vector<double> v) {
  for (double x : v) {
    if (x < 0) throw ParamError("variance increments must be nonnegative");
  }
  VarianceProcess p;
  p.rule = Rule::CustomSequence;
  p.values = std::move(v);
  return p;
}

double VarianceProcess::at(int step) const {
  if (step < 1) throw RangeError("variance process step must be >= 1");
  if (rule == Rule::UnitPerStep) return 1.0;
  if (step > static_cast<int>(values.size())) {
    throw RangeError("custom variance sequence exhausted at step " + std::to_string(step));
  }
  return values[static_cast<std::size_t>(step - 1)];
}

DiscreteModel DiscreteModel::iid(std::vector<DiscreteAtom> atoms, int steps) {
  DiscreteModel m;
  m.steps = steps;
  m.conditional = [atoms = std::move(atoms)](int, std::span<const int>) { return atoms; };
  return m;
}

DiscreteModel DiscreteModel::per_step(std::vector<std::vector<DiscreteAtom>> by_step) {
  DiscreteModel m;
  m.steps = static_cast<int>(by_step.size());
  m.conditional = [by_step = std::move(by_step)](int step, std::span<const int>) {
    return by_step[static_cast<std::size_t>(step - 1)];
  };
  return m;
}

namespace {

constexpr long kNodeBudget = 2'000'000;

void check_atoms(const std::vector<DiscreteAtom>& atoms) {
  if (atoms.empty() || atoms.size() > 20) {
    throw SizeError("discrete model must have 1..20 atoms per step");
  }
  double sum = 0;
  for (const auto& a : atoms) {
    if (a.prob < 0) throw ParamError("negative atom probability");
    sum += a.prob;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParamError("atom probabilities must sum to 1");
}

struct EnumCtx {
  const DiscreteModel* model;
  const PsiSpec* spec;
  const VarianceProcess* variance;
  std::span<const double> u_grid;
  SubPsiReport* report;
  std::vector<int> prefix;
};

void enumerate_nodes(EnumCtx& ctx, int step) {
  if (step > ctx.model->steps) return;
  if (++ctx.report->nodes_checked > kNodeBudget) {
    throw SizeError("discrete model enumeration exceeded the node budget");
  }
  const auto atoms = ctx.model->conditional(step, ctx.prefix);
  check_atoms(atoms);
  const double dv = ctx.variance->at(step);

  double drift = 0.0;
  for (const auto& a : atoms) drift += a.prob * a.dy;
  ctx.report->max_conditional_drift = std::max(ctx.report->max_conditional_drift, drift);

  for (double u : ctx.u_grid) {
    const double comp = dv * psi_eval(*ctx.spec, u);
    double e = 0.0;
    for (const auto& a : atoms) e += a.prob * std::exp(u * a.dy - comp);
    ctx.report->max_conditional_expectation =
        std::max(ctx.report->max_conditional_expectation, e);
    if (e > 1.0 + 1e-12) {
      if (ctx.report->violations.size() < 32) {
        ctx.report->violations.push_back(
            SubPsiViolation{step, ctx.prefix, u, e});
      }
    }
  }

  for (int i = 0; i < static_cast<int>(atoms.size()); ++i) {
    ctx.prefix.push_back(i);
    enumerate_nodes(ctx, step + 1);
    ctx.prefix.pop_back();
  }
}

}  // namespace

SubPsiReport verify_sub_psi_discrete(const DiscreteModel& model, const PsiSpec& spec,
                                     const VarianceProcess& variance,
                                     std::span<const double> u_grid) {
  if (model.steps < 1 || model.steps > 10) {
    throw SizeError("discrete model must have 1..10 steps");
  }
  if (!model.conditional) throw ParamError("discrete model has no conditional law");
  SubPsiReport report;
  EnumCtx ctx{&model, &spec, &variance, u_grid, &report, {}};
  enumerate_nodes(ctx, 1);
  report.passes = report.violations.empty() &&
                  report.max_conditional_expectation <= 1.0 + 1e-12;
  return report;
}

}  // namespace avseq
