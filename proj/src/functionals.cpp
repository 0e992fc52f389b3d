#include "avseq/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace avseq {

namespace {

Vector constant_vec(int n, double v) { return Vector::Constant(n, v); }

void check_dims(const Functional& f, const Vector& lambda, const Observation& x) {
  if (static_cast<int>(lambda.size()) != f.k) {
    throw DomainError("lambda has dimension " + std::to_string(lambda.size()) +
                      ", functional expects " + std::to_string(f.k));
  }
  if (x.dim() != f.obs_dim) {
    throw InvalidObservation("observation has dimension " + std::to_string(x.dim()) +
                             ", functional expects " + std::to_string(f.obs_dim));
  }
}

}  // namespace

Functional Functional::mean(Interval data_range) {
  Functional f;
  f.id = FunctionalId::Mean;
  f.k = 1;
  f.obs_dim = 1;
  f.has_score = true;
  f.has_ident = true;
  f.data_range = data_range;
  // The mean of range-constrained data lies in the range itself.
  f.lambda_lo = constant_vec(1, data_range.lo);
  f.lambda_hi = constant_vec(1, data_range.hi);
  return f;
}

Functional Functional::quantile(double alpha, Interval data_range) {
  if (!(alpha > 0 && alpha < 1)) throw ParamError("quantile level must be in (0,1)");
  Functional f;
  f.id = FunctionalId::Quantile;
  f.alpha = alpha;
  f.k = 1;
  f.obs_dim = 1;
  f.has_score = true;
  f.has_ident = true;
  f.data_range = data_range;
  f.lambda_lo = constant_vec(1, data_range.lo);
  f.lambda_hi = constant_vec(1, data_range.hi);
  return f;
}

Functional Functional::regression(int k, Interval data_range) {
  if (k < 1) throw ParamError("regression order must be >= 1");
  Functional f;
  f.id = FunctionalId::Regression;
  f.k = k;
  f.obs_dim = k + 1;
  f.has_score = true;
  f.has_ident = true;
  f.data_range = data_range;
  f.lambda_lo = constant_vec(k, -kInf);
  f.lambda_hi = constant_vec(k, kInf);
  return f;
}

Functional Functional::mean_sd(Interval data_range) {
  Functional f;
  f.id = FunctionalId::MeanSd;
  f.k = 2;
  f.obs_dim = 1;
  f.has_score = false;
  f.has_ident = true;
  f.data_range = data_range;
  const double lo = std::isfinite(data_range.lo) ? data_range.lo : -kInf;
  const double hi = std::isfinite(data_range.hi) ? data_range.hi : kInf;
  f.lambda_lo = (Vector(2) << lo, 0.0).finished();
  f.lambda_hi = (Vector(2) << hi, std::isfinite(hi - lo) ? hi - lo : kInf).finished();
  return f;
}

Functional Functional::var_cvar(double alpha0, Interval data_range) {
  if (!(alpha0 > 0 && alpha0 < 1)) throw ParamError("var_cvar level must be in (0,1)");
  Functional f;
  f.id = FunctionalId::VarCvar;
  f.alpha = alpha0;
  f.k = 2;
  f.obs_dim = 1;
  f.has_score = false;
  f.has_ident = true;
  f.data_range = data_range;
  f.lambda_lo = constant_vec(2, data_range.lo);
  f.lambda_hi = constant_vec(2, data_range.hi);
  f.ordered_pair = true;  // lambda_c <= lambda_v, boundary allowed
  return f;
}

Functional Functional::parse(const std::string& id) {
  std::vector<std::string> parts;
  std::stringstream ss(id);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty functional id");
  const std::string& name = parts[0];
  try {
    if (name == "mean") return mean();
    if (name == "quantile") {
      if (parts.size() != 2) throw ConfigError("expected quantile:<alpha>");
      return quantile(std::stod(parts[1]));
    }
    if (name == "regression") {
      if (parts.size() != 2) throw ConfigError("expected regression:<k>");
      return regression(std::stoi(parts[1]));
    }
    if (name == "mean_sd") return mean_sd();
    if (name == "var_cvar") {
      if (parts.size() != 2) throw ConfigError("expected var_cvar:<alpha>");
      return var_cvar(std::stod(parts[1]));
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("malformed numeric argument in functional id '" + id + "'");
  }
  throw ConfigError("unknown functional id '" + id +
                    "' (known: mean, quantile:a, regression:k, mean_sd, var_cvar:a)");
}

std::string Functional::str_id() const {
  std::ostringstream os;
  switch (id) {
    case FunctionalId::Mean:
      return "mean";
    case FunctionalId::Quantile:
      os << "quantile:" << alpha;
      return os.str();
    case FunctionalId::Regression:
      os << "regression:" << k;
      return os.str();
    case FunctionalId::MeanSd:
      return "mean_sd";
    case FunctionalId::VarCvar:
      os << "var_cvar:" << alpha;
      return os.str();
  }
  return "?";
}

bool lambda_in_domain(const Functional& f, const Vector& lambda) {
  if (static_cast<int>(lambda.size()) != f.k) return false;
  for (int i = 0; i < f.k; ++i) {
    if (lambda[i] < f.lambda_lo[i] || lambda[i] > f.lambda_hi[i]) return false;
  }
  if (f.ordered_pair && lambda[1] > lambda[0]) return false;
  return true;
}

void require_lambda(const Functional& f, const Vector& lambda) {
  if (!lambda_in_domain(f, lambda)) {
    std::ostringstream os;
    os << "lambda [" << lambda.transpose() << "] outside the domain of " << f.str_id();
    throw DomainError(os.str());
  }
}

double score(const Functional& f, const Vector& lambda, const Observation& x) {
  if (!f.has_score) throw UnsupportedScore("functional " + f.str_id() + " has no scoring function");
  check_dims(f, lambda, x);
  require_lambda(f, lambda);
  switch (f.id) {
    case FunctionalId::Mean: {
      const double r = x.scalar() - lambda[0];
      return 0.5 * r * r;
    }
    case FunctionalId::Quantile: {
      const double v = x.scalar();
      const double l = lambda[0];
      if (v < l) return (l - v) * f.alpha;
      if (v > l) return (v - l) * (1.0 - f.alpha);
      return 0.0;
    }
    case FunctionalId::Regression: {
      const double y = x.value[0];
      const double r = lambda.dot(x.value.tail(f.k)) - y;
      return 0.5 * r * r;
    }
    default:
      throw UnsupportedScore("functional " + f.str_id() + " has no scoring function");
  }
}

Vector score_subgradient(const Functional& f, const Vector& lambda, const Observation& x) {
  if (!f.has_score) throw UnsupportedScore("functional " + f.str_id() + " has no scoring function");
  check_dims(f, lambda, x);
  require_lambda(f, lambda);
  switch (f.id) {
    case FunctionalId::Mean:
      return constant_vec(1, lambda[0] - x.scalar());
    case FunctionalId::Quantile: {
      const double v = x.scalar();
      const double l = lambda[0];
      if (v < l) return constant_vec(1, f.alpha);
      if (v > l) return constant_vec(1, -(1.0 - f.alpha));
      return constant_vec(1, 0.0);  // kink: 0 lies in the subdifferential
    }
    case FunctionalId::Regression: {
      const double y = x.value[0];
      const auto cov = x.value.tail(f.k);
      return (lambda.dot(cov) - y) * cov;
    }
    default:
      throw UnsupportedScore("functional " + f.str_id() + " has no scoring function");
  }
}

bool degenerate_row(const Functional& f, const Observation& x) {
  return f.id == FunctionalId::Regression && x.value.tail(f.k).norm() == 0.0;
}

namespace {

Vector ident_impl(const Functional& f, const Vector& lambda, const Observation& x, bool streaming) {
  check_dims(f, lambda, x);
  require_lambda(f, lambda);
  switch (f.id) {
    case FunctionalId::Mean:
      return constant_vec(1, x.scalar() - lambda[0]);
    case FunctionalId::Quantile:
      return constant_vec(1, (x.scalar() > lambda[0] ? 1.0 : 0.0) - f.alpha);
    case FunctionalId::Regression: {
      const double y = x.value[0];
      const auto cov = x.value.tail(f.k);
      const double nrm = cov.norm();
      if (nrm == 0.0) {
        if (streaming) return Vector::Zero(f.k);
        throw DegenerateInput("regression row with zero covariate vector");
      }
      return ((lambda.dot(cov) - y) / nrm) * cov;
    }
    case FunctionalId::MeanSd: {
      const double v = x.scalar();
      Vector m(2);
      m[0] = lambda[0] - v;
      m[1] = lambda[0] * lambda[0] + lambda[1] * lambda[1] - v * v;
      return m;
    }
    case FunctionalId::VarCvar: {
      const double v = x.scalar();
      const double hit = v <= lambda[0] ? 1.0 : 0.0;
      Vector m(2);
      m[0] = hit - f.alpha;
      m[1] = v * hit - f.alpha * lambda[1];
      return m;
    }
  }
  throw UnsupportedIdent("functional " + f.str_id() + " has no identification function");
}

}  // namespace

Vector ident(const Functional& f, const Vector& lambda, const Observation& x) {
  if (!f.has_ident) throw UnsupportedIdent("functional " + f.str_id() + " has no identification function");
  return ident_impl(f, lambda, x, /*streaming=*/false);
}

Vector ident_streaming(const Functional& f, const Vector& lambda, const Observation& x) {
  if (!f.has_ident) throw UnsupportedIdent("functional " + f.str_id() + " has no identification function");
  return ident_impl(f, lambda, x, /*streaming=*/true);
}

std::optional<double> ident_bound(const Functional& f) {
  switch (f.id) {
    case FunctionalId::Quantile:
      return std::max(f.alpha, 1.0 - f.alpha);
    case FunctionalId::Mean: {
      if (!f.data_range.finite()) return std::nullopt;
      bool lam_finite = std::isfinite(f.lambda_lo[0]) && std::isfinite(f.lambda_hi[0]);
      if (!lam_finite) return std::nullopt;
      const double m1 = std::abs(f.data_range.hi - f.lambda_lo[0]);
      const double m2 = std::abs(f.data_range.lo - f.lambda_hi[0]);
      return std::max(m1, m2);
    }
    case FunctionalId::Regression:
      return std::nullopt;
    case FunctionalId::MeanSd: {
      if (!f.data_range.finite()) return std::nullopt;
      const double xl = f.data_range.lo, xh = f.data_range.hi;
      const double x2max = std::max(xl * xl, xh * xh);
      const double x2min = (xl <= 0 && xh >= 0) ? 0.0 : std::min(xl * xl, xh * xh);
      const double c1 = std::max(std::abs(f.lambda_hi[0] - xl), std::abs(f.lambda_lo[0] - xh));
      auto sq = [](double v) { return v * v; };
      const double s2max = sq(f.lambda_hi[0]) + sq(f.lambda_hi[1]);
      const double s2min = sq(std::max(0.0, f.lambda_lo[0])) + sq(f.lambda_lo[1]);
      const double c2 = std::max(std::abs(s2max - x2min), std::abs(s2min - x2max));
      return std::sqrt(c1 * c1 + c2 * c2);
    }
    case FunctionalId::VarCvar: {
      if (!f.data_range.finite()) return std::nullopt;
      const double c1 = std::max(f.alpha, 1.0 - f.alpha);
      const double lam_c_max = std::max(std::abs(f.lambda_lo[1]), std::abs(f.lambda_hi[1]));
      const double xmax = std::max(std::abs(f.data_range.lo), std::abs(f.data_range.hi));
      const double c2 = xmax + f.alpha * lam_c_max;
      return std::sqrt(c1 * c1 + c2 * c2);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reference-distribution oracles.
// ---------------------------------------------------------------------------

ReferenceDistribution ReferenceDistribution::discrete(std::vector<double> atoms,
                                                      std::vector<double> probs) {
  if (atoms.size() != probs.size() || atoms.empty()) {
    throw ParamError("discrete distribution needs matching nonempty atoms/probs");
  }
  double sum = 0;
  for (double p : probs) {
    if (p < 0) throw ParamError("negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParamError("probabilities must sum to 1");
  ReferenceDistribution r;
  r.kind = Kind::Discrete;
  r.atoms = std::move(atoms);
  r.probs = std::move(probs);
  return r;
}

namespace {

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for the incomplete beta (Lentz's algorithm).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double beta_pdf(double a, double b, double x) {
  if (x <= 0.0) return a == 1.0 ? std::exp(-log_beta_fn(a, b)) : 0.0;
  if (x >= 1.0) return b == 1.0 ? std::exp(-log_beta_fn(a, b)) : 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b));
}

double adaptive_simpson(const std::function<double(double)>& fn, double lo, double hi, double flo,
                        double fmid, double fhi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(fn, lo, mid, flo, flm, fmid, left, tol / 2, depth - 1) +
         adaptive_simpson(fn, mid, hi, fmid, frm, fhi, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  const double mid = 0.5 * (lo + hi);
  const double flo = fn(lo), fmid = fn(mid), fhi = fn(hi);
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return adaptive_simpson(fn, lo, hi, flo, fmid, fhi, whole, tol, 50);
}

// Lower alpha-quantile: smallest atom with cumulative mass >= alpha.
double discrete_quantile(const ReferenceDistribution& ref, double alpha) {
  std::vector<std::size_t> order(ref.atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return ref.atoms[i] < ref.atoms[j]; });
  double cum = 0.0;
  for (std::size_t idx : order) {
    cum += ref.probs[idx];
    if (cum >= alpha - 1e-15) return ref.atoms[idx];
  }
  return ref.atoms[order.back()];
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta_fn(a, b)) *
                   betacf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double p) {
  if (!(p > 0 && p < 1)) throw ParamError("beta quantile level must be in (0,1)");
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(a, b, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double beta_mean(double a, double b) { return a / (a + b); }

double beta_sd(double a, double b) {
  return std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
}

double beta_partial_first_moment(double a, double b, double q) {
  if (q <= 0) return 0.0;
  q = std::min(q, 1.0);
  return integrate([&](double x) { return x * beta_pdf(a, b, x); }, 0.0, q, 1e-12);
}

Vector true_value(const Functional& f, const ReferenceDistribution& ref) {
  using Kind = ReferenceDistribution::Kind;
  switch (f.id) {
    case FunctionalId::Mean: {
      if (ref.kind == Kind::Beta) return constant_vec(1, beta_mean(ref.a, ref.b));
      if (ref.kind == Kind::Gaussian) return constant_vec(1, ref.mu);
      if (ref.kind == Kind::Discrete) {
        double m = 0;
        for (std::size_t i = 0; i < ref.atoms.size(); ++i) m += ref.atoms[i] * ref.probs[i];
        return constant_vec(1, m);
      }
      break;
    }
    case FunctionalId::Quantile: {
      // The catalog quantile pair (score and m = 1{x>l} - alpha) locates the
      // value with P(X > l) = alpha, i.e. the lower (1-alpha)-quantile in the
      // usual convention; the oracle follows the catalog.
      const double p = 1.0 - f.alpha;
      if (ref.kind == Kind::Beta) return constant_vec(1, beta_quantile(ref.a, ref.b, p));
      if (ref.kind == Kind::Gaussian) {
        // bisection on the Gaussian CDF
        double lo = ref.mu - 20 * ref.sigma, hi = ref.mu + 20 * ref.sigma;
        while (hi - lo > 1e-12 * std::max(1.0, ref.sigma)) {
          const double mid = 0.5 * (lo + hi);
          const double cdf = 0.5 * std::erfc(-(mid - ref.mu) / (ref.sigma * std::sqrt(2.0)));
          (cdf < p ? lo : hi) = mid;
        }
        return constant_vec(1, 0.5 * (lo + hi));
      }
      if (ref.kind == Kind::Discrete) return constant_vec(1, discrete_quantile(ref, p));
      break;
    }
    case FunctionalId::MeanSd: {
      if (ref.kind == Kind::Beta) {
        return (Vector(2) << beta_mean(ref.a, ref.b), beta_sd(ref.a, ref.b)).finished();
      }
      if (ref.kind == Kind::Gaussian) return (Vector(2) << ref.mu, ref.sigma).finished();
      if (ref.kind == Kind::Discrete) {
        double m1 = 0, m2 = 0;
        for (std::size_t i = 0; i < ref.atoms.size(); ++i) {
          m1 += ref.atoms[i] * ref.probs[i];
          m2 += ref.atoms[i] * ref.atoms[i] * ref.probs[i];
        }
        return (Vector(2) << m1, std::sqrt(std::max(0.0, m2 - m1 * m1))).finished();
      }
      break;
    }
    case FunctionalId::VarCvar: {
      if (ref.kind == Kind::Beta) {
        const double var = beta_quantile(ref.a, ref.b, f.alpha);
        const double cvar = beta_partial_first_moment(ref.a, ref.b, var) / f.alpha;
        return (Vector(2) << var, cvar).finished();
      }
      break;
    }
    case FunctionalId::Regression: {
      if (ref.kind == Kind::Ar1 && f.k == 1) return constant_vec(1, ref.ar_beta);
      break;
    }
  }
  throw UnsupportedPair("no ground-truth oracle for " + f.str_id() + " under this reference");
}

}  // namespace avseq
