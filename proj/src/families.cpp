#include "avseq/families.hpp"

#include <algorithm>
#include <cmath>

namespace avseq {

// ---------------------------------------------------------------------------
// ThetaDomain
// ---------------------------------------------------------------------------

ThetaDomain ThetaDomain::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw ParamError("box bounds size mismatch");
  for (int i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw ParamError("box needs lo <= hi");
  }
  ThetaDomain d;
  d.shape = Shape::Box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

ThetaDomain ThetaDomain::ball(Vector center, double radius) {
  if (!(radius >= 0)) throw ParamError("ball needs radius >= 0");
  ThetaDomain d;
  d.shape = Shape::Ball;
  d.ball_center = std::move(center);
  d.radius = radius;
  return d;
}

ThetaDomain ThetaDomain::with_u(double u_lo, double u_hi) const {
  if (!(0 <= u_lo && u_lo <= u_hi)) throw ParamError("u interval needs 0 <= u_lo <= u_hi");
  ThetaDomain d = *this;
  d.has_u = true;
  d.u_lo = u_lo;
  d.u_hi = u_hi;
  return d;
}

ThetaDomain ThetaDomain::base_only() const {
  ThetaDomain d = *this;
  d.has_u = false;
  d.u_lo = d.u_hi = 0.0;
  return d;
}

int ThetaDomain::base_dim() const {
  return shape == Shape::Box ? static_cast<int>(lo.size())
                             : static_cast<int>(ball_center.size());
}

Vector ThetaDomain::center() const {
  Vector c(dim());
  if (shape == Shape::Box) {
    for (int i = 0; i < base_dim(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  } else {
    c.head(base_dim()) = ball_center;
  }
  if (has_u) c[dim() - 1] = 0.5 * (u_lo + u_hi);
  return c;
}

double ThetaDomain::diameter() const {
  double d2 = 0;
  if (shape == Shape::Box) {
    for (int i = 0; i < base_dim(); ++i) {
      const double w = hi[i] - lo[i];
      d2 += w * w;
    }
  } else {
    d2 = 4.0 * radius * radius;
  }
  if (has_u) {
    const double w = u_hi - u_lo;
    d2 += w * w;
  }
  return std::sqrt(d2);
}

bool ThetaDomain::contains(const Vector& theta, double tol) const {
  if (static_cast<int>(theta.size()) != dim()) return false;
  const int p = base_dim();
  if (shape == Shape::Box) {
    for (int i = 0; i < p; ++i) {
      if (theta[i] < lo[i] - tol || theta[i] > hi[i] + tol) return false;
    }
  } else {
    if ((theta.head(p) - ball_center).norm() > radius + tol) return false;
  }
  if (has_u) {
    const double u = theta[p];
    if (u < u_lo - tol || u > u_hi + tol) return false;
  }
  return true;
}

Vector ThetaDomain::project(const Vector& theta) const {
  if (static_cast<int>(theta.size()) != dim()) throw ParamError("projection dimension mismatch");
  Vector out = theta;
  const int p = base_dim();
  if (shape == Shape::Box) {
    for (int i = 0; i < p; ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
  } else {
    Vector d = out.head(p) - ball_center;
    const double n = d.norm();
    if (n > radius) out.head(p) = ball_center + (radius / n) * d;
  }
  if (has_u) out[p] = std::clamp(out[p], u_lo, u_hi);
  return out;
}

std::vector<Vector> ThetaDomain::scan_points(int per_axis) const {
  per_axis = std::max(2, per_axis);
  std::vector<Vector> base;
  const int p = base_dim();
  if (shape == Shape::Box) {
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < per_axis; ++j) {
        axes[static_cast<std::size_t>(i)].push_back(
            lo[i] + (hi[i] - lo[i]) * j / (per_axis - 1));
      }
    }
    std::vector<int> idx(static_cast<std::size_t>(p), 0);
    for (;;) {
      Vector v(p);
      for (int i = 0; i < p; ++i) v[i] = axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      base.push_back(v);
      int i = 0;
      while (i < p && ++idx[static_cast<std::size_t>(i)] == per_axis) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == p) break;
    }
  } else if (p == 1) {
    for (int j = 0; j < per_axis; ++j) {
      Vector v(1);
      v[0] = ball_center[0] - radius + 2.0 * radius * j / (per_axis - 1);
      base.push_back(v);
    }
  } else if (p == 2) {
    base.push_back(ball_center);
    const int rings = std::max(1, per_axis / 2);
    const int angles = std::max(8, 4 * per_axis / 2);
    for (int r = 1; r <= rings; ++r) {
      const double rr = radius * r / rings;
      for (int a = 0; a < angles; ++a) {
        const double ang = 2.0 * M_PI * a / angles;
        Vector v(2);
        v[0] = ball_center[0] + rr * std::cos(ang);
        v[1] = ball_center[1] + rr * std::sin(ang);
        base.push_back(v);
      }
    }
  } else {
    // Enclosing-box mesh projected into the ball.
    Vector blo = ball_center.array() - radius;
    Vector bhi = ball_center.array() + radius;
    ThetaDomain boxd = ThetaDomain::box(blo, bhi);
    for (auto& v : boxd.scan_points(per_axis)) {
      Vector d = v - ball_center;
      const double n = d.norm();
      base.push_back(n > radius ? Vector(ball_center + (radius / n) * d) : v);
    }
  }
  if (!has_u) return base;
  std::vector<Vector> out;
  out.reserve(base.size() * static_cast<std::size_t>(per_axis));
  for (int j = 0; j < per_axis; ++j) {
    const double u = u_lo + (u_hi - u_lo) * j / (per_axis - 1);
    for (const auto& b : base) {
      Vector v(dim());
      v.head(p) = b;
      v[p] = u;
      out.push_back(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Family constructors
// ---------------------------------------------------------------------------

std::string family_kind_id(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::BoundedElicitable:
      return "bounded_elic";
    case FamilyKind::BoundedIdentifiable:
      return "bounded_ident";
    case FamilyKind::SubPsiElicitable:
      return "subpsi_elic";
    case FamilyKind::SubPsiIdentifiable:
      return "subpsi_ident";
  }
  return "?";
}

FamilyKind parse_family_kind(const std::string& id) {
  if (id == "bounded_elic") return FamilyKind::BoundedElicitable;
  if (id == "bounded_ident") return FamilyKind::BoundedIdentifiable;
  if (id == "subpsi_elic") return FamilyKind::SubPsiElicitable;
  if (id == "subpsi_ident") return FamilyKind::SubPsiIdentifiable;
  throw ConfigError("unknown family kind '" + id +
                    "' (known: bounded_elic, bounded_ident, subpsi_elic, subpsi_ident)");
}

namespace {

// Data-range grid for admissibility scans. Includes the interval endpoints,
// a uniform mesh, and the indicator/kink locations of the catalog functions
// (with points just on either side).
std::vector<double> data_scan_grid(const Functional& f, const Vector& lambda0, int n) {
  const Interval r = f.data_range;
  if (!r.finite()) throw ParamError("admissibility scan needs a finite declared data range");
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n) + 8);
  for (int i = 0; i < n; ++i) xs.push_back(r.lo + (r.hi - r.lo) * i / (n - 1));
  auto add_critical = [&](double c) {
    if (c > r.lo && c < r.hi) {
      xs.push_back(std::nextafter(c, r.lo));
      xs.push_back(c);
      xs.push_back(std::nextafter(c, r.hi));
    }
  };
  for (int i = 0; i < lambda0.size(); ++i) add_critical(lambda0[i]);
  std::sort(xs.begin(), xs.end());
  return xs;
}

void require_scalar_obs(const Functional& f) {
  if (f.obs_dim != 1) {
    throw ParamError("bounded-family admissibility scan supports scalar observations only");
  }
}

void scan_bounded_elicitable(const Functional& f, const Vector& lambda0, const ThetaDomain& dom,
                             double eps_margin) {
  require_scalar_obs(f);
  const auto xs = data_scan_grid(f, lambda0, 65);
  for (const auto& theta : dom.scan_points(9)) {
    if (!lambda_in_domain(f, theta)) {
      throw DomainError("theta domain leaves the functional's parameter domain");
    }
    std::vector<double> grid = xs;
    for (int i = 0; i < theta.size(); ++i) {
      if (theta[i] > f.data_range.lo && theta[i] < f.data_range.hi) grid.push_back(theta[i]);
    }
    for (double x : grid) {
      const Observation obs(x);
      const double gap = score(f, lambda0, obs) - score(f, theta, obs);
      if (1.0 + gap < eps_margin) {
        throw DomainError("bounded elicitable domain not admissible: score gap " +
                          std::to_string(gap) + " at x=" + std::to_string(x));
      }
    }
  }
}

void scan_bounded_identifiable(const Functional& f, const Vector& lambda0, const ThetaDomain& dom,
                               double eps_margin) {
  require_scalar_obs(f);
  const auto xs = data_scan_grid(f, lambda0, 129);
  std::vector<Vector> ms;
  ms.reserve(xs.size());
  for (double x : xs) ms.push_back(ident(f, lambda0, Observation(x)));

  if (dom.shape == ThetaDomain::Shape::Ball) {
    // Worst bet for each x in a ball is exact: <c,m> - radius*|m|.
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const double worst = dom.ball_center.dot(ms[i]) - dom.radius * ms[i].norm();
      if (1.0 + worst < eps_margin) {
        throw DomainError("bounded identifiable ball not admissible at x=" +
                          std::to_string(xs[i]));
      }
    }
    return;
  }
  // The constraint is linear in theta, so box corners suffice.
  const int p = dom.base_dim();
  for (int mask = 0; mask < (1 << p); ++mask) {
    Vector corner(p);
    for (int i = 0; i < p; ++i) corner[i] = (mask >> i) & 1 ? dom.hi[i] : dom.lo[i];
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const double inc = corner.dot(ms[i]);
      if (1.0 + inc < eps_margin) {
        throw DomainError("bounded identifiable box not admissible at corner, x=" +
                          std::to_string(xs[i]));
      }
    }
  }
}

void validate_subpsi(const FamilySpec& fam) {
  if (!fam.psi.has_value()) throw ParamError("sub-psi family needs a psi spec");
  const PsiSpec& psi = *fam.psi;
  const ThetaDomain& dom = fam.theta_domain;
  switch (fam.u_mode) {
    case UMode::Joint:
      if (!dom.has_u) throw ParamError("joint sub-psi parametrization needs a u coordinate");
      if (dom.u_hi >= psi.u_max) throw ParamError("u interval must stay below u_max");
      break;
    case UMode::Fixed:
      if (dom.has_u) throw ParamError("fixed-u parametrization takes a base domain only");
      if (!(fam.fixed_u >= 0) || fam.fixed_u >= psi.u_max) {
        throw ParamError("fixed u must lie in [0, u_max)");
      }
      break;
    case UMode::Norm: {
      if (dom.has_u) throw ParamError("norm parametrization takes a base domain only");
      if (psi.kind == PsiSpec::Kind::CustomTable) {
        throw ParamError("norm parametrization needs a quadratic psi (gaussian/hoeffding)");
      }
      // |theta| must stay below u_max; quadratic kinds have u_max = inf.
      break;
    }
  }
}

}  // namespace

FamilySpec FamilySpec::bounded_elicitable(Functional f, Vector lambda0, ThetaDomain domain,
                                          double eps_margin) {
  if (!f.has_score) throw UnsupportedScore("bounded elicitable family needs a scoring function");
  require_lambda(f, lambda0);
  if (domain.has_u) throw ParamError("bounded families take a base domain only");
  if (domain.base_dim() != f.k) throw ParamError("theta domain dimension must equal k");
  FamilySpec fam;
  fam.kind = FamilyKind::BoundedElicitable;
  fam.functional = std::move(f);
  fam.lambda0 = std::move(lambda0);
  fam.theta_domain = std::move(domain);
  fam.eps_margin = eps_margin;
  scan_bounded_elicitable(fam.functional, fam.lambda0, fam.theta_domain, eps_margin);
  return fam;
}

FamilySpec FamilySpec::bounded_identifiable(Functional f, Vector lambda0, ThetaDomain domain,
                                            double eps_margin) {
  if (!f.has_ident) throw UnsupportedIdent("bounded identifiable family needs an identification function");
  require_lambda(f, lambda0);
  if (domain.has_u) throw ParamError("bounded families take a base domain only");
  if (domain.base_dim() != f.k) throw ParamError("theta domain dimension must equal k");
  FamilySpec fam;
  fam.kind = FamilyKind::BoundedIdentifiable;
  fam.functional = std::move(f);
  fam.lambda0 = std::move(lambda0);
  fam.theta_domain = std::move(domain);
  fam.eps_margin = eps_margin;
  scan_bounded_identifiable(fam.functional, fam.lambda0, fam.theta_domain, eps_margin);
  return fam;
}

FamilySpec FamilySpec::subpsi_elicitable(Functional f, Vector lambda0, PsiSpec psi,
                                         VarianceProcess variance, ThetaDomain domain,
                                         UMode u_mode, double fixed_u) {
  if (!f.has_score) throw UnsupportedScore("sub-psi elicitable family needs a scoring function");
  require_lambda(f, lambda0);
  if (u_mode == UMode::Norm) {
    throw ParamError("norm parametrization applies to identifiable families only");
  }
  FamilySpec fam;
  fam.kind = FamilyKind::SubPsiElicitable;
  fam.functional = std::move(f);
  fam.lambda0 = std::move(lambda0);
  fam.psi = std::move(psi);
  fam.variance = std::move(variance);
  fam.theta_domain = std::move(domain);
  fam.u_mode = u_mode;
  fam.fixed_u = fixed_u;
  if (fam.theta_domain.base_dim() != fam.functional.k) {
    throw ParamError("theta domain dimension must equal k");
  }
  validate_subpsi(fam);
  // Every lambda in the domain must stay inside the functional's domain.
  for (const auto& th : fam.theta_domain.scan_points(5)) {
    if (!lambda_in_domain(fam.functional, th.head(fam.functional.k))) {
      throw DomainError("theta domain leaves the functional's parameter domain");
    }
  }
  return fam;
}

FamilySpec FamilySpec::subpsi_identifiable(Functional f, Vector lambda0, PsiSpec psi,
                                           VarianceProcess variance, ThetaDomain domain,
                                           UMode u_mode, double fixed_u) {
  if (!f.has_ident) throw UnsupportedIdent("sub-psi identifiable family needs an identification function");
  require_lambda(f, lambda0);
  FamilySpec fam;
  fam.kind = FamilyKind::SubPsiIdentifiable;
  fam.functional = std::move(f);
  fam.lambda0 = std::move(lambda0);
  fam.psi = std::move(psi);
  fam.variance = std::move(variance);
  fam.theta_domain = std::move(domain);
  fam.u_mode = u_mode;
  fam.fixed_u = fixed_u;
  if (fam.theta_domain.base_dim() != fam.functional.k) {
    throw ParamError("theta domain dimension must equal k");
  }
  validate_subpsi(fam);
  return fam;
}

ThetaDomain fit_bounded_domain(FamilyKind kind, const Functional& f, const Vector& lambda0,
                               double scale, double eps_margin) {
  if (!(scale > 0 && scale <= 1)) throw ParamError("fit scale must be in (0,1]");
  if (kind == FamilyKind::BoundedIdentifiable) {
    // Largest zero-centered box with half-width w: worst corner value is
    // -w * sum_i |m_i| minimized over the data grid, solved directly.
    const Interval r = f.data_range;
    if (!r.finite()) throw ParamError("domain fit needs a finite data range");
    double worst = 0;  // max over x of the l1 norm of m
    std::vector<double> xs;
    for (int i = 0; i < 257; ++i) xs.push_back(r.lo + (r.hi - r.lo) * i / 256.0);
    for (int i = 0; i < lambda0.size(); ++i) {
      if (lambda0[i] > r.lo && lambda0[i] < r.hi) {
        xs.push_back(std::nextafter(lambda0[i], r.lo));
        xs.push_back(lambda0[i]);
        xs.push_back(std::nextafter(lambda0[i], r.hi));
      }
    }
    for (double x : xs) {
      worst = std::max(worst, ident(f, lambda0, Observation(x)).lpNorm<1>());
    }
    if (worst == 0) throw ParamError("identification function vanishes on the data range");
    // Stay a hair inside the margin so the constructor's re-scan cannot fail
    // on rounding at scale 1.
    const double w = scale * (1.0 - eps_margin) * (1.0 - 1e-9) / worst;
    return ThetaDomain::box(Vector::Constant(f.k, -w), Vector::Constant(f.k, w));
  }
  if (kind == FamilyKind::BoundedElicitable) {
    // Bisect on the box half-width around lambda0 until the scan passes.
    double lo_w = 0.0, hi_w = 1.0;
    auto admissible = [&](double w) {
      Vector blo = lambda0.array() - w;
      Vector bhi = lambda0.array() + w;
      for (int i = 0; i < lambda0.size(); ++i) {
        blo[i] = std::max(blo[i], f.lambda_lo[i]);
        bhi[i] = std::min(bhi[i], f.lambda_hi[i]);
      }
      try {
        scan_bounded_elicitable(f, lambda0, ThetaDomain::box(blo, bhi), eps_margin);
        return true;
      } catch (const DomainError&) {
        return false;
      }
    };
    while (admissible(hi_w) && hi_w < 1e6) hi_w *= 2;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo_w + hi_w);
      (admissible(mid) ? lo_w : hi_w) = mid;
    }
    const double w = scale * lo_w;
    Vector blo = lambda0.array() - w;
    Vector bhi = lambda0.array() + w;
    for (int i = 0; i < lambda0.size(); ++i) {
      blo[i] = std::max(blo[i], f.lambda_lo[i]);
      bhi[i] = std::min(bhi[i], f.lambda_hi[i]);
    }
    return ThetaDomain::box(blo, bhi);
  }
  throw ParamError("domain fit applies to bounded family kinds");
}

// ---------------------------------------------------------------------------
// Increments
// ---------------------------------------------------------------------------

namespace {

double psi_derivative(const PsiSpec& psi, double u) {
  switch (psi.kind) {
    case PsiSpec::Kind::Gaussian:
      return psi.sigma * psi.sigma * u;
    case PsiSpec::Kind::Hoeffding: {
      const double w = psi.b - psi.a;
      return u * w * w / 4.0;
    }
    case PsiSpec::Kind::CustomTable: {
      const double h = 1e-7 * std::max(1.0, u);
      const double lo = std::max(0.0, u - h);
      const double hi = std::min(std::nexttoward(psi.u_max, 0.0), u + h);
      return (psi_eval(psi, hi) - psi_eval(psi, lo)) / (hi - lo);
    }
  }
  return 0.0;
}

void split_subpsi_theta(const FamilySpec& fam, const Vector& theta, Vector* base, double* u) {
  const int k = fam.theta_domain.base_dim();
  switch (fam.u_mode) {
    case UMode::Joint:
      *base = theta.head(k);
      *u = theta[k];
      break;
    case UMode::Fixed:
      *base = theta;
      *u = fam.fixed_u;
      break;
    case UMode::Norm:
      *base = theta;
      *u = theta.norm();
      break;
  }
}

}  // namespace

double log_increment(const FamilySpec& fam, const Vector& theta, const Observation& x, int step) {
  if (!fam.theta_domain.contains(theta)) {
    throw DomainError("theta outside the family's bet domain");
  }
  switch (fam.kind) {
    case FamilyKind::BoundedElicitable: {
      const double gap = score(fam.functional, fam.lambda0, x) - score(fam.functional, theta, x);
      if (1.0 + gap <= 0.0) throw NonpositiveIncrement(1.0 + gap, step);
      return std::log1p(gap);
    }
    case FamilyKind::BoundedIdentifiable: {
      const double inc = theta.dot(ident_streaming(fam.functional, fam.lambda0, x));
      if (1.0 + inc <= 0.0) throw NonpositiveIncrement(1.0 + inc, step);
      return std::log1p(inc);
    }
    case FamilyKind::SubPsiElicitable: {
      Vector lambda;
      double u;
      split_subpsi_theta(fam, theta, &lambda, &u);
      const double gap = score(fam.functional, fam.lambda0, x) - score(fam.functional, lambda, x);
      return u * gap - fam.variance.at(step) * psi_eval(*fam.psi, u);
    }
    case FamilyKind::SubPsiIdentifiable: {
      Vector eta;
      double u;
      split_subpsi_theta(fam, theta, &eta, &u);
      const Vector m = ident_streaming(fam.functional, fam.lambda0, x);
      if (fam.u_mode == UMode::Norm) {
        return eta.dot(m) - fam.variance.at(step) * psi_eval(*fam.psi, u);
      }
      return u * eta.dot(m) - fam.variance.at(step) * psi_eval(*fam.psi, u);
    }
  }
  throw ParamError("unreachable family kind");
}

double raw_increment(const FamilySpec& fam, const Vector& theta, const Observation& x, int step) {
  switch (fam.kind) {
    case FamilyKind::BoundedElicitable:
      return 1.0 + score(fam.functional, fam.lambda0, x) - score(fam.functional, theta, x);
    case FamilyKind::BoundedIdentifiable:
      return 1.0 + theta.dot(ident_streaming(fam.functional, fam.lambda0, x));
    default:
      return std::exp(log_increment(fam, theta, x, step));
  }
}

Vector increment_gradient(const FamilySpec& fam, const Vector& theta, const Observation& x,
                          int step) {
  switch (fam.kind) {
    case FamilyKind::BoundedElicitable: {
      const double gap = score(fam.functional, fam.lambda0, x) - score(fam.functional, theta, x);
      if (1.0 + gap <= 0.0) throw NonpositiveIncrement(1.0 + gap, step);
      return -score_subgradient(fam.functional, theta, x) / (1.0 + gap);
    }
    case FamilyKind::BoundedIdentifiable: {
      const Vector m = ident_streaming(fam.functional, fam.lambda0, x);
      const double inc = theta.dot(m);
      if (1.0 + inc <= 0.0) throw NonpositiveIncrement(1.0 + inc, step);
      return m / (1.0 + inc);
    }
    case FamilyKind::SubPsiElicitable: {
      Vector lambda;
      double u;
      split_subpsi_theta(fam, theta, &lambda, &u);
      const double gap = score(fam.functional, fam.lambda0, x) - score(fam.functional, lambda, x);
      const Vector gsub = score_subgradient(fam.functional, lambda, x);
      if (fam.u_mode == UMode::Fixed) return -u * gsub;
      Vector g(fam.theta_dim());
      g.head(fam.functional.k) = -u * gsub;
      g[fam.functional.k] = gap - fam.variance.at(step) * psi_derivative(*fam.psi, u);
      return g;
    }
    case FamilyKind::SubPsiIdentifiable: {
      Vector eta;
      double u;
      split_subpsi_theta(fam, theta, &eta, &u);
      const Vector m = ident_streaming(fam.functional, fam.lambda0, x);
      if (fam.u_mode == UMode::Fixed) return fam.fixed_u * m;
      if (fam.u_mode == UMode::Norm) {
        const double n = theta.norm();
        if (n == 0.0) return m;
        return m - (fam.variance.at(step) * psi_derivative(*fam.psi, n) / n) * theta;
      }
      Vector g(fam.theta_dim());
      g.head(fam.functional.k) = u * m;
      g[fam.functional.k] = eta.dot(m) - fam.variance.at(step) * psi_derivative(*fam.psi, u);
      return g;
    }
  }
  throw ParamError("unreachable family kind");
}

std::vector<double> log_wealth_path(const FamilySpec& fam, const Vector& theta,
                                    std::span<const Observation> xs) {
  std::vector<double> path;
  path.reserve(xs.size());
  double acc = 0.0;  // log L_0 = 0
  int step = 1;
  for (const auto& x : xs) {
    acc += log_increment(fam, theta, x, step++);
    path.push_back(acc);
  }
  return path;
}

ConcavityCertificate certify_concavity(const FamilySpec& fam) {
  switch (fam.kind) {
    case FamilyKind::BoundedIdentifiable:
      return {true, ""};
    case FamilyKind::BoundedElicitable:
      // All catalog scoring functions (mean, quantile, regression) are
      // convex in lambda.
      return {true, ""};
    case FamilyKind::SubPsiElicitable:
      if (fam.u_mode == UMode::Fixed) return {true, ""};
      return {false, "joint (lambda,u) parametrization has a bilinear u*score term"};
    case FamilyKind::SubPsiIdentifiable:
      if (fam.u_mode == UMode::Fixed) return {true, ""};
      if (fam.u_mode == UMode::Norm) return {true, ""};
      return {false, "joint (eta,u) parametrization has a bilinear u*<eta,m> term"};
  }
  return {false, "unknown kind"};
}

double estimate_gradient_bound(const FamilySpec& fam, int per_axis, int data_points) {
  const Interval r = fam.functional.data_range;
  if (!r.finite()) {
    throw ParamError("gradient bound estimation needs a finite declared data range; supply G");
  }
  const int d = fam.functional.obs_dim;
  std::vector<Observation> obs_grid;
  if (d == 1) {
    for (double x : data_scan_grid(fam.functional, fam.lambda0, data_points)) {
      obs_grid.emplace_back(x);
    }
  } else if (d <= 3) {
    // Coarser mesh per axis in higher dimension; the increments are monotone
    // between mesh nodes for the catalog functionals, extremes sit at the
    // corners which the mesh always contains.
    const int n = d == 2 ? 33 : 17;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      Vector v(d);
      for (int i = 0; i < d; ++i) {
        v[i] = r.lo + (r.hi - r.lo) * idx[static_cast<std::size_t>(i)] / (n - 1);
      }
      obs_grid.emplace_back(std::move(v));
      int i = 0;
      while (i < d && ++idx[static_cast<std::size_t>(i)] == n) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == d) break;
    }
  } else {
    throw ParamError("gradient bound estimation supports observation dimension <= 3; supply G");
  }
  double g = 0.0;
  for (const auto& theta : fam.theta_domain.scan_points(per_axis)) {
    for (const auto& x : obs_grid) {
      if (degenerate_row(fam.functional, x)) continue;
      g = std::max(g, increment_gradient(fam, theta, x, 1).norm());
    }
  }
  if (g == 0.0) throw ParamError("gradient bound estimate degenerated to zero; supply G");
  return g;
}

DominationReport domination_check(const FamilySpec& fam_elic, const FamilySpec& fam_ident,
                                  const Vector& lambda, std::span<const Observation> xs) {
  if (fam_elic.kind != FamilyKind::BoundedElicitable ||
      fam_ident.kind != FamilyKind::BoundedIdentifiable) {
    throw ParamError("domination check takes (bounded elicitable, bounded identifiable)");
  }
  const Functional& f = fam_elic.functional;
  if (f.id != fam_ident.functional.id) throw ParamError("families must share the functional");
  if ((fam_elic.lambda0 - fam_ident.lambda0).norm() != 0.0) {
    throw ParamError("families must share lambda0");
  }
  if (f.id != FunctionalId::Mean && f.id != FunctionalId::Quantile) {
    throw UnsupportedPair(
        "domination check needs an identification function equal to the score "
        "subgradient up to a constant sign (mean, quantile)");
  }
  // Catalog sign: m = -(score subgradient), so the subgradient bet
  // eta = lambda0 - lambda becomes lambda - lambda0 in catalog coordinates.
  const Vector eta = lambda - fam_elic.lambda0;

  DominationReport report;
  report.steps = static_cast<int>(xs.size());
  double log_elic = 0.0, log_ident = 0.0;
  int step = 1;
  for (const auto& x : xs) {
    const double gap = score(f, fam_elic.lambda0, x) - score(f, lambda, x);
    if (1.0 + gap <= 0.0) throw NonpositiveIncrement(1.0 + gap, step);
    const double lin = eta.dot(ident(f, fam_elic.lambda0, x));
    if (1.0 + lin <= 0.0) throw NonpositiveIncrement(1.0 + lin, step);
    log_elic += std::log1p(gap);
    log_ident += std::log1p(lin);
    report.max_violation = std::max(report.max_violation, log_elic - log_ident);
    ++step;
  }
  report.holds = report.max_violation <= 1e-9;
  return report;
}

}  // namespace avseq
