#include "avseq/strategies.hpp"

#include <algorithm>
#include <cmath>

namespace avseq {

std::string algo_id(Algo a) {
  switch (a) {
    case Algo::Ftl:
      return "ftl";
    case Algo::FtrlProx:
      return "ftrl";
    case Algo::Ogd:
      return "ogd";
    case Algo::Ftlp:
      return "ftlp";
  }
  return "?";
}

Algo parse_algo(const std::string& id) {
  if (id == "ftl") return Algo::Ftl;
  if (id == "ftrl") return Algo::FtrlProx;
  if (id == "ogd") return Algo::Ogd;
  if (id == "ftlp") return Algo::Ftlp;
  throw ConfigError("unknown strategy '" + id + "' (known: ftl, ftrl, ogd, ftlp)");
}

// ---------------------------------------------------------------------------
// Projected gradient ascent with Armijo backtracking.
// ---------------------------------------------------------------------------

Vector pgd_maximize(const std::function<double(const Vector&)>& value,
                    const std::function<Vector(const Vector&)>& gradient,
                    const ThetaDomain& domain, Vector theta0, const SolverOptions& opts) {
  Vector theta = domain.project(std::move(theta0));
  double f = value(theta);
  if (!std::isfinite(f)) {
    theta = domain.center();
    f = value(theta);
  }
  double step = opts.initial_step > 0 ? opts.initial_step : 1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector g = gradient(theta);
    if (g.norm() <= 1e-13 * (1.0 + std::abs(f))) return theta;
    step = std::min(step * 2.0, 1e6);
    bool accepted = false;
    Vector cand;
    double move = 0.0;
    double fc = -kInf;
    while (step > 1e-14) {
      cand = domain.project(theta + step * g);
      const Vector d = cand - theta;
      move = d.norm();
      if (move == 0.0) break;  // gradient points out of the domain everywhere
      fc = value(cand);
      // Strict improvement with a demanding constant: steps near the edge of
      // stability zigzag with near-zero gains, so they must be rejected in
      // favour of the contractive half-step. Once increments fall below
      // double precision the line search collapses and the loop exits at the
      // stationary branch.
      if (std::isfinite(fc) && fc > f + 0.25 * g.dot(d)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return theta;  // stationary point, kink, or numerically flat
    theta = cand;
    f = fc;
    if (move <= opts.tol) return theta;
  }
  throw SolverFailure("projected gradient hit the iteration cap");
}

namespace {

// argmax of <a, theta> over the domain, smallest-norm tie break on flat
// coordinates.
Vector maximize_linear(const Vector& a, const ThetaDomain& domain) {
  if (domain.shape == ThetaDomain::Shape::Ball) {
    const double n = a.norm();
    if (n == 0.0) return domain.project(Vector::Zero(domain.dim()));
    Vector out = domain.ball_center + (domain.radius / n) * a;
    return out;
  }
  Vector out(domain.base_dim());
  for (int i = 0; i < domain.base_dim(); ++i) {
    if (a[i] > 0) {
      out[i] = domain.hi[i];
    } else if (a[i] < 0) {
      out[i] = domain.lo[i];
    } else {
      out[i] = std::clamp(0.0, domain.lo[i], domain.hi[i]);
    }
  }
  return out;
}

bool is_quadratic_psi(const PsiSpec& psi) {
  return psi.kind == PsiSpec::Kind::Gaussian || psi.kind == PsiSpec::Kind::Hoeffding;
}

// psi(u) = c u^2 for the quadratic kinds.
double quad_psi_coeff(const PsiSpec& psi) {
  if (psi.kind == PsiSpec::Kind::Gaussian) return 0.5 * psi.sigma * psi.sigma;
  const double w = psi.b - psi.a;
  return w * w / 8.0;
}

bool has_norm_closed_form(const FamilySpec& fam) {
  return fam.kind == FamilyKind::SubPsiIdentifiable && fam.u_mode == UMode::Norm &&
         is_quadratic_psi(*fam.psi);
}

// argmax of u*A - v_sum*psi(u) over [u_lo, u_hi] (concave in u).
double maximize_u_slice(const PsiSpec& psi, double A, double v_sum, double u_lo, double u_hi) {
  if (A == 0.0) return u_lo;
  if (is_quadratic_psi(psi)) {
    if (v_sum <= 0.0) return A > 0 ? u_hi : u_lo;
    return std::clamp(A / (2.0 * quad_psi_coeff(psi) * v_sum), u_lo, u_hi);
  }
  constexpr double kInvPhi = 0.6180339887498949;
  double a = u_lo, b = u_hi;
  const auto g = [&](double u) { return u * A - v_sum * psi_eval(psi, u); };
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = g(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  // Include the endpoints: the maximizer may sit on the boundary.
  double best = mid, bv = g(mid);
  for (double cand : {u_lo, u_hi}) {
    if (g(cand) > bv) {
      bv = g(cand);
      best = cand;
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// WealthObjective
// ---------------------------------------------------------------------------

WealthObjective::WealthObjective(const FamilySpec& fam) {
  k_ = fam.functional.k;
  switch (fam.kind) {
    case FamilyKind::BoundedIdentifiable:
      mode_ = Mode::BoundedIdent;
      m_sum_ = Vector::Zero(k_);
      break;
    case FamilyKind::BoundedElicitable:
      mode_ = Mode::BoundedElic;
      break;
    case FamilyKind::SubPsiElicitable:
      if (fam.functional.id == FunctionalId::Mean) {
        mode_ = Mode::SubPsiElicQuadMean;
      } else if (fam.functional.id == FunctionalId::Regression) {
        mode_ = Mode::SubPsiElicQuadReg;
        xx_ = Matrix::Zero(k_, k_);
        xy_ = Vector::Zero(k_);
      } else {
        mode_ = Mode::SubPsiElicGeneral;
      }
      break;
    case FamilyKind::SubPsiIdentifiable:
      mode_ = Mode::SubPsiIdent;
      m_sum_ = Vector::Zero(k_);
      break;
  }
}

void WealthObjective::add(const FamilySpec& fam, const Observation& x, int step) {
  ++t_;
  switch (mode_) {
    case Mode::BoundedIdent: {
      const Vector m = ident_streaming(fam.functional, fam.lambda0, x);
      for (int i = 0; i < k_; ++i) m_flat_.push_back(m[i]);
      m_sum_ += m;
      break;
    }
    case Mode::BoundedElic: {
      x_flat_.push_back(x.scalar());
      s0_.push_back(score(fam.functional, fam.lambda0, x));
      break;
    }
    case Mode::SubPsiElicQuadMean: {
      const double v = x.scalar();
      sx_ += v;
      sxx_ += v * v;
      s0_sum_ += score(fam.functional, fam.lambda0, x);
      v_sum_ += fam.variance.at(step);
      break;
    }
    case Mode::SubPsiElicQuadReg: {
      const double y = x.value[0];
      const Vector cov = x.value.tail(k_);
      xx_ += cov * cov.transpose();
      xy_ += y * cov;
      yy_ += y * y;
      s0_sum_ += score(fam.functional, fam.lambda0, x);
      v_sum_ += fam.variance.at(step);
      break;
    }
    case Mode::SubPsiElicGeneral: {
      x_flat_.push_back(x.scalar());
      s0_.push_back(score(fam.functional, fam.lambda0, x));
      v_sum_ += fam.variance.at(step);
      break;
    }
    case Mode::SubPsiIdent: {
      m_sum_ += ident_streaming(fam.functional, fam.lambda0, x);
      v_sum_ += fam.variance.at(step);
      break;
    }
  }
}

double WealthObjective::value(const FamilySpec& fam, const Vector& theta) const {
  switch (mode_) {
    case Mode::BoundedIdent: {
      double acc = 0.0;
      const double* m = m_flat_.data();
      for (long i = 0; i < t_; ++i, m += k_) {
        double dot = 0.0;
        for (int j = 0; j < k_; ++j) dot += theta[j] * m[j];
        if (1.0 + dot <= 0.0) return -kInf;
        acc += std::log1p(dot);
      }
      return acc;
    }
    case Mode::BoundedElic: {
      double acc = 0.0;
      for (long i = 0; i < t_; ++i) {
        const double gap =
            s0_[static_cast<std::size_t>(i)] -
            score(fam.functional, theta, Observation(x_flat_[static_cast<std::size_t>(i)]));
        if (1.0 + gap <= 0.0) return -kInf;
        acc += std::log1p(gap);
      }
      return acc;
    }
    case Mode::SubPsiElicQuadMean: {
      const double lambda = theta[0];
      const double u = fam.u_mode == UMode::Joint ? theta[1] : fam.fixed_u;
      const double score_sum =
          0.5 * (sxx_ - 2.0 * lambda * sx_ + static_cast<double>(t_) * lambda * lambda);
      return u * (s0_sum_ - score_sum) - v_sum_ * psi_eval(*fam.psi, u);
    }
    case Mode::SubPsiElicQuadReg: {
      const Vector beta = theta.head(k_);
      const double u = fam.u_mode == UMode::Joint ? theta[k_] : fam.fixed_u;
      const double score_sum =
          0.5 * (beta.dot(xx_ * beta) - 2.0 * beta.dot(xy_) + yy_);
      return u * (s0_sum_ - score_sum) - v_sum_ * psi_eval(*fam.psi, u);
    }
    case Mode::SubPsiElicGeneral: {
      const Vector lambda = theta.head(k_);
      const double u = fam.u_mode == UMode::Joint ? theta[k_] : fam.fixed_u;
      double gap_sum = 0.0;
      for (long i = 0; i < t_; ++i) {
        gap_sum += s0_[static_cast<std::size_t>(i)] -
                   score(fam.functional, lambda, Observation(x_flat_[static_cast<std::size_t>(i)]));
      }
      return u * gap_sum - v_sum_ * psi_eval(*fam.psi, u);
    }
    case Mode::SubPsiIdent: {
      if (fam.u_mode == UMode::Norm) {
        return theta.dot(m_sum_) - v_sum_ * psi_eval(*fam.psi, theta.norm());
      }
      const double u = fam.u_mode == UMode::Joint ? theta[k_] : fam.fixed_u;
      return u * theta.head(k_).dot(m_sum_) - v_sum_ * psi_eval(*fam.psi, u);
    }
  }
  return -kInf;
}

double WealthObjective::gap_sum(const FamilySpec& fam, const Vector& lambda) const {
  switch (mode_) {
    case Mode::SubPsiElicQuadMean: {
      const double l = lambda[0];
      return s0_sum_ - 0.5 * (sxx_ - 2.0 * l * sx_ + static_cast<double>(t_) * l * l);
    }
    case Mode::SubPsiElicQuadReg: {
      const Vector beta = lambda.head(k_);
      return s0_sum_ - 0.5 * (beta.dot(xx_ * beta) - 2.0 * beta.dot(xy_) + yy_);
    }
    case Mode::SubPsiElicGeneral: {
      double acc = 0.0;
      for (long i = 0; i < t_; ++i) {
        acc += s0_[static_cast<std::size_t>(i)] -
               score(fam.functional, lambda, Observation(x_flat_[static_cast<std::size_t>(i)]));
      }
      return acc;
    }
    default:
      throw ParamError("gap_sum applies to sub-psi elicitable objectives");
  }
}

Vector WealthObjective::gap_gradient(const FamilySpec& fam, const Vector& lambda) const {
  switch (mode_) {
    case Mode::SubPsiElicQuadMean:
      return Vector::Constant(1, sx_ - static_cast<double>(t_) * lambda[0]);
    case Mode::SubPsiElicQuadReg:
      return -(xx_ * lambda.head(k_) - xy_);
    case Mode::SubPsiElicGeneral: {
      Vector g = Vector::Zero(k_);
      for (long i = 0; i < t_; ++i) {
        g -= score_subgradient(fam.functional, lambda,
                               Observation(x_flat_[static_cast<std::size_t>(i)]));
      }
      return g;
    }
    default:
      throw ParamError("gap_gradient applies to sub-psi elicitable objectives");
  }
}

Vector WealthObjective::gradient(const FamilySpec& fam, const Vector& theta) const {
  switch (mode_) {
    case Mode::BoundedIdent: {
      Vector g = Vector::Zero(k_);
      const double* m = m_flat_.data();
      for (long i = 0; i < t_; ++i, m += k_) {
        double dot = 0.0;
        for (int j = 0; j < k_; ++j) dot += theta[j] * m[j];
        const double w = 1.0 / std::max(1.0 + dot, 1e-12);
        for (int j = 0; j < k_; ++j) g[j] += w * m[j];
      }
      return g;
    }
    case Mode::BoundedElic: {
      Vector g = Vector::Zero(k_);
      for (long i = 0; i < t_; ++i) {
        const Observation obs(x_flat_[static_cast<std::size_t>(i)]);
        const double gap = s0_[static_cast<std::size_t>(i)] - score(fam.functional, theta, obs);
        const double w = 1.0 / std::max(1.0 + gap, 1e-12);
        g -= w * score_subgradient(fam.functional, theta, obs);
      }
      return g;
    }
    case Mode::SubPsiElicQuadMean: {
      const double lambda = theta[0];
      const double score_sum =
          0.5 * (sxx_ - 2.0 * lambda * sx_ + static_cast<double>(t_) * lambda * lambda);
      const double dscore = -(sx_ - static_cast<double>(t_) * lambda);
      if (fam.u_mode != UMode::Joint) {
        return Vector::Constant(1, -fam.fixed_u * dscore);
      }
      const double u = theta[1];
      Vector g(2);
      g[0] = -u * dscore;
      const double h = 1e-7;
      const double psi_d = (psi_eval(*fam.psi, u + h) - psi_eval(*fam.psi, std::max(0.0, u - h))) /
                           (u + h - std::max(0.0, u - h));
      g[1] = (s0_sum_ - score_sum) - v_sum_ * psi_d;
      return g;
    }
    case Mode::SubPsiElicQuadReg: {
      const Vector beta = theta.head(k_);
      const Vector dscore = xx_ * beta - xy_;
      if (fam.u_mode != UMode::Joint) return -fam.fixed_u * dscore;
      const double u = theta[k_];
      Vector g(k_ + 1);
      g.head(k_) = -u * dscore;
      const double score_sum = 0.5 * (beta.dot(xx_ * beta) - 2.0 * beta.dot(xy_) + yy_);
      const double h = 1e-7;
      const double psi_d = (psi_eval(*fam.psi, u + h) - psi_eval(*fam.psi, std::max(0.0, u - h))) /
                           (u + h - std::max(0.0, u - h));
      g[k_] = (s0_sum_ - score_sum) - v_sum_ * psi_d;
      return g;
    }
    case Mode::SubPsiElicGeneral: {
      const Vector lambda = theta.head(k_);
      const double u = fam.u_mode == UMode::Joint ? theta[k_] : fam.fixed_u;
      Vector dgap = Vector::Zero(k_);
      double gap_sum = 0.0;
      for (long i = 0; i < t_; ++i) {
        const Observation obs(x_flat_[static_cast<std::size_t>(i)]);
        dgap -= score_subgradient(fam.functional, lambda, obs);
        gap_sum += s0_[static_cast<std::size_t>(i)] - score(fam.functional, lambda, obs);
      }
      if (fam.u_mode != UMode::Joint) return u * dgap;
      Vector g(k_ + 1);
      g.head(k_) = u * dgap;
      const double h = 1e-7;
      const double psi_d = (psi_eval(*fam.psi, u + h) - psi_eval(*fam.psi, std::max(0.0, u - h))) /
                           (u + h - std::max(0.0, u - h));
      g[k_] = gap_sum - v_sum_ * psi_d;
      return g;
    }
    case Mode::SubPsiIdent: {
      if (fam.u_mode == UMode::Norm) {
        const double n = theta.norm();
        if (n == 0.0) return m_sum_;
        const double h = 1e-7;
        const double psi_d =
            (psi_eval(*fam.psi, n + h) - psi_eval(*fam.psi, std::max(0.0, n - h))) /
            (n + h - std::max(0.0, n - h));
        return m_sum_ - (v_sum_ * psi_d / n) * theta;
      }
      if (fam.u_mode == UMode::Fixed) return fam.fixed_u * m_sum_;
      const double u = theta[k_];
      Vector g(k_ + 1);
      g.head(k_) = u * m_sum_;
      const double h = 1e-7;
      const double psi_d = (psi_eval(*fam.psi, u + h) - psi_eval(*fam.psi, std::max(0.0, u - h))) /
                           (u + h - std::max(0.0, u - h));
      g[k_] = theta.head(k_).dot(m_sum_) - v_sum_ * psi_d;
      return g;
    }
  }
  return Vector::Zero(theta.size());
}

// ---------------------------------------------------------------------------
// StrategyState
// ---------------------------------------------------------------------------

StrategyState StrategyState::make(Algo algo, FamilySpec fam,
                                  std::optional<double> gradient_bound) {
  StrategyState s;
  s.algo = algo;
  s.fam = std::move(fam);
  s.diam = s.fam.theta_domain.diameter();
  if (gradient_bound.has_value()) {
    if (!(*gradient_bound > 0)) throw ParamError("gradient bound must be positive");
    s.G = *gradient_bound;
  } else {
    s.G = estimate_gradient_bound(s.fam);
  }
  if ((algo == Algo::FtrlProx || algo == Algo::Ogd) && !std::isfinite(s.diam)) {
    throw ParamError("FTRL and OGD need a bounded bet domain");
  }
  s.theta_next = s.fam.theta_domain.center();
  s.objective = WealthObjective(s.fam);
  s.sigma_theta_sum = Vector::Zero(s.fam.theta_dim());
  if (algo == Algo::Ftl || algo == Algo::Ftlp) {
    s.concavity_warning = !certify_concavity(s.fam).certified;
  }
  return s;
}

namespace {

void check_range(const StrategyState& state, const Observation& x) {
  if (!state.check_data_range) return;
  const Interval r = state.fam.functional.data_range;
  if (!r.finite()) return;
  for (int i = 0; i < x.dim(); ++i) {
    if (!r.contains(x.value[i])) {
      throw DataRangeError("observation coordinate " + std::to_string(x.value[i]) +
                           " outside the declared data range; the regret bound would be void");
    }
  }
}

Vector solve_ftl_like(const StrategyState& state) {
  const FamilySpec& fam = state.fam;
  if (state.objective.count() == 0) return fam.theta_domain.center();
  if (has_norm_closed_form(fam)) {
    const double c = quad_psi_coeff(*fam.psi);
    return fam.theta_domain.project(state.objective.m_sum() /
                                    (2.0 * c * state.objective.v_sum()));
  }
  if (fam.kind == FamilyKind::SubPsiIdentifiable && fam.u_mode == UMode::Fixed) {
    if (fam.fixed_u == 0.0) {
      return fam.theta_domain.project(Vector::Zero(fam.theta_dim()));
    }
    return maximize_linear(state.objective.m_sum(), fam.theta_domain);
  }
  if (fam.u_mode == UMode::Joint && (fam.kind == FamilyKind::SubPsiIdentifiable ||
                                     fam.kind == FamilyKind::SubPsiElicitable)) {
    // F(base, u) = u * A(base) - v_sum * psi(u): the base subproblem does not
    // depend on u (the multiplier is nonnegative), and u is univariate.
    const ThetaDomain base = fam.theta_domain.base_only();
    const int k = base.dim();
    Vector b;
    double a_val;
    if (fam.kind == FamilyKind::SubPsiIdentifiable) {
      b = maximize_linear(state.objective.m_sum(), base);
      a_val = b.dot(state.objective.m_sum());
    } else {
      SolverOptions opts = state.solver;
      opts.initial_step = 2.0 / (1.0 + static_cast<double>(state.objective.count()));
      b = pgd_maximize(
          [&](const Vector& l) { return state.objective.gap_sum(fam, l); },
          [&](const Vector& l) { return state.objective.gap_gradient(fam, l); }, base,
          Vector(state.theta_next.head(k)), opts);
      a_val = state.objective.gap_sum(fam, b);
    }
    const double u = maximize_u_slice(*fam.psi, a_val, state.objective.v_sum(),
                                      fam.theta_domain.u_lo, fam.theta_domain.u_hi);
    if (u == 0.0) b = base.project(Vector::Zero(k));  // flat slice: smallest norm
    Vector out(fam.theta_dim());
    out.head(k) = b;
    out[k] = u;
    return out;
  }
  SolverOptions opts = state.solver;
  if (opts.initial_step == 0.0) {
    opts.initial_step = 2.0 / (1.0 + static_cast<double>(state.objective.count()));
  }
  return pgd_maximize(
      [&](const Vector& th) { return state.objective.value(fam, th); },
      [&](const Vector& th) { return state.objective.gradient(fam, th); }, fam.theta_domain,
      state.theta_next, opts);
}

}  // namespace

Vector ftl_update(const StrategyState& state) { return solve_ftl_like(state); }

Vector ftrl_update(const StrategyState& state) {
  const FamilySpec& fam = state.fam;
  if (state.objective.count() == 0) return fam.theta_domain.center();
  const auto value = [&](const Vector& th) {
    const double reg = 0.5 * state.sigma_sum * th.squaredNorm() - th.dot(state.sigma_theta_sum);
    return state.objective.value(fam, th) - reg;
  };
  const auto gradient = [&](const Vector& th) {
    return Vector(state.objective.gradient(fam, th) - state.sigma_sum * th +
                  state.sigma_theta_sum);
  };
  SolverOptions opts = state.solver;
  if (opts.initial_step == 0.0) {
    opts.initial_step = 2.0 / (1.0 + static_cast<double>(state.objective.count()));
  }
  return pgd_maximize(value, gradient, fam.theta_domain, state.theta_next, opts);
}

Vector ogd_update(const StrategyState& state, const Vector& loss_subgradient) {
  const double eta = state.diam / (state.G * std::sqrt(static_cast<double>(state.t)));
  return state.fam.theta_domain.project(state.theta_next - eta * loss_subgradient);
}

Vector ftlp_update(const StrategyState& state, const Predictive& predictive) {
  const FamilySpec& fam = state.fam;
  if (predictive.empty()) return fam.theta_domain.center();
  double total = 0;
  for (const auto& [x, p] : predictive) total += p;
  if (std::abs(total - 1.0) > 1e-9) throw ParamError("predictive weights must sum to 1");
  const int next_step = state.t + 1;
  const auto value = [&](const Vector& th) {
    double acc = 0;
    for (const auto& [x, p] : predictive) {
      const double r = raw_increment(fam, th, x, next_step);
      if (r <= 0.0) return -kInf;
      acc += p * std::log(r);
    }
    return acc;
  };
  const auto gradient = [&](const Vector& th) {
    Vector g = Vector::Zero(fam.theta_dim());
    for (const auto& [x, p] : predictive) g += p * increment_gradient(fam, th, x, next_step);
    return g;
  };
  return pgd_maximize(value, gradient, fam.theta_domain, state.theta_next, state.solver);
}

double step(StrategyState& state, const Observation& x) {
  check_range(state, x);
  if (degenerate_row(state.fam.functional, x)) ++state.degenerate_rows;
  const int this_step = state.t + 1;
  const double realized = log_increment(state.fam, state.theta_next, x, this_step);
  state.log_wealth += realized;
  state.running_max_log_wealth = std::max(state.running_max_log_wealth, state.log_wealth);

  // Fold x into the histories, then pick the next bet. The bet charged
  // against x above never saw x.
  Vector grad_at_bet;
  if (state.algo == Algo::Ogd) {
    grad_at_bet = increment_gradient(state.fam, state.theta_next, x, this_step);
  }
  state.objective.add(state.fam, x, this_step);
  if (state.keep_history) state.history.push_back(x);
  state.t = this_step;

  switch (state.algo) {
    case Algo::Ftl:
      state.theta_next = ftl_update(state);
      break;
    case Algo::FtrlProx: {
      // Proximal regularizer anchored at the bet just used; the strengths
      // telescope so that sum sigma_i = (G/diam) sqrt(t).
      const double t = static_cast<double>(state.t);
      const double sigma = state.G / state.diam * (std::sqrt(t) - std::sqrt(t - 1.0));
      state.sigma_sum += sigma;
      state.sigma_theta_sum += sigma * state.theta_next;
      state.theta_next = ftrl_update(state);
      break;
    }
    case Algo::Ogd:
      state.theta_next = ogd_update(state, Vector(-grad_at_bet));
      break;
    case Algo::Ftlp: {
      Predictive pred;
      if (state.predictive) {
        pred = state.predictive(state);
      } else {
        if (!state.keep_history) {
          throw ParamError("empirical FTLP needs the observation history");
        }
        const double p = 1.0 / static_cast<double>(state.history.size());
        for (const auto& obs : state.history) pred.emplace_back(obs, p);
      }
      state.theta_next = ftlp_update(state, pred);
      break;
    }
  }
  return realized;
}

double best_fixed_log_wealth(const StrategyState& state) {
  const FamilySpec& fam = state.fam;
  if (state.objective.count() == 0) return 0.0;
  const auto value = [&](const Vector& th) { return state.objective.value(fam, th); };
  if (has_norm_closed_form(fam) ||
      (fam.kind == FamilyKind::SubPsiIdentifiable && fam.u_mode == UMode::Fixed) ||
      (fam.u_mode == UMode::Joint && (fam.kind == FamilyKind::SubPsiIdentifiable ||
                                      fam.kind == FamilyKind::SubPsiElicitable))) {
    return value(solve_ftl_like(state));  // exact (closed form / decomposition)
  }
  const auto gradient = [&](const Vector& th) { return state.objective.gradient(fam, th); };

  // Grid-refined in low dimension, projected gradient polish from the best
  // grid point and the current bet.
  Vector best = fam.theta_domain.center();
  double best_val = value(best);
  if (fam.theta_dim() <= 2) {
    for (const auto& p : fam.theta_domain.scan_points(33)) {
      const double v = value(p);
      if (v > best_val) {
        best_val = v;
        best = p;
      }
    }
  }
  for (const Vector& start : {best, state.theta_next}) {
    const Vector polished = pgd_maximize(value, gradient, fam.theta_domain, start, state.solver);
    const double v = value(polished);
    if (v > best_val) {
      best_val = v;
      best = polished;
    }
  }
  return best_val;
}

double regret(const StrategyState& state) {
  return best_fixed_log_wealth(state) - state.log_wealth;
}

// ---------------------------------------------------------------------------
// Mixtures
// ---------------------------------------------------------------------------

MixtureWeights MixtureWeights::dirac(Vector theta) {
  return MixtureWeights{{std::move(theta)}, {1.0}};
}

MixtureWeights MixtureWeights::uniform(std::vector<Vector> atoms) {
  const std::size_t n = atoms.size();
  if (n == 0) throw ParamError("empty mixture");
  return MixtureWeights{std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

MixtureWeights MixtureWeights::make(std::vector<Vector> atoms, std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw ParamError("mixture needs matching nonempty atoms/probs");
  }
  double sum = 0;
  for (double p : probs) {
    if (p < 0) throw ParamError("mixture probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParamError("mixture probabilities must sum to 1");
  return MixtureWeights{std::move(atoms), std::move(probs)};
}

double mixture_step(const MixtureWeights& weights, const FamilySpec& fam, const Observation& x,
                    int step) {
  if (weights.atoms.empty()) throw ParamError("empty mixture");
  // Work on the log scale with a max shift; bounded-family increments may be
  // negative, so track signs explicitly.
  double max_log = -kInf;
  std::vector<double> raw(weights.atoms.size());
  for (std::size_t j = 0; j < weights.atoms.size(); ++j) {
    raw[j] = raw_increment(fam, weights.atoms[j], x, step);
    if (raw[j] > 0) max_log = std::max(max_log, std::log(raw[j]));
  }
  if (!std::isfinite(max_log)) throw NonpositiveIncrement(0.0, step);
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.atoms.size(); ++j) {
    if (raw[j] > 0) {
      acc += weights.probs[j] * std::exp(std::log(raw[j]) - max_log);
    } else if (raw[j] < 0) {
      acc -= weights.probs[j] * std::exp(std::log(-raw[j]) - max_log);
    }
  }
  if (acc <= 0.0) throw NonpositiveIncrement(acc, step);
  return max_log + std::log(acc);
}

}  // namespace avseq
