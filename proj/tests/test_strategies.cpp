#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "avseq/rng.hpp"
#include "avseq/simlab.hpp"
#include "avseq/strategies.hpp"
#include "support.hpp"

using namespace avseq;
using namespace avseq::testsupport;

namespace {

Vector vec1(double a) { return Vector::Constant(1, a); }
Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

FamilySpec mean_ident_family(double lambda0 = 0.5, double halfwidth = 0.5) {
  const Functional f = Functional::mean(Interval{0, 1});
  return FamilySpec::bounded_identifiable(f, vec1(lambda0),
                                          ThetaDomain::box(vec1(-halfwidth), vec1(halfwidth)));
}

FamilySpec subpsi_mean_norm(double lambda0 = 0.0, double halfwidth = 2.0, double sigma = 1.0) {
  const Functional f = Functional::mean(Interval{-6, 6});
  return FamilySpec::subpsi_identifiable(f, vec1(lambda0), PsiSpec::gaussian(sigma),
                                         VarianceProcess::unit(),
                                         ThetaDomain::box(vec1(-halfwidth), vec1(halfwidth)),
                                         UMode::Norm);
}

}  // namespace

TEST_CASE("projected gradient matches the analytic vertex of a strongly concave quadratic") {
  const ThetaDomain dom = ThetaDomain::box(vec2(-2, -2), vec2(2, 2));
  const Vector target = vec2(0.7, -1.2);
  const auto value = [&](const Vector& th) { return -(th - target).squaredNorm(); };
  const auto grad = [&](const Vector& th) { return Vector(-2.0 * (th - target)); };
  const Vector sol = pgd_maximize(value, grad, dom, vec2(1.5, 1.5));
  CHECK((sol - target).norm() <= 1e-7);

  // Constrained vertex: optimum outside, solution on the boundary.
  const Vector far = vec2(3.0, 0.0);
  const auto value2 = [&](const Vector& th) { return -(th - far).squaredNorm(); };
  const auto grad2 = [&](const Vector& th) { return Vector(-2.0 * (th - far)); };
  const Vector sol2 = pgd_maximize(value2, grad2, dom, vec2(0, 0));
  CHECK(sol2[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(std::abs(sol2[1]) <= 1e-6);
}

TEST_CASE("first step with the zero center bet earns log 1") {
  for (Algo algo : {Algo::Ftl, Algo::FtrlProx, Algo::Ogd, Algo::Ftlp}) {
    StrategyState st = StrategyState::make(algo, mean_ident_family());
    CHECK(st.theta_next[0] == doctest::Approx(0.0));
    const double realized = step(st, Observation(0.9));
    CHECK(realized == 0.0);
    CHECK(st.log_wealth == 0.0);
    CHECK(st.t == 1);
  }
}

TEST_CASE("predictability: the bet charged against x_t never depends on x_t") {
  Rng rng(4);
  StrategyState st = StrategyState::make(Algo::Ftl, mean_ident_family());
  for (int i = 0; i < 10; ++i) step(st, Observation(rng.uniform(0, 1)));
  const Vector bet = st.theta_next;
  StrategyState a = st, b = st;
  const double ra = step(a, Observation(0.05));
  const double rb = step(b, Observation(0.95));
  CHECK(ra == doctest::Approx(log_increment(st.fam, bet, Observation(0.05), 11)));
  CHECK(rb == doctest::Approx(log_increment(st.fam, bet, Observation(0.95), 11)));
}

TEST_CASE("ftl closed form: running mean of the identification values") {
  // sub-psi identifiable mean family, lambda0=0, gaussian(1): eta_{t+1} = mbar_t
  StrategyState st = StrategyState::make(Algo::Ftl, subpsi_mean_norm());
  step(st, Observation(1.0));
  CHECK(st.theta_next[0] == doctest::Approx(1.0).epsilon(1e-12));
  step(st, Observation(1.0));
  CHECK(st.theta_next[0] == doctest::Approx(1.0).epsilon(1e-12));
  step(st, Observation(-0.5));
  CHECK(st.theta_next[0] == doctest::Approx(0.5).epsilon(1e-12));
  // and the closed form clips into the domain
  StrategyState small = StrategyState::make(Algo::Ftl, subpsi_mean_norm(0.0, 0.25));
  step(small, Observation(1.0));
  CHECK(small.theta_next[0] == doctest::Approx(0.25));
}

TEST_CASE("ftl empty history returns the domain center") {
  StrategyState st = StrategyState::make(Algo::Ftl, mean_ident_family());
  CHECK(ftl_update(st)[0] == doctest::Approx(0.0));
}

TEST_CASE("ftl inner solver matches the analytic vertex on a strongly concave payoff") {
  // Norm-mode family without the closed form (hoeffding psi is quadratic too,
  // so compare the solver against the known optimum by disabling the closed
  // form via a joint-free check: use the bounded identifiable family with one
  // repeated observation, whose argmax is at the domain boundary.)
  StrategyState st = StrategyState::make(Algo::Ftl, mean_ident_family(0.5, 0.5));
  for (int i = 0; i < 5; ++i) step(st, Observation(1.0));  // m = +0.5 each step
  // log L(theta) = 5 log(1+0.5 theta), increasing: argmax at theta = 0.5.
  CHECK(st.theta_next[0] == doctest::Approx(0.5).epsilon(1e-7));

  // Interior optimum: alternating m = +-0.5 with unequal counts.
  StrategyState st2 = StrategyState::make(Algo::Ftl, mean_ident_family(0.5, 0.9));
  // two up, one down: maximize 2 log(1+0.5 t) + log(1-0.5 t):
  // derivative zero at t = 2/3 ... solve: 1/(1+t/2) - 0.5/(1-t/2) ... vertex
  // computed analytically below.
  step(st2, Observation(1.0));
  step(st2, Observation(1.0));
  step(st2, Observation(0.0));
  // d/dt [2 log(1+t/2) + log(1-t/2)] = 1/(1+t/2) - (1/2)/(1-t/2) = 0
  // => 1 - t/2 = (1/2)(1 + t/2) => t = 2/3... wait: 1-t/2 = 0.5 + t/4 => t = 2/3.
  CHECK(st2.theta_next[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("ogd projection updates match hand computation") {
  StrategyState st = StrategyState::make(Algo::Ogd, mean_ident_family(0.5, 1.0),
                                         /*gradient_bound=*/2.0);
  // nu = 0 keeps theta fixed
  st.t = 1;
  CHECK(ogd_update(st, vec1(0.0))[0] == doctest::Approx(st.theta_next[0]));
  // box clip at the boundary: theta=0.9, eta*nu = -0.3 -> 1.2 -> clip to 1
  st.theta_next = vec1(0.9);
  st.G = 2.0;
  st.diam = 2.0;  // eta_1 = diam/(G sqrt(1)) = 1
  CHECK(ogd_update(st, vec1(-0.3))[0] == doctest::Approx(1.0));

  // two-step toy stream: theta_2 = proj(theta_1 - eta_1 nu_1)
  StrategyState fresh = StrategyState::make(Algo::Ogd, mean_ident_family(0.5, 1.0), 2.0);
  const Observation x(1.0);  // m = 0.5, gradient of -loginc at 0 is -0.5
  const double eta1 = fresh.diam / fresh.G;
  step(fresh, x);
  CHECK(fresh.theta_next[0] == doctest::Approx(0.0 + eta1 * 0.5));
}

TEST_CASE("ftrl stays at the center on a flat stream and telescopes sigmas") {
  // Data exactly at the null makes every log increment identically zero.
  StrategyState st = StrategyState::make(Algo::FtrlProx, mean_ident_family(0.5, 0.5));
  for (int i = 0; i < 6; ++i) {
    step(st, Observation(0.5));  // m = 0
    CHECK(st.theta_next[0] == doctest::Approx(0.0));
  }
  CHECK(st.sigma_sum == doctest::Approx(st.G / st.diam * std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("ftrl trajectory matches a grid-search oracle on a linear payoff stream") {
  // Bounded identifiable 1-d: increments log(1 + theta m_i).
  const FamilySpec fam = mean_ident_family(0.5, 0.5);
  StrategyState st = StrategyState::make(Algo::FtrlProx, fam);
  Rng rng(9);
  std::vector<Observation> xs;
  for (int i = 0; i < 25; ++i) xs.emplace_back(rng.uniform(0, 1));
  for (const auto& x : xs) {
    step(st, x);
    // independent grid argmin of -log L + sum of proximal quadratics
    double best = -kInf, best_t = 0;
    for (int gi = 0; gi <= 20000; ++gi) {
      const double th = -0.5 + gi * (1.0 / 20000.0);
      double v = st.objective.value(fam, vec1(th));
      v -= 0.5 * st.sigma_sum * th * th - th * st.sigma_theta_sum[0];
      if (v > best) {
        best = v;
        best_t = th;
      }
    }
    CHECK(std::abs(st.theta_next[0] - best_t) <= 1e-4);
  }
}

TEST_CASE("ftlp with the empirical measure coincides with ftl") {
  Rng rng(21);
  StrategyState ftl = StrategyState::make(Algo::Ftl, mean_ident_family(0.4, 0.6));
  StrategyState ftlp = StrategyState::make(Algo::Ftlp, mean_ident_family(0.4, 0.6));
  for (int i = 0; i < 20; ++i) {
    const Observation x(rng.uniform(0, 1));
    step(ftl, x);
    step(ftlp, x);
    CHECK(std::abs(ftl.theta_next[0] - ftlp.theta_next[0]) <= 1e-6);
  }
}

TEST_CASE("ftlp with a point mass is one-sample ftl") {
  StrategyState st = StrategyState::make(Algo::Ftlp, mean_ident_family(0.5, 0.5));
  step(st, Observation(0.9));  // irrelevant history; predictive overrides
  const Vector theta = ftlp_update(st, Predictive{{Observation(1.0), 1.0}});
  // single-sample FTL: maximize log(1+0.5 theta) -> boundary 0.5
  CHECK(theta[0] == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("ftlp on the discretized true distribution finds the log-optimal bet") {
  // Beta(2,5) discretized on 512 atoms; mean family at the preset null.
  const FamilySpec fam = mean_ident_family(0.4, 0.6);
  Predictive pred;
  const int n = 512;
  for (int i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
    const double mid = 0.5 * (lo + hi);
    const double p = regularized_incomplete_beta(2, 5, hi) - regularized_incomplete_beta(2, 5, lo);
    pred.emplace_back(Observation(mid), p);
  }
  double total = 0;
  for (auto& [x, p] : pred) total += p;
  for (auto& [x, p] : pred) p /= total;

  StrategyState st = StrategyState::make(Algo::Ftlp, fam);
  st.predictive = [pred](const StrategyState&) { return pred; };
  step(st, Observation(0.2));
  const double theta = st.theta_next[0];

  // grid oracle over the same predictive
  double best = -kInf, best_t = 0;
  for (int gi = 0; gi <= 60000; ++gi) {
    const double th = -0.6 + gi * (1.2 / 60000.0);
    double v = 0;
    for (const auto& [x, p] : pred) v += p * std::log1p(th * (x.scalar() - 0.4));
    if (v > best) {
      best = v;
      best_t = th;
    }
  }
  CHECK(std::abs(theta - best_t) <= 1e-4);
}

TEST_CASE("regret: singleton domain is zero") {
  const Functional f = Functional::mean(Interval{0, 1});
  const FamilySpec fam = FamilySpec::bounded_identifiable(
      f, vec1(0.5), ThetaDomain::box(vec1(0.2), vec1(0.2)));
  StrategyState st = StrategyState::make(Algo::Ftl, fam);
  Rng rng(2);
  for (int i = 0; i < 30; ++i) step(st, Observation(rng.uniform(0, 1)));
  CHECK(std::abs(regret(st)) <= 1e-9);
}

TEST_CASE("regret matches an exhaustive grid oracle on a short atom stream") {
  const FamilySpec fam = mean_ident_family(0.5, 0.5);
  StrategyState st = StrategyState::make(Algo::Ogd, fam);
  const std::vector<double> atoms = {0.1, 0.9, 0.7, 0.2, 0.9, 0.9, 0.4, 0.1};
  for (double a : atoms) step(st, Observation(a));
  double best = -kInf;
  for (int gi = 0; gi <= 200000; ++gi) {
    const double th = -0.5 + gi * (1.0 / 200000.0);
    double v = 0;
    for (double a : atoms) v += std::log1p(th * (a - 0.5));
    best = std::max(best, v);
  }
  CHECK(best_fixed_log_wealth(st) == doctest::Approx(best).epsilon(1e-6));
  CHECK(regret(st) == doctest::Approx(best - st.log_wealth).epsilon(1e-6));
  CHECK(regret(st) >= -1e-9);
}

TEST_CASE("ftl regret obeys the logarithmic bound on a strongly concave family") {
  // Norm-mode gaussian family: -d log increments are 1-strongly convex.
  const FamilySpec fam = subpsi_mean_norm(0.0, 2.0, 1.0);
  StrategyState st = StrategyState::make(Algo::Ftl, fam, /*gradient_bound=*/8.0);
  Rng rng(33);
  const int horizon = 1000;
  for (int t = 1; t <= horizon; ++t) {
    step(st, Observation(rng.gaussian(0.3, 1.0)));
    if (t % 100 == 0 || t == 1) {
      const double bound = st.G * st.G / 2.0 * (1.0 + std::log(static_cast<double>(t)));
      CHECK(regret(st) <= bound + 1e-6);
      CHECK(regret(st) >= -1e-9);
    }
  }
}

TEST_CASE("mixture steps") {
  const FamilySpec fam = mean_ident_family(0.5, 0.9);
  const Observation x(0.9);  // m = 0.4
  // dirac reduces to the plain increment
  CHECK(mixture_step(MixtureWeights::dirac(vec1(0.5)), fam, x, 1) ==
        doctest::Approx(log_increment(fam, vec1(0.5), x, 1)));
  // equal increments: mixture of g and g is g
  const double g = log_increment(fam, vec1(0.3), x, 1);
  CHECK(mixture_step(MixtureWeights::uniform({vec1(0.3), vec1(0.3)}), fam, x, 1) ==
        doctest::Approx(g).epsilon(1e-14));
  // direct summation oracle over five atoms
  std::vector<Vector> atoms = {vec1(-0.8), vec1(-0.4), vec1(0.0), vec1(0.4), vec1(0.8)};
  double direct = 0;
  for (const auto& th : atoms) direct += 0.2 * (1.0 + th[0] * 0.4);
  CHECK(mixture_step(MixtureWeights::uniform(atoms), fam, x, 1) ==
        doctest::Approx(std::log(direct)).epsilon(1e-12));
  // all atoms nonpositive: error
  FamilySpec wide = fam;
  wide.theta_domain = ThetaDomain::box(vec1(-4), vec1(4));
  CHECK_THROWS_AS(mixture_step(MixtureWeights::dirac(vec1(-3.0)), wide, x, 1),
                  NonpositiveIncrement);
}

TEST_CASE("mixture of null-family increments is a supermartingale, exhaustively") {
  const FamilySpec fam = mean_ident_family(0.5, 0.9);
  const auto atoms_list = fam.theta_domain.scan_points(5);
  const MixtureWeights mix = MixtureWeights::uniform(atoms_list);
  const auto model = mean_null_atoms(0.5, 0.3);
  double e = 0;
  for (const auto& atom : model) e += atom.p * std::exp(mixture_step(mix, fam, atom.x, 1));
  CHECK(e <= 1.0 + 1e-12);
  CHECK(e >= 1.0 - 1e-12);  // identifiable: martingale, equality
}

TEST_CASE("data outside the declared range raises DataRangeError") {
  StrategyState st = StrategyState::make(Algo::Ftl, mean_ident_family());
  CHECK_THROWS_AS(step(st, Observation(1.5)), DataRangeError);
  st.check_data_range = false;
  CHECK_NOTHROW(step(st, Observation(0.5)));
}

TEST_CASE("ogd and ftrl require a bounded domain") {
  const Functional f = Functional::mean(Interval{-6, 6});
  const FamilySpec fam = FamilySpec::subpsi_identifiable(
      f, vec1(0.0), PsiSpec::gaussian(1.0), VarianceProcess::unit(),
      ThetaDomain::box(vec1(-kInf), vec1(kInf)), UMode::Norm);
  CHECK_THROWS_AS(StrategyState::make(Algo::Ogd, fam), ParamError);
  CHECK_NOTHROW(StrategyState::make(Algo::Ftl, fam, 10.0));
}
