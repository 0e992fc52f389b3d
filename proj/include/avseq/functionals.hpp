#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avseq/types.hpp"

namespace avseq {

// ---------------------------------------------------------------------------
// Functional catalog: mean, alpha-quantile, AR(k) regression coefficients,
// joint (mean, sd), joint (VaR, CVaR). Each entry fixes one sign convention
// for its identification function; the supermartingale families downstream
// are closed under sign flips of the bet, so only consistency matters.
//
//   mean        m(l,x) = x - l                        (= -grad s)
//   quantile    m(l,x) = 1{x>l} - alpha               (= -grad s)
//   regression  m(b,(y,x)) = (<b,x> - y) x / |x|      (= grad s / |x|)
//   mean_sd     m((lm,ls),x) = (lm - x, lm^2 + ls^2 - x^2)
//   var_cvar    m((lv,lc),x) = (1{x<=lv} - a0, x 1{x<=lv} - a0 lc)
// ---------------------------------------------------------------------------

enum class FunctionalId { Mean, Quantile, Regression, MeanSd, VarCvar };

struct Functional {
  FunctionalId id = FunctionalId::Mean;
  double alpha = 0.0;  // quantile level / var_cvar tail level
  int k = 1;           // parameter dimension
  int obs_dim = 1;
  bool has_score = false;
  bool has_ident = false;

  // Parameter domain Lambda: a box, plus the VarCvar ordering constraint
  // lambda_c <= lambda_v (closed half-space, boundary allowed).
  Vector lambda_lo, lambda_hi;
  bool ordered_pair = false;

  // Declared per-coordinate range of the raw data; drives ident_bound and
  // the admissibility scans of the family constructors.
  Interval data_range;

  static Functional mean(Interval data_range = unbounded_interval());
  static Functional quantile(double alpha, Interval data_range = Interval{0, 1});
  static Functional regression(int k, Interval data_range = unbounded_interval());
  static Functional mean_sd(Interval data_range = Interval{0, 1});
  static Functional var_cvar(double alpha0, Interval data_range = Interval{0, 1});

  // String ids used by the CLI and config files:
  //   mean | quantile:0.05 | regression:2 | mean_sd | var_cvar:0.05
  static Functional parse(const std::string& id);
  std::string str_id() const;
};

bool lambda_in_domain(const Functional& f, const Vector& lambda);
void require_lambda(const Functional& f, const Vector& lambda);

double score(const Functional& f, const Vector& lambda, const Observation& x);

// Subgradient of the scoring function in lambda (one-sided choice at kinks).
// This is the exact linearization used by the domination bound; note the
// catalog m above differs from it by the documented sign/scale.
Vector score_subgradient(const Functional& f, const Vector& lambda, const Observation& x);

Vector ident(const Functional& f, const Vector& lambda, const Observation& x);

// Streaming variant: a regression row with zero covariates contributes the
// zero vector instead of raising DegenerateInput.
Vector ident_streaming(const Functional& f, const Vector& lambda, const Observation& x);
bool degenerate_row(const Functional& f, const Observation& x);

// Uniform bound sup ||m(lambda,x)|| over the declared data range and the
// lambda box, when both are finite enough for one to exist.
std::optional<double> ident_bound(const Functional& f);

// ---------------------------------------------------------------------------
// Reference distributions with ground-truth oracles.
// ---------------------------------------------------------------------------

struct ReferenceDistribution {
  enum class Kind { Beta, Gaussian, Ar1, Discrete };
  Kind kind = Kind::Beta;
  double a = 2, b = 5;        // Beta
  double mu = 0, sigma = 1;   // Gaussian
  double ar_beta = 0.5;       // AR(1) coefficient
  double noise_var = 0.8;     // AR(1) innovation variance
  std::vector<double> atoms, probs;

  static ReferenceDistribution beta(double a, double b) {
    ReferenceDistribution r;
    r.kind = Kind::Beta;
    r.a = a;
    r.b = b;
    return r;
  }
  static ReferenceDistribution gaussian(double mu, double sigma) {
    ReferenceDistribution r;
    r.kind = Kind::Gaussian;
    r.mu = mu;
    r.sigma = sigma;
    return r;
  }
  static ReferenceDistribution ar1(double beta, double noise_var) {
    ReferenceDistribution r;
    r.kind = Kind::Ar1;
    r.ar_beta = beta;
    r.noise_var = noise_var;
    return r;
  }
  static ReferenceDistribution discrete(std::vector<double> atoms, std::vector<double> probs);
};

Vector true_value(const Functional& f, const ReferenceDistribution& ref);

// Special-function helpers, exposed for the oracle tests.
double regularized_incomplete_beta(double a, double b, double x);
double beta_quantile(double a, double b, double p);  // bisection, |err| <= 1e-10
double beta_mean(double a, double b);
double beta_sd(double a, double b);
// E[X 1{X <= q}] under Beta(a,b), adaptive Simpson quadrature.
double beta_partial_first_moment(double a, double b, double q);

}  // namespace avseq
