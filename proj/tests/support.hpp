#pragma once

// Shared helpers for the test suites: exact discrete null models for each
// catalog functional and the brute-force conditional-expectation oracle for
// family increments.

#include <cmath>
#include <utility>
#include <vector>

#include "avseq/families.hpp"
#include "avseq/functionals.hpp"

namespace avseq::testsupport {

struct ObsAtom {
  Observation x;
  double p;
};

using ObsModel = std::vector<std::vector<ObsAtom>>;  // one conditional law per step

// Two-point law with mean exactly lambda0 (scalar observations).
inline std::vector<ObsAtom> mean_null_atoms(double lambda0, double spread, double p = 0.5) {
  const double d = spread;
  const double a = lambda0 - d * std::sqrt((1.0 - p) / p);
  const double b = lambda0 + d * std::sqrt(p / (1.0 - p));
  return {{Observation(a), p}, {Observation(b), 1.0 - p}};
}

// Two-point law matching mean lambda[0] and sd lambda[1] exactly.
inline std::vector<ObsAtom> mean_sd_null_atoms(const Vector& lambda, double p = 0.4) {
  const double mu = lambda[0], sd = lambda[1];
  const double a = mu - sd * std::sqrt((1.0 - p) / p);
  const double b = mu + sd * std::sqrt(p / (1.0 - p));
  return {{Observation(a), p}, {Observation(b), 1.0 - p}};
}

// P(X > lambda0) = alpha exactly; also minimizes the expected quantile score
// for every lambda0 strictly between the atoms.
inline std::vector<ObsAtom> quantile_null_atoms(double alpha, double below, double above) {
  return {{Observation(below), 1.0 - alpha}, {Observation(above), alpha}};
}

// P(X <= lambda_v) = alpha0 and E[X 1{X <= lambda_v}] = alpha0 * lambda_c:
// one atom at lambda_c below the VaR, the rest above.
inline std::vector<ObsAtom> var_cvar_null_atoms(double alpha0, const Vector& lambda,
                                                double hi1 = 0.6, double hi2 = 0.9) {
  return {{Observation(lambda[1]), alpha0},
          {Observation(hi1), (1.0 - alpha0) / 2.0},
          {Observation(hi2), (1.0 - alpha0) / 2.0}};
}

// AR-style regression null: fixed covariate per step, response centered at
// beta0 * covariate.
inline ObsModel regression_null_model(double beta0, const std::vector<double>& covariates,
                                      double noise) {
  ObsModel model;
  for (double c : covariates) {
    model.push_back({{Observation(beta0 * c - noise, c), 0.5},
                     {Observation(beta0 * c + noise, c), 0.5}});
  }
  return model;
}

// Exact conditional expectation of the multiplicative increment at every
// step of the model; returns the maximum (and minimum via out-param).
inline double max_conditional_expectation(const FamilySpec& fam, const Vector& theta,
                                          const ObsModel& model, double* min_out = nullptr) {
  double mx = -kInf, mn = kInf;
  for (std::size_t s = 0; s < model.size(); ++s) {
    double e = 0.0;
    for (const auto& atom : model[s]) {
      e += atom.p * raw_increment(fam, theta, atom.x, static_cast<int>(s) + 1);
    }
    mx = std::max(mx, e);
    mn = std::min(mn, e);
  }
  if (min_out) *min_out = mn;
  return mx;
}

}  // namespace avseq::testsupport
