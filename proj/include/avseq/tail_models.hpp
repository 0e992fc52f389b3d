#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "avseq/types.hpp"

namespace avseq {

// ---------------------------------------------------------------------------
// Psi functions: nonnegative, convex on [0, u_max), psi(0) = psi'(0) = 0.
// Gaussian and Hoeffding kinds have u_max = +inf; custom tables declare a
// finite u_max and are evaluated by linear interpolation.
// ---------------------------------------------------------------------------

struct PsiSpec {
  enum class Kind { Gaussian, Hoeffding, CustomTable };

  Kind kind = Kind::Gaussian;
  double sigma = 1.0;     // Gaussian
  double a = 0, b = 1;    // Hoeffding bounds
  std::vector<double> table_u, table_v;
  double u_max = kInf;
  double deriv0 = 0.0;

  static PsiSpec gaussian(double sigma);
  static PsiSpec hoeffding(double a, double b);
  static PsiSpec custom(std::vector<double> us, std::vector<double> vals, double u_max);

  // String ids: gaussian:1.0 | hoeffding:0:1
  static PsiSpec parse(const std::string& id);
  std::string str_id() const;
};

double psi_eval(const PsiSpec& spec, double u);

// Convex conjugate psi*(c) = sup{ u c - psi(u) : u in [0, u_max) }.
// Closed form for the Gaussian kind, golden-section search otherwise
// (bracket tolerance 1e-10).
double psi_conjugate(const PsiSpec& spec, double c);

// ---------------------------------------------------------------------------
// Variance processes V_t = sum of per-step v_i >= 0, V_0 = 0.
// ---------------------------------------------------------------------------

struct VarianceProcess {
  enum class Rule { UnitPerStep, CustomSequence };
  Rule rule = Rule::UnitPerStep;
  std::vector<double> values;

  static VarianceProcess unit() { return {}; }
  static VarianceProcess custom(std::vector<double> v);

  // v_t for 1-based step t.
  double at(int step) const;
};

// ---------------------------------------------------------------------------
// Finite discrete conditional increment models. The conditional distribution
// of the increment dY_t may depend on the full path prefix of atom indices,
// so iid, per-step and Markov models are all expressible. Enumeration visits
// every node of the induced tree; a node budget guards against blowup.
// ---------------------------------------------------------------------------

struct DiscreteAtom {
  double dy;
  double prob;
};

struct DiscreteModel {
  int steps = 1;
  std::function<std::vector<DiscreteAtom>(int step, std::span<const int> prefix)> conditional;

  static DiscreteModel iid(std::vector<DiscreteAtom> atoms, int steps);
  static DiscreteModel per_step(std::vector<std::vector<DiscreteAtom>> by_step);
};

struct SubPsiViolation {
  int step;
  std::vector<int> prefix;
  double u;
  double conditional_expectation;
};

struct SubPsiReport {
  double max_conditional_expectation = 0.0;
  double max_conditional_drift = -kInf;  // max over nodes of E[dY | node]
  long nodes_checked = 0;
  bool passes = false;  // max conditional expectation <= 1 + 1e-12
  std::vector<SubPsiViolation> violations;
};

// Exhaustively computes E[ exp(u dY - dv psi(u)) | node ] at every tree node
// and every u in u_grid. Limits: <= 20 atoms per step, <= 10 steps, and a
// total node budget; beyond those SizeError is raised.
SubPsiReport verify_sub_psi_discrete(const DiscreteModel& model, const PsiSpec& spec,
                                     const VarianceProcess& variance,
                                     std::span<const double> u_grid);

}  // namespace avseq
