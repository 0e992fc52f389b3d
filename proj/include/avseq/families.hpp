#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avseq/functionals.hpp"
#include "avseq/tail_models.hpp"
#include "avseq/types.hpp"

namespace avseq {

// ---------------------------------------------------------------------------
// Bet domains. A domain is a box or a ball over the bet coordinates,
// optionally extended by a trailing u-coordinate interval for the sub-psi
// joint parametrization (product domain Theta' x [u_lo, u_hi]).
// ---------------------------------------------------------------------------

struct ThetaDomain {
  enum class Shape { Box, Ball };

  Shape shape = Shape::Box;
  Vector lo, hi;        // box bounds
  Vector ball_center;   // ball
  double radius = 0.0;
  bool has_u = false;
  double u_lo = 0.0, u_hi = 0.0;

  static ThetaDomain box(Vector lo, Vector hi);
  static ThetaDomain ball(Vector center, double radius);
  ThetaDomain with_u(double u_lo, double u_hi) const;
  // The domain over the base coordinates only (u stripped).
  ThetaDomain base_only() const;

  int base_dim() const;
  int dim() const { return base_dim() + (has_u ? 1 : 0); }
  Vector center() const;
  double diameter() const;
  bool contains(const Vector& theta, double tol = 1e-9) const;
  // Exact Euclidean projection: coordinate clip on boxes, radial rescale on
  // balls, u clamped to its interval.
  Vector project(const Vector& theta) const;
  // Deterministic scan mesh (grids on boxes, rings/axes on balls), used by
  // admissibility scans and grid oracles.
  std::vector<Vector> scan_points(int per_axis) const;
};

// ---------------------------------------------------------------------------
// Family constructors. Each family exposes the log of its per-observation
// multiplicative increment log(L_t^theta / L_{t-1}^theta):
//
//   bounded elicitable      log(1 + s(l0,x) - s(theta,x))
//   bounded identifiable    log(1 + <theta, m(l0,x)>)
//   sub-psi elicitable      u (s(l0,x) - s(lambda,x)) - v_t psi(u)
//   sub-psi identifiable    u <eta, m(l0,x)> - v_t psi(u)
//
// Sub-psi parametrizations of theta -> (eta-or-lambda, u):
//   Joint    theta = (eta, u), u the trailing coordinate (free)
//   Fixed    theta = eta, u fixed at construction
//   Norm     theta = eta, u = |theta| with direction theta/|theta|; needs a
//            quadratic psi (Gaussian/Hoeffding), where it collapses to
//            <theta, m> - v_t psi(|theta|). This is the closed-form family
//            used for AR(k) testing.
// ---------------------------------------------------------------------------

enum class FamilyKind { BoundedElicitable, BoundedIdentifiable, SubPsiElicitable, SubPsiIdentifiable };
enum class UMode { Joint, Fixed, Norm };

std::string family_kind_id(FamilyKind kind);
FamilyKind parse_family_kind(const std::string& id);

struct ConcavityCertificate {
  bool certified = false;
  std::string reason;
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::BoundedIdentifiable;
  Functional functional;
  Vector lambda0;
  std::optional<PsiSpec> psi;
  VarianceProcess variance;
  ThetaDomain theta_domain;
  UMode u_mode = UMode::Joint;
  double fixed_u = 1.0;
  double eps_margin = 1e-3;

  int theta_dim() const { return theta_domain.dim(); }

  // Constructors validate domain admissibility by grid scan (bounded kinds)
  // and parameter coherence (sub-psi kinds).
  static FamilySpec bounded_elicitable(Functional f, Vector lambda0, ThetaDomain domain,
                                       double eps_margin = 1e-3);
  static FamilySpec bounded_identifiable(Functional f, Vector lambda0, ThetaDomain domain,
                                         double eps_margin = 1e-3);
  static FamilySpec subpsi_elicitable(Functional f, Vector lambda0, PsiSpec psi,
                                      VarianceProcess variance, ThetaDomain domain,
                                      UMode u_mode = UMode::Joint, double fixed_u = 1.0);
  static FamilySpec subpsi_identifiable(Functional f, Vector lambda0, PsiSpec psi,
                                        VarianceProcess variance, ThetaDomain domain,
                                        UMode u_mode = UMode::Norm, double fixed_u = 1.0);
};

// Largest centered box (side scale * maximal admissible half-width) that
// passes the admissibility scan for a bounded family around bet zero.
// `scale` < 1 keeps bets strictly inside the theoretical set so increments
// stay bounded away from zero.
ThetaDomain fit_bounded_domain(FamilyKind kind, const Functional& f, const Vector& lambda0,
                               double scale = 0.5, double eps_margin = 1e-3);

double log_increment(const FamilySpec& fam, const Vector& theta, const Observation& x, int step);
// Multiplicative increment L_t/L_{t-1}; may be <= 0 for bounded kinds when
// theta sits outside the admissible set for the realized data.
double raw_increment(const FamilySpec& fam, const Vector& theta, const Observation& x, int step);
// Gradient of the log increment in theta (a subgradient at kinks).
Vector increment_gradient(const FamilySpec& fam, const Vector& theta, const Observation& x,
                          int step);

std::vector<double> log_wealth_path(const FamilySpec& fam, const Vector& theta,
                                    std::span<const Observation> xs);

ConcavityCertificate certify_concavity(const FamilySpec& fam);

// Conservative bound on sup ||d(-log increment)/d theta|| over the domain and
// the declared data range, by grid scan.
double estimate_gradient_bound(const FamilySpec& fam, int per_axis = 9, int data_points = 129);

struct DominationReport {
  double max_violation = -kInf;  // max over t of log L^elic - log L^ident
  int steps = 0;
  bool holds = false;  // max_violation <= 1e-9
};

// Pathwise check of the linearization bound: the bounded identifiable family
// run at the subgradient bet dominates the bounded elicitable family at
// lambda. Works for catalog functionals whose identification function is the
// score subgradient up to a constant sign (mean, quantile).
DominationReport domination_check(const FamilySpec& fam_elic, const FamilySpec& fam_ident,
                                  const Vector& lambda, std::span<const Observation> xs);

}  // namespace avseq
