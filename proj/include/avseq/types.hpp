#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace avseq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Error taxonomy. Everything derives from Error so callers can catch the
// engine's failures separately from std exceptions.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};
struct UnsupportedScore : Error {
  using Error::Error;
};
struct UnsupportedIdent : Error {
  using Error::Error;
};
struct DegenerateInput : Error {
  using Error::Error;
};
struct UnsupportedPair : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct SizeError : Error {
  using Error::Error;
};
struct ParamError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DataRangeError : Error {
  using Error::Error;
};
struct SolverFailure : Error {
  using Error::Error;
};
struct InvalidObservation : Error {
  using Error::Error;
};

// Raised when a multiplicative wealth increment is <= 0. The strategy layer
// keeps bets inside a margin-shrunk domain, so hitting this indicates a
// configuration bug rather than bad luck.
struct NonpositiveIncrement : Error {
  NonpositiveIncrement(double value, int step)
      : Error("nonpositive multiplicative increment " + std::to_string(value) +
              " at step " + std::to_string(step)),
        value(value),
        step(step) {}
  double value;
  int step;
};

// ---------------------------------------------------------------------------
// Observation: one raw data point. For regression-type functionals the
// vector packs the response first, then the covariates: (y, x_1, ..., x_k).
// ---------------------------------------------------------------------------

struct Observation {
  Vector value;

  Observation() = default;
  explicit Observation(Vector v) : value(std::move(v)) {
    if (!value.allFinite()) {
      throw InvalidObservation("observation has non-finite coordinates");
    }
  }
  explicit Observation(double x) : Observation(Vector::Constant(1, x)) {}
  Observation(double y, double x) : Observation((Vector(2) << y, x).finished()) {}

  int dim() const { return static_cast<int>(value.size()); }
  double scalar() const { return value[0]; }
};

struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
};

inline Interval unbounded_interval() { return Interval{-kInf, kInf}; }

}  // namespace avseq
