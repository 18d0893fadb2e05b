#pragma once

#include "soco/cost.hpp"
#include "soco/types.hpp"

namespace soco {

/// Result of projecting a point onto {x : f(x) <= level}.
/// residual is |f(point) - level| for boundary solutions (0 when the input was
/// already feasible and returned unchanged).
struct SublevelProjection {
  Vector point;
  double level = 0.0;
  double multiplier = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Euclidean projection of y onto the level-sublevel set of f.
///
/// Interior inputs return unchanged with multiplier 0. Otherwise the dual
/// multiplier mu of x(mu) = argmin 0.5||x-y||^2 + mu f(x) is bisected until
/// |f(x(mu)) - level| <= tol, using that f(x(mu)) is nonincreasing in mu; the
/// upper bracket comes from geometric doubling. The inner problem is a
/// closed-form spectral solve for quadratics and damped gradient descent for
/// general costs.
///
/// tol < 0 selects the default 1e-9 * max(1, level). Throws std::domain_error
/// when level < f(v) (empty set) and ConvergenceError when the bisection
/// cannot reach tol.
SublevelProjection project_sublevel(const CostFunction& f, double level,
                                    const Vector& y, double tol = -1.0);

/// Weight for the squared-distance potential used by the analysis suites.
/// The proofs use eta = 1 + 1/beta, so eta >= 1 is enforced here.
class PotentialChecker {
 public:
  explicit PotentialChecker(double eta);

  double eta() const { return eta_; }
  double operator()(const Vector& a, const Vector& b) const;

 private:
  double eta_;
};

/// eta * ||a - b||^2. Symmetric, zero iff a == b.
double potential(const Vector& a, const Vector& b,
                 const PotentialChecker& checker);

}  // namespace soco
