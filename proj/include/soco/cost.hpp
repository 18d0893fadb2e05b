#pragma once

#include <cstdint>
#include <memory>

#include "soco/types.hpp"

namespace soco {

/// A strongly convex per-round cost. Implementations are immutable after
/// construction and safe to evaluate from concurrent callers.
///
/// Contract: eval is nonnegative, modulus() is a valid strong-convexity
/// parameter with respect to the Euclidean norm, and minimizer()/min_value()
/// are cached at construction (computed numerically for families without a
/// closed form).
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  virtual int dimension() const = 0;
  virtual double eval(const Vector& x) const = 0;
  virtual Vector grad(const Vector& x) const = 0;
  /// Strong-convexity modulus m > 0.
  virtual double modulus() const = 0;
  virtual const Vector& minimizer() const = 0;
  virtual double min_value() const = 0;
};

using CostPtr = std::shared_ptr<const CostFunction>;

/// f(x) = 0.5 (x - center)' P (x - center) + offset with P symmetric positive
/// definite. Keeps the eigendecomposition of P around; the sublevel projection
/// uses it for closed-form inner solves.
class QuadraticCost final : public CostFunction {
 public:
  QuadraticCost(Matrix P, Vector center, double offset);

  int dimension() const override { return static_cast<int>(center_.size()); }
  double eval(const Vector& x) const override;
  Vector grad(const Vector& x) const override;
  double modulus() const override { return eigenvalues_.minCoeff(); }
  const Vector& minimizer() const override { return center_; }
  double min_value() const override { return offset_; }

  const Matrix& matrix() const { return P_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

 private:
  Matrix P_;
  Vector center_;
  double offset_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// Builds 0.5 (x-v)' P (x-v) + c0. Rejects non-symmetric or non-PD P and
/// negative c0. The modulus is the smallest eigenvalue of P.
CostPtr make_quadratic(const Matrix& P, const Vector& v, double c0);

/// Builds 0.5 x'Px + q'x + r by completing the square. If the minimum value
/// comes out negative the cost is shifted so min_value() = 0, keeping the
/// nonnegativity convention.
CostPtr make_quadratic_form(const Matrix& P, const Vector& q, double r);

struct MinimizeResult {
  Vector point;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

/// Finds the minimizer of f to ||grad|| <= tol. Quadratics are answered from
/// their cached closed form; everything else runs gradient descent with a
/// backtracking step (the step settles near 1/L without a known Lipschitz
/// constant). Throws ConvergenceError past max_iters, carrying the last
/// gradient norm.
MinimizeResult minimize_cost(const CostFunction& f, double tol,
                             int max_iters = 200000,
                             const Vector* start = nullptr);

struct ConvexityReport {
  double worst_slack = 0.0;
  int pairs = 0;
  std::uint64_t seed = 0;
  bool passed = false;
  Vector worst_x;
  Vector worst_y;
};

/// Samples random point pairs and reports the worst slack of
/// f(y) - f(x) - grad_f(x)'(y-x) - (m/2)||y-x||^2. Slack >= -1e-9 passes.
ConvexityReport strong_convexity_probe(const CostFunction& f, int n_pairs,
                                       std::uint64_t rng_seed);

}  // namespace soco
