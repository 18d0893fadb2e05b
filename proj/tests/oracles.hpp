// Test-side oracles and helpers, independent of the library's solve paths.
#pragma once

#include <cmath>
#include <random>

#include "soco/cost.hpp"
#include "soco/types.hpp"

namespace soco::testing {

/// Central finite-difference gradient.
inline Vector fd_gradient(const CostFunction& f, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 6e-6 * std::max(1.0, std::abs(x[i]));
    Vector hi = x;
    Vector lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (f.eval(hi) - f.eval(lo)) / (2.0 * h);
  }
  return g;
}

inline double fd_gradient_rel_error(const CostFunction& f, const Vector& x) {
  const Vector g = f.grad(x);
  return (fd_gradient(f, x) - g).norm() / std::max(1.0, g.norm());
}

/// High-precision Newton solve of the regularized logistic objective
///   a (1/n) sum log(1 + exp(-s_i theta'x_i)) + (b/2)||theta||^2
/// with its own eval/grad/hessian formulas; the independent oracle for the
/// library's inner solver.
inline Vector newton_logistic(const Matrix& X, const Vector& labels01,
                              double a, double b) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Vector signs(n);
  for (Eigen::Index i = 0; i < n; ++i) signs[i] = labels01[i] > 0.5 ? 1 : -1;

  Vector theta = Vector::Zero(d);
  for (int iter = 0; iter < 200; ++iter) {
    Vector grad = b * theta;
    Matrix hess = b * Matrix::Identity(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = signs[i] * X.row(i).dot(theta);
      const double sig = 1.0 / (1.0 + std::exp(-z));
      grad += (a / n) * (-signs[i] * (1.0 - sig)) * X.row(i).transpose();
      hess += (a / n) * sig * (1.0 - sig) * X.row(i).transpose() * X.row(i);
    }
    if (grad.norm() <= 1e-12) break;
    theta -= hess.ldlt().solve(grad);
  }
  return theta;
}

/// Dense scan of the boundary of {0.5 (p1 x^2 + p2 y^2) <= level} for the
/// point closest to y; brute-force oracle for the 2-D sublevel projection.
inline Vector ellipse_boundary_argmin(double p1, double p2, double level,
                                      const Vector& y, int samples = 400000) {
  const double ax = std::sqrt(2.0 * level / p1);
  const double ay = std::sqrt(2.0 * level / p2);
  Vector best(2);
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double angle = 2.0 * M_PI * k / samples;
    Vector p(2);
    p << ax * std::cos(angle), ay * std::sin(angle);
    const double dist = (p - y).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

inline Matrix random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix raw(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) raw(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

/// SPD matrix with smallest eigenvalue exactly lo and spectrum in
/// [lo, lo*cond].
inline Matrix random_spd(int d, double lo, double cond, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> spread(1.0, cond);
  Vector eig(d);
  eig[0] = lo;
  for (int i = 1; i < d; ++i) eig[i] = lo * spread(rng);
  if (d == 1) return eig.asDiagonal();
  const Matrix q = random_orthogonal(d, rng);
  Matrix P = q * eig.asDiagonal() * q.transpose();
  return ((P + P.transpose()) / 2.0).eval();
}

inline Vector random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector u(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) u[i] = gauss(rng);
    norm = u.norm();
  } while (norm < 1e-12);
  return u / norm;
}

/// Hides the concrete cost type so the library takes its generic (gradient
/// descent) paths instead of the quadratic closed forms.
class OpaqueCost final : public CostFunction {
 public:
  explicit OpaqueCost(CostPtr inner) : inner_(std::move(inner)) {}

  int dimension() const override { return inner_->dimension(); }
  double eval(const Vector& x) const override { return inner_->eval(x); }
  Vector grad(const Vector& x) const override { return inner_->grad(x); }
  double modulus() const override { return inner_->modulus(); }
  const Vector& minimizer() const override { return inner_->minimizer(); }
  double min_value() const override { return inner_->min_value(); }

 private:
  CostPtr inner_;
};

/// Reports a larger strong-convexity modulus than the wrapped cost has.
class OverstatedModulusCost final : public CostFunction {
 public:
  OverstatedModulusCost(CostPtr inner, double claimed)
      : inner_(std::move(inner)), claimed_(claimed) {}

  int dimension() const override { return inner_->dimension(); }
  double eval(const Vector& x) const override { return inner_->eval(x); }
  Vector grad(const Vector& x) const override { return inner_->grad(x); }
  double modulus() const override { return claimed_; }
  const Vector& minimizer() const override { return inner_->minimizer(); }
  double min_value() const override { return inner_->min_value(); }

 private:
  CostPtr inner_;
  double claimed_;
};

}  // namespace soco::testing
