#include "soco/projection.hpp"

#include <cmath>
#include <sstream>

namespace soco {

namespace {

constexpr int kMaxDoublings = 400;
constexpr int kMaxBisection = 400;

// Evaluations of f(x(mu)) for the dual search. The quadratic path works in
// the eigenbasis of P: with w = Q'(y - v),
//   f(x(mu)) = c0 + 0.5 sum_i lam_i w_i^2 / (1 + mu lam_i)^2
//   ||x(mu) - y||^2 = sum_i (mu lam_i w_i / (1 + mu lam_i))^2
// so each mu costs O(d) after one O(d^2) basis change.
struct QuadraticDual {
  const QuadraticCost* cost;
  Vector w;

  double value(double mu) const {
    const Vector& lam = cost->eigenvalues();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double r = w[i] / (1.0 + mu * lam[i]);
      acc += lam[i] * r * r;
    }
    return cost->min_value() + 0.5 * acc;
  }

  Vector point(double mu, const Vector&) const {
    const Vector& lam = cost->eigenvalues();
    Vector scaled(w.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      scaled[i] = w[i] / (1.0 + mu * lam[i]);
    }
    return cost->minimizer() + cost->eigenvectors() * scaled;
  }
};

// Generic costs solve the prox problem 0.5||x-y||^2 + mu f(x) by damped
// gradient descent, warm-started across mu values. The inner objective is
// (1 + mu m)-strongly convex.
struct GenericDual {
  const CostFunction* cost;
  const Vector* y;
  double tol;
  mutable Vector warm;

  Vector solve(double mu) const {
    Vector x = warm;
    const double sigma = 1.0 + mu * cost->modulus();
    double step = 1.0 / sigma;
    auto objective = [&](const Vector& p) {
      return 0.5 * (p - *y).squaredNorm() + mu * cost->eval(p);
    };
    double fx = objective(x);
    for (int iter = 0; iter < 20000; ++iter) {
      const Vector fg = cost->grad(x);
      const Vector g = (x - *y) + mu * fg;
      const double gn = g.norm();
      // The f-value error is at most ||grad f|| * ||x - x*|| <= ||grad f|| *
      // gn / sigma; stop once that is safely under the level tolerance.
      if (gn * std::max(1.0, fg.norm()) / sigma <= 0.01 * tol) break;
      Vector xn;
      double fn = 0.0;
      while (true) {
        xn = x - step * g;
        fn = objective(xn);
        if (fn <= fx - 0.5 * step * gn * gn) break;
        step *= 0.5;
        if (step < 1e-18) {
          throw ConvergenceError("project_sublevel: inner solve stalled", gn);
        }
      }
      x = std::move(xn);
      fx = fn;
      step = std::min(step * 1.5, 1e6);
    }
    warm = x;
    return x;
  }

  double value(double mu) const { return cost->eval(solve(mu)); }

  Vector point(double mu, const Vector&) const { return solve(mu); }
};

template <typename Dual>
SublevelProjection bisect_dual(const Dual& dual, const CostFunction& f,
                               double level, const Vector& y, double fy,
                               double tol) {
  // Initial mu from the first-order drop f(y) - mu ||grad f(y)||^2 = level.
  const double g2 = std::max(f.grad(y).squaredNorm(), 1e-300);
  double mu_hi = std::max((fy - level) / g2, 1e-12);
  int evals = 0;
  double value_hi = dual.value(mu_hi);
  ++evals;
  int doublings = 0;
  while (value_hi > level) {
    mu_hi *= 2.0;
    value_hi = dual.value(mu_hi);
    ++evals;
    if (++doublings > kMaxDoublings) {
      throw ConvergenceError("project_sublevel: bracket doubling exhausted",
                             value_hi - level);
    }
  }

  double mu_lo = 0.0;  // f(x(0)) = f(y) > level
  double mu = mu_hi;
  double value = value_hi;
  for (int iter = 0; iter < kMaxBisection; ++iter) {
    if (std::abs(value - level) <= tol) {
      return {dual.point(mu, y), level, mu, std::abs(value - level), evals};
    }
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (mid == mu_lo || mid == mu_hi) break;  // bracket exhausted
    const double vm = dual.value(mid);
    ++evals;
    // f(x(mu)) is nonincreasing in mu.
    if (vm > level) {
      mu_lo = mid;
    } else {
      mu_hi = mid;
    }
    mu = mid;
    value = vm;
  }
  if (std::abs(value - level) <= tol) {
    return {dual.point(mu, y), level, mu, std::abs(value - level), evals};
  }
  throw ConvergenceError("project_sublevel: bisection did not reach tolerance",
                         std::abs(value - level));
}

}  // namespace

SublevelProjection project_sublevel(const CostFunction& f, double level,
                                    const Vector& y, double tol) {
  require(y.size() == f.dimension(), "point dimension mismatch");
  if (tol < 0.0) tol = 1e-9 * std::max(1.0, level);

  const double fv = f.min_value();
  if (level < fv - 1e-12 * std::max(1.0, std::abs(fv))) {
    std::ostringstream msg;
    msg << "sublevel set is empty: level " << level << " below minimum " << fv;
    throw std::domain_error(msg.str());
  }

  const double fy = f.eval(y);
  if (fy <= level) {
    return {y, level, 0.0, 0.0, 0};
  }
  if (level - fv <= 1e-15 * std::max(1.0, fv)) {
    // Degenerate shell: the set is (numerically) just the minimizer.
    return {f.minimizer(), level, 0.0, std::abs(fv - level), 0};
  }

  if (const auto* quad = dynamic_cast<const QuadraticCost*>(&f)) {
    QuadraticDual dual{quad, quad->eigenvectors().transpose() *
                                 (y - quad->minimizer())};
    return bisect_dual(dual, f, level, y, fy, tol);
  }
  GenericDual dual{&f, &y, tol, y};
  return bisect_dual(dual, f, level, y, fy, tol);
}

PotentialChecker::PotentialChecker(double eta) : eta_(eta) {
  require(eta >= 1.0, "potential weight eta must be at least 1");
}

double PotentialChecker::operator()(const Vector& a, const Vector& b) const {
  require(a.size() == b.size(), "potential arguments differ in dimension");
  return eta_ * (a - b).squaredNorm();
}

double potential(const Vector& a, const Vector& b,
                 const PotentialChecker& checker) {
  return checker(a, b);
}

}  // namespace soco
