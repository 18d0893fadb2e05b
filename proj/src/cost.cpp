#include "soco/cost.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace soco {

namespace {

void check_square_symmetric(const Matrix& P) {
  require(P.rows() == P.cols(), "cost matrix must be square");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  const double asym = (P - P.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "cost matrix is not symmetric (max asymmetry " << asym << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

QuadraticCost::QuadraticCost(Matrix P, Vector center, double offset)
    : P_(std::move(P)), center_(std::move(center)), offset_(offset) {
  check_square_symmetric(P_);
  require(P_.rows() == center_.size(),
          "cost matrix and center dimensions differ");
  require(offset_ >= 0.0, "cost offset must be nonnegative");
  P_ = ((P_ + P_.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(P_);
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  if (eigenvalues_.minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "cost matrix is not positive definite (smallest eigenvalue "
        << eigenvalues_.minCoeff() << ")";
    throw std::invalid_argument(msg.str());
  }
}

double QuadraticCost::eval(const Vector& x) const {
  require(x.size() == center_.size(), "point dimension mismatch");
  const Vector d = x - center_;
  return 0.5 * d.dot(P_ * d) + offset_;
}

Vector QuadraticCost::grad(const Vector& x) const {
  require(x.size() == center_.size(), "point dimension mismatch");
  return P_ * (x - center_);
}

CostPtr make_quadratic(const Matrix& P, const Vector& v, double c0) {
  return std::make_shared<QuadraticCost>(P, v, c0);
}

CostPtr make_quadratic_form(const Matrix& P, const Vector& q, double r) {
  check_square_symmetric(P);
  require(P.rows() == q.size(), "matrix and linear term dimensions differ");
  const Matrix sym = (P + P.transpose()) / 2.0;
  Eigen::LDLT<Matrix> ldlt(sym);
  require(ldlt.info() == Eigen::Success && ldlt.isPositive(),
          "quadratic form is not positive definite");
  const Vector v = ldlt.solve(-q);
  // f(v) = 0.5 q'v + r; lift negative minima to zero.
  const double min_value = 0.5 * q.dot(v) + r;
  return std::make_shared<QuadraticCost>(sym, v, std::max(0.0, min_value));
}

MinimizeResult minimize_cost(const CostFunction& f, double tol, int max_iters,
                             const Vector* start) {
  require(tol > 0.0, "tolerance must be positive");
  require(f.modulus() > 0.0, "cost must be strongly convex");

  if (const auto* quad = dynamic_cast<const QuadraticCost*>(&f)) {
    return {quad->minimizer(), quad->min_value(), 0.0, 0};
  }

  Vector x = start != nullptr ? *start : Vector::Zero(f.dimension());
  require(x.size() == f.dimension(), "start point dimension mismatch");
  double fx = f.eval(x);
  Vector g = f.grad(x);
  double step = 1.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const double gn = g.norm();
    if (gn <= tol) return {x, fx, gn, iter};
    // Armijo backtracking; the accepted step hovers around 1/L.
    Vector xn;
    double fn = 0.0;
    while (true) {
      xn = x - step * g;
      fn = f.eval(xn);
      if (fn <= fx - 0.5 * step * gn * gn) break;
      step *= 0.5;
      if (step < 1e-18) {
        throw ConvergenceError("minimize_cost: line search stalled", gn);
      }
    }
    x = std::move(xn);
    fx = fn;
    g = f.grad(x);
    step = std::min(step * 1.5, 1e6);
  }
  throw ConvergenceError("minimize_cost: iteration cap reached", g.norm());
}

ConvexityReport strong_convexity_probe(const CostFunction& f, int n_pairs,
                                       std::uint64_t rng_seed) {
  require(n_pairs >= 1, "need at least one pair");
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 2.0);

  const Vector& v = f.minimizer();
  const double m = f.modulus();
  ConvexityReport report;
  report.pairs = n_pairs;
  report.seed = rng_seed;
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_pairs; ++i) {
    Vector x(v.size());
    Vector y(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      x[k] = v[k] + gauss(rng);
      y[k] = v[k] + gauss(rng);
    }
    const Vector d = y - x;
    const double slack =
        f.eval(y) - f.eval(x) - f.grad(x).dot(d) - 0.5 * m * d.squaredNorm();
    if (slack < report.worst_slack) {
      report.worst_slack = slack;
      report.worst_x = x;
      report.worst_y = y;
    }
  }
  report.passed = report.worst_slack >= -1e-9;
  return report;
}

}  // namespace soco
