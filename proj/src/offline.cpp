#include "soco/offline.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace soco {

namespace {

bool all_quadratic(const SocoInstance& instance) {
  for (const auto& c : instance.costs) {
    if (dynamic_cast<const QuadraticCost*>(c.get()) == nullptr) return false;
  }
  return true;
}

Trajectory trajectory_from_points(const SocoInstance& instance,
                                  const std::vector<Vector>& points) {
  Trajectory trajectory;
  trajectory.steps.reserve(points.size());
  Vector prev = instance.x0;
  for (int t = 0; t < instance.horizon(); ++t) {
    StepRecord step;
    step.x = points[t];
    step.v = instance.costs[t]->minimizer();
    step.hitting = instance.costs[t]->eval(points[t]);
    step.movement = 0.5 * (points[t] - prev).squaredNorm();
    step.level = step.hitting;
    step.min_value = instance.costs[t]->min_value();
    trajectory.total_hitting += step.hitting;
    trajectory.total_movement += step.movement;
    trajectory.steps.push_back(std::move(step));
    prev = points[t];
  }
  trajectory.total_cost = trajectory.total_hitting + trajectory.total_movement;
  return trajectory;
}

// Block-tridiagonal elimination for all-quadratic instances. The
// stationarity system has diagonal blocks P_t + 2I (P_T + I at the end) and
// -I off the diagonal; the Schur complements U_t = D_t - U_{t-1}^{-1} stay
// SPD because U_t >= P_t + I inductively.
std::vector<Vector> solve_block_tridiagonal(const SocoInstance& instance) {
  const int T = instance.horizon();
  const int d = instance.dimension();
  const Matrix eye = Matrix::Identity(d, d);

  std::vector<Eigen::LDLT<Matrix>> factors;
  factors.reserve(T);
  std::vector<Vector> z(T);
  Matrix U;
  for (int t = 0; t < T; ++t) {
    const auto* quad =
        dynamic_cast<const QuadraticCost*>(instance.costs[t].get());
    const Matrix D =
        quad->matrix() + (t + 1 < T ? 2.0 : 1.0) * eye;
    Vector b = quad->matrix() * quad->minimizer();
    if (t == 0) {
      b += instance.x0;
      U = D;
      z[t] = b;
    } else {
      U = D - factors.back().solve(eye);
      z[t] = b + factors.back().solve(z[t - 1]);
    }
    factors.emplace_back(U);
    if (factors.back().info() != Eigen::Success) {
      throw std::runtime_error("offline block solve: factorization failed");
    }
  }

  std::vector<Vector> points(T);
  points[T - 1] = factors[T - 1].solve(z[T - 1]);
  for (int t = T - 2; t >= 0; --t) {
    points[t] = factors[t].solve(z[t] + points[t + 1]);
  }
  return points;
}

double objective_value(const SocoInstance& instance,
                       const std::vector<Vector>& points) {
  double total = 0.0;
  Vector prev = instance.x0;
  for (int t = 0; t < instance.horizon(); ++t) {
    total += instance.costs[t]->eval(points[t]);
    total += 0.5 * (points[t] - prev).squaredNorm();
    prev = points[t];
  }
  return total;
}

void stacked_gradient(const SocoInstance& instance,
                      const std::vector<Vector>& points,
                      std::vector<Vector>* grad) {
  const int T = instance.horizon();
  for (int t = 0; t < T; ++t) {
    Vector g = instance.costs[t]->grad(points[t]);
    g += points[t] - (t == 0 ? instance.x0 : points[t - 1]);
    if (t + 1 < T) g += points[t] - points[t + 1];
    (*grad)[t] = std::move(g);
  }
}

double max_block_norm(const std::vector<Vector>& blocks) {
  double worst = 0.0;
  for (const auto& b : blocks) worst = std::max(worst, b.norm());
  return worst;
}

std::vector<Vector> solve_gradient_descent(const SocoInstance& instance,
                                           double tol, int max_iters,
                                           int* iterations) {
  const int T = instance.horizon();
  std::vector<Vector> points(T);
  for (int t = 0; t < T; ++t) points[t] = instance.costs[t]->minimizer();

  std::vector<Vector> grad(T);
  std::vector<Vector> candidate(T);
  double value = objective_value(instance, points);
  double step = 1.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    stacked_gradient(instance, points, &grad);
    const double residual = max_block_norm(grad);
    if (residual <= tol) {
      *iterations = iter;
      return points;
    }
    double g2 = 0.0;
    for (const auto& g : grad) g2 += g.squaredNorm();
    while (true) {
      for (int t = 0; t < T; ++t) candidate[t] = points[t] - step * grad[t];
      const double cv = objective_value(instance, candidate);
      if (cv <= value - 0.5 * step * g2) {
        value = cv;
        points.swap(candidate);
        break;
      }
      step *= 0.5;
      if (step < 1e-18) {
        throw ConvergenceError("solve_offline: line search stalled", residual);
      }
    }
    step = std::min(step * 1.5, 1e6);
  }
  stacked_gradient(instance, points, &grad);
  throw ConvergenceError("solve_offline: iteration cap reached",
                         max_block_norm(grad));
}

}  // namespace

double optimality_residual(const std::vector<Vector>& points,
                           const SocoInstance& instance) {
  require(static_cast<int>(points.size()) == instance.horizon(),
          "trajectory length differs from instance horizon");
  std::vector<Vector> grad(points.size());
  stacked_gradient(instance, points, &grad);
  return max_block_norm(grad);
}

double optimality_residual(const Trajectory& trajectory,
                           const SocoInstance& instance) {
  return optimality_residual(trajectory.points(), instance);
}

OfflineSolution solve_offline(const SocoInstance& instance, double tol,
                              OfflineMethod method, int max_iters) {
  instance.validate();
  require(tol > 0.0, "tolerance must be positive");

  if (method == OfflineMethod::kAuto) {
    method = all_quadratic(instance) ? OfflineMethod::kBlockTridiagonal
                                     : OfflineMethod::kGradientDescent;
  }

  OfflineSolution solution;
  std::vector<Vector> points;
  if (method == OfflineMethod::kBlockTridiagonal) {
    require(all_quadratic(instance),
            "block-tridiagonal solve needs all-quadratic costs");
    points = solve_block_tridiagonal(instance);
    solution.iterations = 1;
  } else {
    points = solve_gradient_descent(instance, tol, max_iters,
                                    &solution.iterations);
  }
  solution.trajectory = trajectory_from_points(instance, points);
  solution.first_order_residual = optimality_residual(points, instance);
  return solution;
}

OfflineSolution brute_force_offline(const SocoInstance& instance,
                                    double grid_lo, double grid_hi,
                                    int grid_points) {
  instance.validate();
  require(instance.dimension() == 1, "grid oracle handles 1-D instances only");
  require(grid_points >= 2, "need at least two grid points");
  require(grid_hi > grid_lo, "grid bracket is empty");

  const int T = instance.horizon();
  const int N = grid_points;
  const double step = (grid_hi - grid_lo) / (N - 1);

  OfflineSolution solution;
  const double x0 = instance.x0[0];
  if (x0 < grid_lo || x0 > grid_hi) solution.bracket_warning = true;
  for (const auto& c : instance.costs) {
    const double v = c->minimizer()[0];
    if (v < grid_lo || v > grid_hi) solution.bracket_warning = true;
  }

  std::vector<double> grid(N);
  for (int j = 0; j < N; ++j) grid[j] = grid_lo + step * j;

  // Forward cost-to-arrive with quadratic transition costs.
  std::vector<double> cost(N);
  std::vector<double> next(N);
  std::vector<std::vector<int>> parent(T, std::vector<int>(N, -1));
  Vector p(1);
  for (int j = 0; j < N; ++j) {
    p[0] = grid[j];
    const double dx = grid[j] - x0;
    cost[j] = instance.costs[0]->eval(p) + 0.5 * dx * dx;
  }
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < N; ++j) {
      double best = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (int i = 0; i < N; ++i) {
        const double dx = grid[j] - grid[i];
        const double c = cost[i] + 0.5 * dx * dx;
        if (c < best) {
          best = c;
          arg = i;
        }
      }
      p[0] = grid[j];
      next[j] = best + instance.costs[t]->eval(p);
      parent[t][j] = arg;
    }
    cost.swap(next);
  }

  int arg = 0;
  for (int j = 1; j < N; ++j) {
    if (cost[j] < cost[arg]) arg = j;
  }
  std::vector<Vector> points(T, Vector(1));
  for (int t = T - 1; t >= 0; --t) {
    points[t][0] = grid[arg];
    if (t > 0) arg = parent[t][arg];
  }

  solution.trajectory = trajectory_from_points(instance, points);
  solution.first_order_residual = optimality_residual(points, instance);
  solution.iterations = grid_points;
  return solution;
}

DriftReport offline_drift_check(const OfflineSolution& solution,
                                const std::vector<Vector>& minimizers,
                                double m, const Vector& x0) {
  require(m > 0.0, "modulus must be positive");
  require(minimizers.size() == solution.trajectory.steps.size(),
          "minimizer count differs from trajectory length");

  DriftReport report;
  const auto& steps = solution.trajectory.steps;
  Vector prev_v = x0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    report.lhs += (steps[t].x - minimizers[t]).norm();
    report.rhs += (minimizers[t] - prev_v).norm();
    prev_v = minimizers[t];
  }
  report.rhs *= 2.0 / m;
  const double T = static_cast<double>(steps.size());
  report.slack_allowance = T * solution.first_order_residual / m +
                           1e-9 * (1.0 + report.rhs);
  report.passed = report.lhs <= report.rhs + report.slack_allowance;
  return report;
}

}  // namespace soco
