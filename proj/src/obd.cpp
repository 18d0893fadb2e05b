#include "soco/obd.hpp"

#include <cmath>
#include <sstream>

namespace soco {

double default_beta(double modulus) {
  require(modulus > 0.0, "modulus must be positive");
  return 2.0 + 10.0 / modulus;
}

bool in_guarantee_regime(double modulus, double beta) {
  return modulus > 0.0 && beta > 4.0 / modulus;
}

double SocoInstance::min_modulus() const {
  require(!costs.empty(), "instance has no costs");
  double m = costs.front()->modulus();
  for (const auto& c : costs) m = std::min(m, c->modulus());
  return m;
}

void SocoInstance::validate() const {
  require(horizon() >= 1, "instance horizon must be at least 1");
  require(x0.size() >= 1, "instance dimension must be at least 1");
  for (const auto& c : costs) {
    require(c != nullptr, "instance contains a null cost");
    require(c->dimension() == dimension(),
            "cost dimension differs from instance dimension");
  }
}

std::vector<Vector> Trajectory::points() const {
  std::vector<Vector> pts;
  pts.reserve(steps.size());
  for (const auto& s : steps) pts.push_back(s.x);
  return pts;
}

namespace {

double balance_target_at(double level, double min_value, BalanceMode mode) {
  return mode == BalanceMode::kZeroShifted ? level - min_value : level;
}

}  // namespace

StepRecord obd_step(const CostFunction& f, const Vector& x_prev,
                    const ObdConfig& config) {
  require(config.beta > 0.0, "balance parameter beta must be positive");
  require(x_prev.size() == f.dimension(), "previous point dimension mismatch");

  const Vector& v = f.minimizer();
  const double fv = f.min_value();
  const double beta = config.beta;
  const BalanceMode mode = config.balance_mode;

  StepRecord record;
  record.v = v;
  record.min_value = fv;

  const double move_to_min = 0.5 * (v - x_prev).squaredNorm();
  const double target0 = balance_target_at(fv, fv, mode);
  if (move_to_min - beta * target0 <= 0.0) {
    // No balanced level exists: movement only shrinks as l grows while the
    // target grows, so the step lands on the minimizer.
    record.x = v;
    record.level = fv;
    record.hitting = fv;
    record.movement = move_to_min;
    record.balance_target = target0;
    record.balance_residual = move_to_min - beta * target0;
    record.stopped_at_minimizer = true;
    return record;
  }

  double lo = fv;                    // movement here is move_to_min > target
  double hi = f.eval(x_prev);       // movement 0 < beta * target
  if (hi - lo <= 1e-15 * std::max(1.0, std::abs(lo))) {
    // x_prev sits at the minimum level within noise; the bracket has no
    // interior. Land on the minimizer.
    record.x = v;
    record.level = fv;
    record.hitting = fv;
    record.movement = move_to_min;
    record.balance_target = target0;
    record.balance_residual = move_to_min - beta * target0;
    record.stopped_at_minimizer = true;
    return record;
  }
  double level = hi;
  SublevelProjection proj;
  double movement = 0.0;
  double residual = 0.0;
  bool converged = false;
  int iters = 0;
  for (; iters < config.max_bisection_iters; ++iters) {
    level = 0.5 * (lo + hi);
    if (level == lo || level == hi) break;  // bracket exhausted
    proj = project_sublevel(f, level, x_prev,
                            config.projection_tol * std::max(1.0, level));
    movement = 0.5 * (proj.point - x_prev).squaredNorm();
    const double target = balance_target_at(level, fv, mode);
    residual = movement - beta * target;
    if (std::abs(residual) <= config.level_tol * std::max(1.0, beta * target)) {
      converged = true;
      break;
    }
    if (residual > 0.0) {
      lo = level;
    } else {
      hi = level;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "obd_step: balance bisection did not converge (residual "
        << residual << ")";
    throw ConvergenceError(msg.str(), std::abs(residual));
  }

  record.x = proj.point;
  record.level = level;
  record.hitting = f.eval(proj.point);
  record.movement = movement;
  record.balance_target = balance_target_at(level, fv, mode);
  record.balance_residual = residual;
  record.stopped_at_minimizer = false;
  record.projection_residual = proj.residual;
  record.iterations = iters + 1;
  return record;
}

Trajectory obd_run(const SocoInstance& instance, const ObdConfig& config) {
  instance.validate();
  Trajectory trajectory;
  trajectory.steps.reserve(instance.costs.size());
  Vector x_prev = instance.x0;
  for (int t = 0; t < instance.horizon(); ++t) {
    StepRecord step;
    try {
      step = obd_step(*instance.costs[t], x_prev, config);
    } catch (const ConvergenceError& err) {
      std::ostringstream msg;
      msg << "obd_run: round " << (t + 1) << ": " << err.what();
      throw ConvergenceError(msg.str(), err.residual());
    }
    x_prev = step.x;
    trajectory.total_hitting += step.hitting;
    trajectory.total_movement += step.movement;
    trajectory.steps.push_back(std::move(step));
  }
  trajectory.total_cost = trajectory.total_hitting + trajectory.total_movement;
  return trajectory;
}

double balance_residual(const StepRecord& step, double beta) {
  return step.movement - beta * step.balance_target;
}

}  // namespace soco
