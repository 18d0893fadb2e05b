#pragma once

#include <vector>

#include "soco/cost.hpp"
#include "soco/projection.hpp"
#include "soco/types.hpp"

namespace soco {

/// How the per-round balance target is measured.
///
/// kZeroShifted balances movement against beta * (l - f(v)), reproducing the
/// regime where every cost has minimum value zero; this is the mode the
/// guarantees are stated in and the default. kAbsoluteLevel balances against
/// beta * l, the stepping rule as literally printed.
enum class BalanceMode { kZeroShifted, kAbsoluteLevel };

struct ObdConfig {
  double beta = 1.0;
  double level_tol = 1e-9;       // relative, scaled by max(1, beta * target)
  double projection_tol = 1e-12; // relative, scaled by max(1, level)
  BalanceMode balance_mode = BalanceMode::kZeroShifted;
  int max_bisection_iters = 200;
};

/// beta = 2 + 10/m, the choice that yields a ratio bound of 3 + O(1/m).
double default_beta(double modulus);

/// The guarantee regime requires beta > 4/m.
bool in_guarantee_regime(double modulus, double beta);

struct StepRecord {
  Vector x;                 // chosen point
  Vector v;                 // round minimizer
  double level = 0.0;       // selected level l
  double hitting = 0.0;     // f(x)
  double movement = 0.0;    // 0.5 ||x - x_prev||^2
  double min_value = 0.0;   // f(v)
  double balance_target = 0.0;   // l or l - f(v) depending on mode
  double balance_residual = 0.0; // movement - beta * balance_target
  bool stopped_at_minimizer = false;
  double projection_residual = 0.0;
  int iterations = 0;
};

/// A start point plus an ordered cost sequence; the unit of every solver run.
struct SocoInstance {
  Vector x0;
  std::vector<CostPtr> costs;

  int dimension() const { return static_cast<int>(x0.size()); }
  int horizon() const { return static_cast<int>(costs.size()); }
  double min_modulus() const;
  void validate() const;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  double total_hitting = 0.0;
  double total_movement = 0.0;
  double total_cost = 0.0;

  std::vector<Vector> points() const;
};

/// One round of Online Balanced Descent.
///
/// Starting from l0 = f(v), if moving straight to the minimizer already costs
/// no more than the balance target at l0, the step stops at v (there is no
/// balanced level: movement can only shrink while the target grows).
/// Otherwise the unique root of 0.5||x(l) - x_prev||^2 = beta * target(l) is
/// bisected over [l0, f(x_prev)], where x(l) is the sublevel projection of
/// x_prev; movement is nonincreasing in l and the target strictly increasing,
/// so the root is unique and the bracket always holds a sign change.
StepRecord obd_step(const CostFunction& f, const Vector& x_prev,
                    const ObdConfig& config);

/// Sequential application of obd_step from x0. Memoryless: round t depends
/// only on (f_t, x_{t-1}). Step failures are rethrown with the round index.
Trajectory obd_run(const SocoInstance& instance, const ObdConfig& config);

/// movement - beta * balance_target. Within level_tol of zero for balanced
/// stops; <= 0 for minimizer stops.
double balance_residual(const StepRecord& step, double beta);

}  // namespace soco
