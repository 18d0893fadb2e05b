#pragma once

#include <vector>

#include "soco/obd.hpp"
#include "soco/types.hpp"

namespace soco {

struct OfflineSolution {
  Trajectory trajectory;
  double first_order_residual = 0.0;
  int iterations = 0;
  bool bracket_warning = false;  // set by the grid oracle only
};

enum class OfflineMethod {
  kAuto,             // block solve when every cost is quadratic, else descent
  kBlockTridiagonal, // exact; requires all-quadratic costs
  kGradientDescent,
};

/// Full-horizon minimizer of sum_t f_t(x_t) + 0.5||x_t - x_{t-1}||^2.
///
/// The stationarity system is block tridiagonal: grad f_t(x_t) + (x_t -
/// x_{t-1}) + (x_t - x_{t+1}) = 0, with the last block dropping the forward
/// difference. All-quadratic instances are solved exactly by block
/// elimination; otherwise full-trajectory gradient descent runs until the
/// stacked residual falls below tol.
OfflineSolution solve_offline(const SocoInstance& instance, double tol,
                              OfflineMethod method = OfflineMethod::kAuto,
                              int max_iters = 200000);

/// max_t || grad f_t(x_t) + (x_t - x_{t-1}) + (x_t - x_{t+1}) || over the
/// trajectory; zero exactly at the offline optimum.
double optimality_residual(const std::vector<Vector>& points,
                           const SocoInstance& instance);
double optimality_residual(const Trajectory& trajectory,
                           const SocoInstance& instance);

/// Exact dynamic program over a uniform 1-D grid; the independent oracle for
/// the continuous solver. bracket_warning is set when x0 or some round
/// minimizer falls outside [grid_lo, grid_hi].
OfflineSolution brute_force_offline(const SocoInstance& instance,
                                    double grid_lo, double grid_hi,
                                    int grid_points);

struct DriftReport {
  double lhs = 0.0;   // sum_t ||x_t* - v_t||
  double rhs = 0.0;   // (2/m) sum_t ||v_t - v_{t-1}||, with v_0 := x0
  double slack_allowance = 0.0;
  bool passed = false;
};

/// Checks the offline-drift inequality sum ||x_t* - v_t|| <= (2/m) sum
/// ||v_t - v_{t-1}||. The start point stands in for v_0, so the first
/// increment is ||v_1 - x0||. The allowance propagates the solve's
/// first-order residual (each inexact stationarity block loosens the
/// inequality by at most residual/m per round).
DriftReport offline_drift_check(const OfflineSolution& solution,
                                const std::vector<Vector>& minimizers,
                                double m, const Vector& x0);

}  // namespace soco
