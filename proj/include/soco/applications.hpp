#pragma once

#include <vector>

#include "soco/analysis.hpp"
#include "soco/obd.hpp"
#include "soco/types.hpp"

namespace soco {

/// One round of streamed data: an n x d design matrix and its responses
/// (real-valued for ridge, {0,1} labels for logistic).
struct RegressionRound {
  Matrix X;
  Vector y;
};

enum class RegressionTask { kRidge, kLogistic };

struct SmoothedRegressionConfig {
  double lambda1 = 1.0;  // l2-regularization weight
  double lambda2 = 1.0;  // smoothing weight
  RegressionTask task = RegressionTask::kRidge;
  /// Weight on the data-fit term; scaling (loss_scale, lambda1, lambda2)
  /// jointly leaves the transformed costs unchanged.
  double loss_scale = 1.0;
  double minimizer_tol = 1e-10;  // inner-solver tolerance (logistic)
};

/// Convex logistic loss plus ridge term, in the smoothing-normalized form
/// a * (1/n) sum log(1 + exp(-yt theta'x)) + (b/2)||theta||^2 with labels
/// mapped from {0,1} to {-1,+1}. The modulus is b; the minimizer is computed
/// at construction by the inner gradient-descent solver.
class LogisticCost final : public CostFunction {
 public:
  LogisticCost(Matrix X, Vector labels01, double loss_weight,
               double ridge_weight, double minimizer_tol);

  int dimension() const override { return static_cast<int>(X_.cols()); }
  double eval(const Vector& theta) const override;
  Vector grad(const Vector& theta) const override;
  double modulus() const override { return ridge_weight_; }
  const Vector& minimizer() const override { return minimizer_; }
  double min_value() const override { return min_value_; }

 private:
  Matrix X_;
  Vector signs_;  // +-1 labels
  double loss_weight_;
  double ridge_weight_;
  Vector minimizer_;
  double min_value_ = 0.0;
};

/// Builds the SOCO instance whose round-t cost is
///   (loss_scale/lambda2) f_t(theta) + (lambda1 / (2 lambda2)) ||theta||^2,
/// the smoothing-normalized objective: minimizing it with unit quadratic
/// switching cost is the original smoothed-regression problem divided by
/// lambda2. Ridge rounds become quadratics with a closed-form minimizer via
/// the regularized normal equations; logistic rounds solve for theirs
/// numerically. The modulus is at least lambda1/lambda2.
SocoInstance make_smoothed_regression_instance(
    const std::vector<RegressionRound>& rounds,
    const SmoothedRegressionConfig& config, const Vector& theta0);

/// Ratio bound for the smoothed-regression reduction:
/// theoretical_cr_bound at m = lambda1/lambda2 + m_data_extra with
/// beta = 2 + 10/m. Approaches 3 as lambda1/lambda2 grows.
double corollary1_ratio_bound(double m_data_extra, double lambda1,
                              double lambda2);

/// Stationary linear system x_t = x_{t-1} + B u_t + w_t with quadratic stage
/// costs 0.5 x'Q_t x + 0.5 u'R u. B must be invertible, R and every Q_t SPD.
struct LqrSystem {
  Matrix B;
  Matrix R;
  std::vector<Matrix> Q_seq;
  std::vector<Vector> w_seq;
  Vector x0;

  int dimension() const { return static_cast<int>(B.rows()); }
  int horizon() const { return static_cast<int>(w_seq.size()); }
  void validate() const;
  /// min over rounds of the smallest eigenvalue of Q_t.
  double q_floor() const;
};

/// The change of variables that turns the LQR problem into a SOCO instance
/// with unit quadratic switching cost: z_t = R^{1/2} B^{-1} y_t for the
/// accumulated control y_t, cost centers s_t = R^{1/2} B^{-1} v_t with
/// v_t = -(x0 + sum_{i<=t} w_i), and curvature P_t = (B R^{-1/2})' Q_t
/// (B R^{-1/2}).
struct LqrReduction {
  SocoInstance soco;           // z-space instance, starts at z0 = 0
  std::vector<Matrix> P_seq;
  std::vector<Vector> s_seq;
  Matrix transform;            // R^{1/2} B^{-1}
  Matrix inverse_transform;    // B R^{-1/2}
  Matrix control_map;          // R^{-1/2}; u_t = control_map (z_t - z_{t-1})
  double modulus_bound = 0.0;  // sigma_min(B)^2 lambda / lambda_max(R)
};

/// Builds the reduction. Rejects (with the condition number in the message)
/// systems whose B is singular within tolerance.
LqrReduction lqr_to_soco(const LqrSystem& system);

/// Maps a z-space trajectory back to controls u_t = B^{-1}(y_t - y_{t-1}).
std::vector<Vector> soco_to_controls(const Trajectory& z_trajectory,
                                     const LqrReduction& reduction);

/// Rolls the dynamics forward from x0 and sums the stage costs.
double lqr_cost(const LqrSystem& system, const std::vector<Vector>& controls);

struct LqrRunResult {
  std::vector<Vector> controls;
  Trajectory z_trajectory;
  Trajectory z_opt;
  MetricsReport metrics;
  double lqr_alg_cost = 0.0;
  double lqr_opt_cost = 0.0;
};

/// Runs OBD as an online controller: each round's disturbance is revealed
/// before the control is chosen (the observe-then-act convention carried
/// through the reduction), the step happens in z-space, and the control is
/// mapped back. The comparator is the offline optimum of the reduced
/// instance. config.beta <= 0 selects 2 + 10/m at the reduction's modulus
/// bound.
LqrRunResult run_obd_controller(const LqrSystem& system,
                                const ObdConfig& config);

}  // namespace soco
