#include "soco/applications.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "soco/offline.hpp"

namespace soco {

namespace {

// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z) {
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix symmetric_sqrt(const Matrix& M, bool inverse) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  require(es.eigenvalues().minCoeff() > 0.0,
          "matrix must be positive definite");
  Vector roots = es.eigenvalues().cwiseSqrt();
  if (inverse) roots = roots.cwiseInverse();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

LogisticCost::LogisticCost(Matrix X, Vector labels01, double loss_weight,
                           double ridge_weight, double minimizer_tol)
    : X_(std::move(X)),
      loss_weight_(loss_weight),
      ridge_weight_(ridge_weight) {
  require(X_.rows() >= 1 && X_.cols() >= 1, "empty design matrix");
  require(labels01.size() == X_.rows(), "label count differs from row count");
  require(loss_weight_ > 0.0 && ridge_weight_ > 0.0,
          "loss and ridge weights must be positive");
  signs_ = Vector(labels01.size());
  for (Eigen::Index i = 0; i < labels01.size(); ++i) {
    require(labels01[i] == 0.0 || labels01[i] == 1.0,
            "logistic labels must be 0 or 1");
    signs_[i] = labels01[i] > 0.5 ? 1.0 : -1.0;
  }

  // Cache the minimizer with the inner solver; eval/grad are already usable.
  const MinimizeResult result = minimize_cost(*this, minimizer_tol);
  minimizer_ = result.point;
  min_value_ = result.value;
}

double LogisticCost::eval(const Vector& theta) const {
  require(theta.size() == X_.cols(), "point dimension mismatch");
  const Vector margins = signs_.cwiseProduct(X_ * theta);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    loss += log1p_exp_neg(margins[i]);
  }
  loss /= static_cast<double>(X_.rows());
  return loss_weight_ * loss + 0.5 * ridge_weight_ * theta.squaredNorm();
}

Vector LogisticCost::grad(const Vector& theta) const {
  require(theta.size() == X_.cols(), "point dimension mismatch");
  const Vector margins = signs_.cwiseProduct(X_ * theta);
  Vector weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    weights[i] = -signs_[i] * sigmoid(-margins[i]);
  }
  Vector g = X_.transpose() * weights / static_cast<double>(X_.rows());
  return loss_weight_ * g + ridge_weight_ * theta;
}

SocoInstance make_smoothed_regression_instance(
    const std::vector<RegressionRound>& rounds,
    const SmoothedRegressionConfig& config, const Vector& theta0) {
  require(!rounds.empty(), "need at least one round");
  require(config.lambda1 > 0.0 && config.lambda2 > 0.0,
          "lambda1 and lambda2 must be positive");
  require(config.loss_scale > 0.0, "loss_scale must be positive");

  // Form the two multipliers as single divisions so that scaling
  // (loss_scale, lambda1, lambda2) jointly reproduces them bit for bit.
  const double a = config.loss_scale / config.lambda2;
  const double b = config.lambda1 / config.lambda2;

  const Eigen::Index d = theta0.size();
  SocoInstance instance;
  instance.x0 = theta0;
  instance.costs.reserve(rounds.size());
  for (const auto& round : rounds) {
    require(round.X.cols() == d, "round feature dimension mismatch");
    require(round.y.size() == round.X.rows(),
            "round response length differs from row count");
    if (config.task == RegressionTask::kRidge) {
      // a ||X theta - y||^2 + (b/2)||theta||^2 as an explicit quadratic form.
      const Matrix P =
          2.0 * a * (round.X.transpose() * round.X) + b * Matrix::Identity(d, d);
      const Vector q = -2.0 * a * (round.X.transpose() * round.y);
      const double r = a * round.y.squaredNorm();
      instance.costs.push_back(make_quadratic_form(P, q, r));
    } else {
      instance.costs.push_back(std::make_shared<LogisticCost>(
          round.X, round.y, a, b, config.minimizer_tol));
    }
  }
  instance.validate();
  return instance;
}

double corollary1_ratio_bound(double m_data_extra, double lambda1,
                              double lambda2) {
  require(lambda1 > 0.0 && lambda2 > 0.0,
          "lambda1 and lambda2 must be positive");
  require(m_data_extra >= 0.0, "extra data curvature must be nonnegative");
  const double m = lambda1 / lambda2 + m_data_extra;
  return theoretical_cr_bound(m, 2.0 + 10.0 / m);
}

void LqrSystem::validate() const {
  require(B.rows() == B.cols() && B.rows() >= 1, "B must be square");
  require(R.rows() == B.rows() && R.cols() == B.cols(),
          "R dimensions differ from B");
  require(!w_seq.empty(), "need at least one round");
  require(Q_seq.size() == w_seq.size(),
          "state-cost and disturbance sequences differ in length");
  require(x0.size() == B.rows(), "x0 dimension differs from B");

  Eigen::JacobiSVD<Matrix> svd(B);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > 1e12) {
    std::ostringstream msg;
    msg << "control matrix is singular within tolerance (condition number "
        << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity())
        << ")";
    throw std::invalid_argument(msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> er(R);
  require(er.eigenvalues().minCoeff() > 0.0, "R must be positive definite");
  for (const auto& Q : Q_seq) {
    require(Q.rows() == B.rows() && Q.cols() == B.cols(),
            "Q dimensions differ from B");
    Eigen::SelfAdjointEigenSolver<Matrix> eq(Q);
    require(eq.eigenvalues().minCoeff() > 0.0,
            "every Q_t must be positive definite");
  }
  for (const auto& w : w_seq) {
    require(w.size() == B.rows(), "disturbance dimension differs from B");
  }
}

double LqrSystem::q_floor() const {
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& Q : Q_seq) {
    Eigen::SelfAdjointEigenSolver<Matrix> eq(Q);
    floor = std::min(floor, eq.eigenvalues().minCoeff());
  }
  return floor;
}

LqrReduction lqr_to_soco(const LqrSystem& system) {
  system.validate();
  const int d = system.dimension();
  const int T = system.horizon();

  const Matrix r_half = symmetric_sqrt(system.R, false);
  const Matrix r_inv_half = symmetric_sqrt(system.R, true);
  const Matrix b_inv =
      system.B.partialPivLu().solve(Matrix::Identity(d, d));

  LqrReduction reduction;
  reduction.transform = r_half * b_inv;         // z = transform * y
  reduction.inverse_transform = system.B * r_inv_half;
  reduction.control_map = r_inv_half;

  Eigen::JacobiSVD<Matrix> svd(system.B);
  Eigen::SelfAdjointEigenSolver<Matrix> er(system.R);
  const double smin_b = svd.singularValues().minCoeff();
  reduction.modulus_bound =
      smin_b * smin_b * system.q_floor() / er.eigenvalues().maxCoeff();

  reduction.soco.x0 = Vector::Zero(d);  // z0: no control history
  reduction.P_seq.reserve(T);
  reduction.s_seq.reserve(T);
  Vector v = -system.x0;  // v_t = -(x0 + sum_{i<=t} w_i)
  for (int t = 0; t < T; ++t) {
    v -= system.w_seq[t];
    Matrix P = reduction.inverse_transform.transpose() * system.Q_seq[t] *
               reduction.inverse_transform;
    P = ((P + P.transpose()) / 2.0).eval();
    const Vector s = reduction.transform * v;
    reduction.P_seq.push_back(P);
    reduction.s_seq.push_back(s);
    reduction.soco.costs.push_back(make_quadratic(P, s, 0.0));
  }
  return reduction;
}

std::vector<Vector> soco_to_controls(const Trajectory& z_trajectory,
                                     const LqrReduction& reduction) {
  std::vector<Vector> controls;
  controls.reserve(z_trajectory.steps.size());
  Vector z_prev = reduction.soco.x0;
  for (const auto& step : z_trajectory.steps) {
    require(step.x.size() == z_prev.size(),
            "trajectory dimension differs from reduction");
    controls.push_back(reduction.control_map * (step.x - z_prev));
    z_prev = step.x;
  }
  return controls;
}

double lqr_cost(const LqrSystem& system, const std::vector<Vector>& controls) {
  require(static_cast<int>(controls.size()) == system.horizon(),
          "control sequence length differs from horizon");
  double total = 0.0;
  Vector x = system.x0;
  for (int t = 0; t < system.horizon(); ++t) {
    require(controls[t].size() == system.dimension(),
            "control dimension mismatch");
    x = x + system.B * controls[t] + system.w_seq[t];
    total += 0.5 * x.dot(system.Q_seq[t] * x);
    total += 0.5 * controls[t].dot(system.R * controls[t]);
  }
  return total;
}

LqrRunResult run_obd_controller(const LqrSystem& system,
                                const ObdConfig& config) {
  LqrRunResult result;
  const LqrReduction reduction = lqr_to_soco(system);

  ObdConfig resolved = config;
  if (resolved.beta <= 0.0) {
    resolved.beta = default_beta(reduction.modulus_bound);
  }

  // obd_step is memoryless, so running the pre-built instance round by round
  // is exactly the streaming controller: s_t (hence w_t) is revealed before
  // the round-t control is chosen.
  result.z_trajectory = obd_run(reduction.soco, resolved);
  result.controls = soco_to_controls(result.z_trajectory, reduction);

  const OfflineSolution offline = solve_offline(reduction.soco, 1e-10);
  result.z_opt = offline.trajectory;
  result.metrics =
      compute_metrics(reduction.soco, result.z_trajectory, result.z_opt,
                      resolved.beta, offline.first_order_residual);
  result.lqr_alg_cost = lqr_cost(system, result.controls);
  result.lqr_opt_cost =
      lqr_cost(system, soco_to_controls(result.z_opt, reduction));
  return result;
}

}  // namespace soco
