#include "soco/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace soco {

namespace {

// Totals below this are treated as zero when forming ratios.
constexpr double kZeroCost = 1e-14;

}  // namespace

RatioResult competitive_ratio(const Trajectory& alg, const Trajectory& opt) {
  require(alg.steps.size() == opt.steps.size(),
          "trajectories cover different horizons");
  if (opt.total_cost <= kZeroCost) {
    if (alg.total_cost <= kZeroCost) return {1.0, true};
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {alg.total_cost / opt.total_cost, false};
}

double dynamic_regret(const Trajectory& alg, const Trajectory& opt) {
  require(alg.steps.size() == opt.steps.size(),
          "trajectories cover different horizons");
  return alg.total_cost - opt.total_cost;
}

double theoretical_cr_bound(double m, double beta) {
  require(m > 0.0, "modulus must be positive");
  require(beta > 0.0, "beta must be positive");
  if (beta <= 4.0 / m) {
    std::ostringstream msg;
    msg << "theoretical_cr_bound: beta = " << beta
        << " outside the guarantee regime beta > 4/m = " << 4.0 / m;
    throw std::domain_error(msg.str());
  }
  const double eta = 1.0 + 1.0 / beta;
  const double numerator =
      std::max(1.0 + beta + 12.0 * eta / m, 2.0 * eta);
  const double denominator = 1.0 - 4.0 * eta / (m * (1.0 + beta));
  return numerator / denominator;
}

double smoothness(const std::vector<Vector>& points) {
  if (points.size() < 2) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    worst = std::max(worst, (points[i] - points[i - 1]).norm());
  }
  return worst;
}

AccuracyBound accuracy_bound(double m, double beta, double epsilon) {
  require(m > 0.0 && beta > 0.0, "modulus and beta must be positive");
  require(epsilon >= 0.0, "epsilon must be nonnegative");
  if (beta * m <= 4.0) {
    throw std::domain_error(
        "accuracy_bound: requires beta * m > 4 so alpha is finite");
  }
  AccuracyBound bound;
  bound.alpha = 1.0 / (std::sqrt(beta * m) - 2.0);
  bound.tracking = bound.alpha * epsilon;
  bound.smoothness = (1.0 + 2.0 * bound.alpha) * epsilon;
  return bound;
}

double regret_bound(double G, double m, double beta, double epsilon, long T) {
  require(G >= 0.0 && epsilon >= 0.0, "G and epsilon must be nonnegative");
  require(T >= 1, "horizon must be at least 1");
  const AccuracyBound acc = accuracy_bound(m, beta, epsilon);
  const double per_round = G * acc.alpha * epsilon +
                           G * (2.0 / m) * epsilon +
                           0.5 * acc.smoothness * acc.smoothness;
  return per_round * static_cast<double>(T);
}

PotentialLemmaReport check_potential_lemmas(const Vector& a, const Vector& b,
                                            const Vector& c,
                                            const PotentialChecker& checker) {
  require(a.size() == b.size() && b.size() == c.size(),
          "triple has mixed dimensions");
  PotentialLemmaReport report;
  const double change = checker(a, c) - checker(a, b);
  report.lemma1_applicable = (a - c).dot(b - c) <= 0.0;
  report.lemma1_slack = -checker(b, c) - change;
  report.lemma2_slack = 2.0 * checker(b, c) + checker(a, b) - change;
  const bool lemma1_ok = !report.lemma1_applicable ||
                         report.lemma1_slack >= -1e-9;
  report.passed = lemma1_ok && report.lemma2_slack >= -1e-9;
  return report;
}

double lemma3_slack(const CostFunction& f, const Vector& x,
                    const Vector& x_star, const PotentialChecker& checker) {
  const double scale = 4.0 * checker.eta() / f.modulus();
  const double hitting = f.eval(x) - f.min_value();
  const double hitting_star = f.eval(x_star) - f.min_value();
  return scale * hitting + scale * hitting_star - checker(x, x_star);
}

MetricsReport compute_metrics(const SocoInstance& instance,
                              const Trajectory& alg, const Trajectory& opt,
                              double beta, double opt_residual) {
  instance.validate();
  require(static_cast<int>(alg.steps.size()) == instance.horizon() &&
              static_cast<int>(opt.steps.size()) == instance.horizon(),
          "trajectory lengths differ from the instance horizon");

  MetricsReport report;
  report.alg_cost = alg.total_cost;
  report.opt_cost = opt.total_cost;
  const RatioResult ratio = competitive_ratio(alg, opt);
  report.competitive_ratio = ratio.value;
  report.ratio_flagged = ratio.flagged;
  report.dynamic_regret = dynamic_regret(alg, opt);
  report.beta = beta;
  report.horizon = instance.horizon();
  report.dimension = instance.dimension();
  report.modulus = instance.min_modulus();
  report.opt_residual = opt_residual;

  std::vector<Vector> minimizers;
  minimizers.reserve(instance.costs.size());
  for (const auto& c : instance.costs) minimizers.push_back(c->minimizer());
  report.epsilon = smoothness(minimizers);

  Vector prev = instance.x0;
  for (int t = 0; t < instance.horizon(); ++t) {
    const StepRecord& step = alg.steps[t];
    report.max_tracking_error = std::max(
        report.max_tracking_error, (step.x - minimizers[t]).norm());
    report.trajectory_smoothness =
        std::max(report.trajectory_smoothness, (step.x - prev).norm());
    report.measured_G = std::max(
        report.measured_G, instance.costs[t]->grad(step.x).norm());
    report.measured_G = std::max(
        report.measured_G, instance.costs[t]->grad(opt.steps[t].x).norm());
    report.worst_balance_residual = std::max(report.worst_balance_residual,
                                             std::abs(step.balance_residual));
    report.worst_projection_residual = std::max(
        report.worst_projection_residual, step.projection_residual);
    prev = step.x;
  }

  report.bounds.in_regime = in_guarantee_regime(report.modulus, beta);
  if (report.bounds.in_regime) {
    report.bounds.cr_bound = theoretical_cr_bound(report.modulus, beta);
    const AccuracyBound acc =
        accuracy_bound(report.modulus, beta, report.epsilon);
    report.bounds.alpha = acc.alpha;
    report.bounds.tracking_bound = acc.tracking;
    report.bounds.smoothness_bound = acc.smoothness;
    report.bounds.regret_bound =
        regret_bound(report.measured_G, report.modulus, beta, report.epsilon,
                     report.horizon);
  }
  return report;
}

}  // namespace soco
