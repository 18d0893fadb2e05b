#include "soco/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "soco/offline.hpp"

namespace soco {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// deterministic random building blocks

Vector random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector u(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) u[i] = gauss(rng);
    norm = u.norm();
  } while (norm < 1e-12);
  return u / norm;
}

Matrix random_orthogonal(int d, std::mt19937_64& rng) {
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

// SPD matrix whose smallest eigenvalue is exactly lo and whose spectrum stays
// within [lo, lo * cond].
Matrix random_spd(int d, double lo, double cond, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> spread(1.0, cond);
  Vector eig(d);
  eig[0] = lo;
  for (int i = 1; i < d; ++i) eig[i] = lo * spread(rng);
  if (d == 1) return eig.asDiagonal();
  const Matrix q = random_orthogonal(d, rng);
  Matrix P = q * eig.asDiagonal() * q.transpose();
  return ((P + P.transpose()) / 2.0).eval();
}

Matrix symmetric_inverse_sqrt(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// Minimizer walk shared by the generators: starts at zero, step length
// epsilon (kFixed), uniform in [0, epsilon] (kLazy), or alternating between
// two clusters 5 units apart (kAdversarial).
std::vector<Vector> minimizer_walk(int d, int T, double epsilon, WalkMode walk,
                                   std::mt19937_64& rng) {
  std::vector<Vector> points;
  points.reserve(T);
  if (walk == WalkMode::kAdversarial) {
    const Vector far = 5.0 * random_unit(d, rng);
    for (int t = 0; t < T; ++t) {
      points.push_back(t % 2 == 0 ? Vector::Zero(d) : far);
    }
    return points;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v = Vector::Zero(d);
  points.push_back(v);
  for (int t = 1; t < T; ++t) {
    double step = epsilon;
    if (walk == WalkMode::kLazy) step *= unit(rng);
    if (epsilon > 0.0) v = v + step * random_unit(d, rng);
    points.push_back(v);
  }
  return points;
}

// ---------------------------------------------------------------------------
// config parsing

const char* family_name(Family family) {
  switch (family) {
    case Family::kQuadraticWalk: return "quadratic-walk";
    case Family::kRidgeStream: return "ridge-stream";
    case Family::kLogisticStream: return "logistic-stream";
    case Family::kLqr: return "lqr";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "quadratic-walk") return Family::kQuadraticWalk;
  if (name == "ridge-stream") return Family::kRidgeStream;
  if (name == "logistic-stream") return Family::kLogisticStream;
  if (name == "lqr") return Family::kLqr;
  throw std::invalid_argument("unknown family '" + name + "'");
}

double get_positive(const json& j, const std::string& key) {
  const double v = j.at(key).get<double>();
  require(v > 0.0, "config key '" + key + "' must be positive");
  return v;
}

int get_positive_int(const json& j, const std::string& key) {
  require(j.at(key).is_number_integer(),
          "config key '" + key + "' must be an integer");
  const long long v = j.at(key).get<long long>();
  require(v >= 1, "config key '" + key + "' must be at least 1");
  return static_cast<int>(v);
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                err.what());
  }
  require(j.is_object(), "config must be a JSON object");

  ScenarioConfig config;
  config.family = parse_family(j.at("family").get<std::string>());

  std::vector<std::string> allowed = {"family",  "dimension", "horizon",
                                      "epsilon", "seed",      "beta",
                                      "balance_mode", "walk", "cond",
                                      "tolerances", "output"};
  switch (config.family) {
    case Family::kQuadraticWalk:
      allowed.push_back("modulus");
      break;
    case Family::kRidgeStream:
    case Family::kLogisticStream:
      allowed.push_back("lambda1");
      allowed.push_back("lambda2");
      allowed.push_back("samples");
      break;
    case Family::kLqr:
      allowed.push_back("lambda");
      break;
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const auto& key : allowed) known = known || key == item.key();
    if (!known) {
      throw std::invalid_argument("config key '" + item.key() +
                                  "' is not recognized for family '" +
                                  family_name(config.family) + "'");
    }
  }

  config.dimension = get_positive_int(j, "dimension");
  config.horizon = get_positive_int(j, "horizon");
  config.epsilon = j.at("epsilon").get<double>();
  require(config.epsilon >= 0.0, "epsilon must be nonnegative");
  require(j.at("seed").is_number_integer(), "seed must be an integer");
  config.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("beta")) {
    if (j["beta"].is_string()) {
      require(j["beta"].get<std::string>() == "auto",
              "beta must be a positive number or \"auto\"");
    } else {
      config.beta = get_positive(j, "beta");
    }
  }
  if (j.contains("balance_mode")) {
    const std::string mode = j["balance_mode"].get<std::string>();
    if (mode == "zero-shifted") {
      config.balance_mode = BalanceMode::kZeroShifted;
    } else if (mode == "absolute-level") {
      config.balance_mode = BalanceMode::kAbsoluteLevel;
    } else {
      throw std::invalid_argument("balance_mode must be 'zero-shifted' or "
                                  "'absolute-level'");
    }
  }
  if (j.contains("walk")) {
    const std::string walk = j["walk"].get<std::string>();
    if (walk == "fixed") {
      config.walk = WalkMode::kFixed;
    } else if (walk == "lazy") {
      config.walk = WalkMode::kLazy;
    } else if (walk == "adversarial") {
      config.walk = WalkMode::kAdversarial;
    } else {
      throw std::invalid_argument(
          "walk must be 'fixed', 'lazy', or 'adversarial'");
    }
  }
  if (j.contains("cond")) {
    config.cond = j["cond"].get<double>();
    require(config.cond >= 1.0, "cond must be at least 1");
  }

  switch (config.family) {
    case Family::kQuadraticWalk:
      config.modulus = get_positive(j, "modulus");
      break;
    case Family::kRidgeStream:
    case Family::kLogisticStream:
      config.lambda1 = get_positive(j, "lambda1");
      config.lambda2 = get_positive(j, "lambda2");
      if (j.contains("samples")) config.samples = get_positive_int(j, "samples");
      require(config.samples >= config.dimension + 1,
              "samples must exceed dimension for full-rank streams");
      break;
    case Family::kLqr:
      config.lambda = get_positive(j, "lambda");
      break;
  }

  if (j.contains("tolerances")) {
    const json& tols = j["tolerances"];
    require(tols.is_object(), "tolerances must be an object");
    for (const auto& item : tols.items()) {
      const std::string& key = item.key();
      const double value = item.value().get<double>();
      require(value > 0.0, "tolerance '" + key + "' must be positive");
      if (key == "level") {
        config.tolerances.level = value;
      } else if (key == "projection") {
        config.tolerances.projection = value;
      } else if (key == "offline") {
        config.tolerances.offline = value;
      } else if (key == "minimizer") {
        config.tolerances.minimizer = value;
      } else {
        throw std::invalid_argument("tolerance key '" + key +
                                    "' is not recognized");
      }
    }
  }
  if (j.contains("output")) {
    const json& out = j["output"];
    require(out.is_object(), "output must be an object");
    for (const auto& item : out.items()) {
      if (item.key() == "csv") {
        config.csv_path = item.value().get<std::string>();
      } else if (item.key() == "summary") {
        config.summary_path = item.value().get<std::string>();
      } else {
        throw std::invalid_argument("output key '" + item.key() +
                                    "' is not recognized");
      }
    }
  }
  return config;
}

namespace {

// ---------------------------------------------------------------------------
// scenario generators

GeneratedScenario generate_quadratic_walk(const ScenarioConfig& config,
                                          std::mt19937_64& rng) {
  GeneratedScenario scenario;
  scenario.minimizers = minimizer_walk(config.dimension, config.horizon,
                                       config.epsilon, config.walk, rng);
  scenario.instance.x0 = scenario.minimizers.front();
  for (int t = 0; t < config.horizon; ++t) {
    const Matrix P =
        random_spd(config.dimension, config.modulus, config.cond, rng);
    scenario.instance.costs.push_back(
        make_quadratic(P, scenario.minimizers[t], 0.0));
  }
  return scenario;
}

GeneratedScenario generate_ridge_stream(const ScenarioConfig& config,
                                        std::mt19937_64& rng) {
  const int d = config.dimension;
  const int n = config.samples;
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix X(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) X(i, k) = gauss(rng);
  }
  const Matrix gram = X.transpose() * X;
  const Matrix shifted = gram + (config.lambda1 / 2.0) * Matrix::Identity(d, d);
  // v(theta_bar) = S theta_bar with S = shifted^{-1} gram; stepping theta_bar
  // by eps * S^{-1} u moves the minimizer by exactly eps.
  const Eigen::LDLT<Matrix> shifted_ldlt(shifted);
  const Eigen::LDLT<Matrix> gram_ldlt(gram);
  require(gram_ldlt.info() == Eigen::Success && gram_ldlt.isPositive(),
          "generated design matrix lost rank; raise samples");
  auto to_theta = [&](const Vector& v) { return gram_ldlt.solve(shifted * v); };

  std::vector<Vector> targets =
      minimizer_walk(d, config.horizon, config.epsilon, config.walk, rng);

  GeneratedScenario scenario;
  scenario.minimizers = targets;
  std::vector<RegressionRound> rounds;
  rounds.reserve(config.horizon);
  for (const auto& v : targets) {
    rounds.push_back({X, X * to_theta(v)});
  }
  SmoothedRegressionConfig reg;
  reg.lambda1 = config.lambda1;
  reg.lambda2 = config.lambda2;
  reg.task = RegressionTask::kRidge;
  scenario.instance =
      make_smoothed_regression_instance(rounds, reg, targets.front());
  // Report the minimizers the construction actually produced.
  for (int t = 0; t < config.horizon; ++t) {
    scenario.minimizers[t] = scenario.instance.costs[t]->minimizer();
  }
  return scenario;
}

GeneratedScenario generate_logistic_stream(const ScenarioConfig& config,
                                           std::mt19937_64& rng) {
  const int d = config.dimension;
  const int n = config.samples;
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix X0(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) X0(i, k) = gauss(rng);
  }
  const Vector separator = 2.0 * random_unit(d, rng);
  Vector labels(n);
  for (int i = 0; i < n; ++i) labels[i] = X0.row(i).dot(separator) > 0.0;
  if (labels.minCoeff() == labels.maxCoeff()) labels[0] = 1.0 - labels[0];

  Matrix drift(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) drift(i, k) = gauss(rng);
  }
  drift /= drift.norm();

  const double loss_weight = 1.0 / config.lambda2;
  const double ridge_weight = config.lambda1 / config.lambda2;
  auto minimizer_at = [&](double tau) {
    const LogisticCost cost(X0 + tau * drift, labels, loss_weight,
                            ridge_weight, config.tolerances.minimizer);
    return cost.minimizer();
  };

  // Walk the feature drift, shrinking each proposed step until the minimizer
  // moves by at most epsilon.
  std::vector<double> taus = {0.0};
  Vector v_prev = minimizer_at(0.0);
  std::vector<Vector> minimizers = {v_prev};
  double scale = config.epsilon > 0.0 ? config.epsilon : 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 1; t < config.horizon; ++t) {
    double step = scale;
    if (config.walk == WalkMode::kLazy) step *= unit(rng);
    if (config.walk == WalkMode::kAdversarial) step = (t % 2 == 1) ? 5.0 : -5.0;
    double tau = taus.back() + step;
    Vector v = minimizer_at(tau);
    if (config.walk != WalkMode::kAdversarial && config.epsilon > 0.0) {
      for (int adjust = 0; adjust < 10; ++adjust) {
        const double moved = (v - v_prev).norm();
        if (moved <= config.epsilon &&
            (moved >= 0.5 * config.epsilon || adjust > 0)) {
          break;
        }
        const double ratio =
            moved > 1e-12 ? 0.8 * config.epsilon / moved : 2.0;
        step *= std::min(ratio, 4.0);
        tau = taus.back() + step;
        v = minimizer_at(tau);
      }
      if ((v - v_prev).norm() > config.epsilon) {
        tau = taus.back();  // reject the move entirely
        v = v_prev;
      }
    }
    taus.push_back(tau);
    minimizers.push_back(v);
    v_prev = v;
  }

  std::vector<RegressionRound> rounds;
  rounds.reserve(config.horizon);
  for (int t = 0; t < config.horizon; ++t) {
    rounds.push_back({X0 + taus[t] * drift, labels});
  }
  SmoothedRegressionConfig reg;
  reg.lambda1 = config.lambda1;
  reg.lambda2 = config.lambda2;
  reg.task = RegressionTask::kLogistic;
  reg.minimizer_tol = config.tolerances.minimizer;

  GeneratedScenario scenario;
  scenario.instance =
      make_smoothed_regression_instance(rounds, reg, minimizers.front());
  scenario.minimizers.clear();
  for (int t = 0; t < config.horizon; ++t) {
    scenario.minimizers.push_back(scenario.instance.costs[t]->minimizer());
  }
  return scenario;
}

GeneratedScenario generate_lqr(const ScenarioConfig& config,
                               std::mt19937_64& rng) {
  const int d = config.dimension;
  const int T = config.horizon;
  std::uniform_real_distribution<double> sing(1.0, 3.0);

  LqrSystem system;
  {
    const Matrix u = random_orthogonal(d, rng);
    const Matrix v = random_orthogonal(d, rng);
    Vector sigma(d);
    for (int i = 0; i < d; ++i) sigma[i] = sing(rng);
    system.B = u * sigma.asDiagonal() * v.transpose();
  }
  system.R = random_spd(d, 0.5, 4.0, rng);
  for (int t = 0; t < T; ++t) {
    system.Q_seq.push_back(random_spd(d, config.lambda, config.cond, rng));
  }
  system.x0 = Vector::Zero(d);

  // Disturbances sized so the cost centers s_t drift by at most epsilon:
  // w_t = B R^{-1/2} (step * u) moves s_t by exactly step.
  const Matrix shape = system.B * symmetric_inverse_sqrt(system.R);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < T; ++t) {
    double step = config.epsilon;
    if (config.walk == WalkMode::kLazy) step *= unit(rng);
    if (config.walk == WalkMode::kAdversarial) step = 5.0;
    system.w_seq.push_back(shape * (step * random_unit(d, rng)));
  }

  GeneratedScenario scenario;
  scenario.lqr_reduction = lqr_to_soco(system);
  scenario.lqr_system = std::move(system);
  scenario.instance = scenario.lqr_reduction->soco;
  scenario.minimizers = scenario.lqr_reduction->s_seq;
  return scenario;
}

}  // namespace

GeneratedScenario generate_scenario(const ScenarioConfig& config) {
  require(config.horizon >= 1, "horizon must be at least 1");
  require(config.dimension >= 1, "dimension must be at least 1");
  std::mt19937_64 rng(config.seed);
  GeneratedScenario scenario;
  switch (config.family) {
    case Family::kQuadraticWalk:
      scenario = generate_quadratic_walk(config, rng);
      break;
    case Family::kRidgeStream:
      scenario = generate_ridge_stream(config, rng);
      break;
    case Family::kLogisticStream:
      scenario = generate_logistic_stream(config, rng);
      break;
    case Family::kLqr:
      scenario = generate_lqr(config, rng);
      break;
  }
  scenario.target_epsilon = config.epsilon;
  scenario.instance.validate();
  return scenario;
}

namespace {

// ---------------------------------------------------------------------------
// experiment driver

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::pair<std::string, std::string> resolve_output_paths(
    const ScenarioConfig& config) {
  std::string csv = config.csv_path;
  std::string summary = config.summary_path;
  if (csv.empty() || summary.empty()) {
    const char* env = std::getenv("SOCO_OUTPUT_DIR");
    const std::filesystem::path dir = env != nullptr ? env : ".";
    std::ostringstream stem;
    stem << family_name(config.family) << "-seed" << config.seed;
    if (csv.empty()) csv = (dir / (stem.str() + ".csv")).string();
    if (summary.empty()) {
      summary = (dir / (stem.str() + ".summary.json")).string();
    }
  }
  return {csv, summary};
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

json config_to_json(const ScenarioConfig& config, double resolved_beta) {
  json j;
  j["family"] = family_name(config.family);
  j["dimension"] = config.dimension;
  j["horizon"] = config.horizon;
  j["epsilon"] = config.epsilon;
  j["seed"] = config.seed;
  j["beta"] = resolved_beta;
  j["beta_auto"] = !config.beta.has_value();
  j["balance_mode"] = config.balance_mode == BalanceMode::kZeroShifted
                          ? "zero-shifted"
                          : "absolute-level";
  j["walk"] = config.walk == WalkMode::kFixed
                  ? "fixed"
                  : (config.walk == WalkMode::kLazy ? "lazy" : "adversarial");
  switch (config.family) {
    case Family::kQuadraticWalk:
      j["modulus"] = config.modulus;
      j["cond"] = config.cond;
      break;
    case Family::kRidgeStream:
    case Family::kLogisticStream:
      j["lambda1"] = config.lambda1;
      j["lambda2"] = config.lambda2;
      j["samples"] = config.samples;
      break;
    case Family::kLqr:
      j["lambda"] = config.lambda;
      j["cond"] = config.cond;
      break;
  }
  j["tolerances"] = {{"level", config.tolerances.level},
                     {"projection", config.tolerances.projection},
                     {"offline", config.tolerances.offline},
                     {"minimizer", config.tolerances.minimizer}};
  return j;
}

json verdicts_to_json(const VerdictSet& verdicts) {
  json j;
  j["balance"] = verdict_name(verdicts.balance);
  j["competitive_ratio"] = verdict_name(verdicts.ratio);
  j["tracking"] = verdict_name(verdicts.tracking);
  j["smoothness"] = verdict_name(verdicts.smoothness);
  j["regret"] = verdict_name(verdicts.regret);
  j["drift"] = verdict_name(verdicts.drift);
  j["opt_residual"] = verdict_name(verdicts.opt_residual);
  j["all_passed"] = verdicts.all_passed();
  return j;
}

json metrics_to_json(const MetricsReport& metrics) {
  json j;
  j["alg_cost"] = metrics.alg_cost;
  j["opt_cost"] = metrics.opt_cost;
  j["competitive_ratio"] = metrics.competitive_ratio;
  j["ratio_flagged"] = metrics.ratio_flagged;
  j["dynamic_regret"] = metrics.dynamic_regret;
  j["epsilon"] = metrics.epsilon;
  j["max_tracking_error"] = metrics.max_tracking_error;
  j["trajectory_smoothness"] = metrics.trajectory_smoothness;
  j["measured_G"] = metrics.measured_G;
  j["modulus"] = metrics.modulus;
  j["beta"] = metrics.beta;
  j["horizon"] = metrics.horizon;
  j["dimension"] = metrics.dimension;
  j["worst_balance_residual"] = metrics.worst_balance_residual;
  j["worst_projection_residual"] = metrics.worst_projection_residual;
  j["opt_residual"] = metrics.opt_residual;
  j["bounds"] = {{"in_regime", metrics.bounds.in_regime},
                 {"cr_bound", metrics.bounds.cr_bound},
                 {"alpha", metrics.bounds.alpha},
                 {"tracking_bound", metrics.bounds.tracking_bound},
                 {"smoothness_bound", metrics.bounds.smoothness_bound},
                 {"regret_bound", metrics.bounds.regret_bound}};
  return j;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kNotApplicable: return "n/a";
  }
  return "?";
}

bool VerdictSet::all_passed() const {
  for (Verdict v : {balance, ratio, tracking, smoothness, regret, drift,
                    opt_residual}) {
    if (v == Verdict::kFail) return false;
  }
  return true;
}

std::string rows_to_csv(const std::vector<RoundRow>& rows) {
  std::string text = "t,H,M,level,balance_residual,tracking_error,H_opt,M_opt\n";
  for (const auto& row : rows) {
    text += std::to_string(row.t);
    for (double value : {row.hitting, row.movement, row.level,
                         row.balance_residual, row.tracking_error,
                         row.hitting_opt, row.movement_opt}) {
      text += ',';
      text += format_double(value);
    }
    text += '\n';
  }
  return text;
}

ExperimentResult run_experiment(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const GeneratedScenario scenario = generate_scenario(config);
  const SocoInstance& instance = scenario.instance;

  const double modulus = instance.min_modulus();
  const double beta = config.beta.value_or(default_beta(modulus));

  ObdConfig obd;
  obd.beta = beta;
  obd.level_tol = config.tolerances.level;
  obd.projection_tol = config.tolerances.projection;
  obd.balance_mode = config.balance_mode;

  const Trajectory alg = obd_run(instance, obd);
  const OfflineSolution offline =
      solve_offline(instance, config.tolerances.offline);

  ExperimentResult result;
  result.metrics = compute_metrics(instance, alg, offline.trajectory, beta,
                                   offline.first_order_residual);

  result.rows.reserve(instance.horizon());
  for (int t = 0; t < instance.horizon(); ++t) {
    RoundRow row;
    row.t = t + 1;
    row.hitting = alg.steps[t].hitting;
    row.movement = alg.steps[t].movement;
    row.level = alg.steps[t].level;
    row.balance_residual = alg.steps[t].balance_residual;
    row.tracking_error = (alg.steps[t].x - scenario.minimizers[t]).norm();
    row.hitting_opt = offline.trajectory.steps[t].hitting;
    row.movement_opt = offline.trajectory.steps[t].movement;
    result.rows.push_back(row);
  }

  // Theorem-style verdicts. The accuracy and regret bounds need the minimizer
  // walk to stay epsilon-smooth from the start point, so the bound epsilon
  // also covers the x0 -> v_1 gap.
  const bool adversarial = config.walk == WalkMode::kAdversarial;
  const double eps_bound =
      std::max(result.metrics.epsilon,
               (scenario.minimizers.front() - instance.x0).norm());
  VerdictSet verdicts;
  {
    bool ok = true;
    for (const auto& step : alg.steps) {
      const double scale = std::max(1.0, beta * step.balance_target);
      if (step.stopped_at_minimizer) {
        ok = ok && step.balance_residual <= 1e-9 * scale;
      } else {
        ok = ok && std::abs(step.balance_residual) <= 1e-6 * scale;
      }
    }
    verdicts.balance = ok ? Verdict::kPass : Verdict::kFail;
  }
  if (result.metrics.bounds.in_regime) {
    if (result.metrics.ratio_flagged) {
      verdicts.ratio = std::isfinite(result.metrics.competitive_ratio)
                           ? Verdict::kPass
                           : Verdict::kFail;
    } else {
      verdicts.ratio = result.metrics.competitive_ratio <=
                               result.metrics.bounds.cr_bound + 1e-3
                           ? Verdict::kPass
                           : Verdict::kFail;
    }
    if (!adversarial) {
      const AccuracyBound acc = accuracy_bound(modulus, beta, eps_bound);
      verdicts.tracking =
          result.metrics.max_tracking_error <= acc.tracking + 1e-6
              ? Verdict::kPass
              : Verdict::kFail;
      verdicts.smoothness =
          result.metrics.trajectory_smoothness <= acc.smoothness + 1e-6
              ? Verdict::kPass
              : Verdict::kFail;
      const double bound = regret_bound(result.metrics.measured_G, modulus,
                                        beta, eps_bound, instance.horizon());
      verdicts.regret = result.metrics.dynamic_regret <= bound + 1e-6 &&
                                result.metrics.dynamic_regret >= -1e-6
                            ? Verdict::kPass
                            : Verdict::kFail;
    }
  }
  {
    const DriftReport drift = offline_drift_check(offline, scenario.minimizers,
                                                  modulus, instance.x0);
    verdicts.drift = drift.passed ? Verdict::kPass : Verdict::kFail;
  }
  verdicts.opt_residual = offline.first_order_residual <= 1e-8
                              ? Verdict::kPass
                              : Verdict::kFail;
  result.verdicts = verdicts;

  if (scenario.lqr_system.has_value()) {
    result.lqr_alg_cost = lqr_cost(*scenario.lqr_system,
                                   soco_to_controls(alg,
                                                    *scenario.lqr_reduction));
    result.lqr_opt_cost =
        lqr_cost(*scenario.lqr_system,
                 soco_to_controls(offline.trajectory,
                                  *scenario.lqr_reduction));
  }

  result.csv_text = rows_to_csv(result.rows);
  const auto [csv_path, summary_path] = resolve_output_paths(config);
  result.csv_path = csv_path;
  result.summary_path = summary_path;

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  json summary;
  summary["config"] = config_to_json(config, beta);
  summary["metrics"] = metrics_to_json(result.metrics);
  summary["verdicts"] = verdicts_to_json(result.verdicts);
  summary["outputs"] = {{"csv", result.csv_path},
                        {"summary", result.summary_path}};
  summary["wall_seconds"] = result.wall_seconds;
  if (scenario.lqr_system.has_value()) {
    summary["lqr"] = {{"alg_cost", result.lqr_alg_cost},
                      {"opt_cost", result.lqr_opt_cost},
                      {"soco_gap",
                       std::abs(result.lqr_alg_cost - result.metrics.alg_cost)}};
  }
  result.summary_text = summary.dump(2) + "\n";

  write_file(result.csv_path, result.csv_text);
  write_file(result.summary_path, result.summary_text);
  return result;
}

std::vector<ExperimentResult> run_sweep(const ScenarioConfig& base,
                                        const std::string& param,
                                        const std::vector<double>& values) {
  require(!values.empty(), "sweep needs at least one value");
  std::vector<ExperimentResult> results;
  results.reserve(values.size());
  const auto [base_csv, base_summary] = resolve_output_paths(base);
  for (double value : values) {
    ScenarioConfig config = base;
    if (param == "epsilon") {
      require(value >= 0.0, "epsilon must be nonnegative");
      config.epsilon = value;
    } else if (param == "beta") {
      require(value > 0.0, "beta must be positive");
      config.beta = value;
    } else if (param == "modulus") {
      require(value > 0.0, "modulus must be positive");
      config.modulus = value;
    } else if (param == "lambda1") {
      config.lambda1 = value;
    } else if (param == "lambda2") {
      config.lambda2 = value;
    } else if (param == "lambda") {
      config.lambda = value;
    } else if (param == "cond") {
      config.cond = value;
    } else if (param == "horizon") {
      config.horizon = static_cast<int>(value);
    } else if (param == "dimension") {
      config.dimension = static_cast<int>(value);
    } else if (param == "seed") {
      config.seed = static_cast<std::uint64_t>(value);
    } else {
      throw std::invalid_argument("sweep parameter '" + param +
                                  "' is not recognized");
    }
    char tag[64];
    std::snprintf(tag, sizeof(tag), "-%s=%g", param.c_str(), value);
    auto with_tag = [&](const std::string& path) {
      const std::filesystem::path p(path);
      std::filesystem::path out = p.parent_path();
      std::string name = p.stem().string();
      // strip .summary from .summary.json stems
      if (name.size() > 8 && name.ends_with(".summary")) {
        name = name.substr(0, name.size() - 8) + tag + ".summary";
      } else {
        name += tag;
      }
      out /= name + p.extension().string();
      return out.string();
    };
    config.csv_path = with_tag(base_csv);
    config.summary_path = with_tag(base_summary);
    results.push_back(run_experiment(config));
  }
  return results;
}

// ---------------------------------------------------------------------------
// property suites

namespace {

SuiteResult suite_potential_lemmas() {
  SuiteResult result;
  result.name = "potential-lemmas";
  std::mt19937_64 rng(20240901);
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::uniform_real_distribution<double> eta_draw(1.0, 3.0);
  std::uniform_int_distribution<int> dim(1, 8);

  double worst = std::numeric_limits<double>::infinity();
  int qualified = 0;
  for (int i = 0; i < 100000; ++i) {
    const int d = dim(rng);
    Vector a(d), b(d), c(d);
    for (int k = 0; k < d; ++k) {
      a[k] = gauss(rng);
      b[k] = gauss(rng);
      c[k] = gauss(rng);
    }
    const PotentialChecker checker(eta_draw(rng));
    const PotentialLemmaReport report = check_potential_lemmas(a, b, c, checker);
    if (report.lemma1_applicable) {
      worst = std::min(worst, report.lemma1_slack);
      ++qualified;
    }
    worst = std::min(worst, report.lemma2_slack);
  }
  for (int i = 0; i < 10000; ++i) {
    const int d = dim(rng);
    const Matrix P = random_spd(d, 0.5, 8.0, rng);
    Vector v(d), x(d), xs(d);
    for (int k = 0; k < d; ++k) {
      v[k] = gauss(rng);
      x[k] = v[k] + gauss(rng);
      xs[k] = v[k] + gauss(rng);
    }
    const auto cost = make_quadratic(P, v, 0.0);
    const PotentialChecker checker(eta_draw(rng));
    worst = std::min(worst, lemma3_slack(*cost, x, xs, checker));
  }
  result.worst_slack = worst;
  result.passed = worst >= -1e-9;
  std::ostringstream detail;
  detail << "100000 triangle triples (" << qualified
         << " angle-qualified) + 10000 cost triples, seed 20240901, worst slack "
         << worst;
  result.detail = detail.str();
  return result;
}

SuiteResult suite_projection_optimality() {
  SuiteResult result;
  result.name = "projection-optimality";
  std::mt19937_64 rng(20240902);
  std::normal_distribution<double> gauss(0.0, 1.5);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_real_distribution<double> unit(0.05, 0.95);

  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1000; ++i) {
    const int d = dim(rng);
    const Matrix P = random_spd(d, 0.5, 10.0, rng);
    Vector v(d), y(d);
    for (int k = 0; k < d; ++k) {
      v[k] = gauss(rng);
      y[k] = v[k] + gauss(rng) + 1.0;
    }
    const auto cost = make_quadratic(P, v, 0.0);
    const double fy = cost->eval(y);
    if (fy < 1e-8) continue;
    const double level = unit(rng) * fy;
    const SublevelProjection proj = project_sublevel(*cost, level, y);
    const double base = (proj.point - y).squaredNorm();

    for (int k = 0; k < 16; ++k) {
      const double radius = k % 2 == 0 ? 1e-3 : 1e-2;
      const Vector candidate = proj.point + radius * random_unit(d, rng);
      if (cost->eval(candidate) <= level) {
        worst = std::min(worst, (candidate - y).squaredNorm() - base);
      }
    }
    // movement is nonincreasing in the level
    const double l2 = level + unit(rng) * (fy - level);
    const SublevelProjection proj2 = project_sublevel(*cost, l2, y);
    worst = std::min(worst, base - (proj2.point - y).squaredNorm());
  }
  result.worst_slack = worst;
  result.passed = worst >= -1e-7;
  std::ostringstream detail;
  detail << "1000 instances, feasible perturbations at 1e-3/1e-2 plus level "
            "monotonicity, seed 20240902, worst slack "
         << worst;
  result.detail = detail.str();
  return result;
}

SuiteResult suite_oracle_1d() {
  SuiteResult result;
  result.name = "oracle-1d";
  std::mt19937_64 rng(20240903);
  std::uniform_real_distribution<double> modulus(0.5, 4.0);
  std::uniform_real_distribution<double> center(-1.5, 1.5);
  std::uniform_int_distribution<int> horizon(1, 3);

  double worst_gap = 0.0;
  double worst_order = 0.0;
  for (int i = 0; i < 20; ++i) {
    SocoInstance instance;
    instance.x0 = Vector::Constant(1, center(rng));
    const int T = horizon(rng);
    double lo = instance.x0[0];
    double hi = lo;
    for (int t = 0; t < T; ++t) {
      Matrix P(1, 1);
      P(0, 0) = modulus(rng);
      Vector v = Vector::Constant(1, center(rng));
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
      instance.costs.push_back(make_quadratic(P, v, 0.0));
    }
    const OfflineSolution exact = solve_offline(instance, 1e-10);
    const OfflineSolution grid =
        brute_force_offline(instance, lo - 3.0, hi + 3.0, 4001);
    worst_gap = std::max(worst_gap,
                         std::abs(grid.trajectory.total_cost -
                                  exact.trajectory.total_cost));
    ObdConfig obd;
    obd.beta = default_beta(instance.min_modulus());
    const Trajectory alg = obd_run(instance, obd);
    worst_order = std::max(worst_order,
                           exact.trajectory.total_cost - alg.total_cost);
  }
  result.worst_slack = 1e-3 - worst_gap;
  result.passed = worst_gap <= 1e-3 && worst_order <= 1e-9;
  std::ostringstream detail;
  detail << "20 instances (T <= 3, 4001-point grid), seed 20240903, worst "
            "|grid - exact| "
         << worst_gap << ", worst OPT - ALG " << worst_order;
  result.detail = detail.str();
  return result;
}

SuiteResult suite_reduction_roundtrip() {
  SuiteResult result;
  result.name = "reduction-roundtrip";
  std::mt19937_64 rng(20240904);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> horizon(1, 15);
  std::uniform_real_distribution<double> sing(1.0, 3.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double worst_identity = 0.0;
  double worst_roundtrip = 0.0;
  for (int i = 0; i < 25; ++i) {
    const int d = dim(rng);
    const int T = horizon(rng);
    LqrSystem system;
    {
      const Matrix u = random_orthogonal(d, rng);
      const Matrix v = random_orthogonal(d, rng);
      Vector sigma(d);
      for (int k = 0; k < d; ++k) sigma[k] = sing(rng);
      system.B = u * sigma.asDiagonal() * v.transpose();
    }
    system.R = random_spd(d, 0.5, 4.0, rng);
    system.x0 = Vector::Zero(d);
    for (int t = 0; t < T; ++t) {
      system.Q_seq.push_back(random_spd(d, 0.8, 6.0, rng));
      Vector w(d);
      for (int k = 0; k < d; ++k) w[k] = 0.3 * gauss(rng);
      system.w_seq.push_back(w);
    }
    const LqrReduction reduction = lqr_to_soco(system);

    std::vector<Vector> controls(T);
    for (int t = 0; t < T; ++t) {
      controls[t] = Vector(d);
      for (int k = 0; k < d; ++k) controls[t][k] = gauss(rng);
    }
    // controls -> z trajectory -> controls and both cost evaluations
    Trajectory z_traj;
    Vector y = Vector::Zero(d);
    Vector z_prev = Vector::Zero(d);
    double soco_cost = 0.0;
    for (int t = 0; t < T; ++t) {
      y += system.B * controls[t];
      const Vector z = reduction.transform * y;
      StepRecord step;
      step.x = z;
      soco_cost += reduction.soco.costs[t]->eval(z);
      soco_cost += 0.5 * (z - z_prev).squaredNorm();
      z_prev = z;
      z_traj.steps.push_back(std::move(step));
    }
    const double direct = lqr_cost(system, controls);
    worst_identity =
        std::max(worst_identity, std::abs(direct - soco_cost) /
                                     std::max(1.0, std::abs(direct)));
    const std::vector<Vector> back = soco_to_controls(z_traj, reduction);
    for (int t = 0; t < T; ++t) {
      worst_roundtrip =
          std::max(worst_roundtrip, (back[t] - controls[t]).norm());
    }
  }
  result.worst_slack = 1e-8 - worst_identity;
  result.passed = worst_identity <= 1e-8 && worst_roundtrip <= 1e-10;
  std::ostringstream detail;
  detail << "25 systems (d <= 4, T <= 15), seed 20240904, worst relative "
            "cost gap "
         << worst_identity << ", worst control round-trip " << worst_roundtrip;
  result.detail = detail.str();
  return result;
}

SuiteResult suite_balance() {
  SuiteResult result;
  result.name = "balance";
  std::mt19937_64 rng(20240905);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> modulus(0.3, 10.0);
  std::uniform_real_distribution<double> beta_draw(0.2, 25.0);
  std::uniform_real_distribution<double> offset(0.0, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.5);

  double worst = 0.0;
  bool minimizer_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const int d = dim(rng);
    const Matrix P = random_spd(d, modulus(rng), 10.0, rng);
    Vector v(d), x_prev(d);
    for (int k = 0; k < d; ++k) {
      v[k] = gauss(rng);
      x_prev[k] = v[k] + gauss(rng);
    }
    ObdConfig config;
    config.beta = beta_draw(rng);
    config.balance_mode =
        i % 2 == 0 ? BalanceMode::kZeroShifted : BalanceMode::kAbsoluteLevel;
    const double c0 =
        config.balance_mode == BalanceMode::kAbsoluteLevel ? offset(rng) : 0.0;
    const auto cost = make_quadratic(P, v, c0);
    const StepRecord step = obd_step(*cost, x_prev, config);
    const double scale = std::max(1.0, config.beta * step.balance_target);
    if (step.stopped_at_minimizer) {
      minimizer_ok = minimizer_ok && step.balance_residual <= 1e-9 * scale;
    } else {
      worst = std::max(worst, std::abs(step.balance_residual) / scale);
    }
  }
  result.worst_slack = 1e-6 - worst;
  result.passed = worst <= 1e-6 && minimizer_ok;
  std::ostringstream detail;
  detail << "1000 steps over both balance modes, seed 20240905, worst "
            "relative residual "
         << worst;
  result.detail = detail.str();
  return result;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"potential-lemmas", "projection-optimality", "oracle-1d",
          "reduction-roundtrip", "balance"};
}

std::vector<SuiteResult> verify_suites(const std::vector<std::string>& names) {
  std::vector<std::string> selected = names;
  if (selected.empty()) selected = verify_suite_names();

  std::vector<SuiteResult> results;
  for (const auto& name : selected) {
    if (name == "potential-lemmas") {
      results.push_back(suite_potential_lemmas());
    } else if (name == "projection-optimality") {
      results.push_back(suite_projection_optimality());
    } else if (name == "oracle-1d") {
      results.push_back(suite_oracle_1d());
    } else if (name == "reduction-roundtrip") {
      results.push_back(suite_reduction_roundtrip());
    } else if (name == "balance") {
      results.push_back(suite_balance());
    } else {
      std::ostringstream msg;
      msg << "unknown suite '" << name << "'; available:";
      for (const auto& known : verify_suite_names()) msg << " " << known;
      throw std::invalid_argument(msg.str());
    }
  }
  return results;
}

}  // namespace soco
