#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soco/analysis.hpp"
#include "soco/applications.hpp"
#include "soco/obd.hpp"
#include "soco/types.hpp"

namespace soco {

enum class Family { kQuadraticWalk, kRidgeStream, kLogisticStream, kLqr };

enum class WalkMode {
  kFixed,       // minimizer steps of length exactly epsilon
  kLazy,        // step lengths uniform in [0, epsilon]
  kAdversarial, // minimizers jump between two distant clusters
};

struct Tolerances {
  double level = 1e-9;
  double projection = 1e-12;
  double offline = 1e-10;
  double minimizer = 1e-10;
};

struct ScenarioConfig {
  Family family = Family::kQuadraticWalk;
  int dimension = 1;
  int horizon = 1;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> beta;  // nullopt = auto (2 + 10/m)
  BalanceMode balance_mode = BalanceMode::kZeroShifted;
  WalkMode walk = WalkMode::kFixed;

  double modulus = 1.0;    // quadratic-walk
  double cond = 10.0;      // eigenvalue spread of generated SPD matrices
  double lambda1 = 1.0;    // regression streams
  double lambda2 = 1.0;
  int samples = 8;         // rows per regression round
  double lambda = 1.0;     // lqr: floor on the Q_t spectrum

  Tolerances tolerances;
  std::string csv_path;      // empty = derived from family/seed + output dir
  std::string summary_path;
};

/// Parses a config from JSON text. Field names match ScenarioConfig; unknown
/// keys and keys that do not apply to the chosen family are rejected.
ScenarioConfig parse_scenario_config(const std::string& json_text);

struct GeneratedScenario {
  SocoInstance instance;
  std::vector<Vector> minimizers;
  double target_epsilon = 0.0;
  std::optional<LqrSystem> lqr_system;
  std::optional<LqrReduction> lqr_reduction;
};

/// Deterministic scenario generation from config + seed. The minimizer walk
/// starts at the instance start point, so the smoothness budget covers the
/// whole horizon including round one.
GeneratedScenario generate_scenario(const ScenarioConfig& config);

enum class Verdict { kPass, kFail, kNotApplicable };

const char* verdict_name(Verdict v);

struct VerdictSet {
  Verdict balance = Verdict::kNotApplicable;
  Verdict ratio = Verdict::kNotApplicable;
  Verdict tracking = Verdict::kNotApplicable;
  Verdict smoothness = Verdict::kNotApplicable;
  Verdict regret = Verdict::kNotApplicable;
  Verdict drift = Verdict::kNotApplicable;
  Verdict opt_residual = Verdict::kNotApplicable;

  bool all_passed() const;
};

struct RoundRow {
  int t = 0;
  double hitting = 0.0;
  double movement = 0.0;
  double level = 0.0;
  double balance_residual = 0.0;
  double tracking_error = 0.0;
  double hitting_opt = 0.0;
  double movement_opt = 0.0;
};

struct ExperimentResult {
  MetricsReport metrics;
  std::vector<RoundRow> rows;
  VerdictSet verdicts;
  double wall_seconds = 0.0;
  std::string csv_text;
  std::string summary_text;
  std::string csv_path;
  std::string summary_path;
  // lqr runs only
  double lqr_alg_cost = 0.0;
  double lqr_opt_cost = 0.0;
};

/// Generates the scenario, runs OBD and the offline solver, computes metrics
/// and every bound verdict, and writes the per-round CSV and summary JSON.
/// Output locations: explicit config paths, else $SOCO_OUTPUT_DIR, else the
/// working directory. Identical config + seed produces byte-identical CSV.
ExperimentResult run_experiment(const ScenarioConfig& config);

/// run_experiment over one scalar parameter swept across values.
std::vector<ExperimentResult> run_sweep(const ScenarioConfig& base,
                                        const std::string& param,
                                        const std::vector<double>& values);

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst_slack = 0.0;
  std::string detail;
};

/// Names accepted by verify_suites.
std::vector<std::string> verify_suite_names();

/// Runs the named property suites (all of them when names is empty) with
/// fixed seeds: potential lemmas, projection optimality, the 1-D grid oracle
/// against the continuous solver, LQR reduction round-trips, and the balance
/// invariant. Failing suites carry reproduction info in detail.
std::vector<SuiteResult> verify_suites(const std::vector<std::string>& names);

/// Serializes per-round rows with the fixed header
/// t,H,M,level,balance_residual,tracking_error,H_opt,M_opt.
std::string rows_to_csv(const std::vector<RoundRow>& rows);

}  // namespace soco
