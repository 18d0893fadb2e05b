#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "soco/analysis.hpp"
#include "soco/harness.hpp"

using namespace soco;

namespace {

std::string quadratic_walk_config(int dimension, int horizon, double modulus,
                                  double epsilon, unsigned seed,
                                  const std::string& extra = "") {
  std::ostringstream json;
  json << "{\"family\":\"quadratic-walk\",\"dimension\":" << dimension
       << ",\"horizon\":" << horizon << ",\"modulus\":" << modulus
       << ",\"epsilon\":" << epsilon << ",\"seed\":" << seed << extra << "}";
  return json.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("soco-harness-" + tag);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing accepts the documented schema") {
  const ScenarioConfig config = parse_scenario_config(quadratic_walk_config(
      4, 50, 1.0, 0.2, 7,
      ",\"beta\":\"auto\",\"walk\":\"fixed\",\"cond\":5.0,"
      "\"tolerances\":{\"level\":1e-9},\"output\":{\"csv\":\"a.csv\","
      "\"summary\":\"a.json\"}"));
  CHECK(config.family == Family::kQuadraticWalk);
  CHECK(config.dimension == 4);
  CHECK(config.horizon == 50);
  CHECK(config.epsilon == 0.2);
  CHECK(config.seed == 7);
  CHECK_FALSE(config.beta.has_value());
  CHECK(config.cond == 5.0);
  CHECK(config.csv_path == "a.csv");
}

TEST_CASE("config parsing rejects unknown and inapplicable keys") {
  CHECK_THROWS_WITH_AS(
      parse_scenario_config(quadratic_walk_config(2, 5, 1.0, 0.1, 1,
                                                  ",\"typo\":3")),
      doctest::Contains("typo"), std::invalid_argument);
  // modulus is a quadratic-walk key, not a ridge key
  CHECK_THROWS_WITH_AS(
      parse_scenario_config(
          "{\"family\":\"ridge-stream\",\"dimension\":2,\"horizon\":3,"
          "\"epsilon\":0.1,\"seed\":1,\"lambda1\":1.0,\"lambda2\":1.0,"
          "\"modulus\":2.0}"),
      doctest::Contains("modulus"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario_config("not json"), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_scenario_config(quadratic_walk_config(0, 5, 1.0, 0.1, 1)),
      std::invalid_argument);
}

TEST_CASE("generated walks respect the smoothness budget") {
  const ScenarioConfig config = parse_scenario_config(
      quadratic_walk_config(4, 50, 1.0, 0.2, 1234));
  const GeneratedScenario scenario = generate_scenario(config);
  CHECK(smoothness(scenario.minimizers) <= 0.2 + 1e-12);
  // fixed-length steps make the budget tight
  CHECK(smoothness(scenario.minimizers) >= 0.2 - 1e-12);
  // the walk starts at the instance start point
  CHECK((scenario.minimizers.front() - scenario.instance.x0).norm() == 0.0);
  for (const auto& cost : scenario.instance.costs) {
    CHECK(cost->modulus() >= 1.0 - 1e-9);
  }
}

TEST_CASE("epsilon zero generates constant minimizers") {
  const ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(3, 20, 2.0, 0.0, 5));
  const GeneratedScenario scenario = generate_scenario(config);
  CHECK(smoothness(scenario.minimizers) == 0.0);
}

TEST_CASE("identical seeds generate identical instances") {
  const ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(3, 10, 1.0, 0.3, 99));
  const GeneratedScenario a = generate_scenario(config);
  const GeneratedScenario b = generate_scenario(config);
  for (int t = 0; t < config.horizon; ++t) {
    CHECK((a.minimizers[t] - b.minimizers[t]).norm() == 0.0);
    CHECK(a.instance.costs[t]->eval(a.minimizers[t]) ==
          b.instance.costs[t]->eval(b.minimizers[t]));
  }
}

TEST_CASE("lazy walks stay within the budget") {
  const ScenarioConfig config = parse_scenario_config(quadratic_walk_config(
      2, 30, 1.0, 0.4, 11, ",\"walk\":\"lazy\""));
  const GeneratedScenario scenario = generate_scenario(config);
  CHECK(smoothness(scenario.minimizers) <= 0.4 + 1e-12);
}

TEST_CASE("ridge and logistic streams keep minimizer drift under epsilon") {
  const ScenarioConfig ridge = parse_scenario_config(
      "{\"family\":\"ridge-stream\",\"dimension\":3,\"horizon\":12,"
      "\"epsilon\":0.15,\"seed\":21,\"lambda1\":2.0,\"lambda2\":1.0}");
  const GeneratedScenario ridge_scenario = generate_scenario(ridge);
  CHECK(smoothness(ridge_scenario.minimizers) <= 0.15 + 1e-9);
  CHECK((ridge_scenario.minimizers.front() - ridge_scenario.instance.x0)
            .norm() < 1e-12);

  const ScenarioConfig logistic = parse_scenario_config(
      "{\"family\":\"logistic-stream\",\"dimension\":2,\"horizon\":6,"
      "\"epsilon\":0.1,\"seed\":22,\"lambda1\":2.0,\"lambda2\":1.0}");
  const GeneratedScenario log_scenario = generate_scenario(logistic);
  CHECK(smoothness(log_scenario.minimizers) <= 0.1 + 1e-9);
}

TEST_CASE("lqr scenarios keep the cost centers epsilon-smooth") {
  const ScenarioConfig config = parse_scenario_config(
      "{\"family\":\"lqr\",\"dimension\":3,\"horizon\":15,\"epsilon\":0.2,"
      "\"seed\":31,\"lambda\":1.0}");
  const GeneratedScenario scenario = generate_scenario(config);
  REQUIRE(scenario.lqr_system.has_value());
  CHECK(smoothness(scenario.minimizers) <= 0.2 + 1e-9);
  CHECK(scenario.minimizers.front().norm() <= 0.2 + 1e-9);
}

TEST_CASE("stationary experiment flags the ratio and has zero regret") {
  const auto dir = temp_dir("stationary");
  ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(2, 8, 1.0, 0.0, 3));
  config.csv_path = (dir / "run.csv").string();
  config.summary_path = (dir / "run.summary.json").string();
  const ExperimentResult result = run_experiment(config);
  CHECK(result.metrics.ratio_flagged);
  CHECK(std::abs(result.metrics.dynamic_regret) < 1e-12);
  CHECK(result.verdicts.all_passed());
}

TEST_CASE("experiment verdicts hold on a generated walk") {
  const auto dir = temp_dir("walk");
  ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(3, 30, 10.0, 0.1, 41));
  config.csv_path = (dir / "walk.csv").string();
  config.summary_path = (dir / "walk.summary.json").string();
  const ExperimentResult result = run_experiment(config);
  CHECK(result.metrics.competitive_ratio <=
        theoretical_cr_bound(10.0, 3.0) + 1e-3);
  CHECK(result.verdicts.all_passed());

  // outputs exist and carry the expected header
  std::ifstream csv(config.csv_path);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,H,M,level,balance_residual,tracking_error,H_opt,M_opt");
}

TEST_CASE("per-round rows reproduce the totals and verdicts") {
  const auto dir = temp_dir("rows");
  ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(2, 25, 2.0, 0.2, 51));
  config.csv_path = (dir / "rows.csv").string();
  config.summary_path = (dir / "rows.summary.json").string();
  const ExperimentResult result = run_experiment(config);

  double alg = 0.0, opt = 0.0, tracking = 0.0;
  for (const auto& row : result.rows) {
    alg += row.hitting + row.movement;
    opt += row.hitting_opt + row.movement_opt;
    tracking = std::max(tracking, row.tracking_error);
  }
  CHECK(std::abs(alg - result.metrics.alg_cost) <=
        1e-9 * std::max(1.0, std::abs(result.metrics.alg_cost)));
  CHECK(std::abs(opt - result.metrics.opt_cost) <=
        1e-9 * std::max(1.0, std::abs(result.metrics.opt_cost)));
  CHECK(tracking == doctest::Approx(result.metrics.max_tracking_error));
  CHECK(alg / opt <= result.metrics.bounds.cr_bound + 1e-3);
  CHECK(tracking <= result.metrics.bounds.tracking_bound + 1e-6);

  // the summary echoes the verdicts as JSON
  const nlohmann::json summary = nlohmann::json::parse(result.summary_text);
  CHECK(summary["verdicts"]["all_passed"].get<bool>());
  CHECK(summary["metrics"]["alg_cost"].get<double>() ==
        doctest::Approx(result.metrics.alg_cost));
}

TEST_CASE("identical config and seed produce byte-identical CSV") {
  const auto dir = temp_dir("determinism");
  ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(4, 20, 1.0, 0.25, 61));
  config.csv_path = (dir / "a.csv").string();
  config.summary_path = (dir / "a.summary.json").string();
  const ExperimentResult first = run_experiment(config);
  config.csv_path = (dir / "b.csv").string();
  config.summary_path = (dir / "b.summary.json").string();
  const ExperimentResult second = run_experiment(config);
  CHECK(first.csv_text == second.csv_text);
}

TEST_CASE("adversarial mode marks the smooth-theorem verdicts n/a") {
  const auto dir = temp_dir("adversarial");
  ScenarioConfig config = parse_scenario_config(quadratic_walk_config(
      2, 12, 1.0, 0.1, 71, ",\"walk\":\"adversarial\""));
  config.csv_path = (dir / "adv.csv").string();
  config.summary_path = (dir / "adv.summary.json").string();
  const ExperimentResult result = run_experiment(config);
  CHECK(result.verdicts.tracking == Verdict::kNotApplicable);
  CHECK(result.verdicts.smoothness == Verdict::kNotApplicable);
  CHECK(result.verdicts.regret == Verdict::kNotApplicable);
  // Theorem-1 style checks still apply
  CHECK(result.verdicts.ratio == Verdict::kPass);
  CHECK(result.verdicts.balance == Verdict::kPass);
  CHECK(result.metrics.epsilon > 1.0);
}

TEST_CASE("sweeping epsilon keeps regret under its bound and monotone") {
  const auto dir = temp_dir("sweep");
  ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(3, 30, 10.0, 0.1, 81));
  config.csv_path = (dir / "sweep.csv").string();
  config.summary_path = (dir / "sweep.summary.json").string();
  const auto results = run_sweep(config, "epsilon", {0.05, 0.1, 0.2});
  REQUIRE(results.size() == 3);
  double previous = -1.0;
  for (const auto& result : results) {
    CHECK(result.metrics.dynamic_regret <=
          result.metrics.bounds.regret_bound + 1e-6);
    CHECK(result.metrics.dynamic_regret >= previous - 1e-9);
    previous = result.metrics.dynamic_regret;
  }
  CHECK(std::filesystem::exists(dir / "sweep-epsilon=0.05.csv"));
  CHECK(std::filesystem::exists(dir / "sweep-epsilon=0.2.summary.json"));
}

TEST_CASE("default output directory comes from the environment") {
  const auto dir = temp_dir("envdir");
  setenv("SOCO_OUTPUT_DIR", dir.c_str(), 1);
  const ScenarioConfig config =
      parse_scenario_config(quadratic_walk_config(1, 5, 1.0, 0.1, 91));
  const ExperimentResult result = run_experiment(config);
  unsetenv("SOCO_OUTPUT_DIR");
  CHECK(result.csv_path == (dir / "quadratic-walk-seed91.csv").string());
  CHECK(std::filesystem::exists(result.csv_path));
}

TEST_CASE("verify suites run and pass") {
  const auto results = verify_suites({"oracle-1d", "reduction-roundtrip"});
  REQUIRE(results.size() == 2);
  for (const auto& suite : results) {
    INFO(suite.name, ": ", suite.detail);
    CHECK(suite.passed);
  }
  CHECK_THROWS_WITH_AS(verify_suites({"no-such-suite"}),
                       doctest::Contains("no-such-suite"),
                       std::invalid_argument);
}

TEST_CASE("empty suite selection runs everything") {
  const auto results = verify_suites({});
  CHECK(results.size() == verify_suite_names().size());
}

}  // TEST_SUITE
