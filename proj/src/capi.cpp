#include "soco/soco.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "soco/analysis.hpp"
#include "soco/harness.hpp"
#include "soco/obd.hpp"
#include "soco/offline.hpp"
#include "soco/types.hpp"

namespace {

thread_local std::string g_last_error;

soco_status fail(soco_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
soco_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const soco::ConvergenceError& err) {
    return fail(SOCO_NO_CONVERGENCE, err.what());
  } catch (const std::domain_error& err) {
    return fail(SOCO_OUT_OF_REGIME, err.what());
  } catch (const std::invalid_argument& err) {
    return fail(SOCO_INVALID_ARGUMENT, err.what());
  } catch (const std::bad_alloc&) {
    return fail(SOCO_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& err) {
    std::string what = err.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("failed writing") != std::string::npos) {
      return fail(SOCO_IO_ERROR, what);
    }
    return fail(SOCO_INTERNAL_ERROR, what);
  }
}

std::string render_experiment_text(const soco::ExperimentResult& result) {
  std::ostringstream out;
  const auto& m = result.metrics;
  out << "alg_cost " << m.alg_cost << "  opt_cost " << m.opt_cost
      << "  ratio " << m.competitive_ratio
      << (m.ratio_flagged ? " (flagged)" : "") << "  regret "
      << m.dynamic_regret << "\n";
  out << "epsilon " << m.epsilon << "  tracking " << m.max_tracking_error
      << "  smoothness " << m.trajectory_smoothness << "  G " << m.measured_G
      << "\n";
  if (m.bounds.in_regime) {
    out << "bounds: ratio <= " << m.bounds.cr_bound << "  tracking <= "
        << m.bounds.tracking_bound << "  smoothness <= "
        << m.bounds.smoothness_bound << "  regret <= "
        << m.bounds.regret_bound << "\n";
  } else {
    out << "bounds: outside the guarantee regime (beta <= 4/m)\n";
  }
  out << "verdicts: balance " << soco::verdict_name(result.verdicts.balance)
      << ", ratio " << soco::verdict_name(result.verdicts.ratio)
      << ", tracking " << soco::verdict_name(result.verdicts.tracking)
      << ", smoothness " << soco::verdict_name(result.verdicts.smoothness)
      << ", regret " << soco::verdict_name(result.verdicts.regret)
      << ", drift " << soco::verdict_name(result.verdicts.drift)
      << ", opt_residual "
      << soco::verdict_name(result.verdicts.opt_residual) << "\n";
  out << "wrote " << result.csv_path << " and " << result.summary_path << "\n";
  return out.str();
}

}  // namespace

struct soco_instance {
  soco::SocoInstance instance;
};

struct soco_trajectory {
  soco::Trajectory trajectory;
  int dimension = 0;
};

struct soco_report {
  bool passed = false;
  std::string text;
  std::string summary_json;
  std::string csv;
};

extern "C" {

const char* soco_status_name(soco_status status) {
  switch (status) {
    case SOCO_OK: return "ok";
    case SOCO_INVALID_ARGUMENT: return "invalid argument";
    case SOCO_OUT_OF_REGIME: return "out of regime";
    case SOCO_NO_CONVERGENCE: return "no convergence";
    case SOCO_IO_ERROR: return "io error";
    case SOCO_INTERNAL_ERROR: return "internal error";
  }
  return "unknown";
}

const char* soco_last_error(void) { return g_last_error.c_str(); }

void soco_version(int* major, int* minor, int* patch) {
  if (major != nullptr) *major = 1;
  if (minor != nullptr) *minor = 0;
  if (patch != nullptr) *patch = 0;
}

soco_status soco_instance_create_quadratic(int dim, int horizon,
                                           const double* x0, const double* P,
                                           const double* centers,
                                           const double* offsets,
                                           soco_instance** out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (dim < 1 || horizon < 1) {
    return fail(SOCO_INVALID_ARGUMENT, "dim and horizon must be at least 1");
  }
  if (x0 == nullptr || P == nullptr || centers == nullptr) {
    return fail(SOCO_INVALID_ARGUMENT, "x0, P, and centers must be non-NULL");
  }
  return guarded([&] {
    soco::SocoInstance instance;
    instance.x0 = Eigen::Map<const soco::Vector>(x0, dim);
    for (int t = 0; t < horizon; ++t) {
      // row-major input blocks
      soco::Matrix block =
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                         Eigen::Dynamic, Eigen::RowMajor>>(
              P + static_cast<std::size_t>(t) * dim * dim, dim, dim);
      soco::Vector center = Eigen::Map<const soco::Vector>(
          centers + static_cast<std::size_t>(t) * dim, dim);
      const double c0 = offsets != nullptr ? offsets[t] : 0.0;
      instance.costs.push_back(soco::make_quadratic(block, center, c0));
    }
    instance.validate();
    *out = new soco_instance{std::move(instance)};
    return SOCO_OK;
  });
}

void soco_instance_free(soco_instance* instance) { delete instance; }

void soco_obd_options_init(soco_obd_options* options) {
  if (options == nullptr) return;
  options->beta = 0.0;
  options->level_tol = 1e-9;
  options->projection_tol = 1e-12;
  options->max_bisection_iters = 200;
  options->balance_mode = 0;
}

soco_status soco_obd_run(const soco_instance* instance,
                         const soco_obd_options* options,
                         soco_trajectory** out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (instance == nullptr) {
    return fail(SOCO_INVALID_ARGUMENT, "instance is NULL");
  }
  return guarded([&] {
    soco::ObdConfig config;
    if (options != nullptr) {
      config.beta = options->beta;
      config.level_tol = options->level_tol;
      config.projection_tol = options->projection_tol;
      config.max_bisection_iters = options->max_bisection_iters;
      config.balance_mode = options->balance_mode == 1
                                ? soco::BalanceMode::kAbsoluteLevel
                                : soco::BalanceMode::kZeroShifted;
    } else {
      config.beta = 0.0;
    }
    if (config.beta <= 0.0) {
      config.beta = soco::default_beta(instance->instance.min_modulus());
    }
    auto trajectory = soco::obd_run(instance->instance, config);
    *out = new soco_trajectory{std::move(trajectory),
                               instance->instance.dimension()};
    return SOCO_OK;
  });
}

soco_status soco_offline_solve(const soco_instance* instance, double tol,
                               soco_trajectory** out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (instance == nullptr) {
    return fail(SOCO_INVALID_ARGUMENT, "instance is NULL");
  }
  return guarded([&] {
    auto solution = soco::solve_offline(instance->instance, tol);
    *out = new soco_trajectory{std::move(solution.trajectory),
                               instance->instance.dimension()};
    return SOCO_OK;
  });
}

int soco_trajectory_length(const soco_trajectory* trajectory) {
  return trajectory == nullptr
             ? 0
             : static_cast<int>(trajectory->trajectory.steps.size());
}

double soco_trajectory_total_cost(const soco_trajectory* trajectory) {
  return trajectory == nullptr ? 0.0 : trajectory->trajectory.total_cost;
}

double soco_trajectory_total_hitting(const soco_trajectory* trajectory) {
  return trajectory == nullptr ? 0.0 : trajectory->trajectory.total_hitting;
}

double soco_trajectory_total_movement(const soco_trajectory* trajectory) {
  return trajectory == nullptr ? 0.0 : trajectory->trajectory.total_movement;
}

soco_status soco_trajectory_point(const soco_trajectory* trajectory, int t,
                                  double* out) {
  if (trajectory == nullptr || out == nullptr) {
    return fail(SOCO_INVALID_ARGUMENT, "trajectory and out must be non-NULL");
  }
  const auto& steps = trajectory->trajectory.steps;
  if (t < 1 || t > static_cast<int>(steps.size())) {
    return fail(SOCO_INVALID_ARGUMENT, "round index out of range");
  }
  const soco::Vector& x = steps[static_cast<std::size_t>(t) - 1].x;
  std::memcpy(out, x.data(), sizeof(double) * x.size());
  return SOCO_OK;
}

soco_status soco_trajectory_step(const soco_trajectory* trajectory, int t,
                                 double* hitting, double* movement,
                                 double* level, double* balance_residual) {
  if (trajectory == nullptr) {
    return fail(SOCO_INVALID_ARGUMENT, "trajectory is NULL");
  }
  const auto& steps = trajectory->trajectory.steps;
  if (t < 1 || t > static_cast<int>(steps.size())) {
    return fail(SOCO_INVALID_ARGUMENT, "round index out of range");
  }
  const auto& step = steps[static_cast<std::size_t>(t) - 1];
  if (hitting != nullptr) *hitting = step.hitting;
  if (movement != nullptr) *movement = step.movement;
  if (level != nullptr) *level = step.level;
  if (balance_residual != nullptr) *balance_residual = step.balance_residual;
  return SOCO_OK;
}

void soco_trajectory_free(soco_trajectory* trajectory) { delete trajectory; }

soco_status soco_cr_bound(double m, double beta, double* out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = soco::theoretical_cr_bound(m, beta);
    return SOCO_OK;
  });
}

soco_status soco_accuracy_bound(double m, double beta, double epsilon,
                                double* alpha, double* tracking,
                                double* smoothness) {
  return guarded([&] {
    const soco::AccuracyBound bound = soco::accuracy_bound(m, beta, epsilon);
    if (alpha != nullptr) *alpha = bound.alpha;
    if (tracking != nullptr) *tracking = bound.tracking;
    if (smoothness != nullptr) *smoothness = bound.smoothness;
    return SOCO_OK;
  });
}

soco_status soco_regret_bound(double G, double m, double beta, double epsilon,
                              int64_t horizon, double* out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = soco::regret_bound(G, m, beta, epsilon,
                              static_cast<long>(horizon));
    return SOCO_OK;
  });
}

soco_status soco_experiment_run(const char* config_json,
                                const uint64_t* seed_override,
                                soco_report** out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (config_json == nullptr) {
    return fail(SOCO_INVALID_ARGUMENT, "config_json is NULL");
  }
  return guarded([&] {
    soco::ScenarioConfig config = soco::parse_scenario_config(config_json);
    if (seed_override != nullptr) config.seed = *seed_override;
    const soco::ExperimentResult result = soco::run_experiment(config);
    auto* report = new soco_report;
    report->passed = result.verdicts.all_passed();
    report->text = render_experiment_text(result);
    report->summary_json = result.summary_text;
    report->csv = result.csv_text;
    *out = report;
    return SOCO_OK;
  });
}

soco_status soco_experiment_sweep(const char* config_json, const char* param,
                                  const double* values, size_t count,
                                  const uint64_t* seed_override,
                                  soco_report** out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (config_json == nullptr || param == nullptr || values == nullptr ||
      count == 0) {
    return fail(SOCO_INVALID_ARGUMENT,
                "config_json, param, and a nonempty value list are required");
  }
  return guarded([&] {
    soco::ScenarioConfig config = soco::parse_scenario_config(config_json);
    if (seed_override != nullptr) config.seed = *seed_override;
    const auto results = soco::run_sweep(
        config, param, std::vector<double>(values, values + count));
    auto* report = new soco_report;
    report->passed = true;
    std::ostringstream text;
    std::ostringstream csv;
    csv << param << ",alg_cost,opt_cost,ratio,regret,regret_bound,all_passed\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      report->passed = report->passed && r.verdicts.all_passed();
      text << param << " = " << values[i] << ":\n"
           << render_experiment_text(r);
      csv << values[i] << ',' << r.metrics.alg_cost << ','
          << r.metrics.opt_cost << ',' << r.metrics.competitive_ratio << ','
          << r.metrics.dynamic_regret << ',' << r.metrics.bounds.regret_bound
          << ',' << (r.verdicts.all_passed() ? 1 : 0) << '\n';
    }
    report->text = text.str();
    report->csv = csv.str();
    report->summary_json = "{}";
    *out = report;
    return SOCO_OK;
  });
}

soco_status soco_lqr_simulate(const char* config_json,
                              const uint64_t* seed_override,
                              soco_report** out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (config_json == nullptr) {
    return fail(SOCO_INVALID_ARGUMENT, "config_json is NULL");
  }
  return guarded([&] {
    soco::ScenarioConfig config = soco::parse_scenario_config(config_json);
    if (config.family != soco::Family::kLqr) {
      throw std::invalid_argument("lqr-sim requires a config with family=lqr");
    }
    if (seed_override != nullptr) config.seed = *seed_override;
    const soco::ExperimentResult result = soco::run_experiment(config);
    auto* report = new soco_report;
    report->passed = result.verdicts.all_passed();
    std::ostringstream text;
    text << "lqr pathwise cost " << result.lqr_alg_cost
         << "  offline-optimal cost " << result.lqr_opt_cost << "\n"
         << render_experiment_text(result);
    report->text = text.str();
    report->summary_json = result.summary_text;
    report->csv = result.csv_text;
    *out = report;
    return SOCO_OK;
  });
}

soco_status soco_verify_suites(const char* const* suites, size_t count,
                               soco_report** out) {
  if (out == nullptr) return fail(SOCO_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    std::vector<std::string> names;
    for (size_t i = 0; i < count; ++i) {
      if (suites == nullptr || suites[i] == nullptr) {
        throw std::invalid_argument("suite name is NULL");
      }
      names.emplace_back(suites[i]);
    }
    const auto results = soco::verify_suites(names);
    auto* report = new soco_report;
    report->passed = true;
    std::ostringstream text;
    for (const auto& suite : results) {
      report->passed = report->passed && suite.passed;
      text << "suite " << suite.name << ": "
           << (suite.passed ? "PASS" : "FAIL") << " (" << suite.detail
           << ")\n";
    }
    report->text = text.str();
    report->summary_json = "{}";
    *out = report;
    return SOCO_OK;
  });
}

int soco_report_passed(const soco_report* report) {
  return report != nullptr && report->passed ? 1 : 0;
}

const char* soco_report_text(const soco_report* report) {
  return report == nullptr ? "" : report->text.c_str();
}

const char* soco_report_summary_json(const soco_report* report) {
  return report == nullptr ? "" : report->summary_json.c_str();
}

const char* soco_report_csv(const soco_report* report) {
  return report == nullptr ? "" : report->csv.c_str();
}

void soco_report_free(soco_report* report) { delete report; }

}  // extern "C"
