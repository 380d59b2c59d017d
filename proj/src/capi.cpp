#include "hycomm/hycomm.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "hycomm/experiment.hpp"

using namespace hycomm;

struct hyc_experiment {
  ExperimentConfig cfg;
  int jobs = 1;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hyc_status set_error(hyc_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
hyc_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return set_error(HYC_ERROR_CONFIG, e.what());
  } catch (const PlacementError& e) {
    return set_error(HYC_ERROR_RUNTIME, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(HYC_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return set_error(HYC_ERROR_RUNTIME, e.what());
  } catch (...) {
    return set_error(HYC_ERROR_RUNTIME, "unknown failure");
  }
}

}  // namespace

extern "C" {

const char* hyc_version(void) { return "1.0.0"; }

const char* hyc_last_error(void) { return g_last_error.c_str(); }

void hyc_string_free(char* s) { std::free(s); }

hyc_status hyc_default_config_json(char** out_json) {
  if (out_json == nullptr) return set_error(HYC_ERROR_INVALID_ARGUMENT, "out_json is NULL");
  return guarded([&] {
    *out_json = dup_string(experiment_config_to_json(default_experiment_config()));
    return HYC_OK;
  });
}

hyc_status hyc_experiment_create(const char* config_json, hyc_experiment** out) {
  if (config_json == nullptr || out == nullptr) {
    return set_error(HYC_ERROR_INVALID_ARGUMENT, "config_json and out must be non-NULL");
  }
  return guarded([&] {
    auto exp = std::make_unique<hyc_experiment>();
    exp->cfg = parse_experiment_config(config_json);
    *out = exp.release();
    return HYC_OK;
  });
}

void hyc_experiment_free(hyc_experiment* exp) { delete exp; }

hyc_status hyc_experiment_set_master_seed(hyc_experiment* exp, uint64_t seed) {
  if (exp == nullptr) return set_error(HYC_ERROR_INVALID_ARGUMENT, "exp is NULL");
  exp->cfg.matrix.master_seed = seed;
  return HYC_OK;
}

hyc_status hyc_experiment_set_jobs(hyc_experiment* exp, int jobs) {
  if (exp == nullptr) return set_error(HYC_ERROR_INVALID_ARGUMENT, "exp is NULL");
  if (jobs < 1) return set_error(HYC_ERROR_INVALID_ARGUMENT, "jobs must be >= 1");
  exp->jobs = jobs;
  return HYC_OK;
}

hyc_status hyc_generate_scenario_json(const hyc_experiment* exp, char** out_json) {
  if (exp == nullptr || out_json == nullptr) {
    return set_error(HYC_ERROR_INVALID_ARGUMENT, "exp and out_json must be non-NULL");
  }
  return guarded([&] {
    WorldConfig wc = exp->cfg.matrix.world;
    wc.seed = exp->cfg.matrix.master_seed;
    const Scenario s = generate_world(wc, exp->cfg.matrix.sensor);
    *out_json = dup_string(scenario_to_json(s));
    return HYC_OK;
  });
}

hyc_status hyc_run_sweep(const hyc_experiment* exp, char** out_csv, char** out_svg) {
  if (exp == nullptr || out_csv == nullptr) {
    return set_error(HYC_ERROR_INVALID_ARGUMENT, "exp and out_csv must be non-NULL");
  }
  return guarded([&] {
    const SweepResult result = run_trial_matrix(exp->cfg.matrix, exp->jobs);
    char* csv = dup_string(sweep_to_csv(result));
    if (out_svg != nullptr) {
      try {
        *out_svg = dup_string(sweep_to_svg(result));
      } catch (...) {
        std::free(csv);
        throw;
      }
    }
    *out_csv = csv;
    return HYC_OK;
  });
}

hyc_status hyc_run_replay(const hyc_experiment* exp, const char* scenario_json,
                          const char* strategy, uint64_t budget_floats, uint64_t seed,
                          int use_scenario_seed, char** out_json) {
  if (exp == nullptr || scenario_json == nullptr || strategy == nullptr ||
      out_json == nullptr) {
    return set_error(HYC_ERROR_INVALID_ARGUMENT,
                     "exp, scenario_json, strategy, and out_json must be non-NULL");
  }
  return guarded([&] {
    const Scenario scenario = scenario_from_json(scenario_json);
    const auto id = strategy_from_string(strategy);
    if (!id) {
      throw ConfigError("config error at strategy: unknown strategy '" +
                        std::string(strategy) + "'");
    }
    const uint64_t run_seed = use_scenario_seed != 0 ? scenario.seed : seed;
    *out_json = dup_string(
        replay_to_json(exp->cfg, scenario, *id, budget_floats, run_seed));
    return HYC_OK;
  });
}

}  // extern "C"
