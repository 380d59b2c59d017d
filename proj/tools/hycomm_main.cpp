// hycomm CLI: gen | sweep | replay. Thin shell over the C API; all file I/O
// happens here, everything else in the library.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hycomm/hycomm.h"

namespace {

struct ScopedString {
  char* value = nullptr;
  ~ScopedString() { hyc_string_free(value); }
};

struct ScopedExperiment {
  hyc_experiment* handle = nullptr;
  ~ScopedExperiment() { hyc_experiment_free(handle); }
};

int exit_code_for(hyc_status status) {
  switch (status) {
    case HYC_OK: return 0;
    case HYC_ERROR_CONFIG:
    case HYC_ERROR_INVALID_ARGUMENT: return 1;
    case HYC_ERROR_RUNTIME: return 2;
  }
  return 2;
}

int report_failure(hyc_status status) {
  std::cerr << "hycomm: " << hyc_last_error() << "\n";
  return exit_code_for(status);
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

int load_experiment(const std::string& config_path, ScopedExperiment& exp) {
  const auto text = read_file(config_path);
  if (!text) {
    std::cerr << "hycomm: cannot read config file '" << config_path << "'\n";
    return 1;
  }
  const hyc_status status = hyc_experiment_create(text->c_str(), &exp.handle);
  if (status != HYC_OK) return report_failure(status);

  if (const char* env_seed = std::getenv("HYCOMM_SEED")) {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0') {
      std::cerr << "hycomm: HYCOMM_SEED must be a decimal integer\n";
      return 1;
    }
    hyc_experiment_set_master_seed(exp.handle, seed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid box/point collaboration simulator"};
  app.require_subcommand(0, 1);

  bool print_default_config = false;
  app.add_flag("--print-default-config", print_default_config,
               "print the built-in config JSON and exit");

  std::string config_path, out_path, svg_path, scenario_path, strategy;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  int jobs = 1;

  CLI::App* gen = app.add_subcommand("gen", "generate a scenario fixture");
  gen->add_option("--config", config_path, "experiment config JSON")->required();
  gen->add_option("--out", out_path, "output scenario JSON path")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run the strategy x budget sweep");
  sweep->add_option("--config", config_path, "experiment config JSON")->required();
  sweep->add_option("--out", out_path, "output CSV path")->required();
  sweep->add_option("--svg", svg_path, "optional trade-off plot path");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  CLI::App* replay = app.add_subcommand("replay", "replay one strategy/budget cell");
  replay->add_option("--config", config_path, "experiment config JSON")->required();
  replay->add_option("--scenario", scenario_path, "scenario fixture JSON")->required();
  replay->add_option("--strategy", strategy, "strategy name")->required();
  replay->add_option("--budget", budget, "per-link budget in floats")->required();
  CLI::Option* seed_opt = replay->add_option("--seed", seed, "override the fixture seed");
  replay->add_option("--out", out_path, "output JSON path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  if (print_default_config) {
    ScopedString json;
    const hyc_status status = hyc_default_config_json(&json.value);
    if (status != HYC_OK) return report_failure(status);
    std::cout << json.value;
    return 0;
  }

  if (gen->parsed()) {
    ScopedExperiment exp;
    if (int rc = load_experiment(config_path, exp); rc != 0) return rc;
    ScopedString json;
    const hyc_status status = hyc_generate_scenario_json(exp.handle, &json.value);
    if (status != HYC_OK) return report_failure(status);
    if (!write_file(out_path, json.value)) {
      std::cerr << "hycomm: cannot write '" << out_path << "'\n";
      return 2;
    }
    return 0;
  }

  if (sweep->parsed()) {
    ScopedExperiment exp;
    if (int rc = load_experiment(config_path, exp); rc != 0) return rc;
    hyc_experiment_set_jobs(exp.handle, jobs);
    ScopedString csv, svg;
    const bool want_svg = !svg_path.empty();
    const hyc_status status =
        hyc_run_sweep(exp.handle, &csv.value, want_svg ? &svg.value : nullptr);
    if (status != HYC_OK) return report_failure(status);
    if (!write_file(out_path, csv.value)) {
      std::cerr << "hycomm: cannot write '" << out_path << "'\n";
      return 2;
    }
    if (want_svg && !write_file(svg_path, svg.value)) {
      std::cerr << "hycomm: cannot write '" << svg_path << "'\n";
      return 2;
    }
    return 0;
  }

  if (replay->parsed()) {
    ScopedExperiment exp;
    if (int rc = load_experiment(config_path, exp); rc != 0) return rc;
    const auto scenario_text = read_file(scenario_path);
    if (!scenario_text) {
      std::cerr << "hycomm: cannot read scenario file '" << scenario_path << "'\n";
      return 1;
    }
    ScopedString json;
    const int use_scenario_seed = seed_opt->count() == 0 ? 1 : 0;
    const hyc_status status =
        hyc_run_replay(exp.handle, scenario_text->c_str(), strategy.c_str(), budget, seed,
                       use_scenario_seed, &json.value);
    if (status != HYC_OK) return report_failure(status);
    if (out_path.empty()) {
      std::cout << json.value;
    } else if (!write_file(out_path, json.value)) {
      std::cerr << "hycomm: cannot write '" << out_path << "'\n";
      return 2;
    }
    return 0;
  }

  std::cout << app.help();
  return 0;
}
