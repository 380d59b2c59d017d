#include "hycomm/experiment.hpp"

#include <doctest.h>
#include <json.hpp>
#include <sstream>

using namespace hycomm;

TEST_CASE("experiment config") {
  SUBCASE("defaults round-trip through JSON") {
    const ExperimentConfig def = default_experiment_config();
    const std::string text = experiment_config_to_json(def);
    const ExperimentConfig back = parse_experiment_config(text);
    CHECK(back.matrix.world.n_agents == def.matrix.world.n_agents);
    CHECK(back.matrix.budgets_floats == def.matrix.budgets_floats);
    CHECK(back.matrix.strategies == def.matrix.strategies);
    CHECK(back.matrix.master_seed == def.matrix.master_seed);
    CHECK(back.matrix.strategy.packer == def.matrix.strategy.packer);
    CHECK(back.matrix.strategy.fusion == def.matrix.strategy.fusion);
    CHECK(back.matrix.profiles == def.matrix.profiles);
  }

  SUBCASE("empty object falls back to every default") {
    const ExperimentConfig cfg = parse_experiment_config("{}");
    CHECK(cfg.matrix.n_trials == default_experiment_config().matrix.n_trials);
  }

  SUBCASE("syntax errors fail") {
    CHECK_THROWS_AS(parse_experiment_config("{oops"), ConfigError);
  }

  SUBCASE("unknown keys are named in the error") {
    try {
      parse_experiment_config(R"({"world": {"n_objcts": 5}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("n_objcts") != std::string::npos);
    }
  }

  SUBCASE("type and semantic violations are named") {
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"n_trials": 0})"),
                         "config error at n_trials: must be >= 1", ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"budgets_floats": [100, 100]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"budgets_floats": [800, 100]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"strategies": ["warp_drive"]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"pose_sigma": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"packer": {"delta": 0}})"), ConfigError);
  }
}

TEST_CASE("scenario JSON round-trip") {
  WorldConfig wc;
  wc.n_objects_min = wc.n_objects_max = 10;
  wc.seed = 2024;
  const Scenario s = generate_world(wc, SensorConfig{});
  const Scenario back = scenario_from_json(scenario_to_json(s));

  CHECK(back.seed == s.seed);
  CHECK(back.bounds == s.bounds);
  REQUIRE(back.objects.size() == s.objects.size());
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    CHECK(back.objects[i].id == s.objects[i].id);
    CHECK(back.objects[i].box == s.objects[i].box);
  }
  REQUIRE(back.agents.size() == s.agents.size());
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    CHECK(back.agents[i].pose == s.agents[i].pose);
    CHECK(back.agents[i].sensor == s.agents[i].sensor);
    CHECK(back.agents[i].neighbors == s.agents[i].neighbors);
  }

  SUBCASE("dangling neighbor ids are rejected") {
    CHECK_THROWS(scenario_from_json(R"({
      "seed": 1, "bounds": {"x": [-10, 10], "y": [-10, 10]}, "objects": [],
      "agents": [{"id": 0, "pose": {"x": 0, "y": 0, "yaw": 0}, "neighbors": [5]}]
    })"));
  }
}

TEST_CASE("sweep CSV") {
  MatrixConfig mc;
  mc.world.n_objects_min = mc.world.n_objects_max = 8;
  mc.strategies = {StrategyId::kNoCollab, StrategyId::kLateAll};
  mc.budgets_floats = {50, 400};
  mc.n_trials = 3;
  mc.master_seed = 777;
  const SweepResult result = run_trial_matrix(mc, 2);
  const std::string csv = sweep_to_csv(result);

  SUBCASE("schema-stable header and row count") {
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line ==
          "strategy,budget_floats,volume_log2_bytes,ap30,ap50,ap70,ap30_sd,ap50_sd,"
          "ap70_sd,n_trials,seed");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 10);
    }
    CHECK(rows == 4);
  }

  SUBCASE("byte-identical on rerun") {
    const SweepResult again = run_trial_matrix(mc, 1);
    CHECK(sweep_to_csv(again) == csv);
  }

  SUBCASE("SVG contains one polyline per strategy") {
    const std::string svg = sweep_to_svg(result);
    CHECK(svg.find("<svg") == 0);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1)) {
      ++polylines;
    }
    CHECK(polylines == 2);
    CHECK(svg.find("no_collab") != std::string::npos);
    CHECK(svg.find("late_all") != std::string::npos);
    CHECK(svg.find("communication volume (log2 bytes)") != std::string::npos);
  }
}

TEST_CASE("replay dump") {
  ExperimentConfig cfg = default_experiment_config();
  cfg.matrix.world.n_objects_min = cfg.matrix.world.n_objects_max = 10;

  WorldConfig wc = cfg.matrix.world;
  wc.seed = 99;
  const Scenario s = generate_world(wc, cfg.matrix.sensor);

  SUBCASE("no_collab replay has an empty message list") {
    const auto dump = nlohmann::json::parse(
        replay_to_json(cfg, s, StrategyId::kNoCollab, 800, s.seed));
    CHECK(dump["messages"].empty());
    CHECK(dump["volume"]["payload_bytes"] == 0);
  }

  SUBCASE("hycomm at zero budget matches the no_collab dump") {
    const auto zero = nlohmann::json::parse(
        replay_to_json(cfg, s, StrategyId::kHycomm, 0, s.seed));
    const auto base = nlohmann::json::parse(
        replay_to_json(cfg, s, StrategyId::kNoCollab, 0, s.seed));
    CHECK(zero["post_fusion"] == base["post_fusion"]);
  }

  SUBCASE("a huge budget sends every box per sender") {
    const auto dump = nlohmann::json::parse(
        replay_to_json(cfg, s, StrategyId::kHycomm, 10000000, s.seed));
    const auto late = nlohmann::json::parse(
        replay_to_json(cfg, s, StrategyId::kLateAll, 10000000, s.seed));
    REQUIRE(dump["messages"].size() == late["messages"].size());
    for (std::size_t i = 0; i < dump["messages"].size(); ++i) {
      CHECK(dump["messages"][i]["n_boxes"] == late["messages"][i]["n_boxes"]);
    }
  }
}
