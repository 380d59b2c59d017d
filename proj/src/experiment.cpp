#include "hycomm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hycomm {

namespace {

using nlohmann::json;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void reject_unknown_keys(const json& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key)) fail(where, "unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& where, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(where + "." + key, "expected a number");
  return j[key].get<double>();
}

std::int64_t get_integer(const json& j, const std::string& where, const char* key,
                         std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(where + "." + key, "expected an integer");
  return j[key].get<std::int64_t>();
}

std::uint64_t get_u64(const json& j, const std::string& where, const char* key,
                      std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned() && !j[key].is_number_integer()) {
    fail(where + "." + key, "expected a non-negative integer");
  }
  if (j[key].is_number_integer() && j[key].get<std::int64_t>() < 0) {
    fail(where + "." + key, "expected a non-negative integer");
  }
  return j[key].get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& where, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(where + "." + key, "expected a boolean");
  return j[key].get<bool>();
}

Interval get_interval(const json& j, const std::string& where, const char* key,
                      Interval fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(where + "." + key, "expected [lo, hi]");
  }
  Interval out{v[0].get<double>(), v[1].get<double>()};
  if (out.hi < out.lo) fail(where + "." + key, "hi must be >= lo");
  return out;
}

json interval_to_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

json profile_to_json(const DetectorProfile& p) {
  return json{{"name", p.name},
              {"sigma0", p.sigma0},
              {"n_half", p.n_half},
              {"p_scale", p.p_scale},
              {"dim_sigma", p.dim_sigma},
              {"yaw_sigma", p.yaw_sigma},
              {"fp_rate", p.fp_rate},
              {"calib_gamma", p.calib_gamma},
              {"nms_thresh", p.nms_thresh}};
}

DetectorProfile profile_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_keys(j, where,
                      {"name", "sigma0", "n_half", "p_scale", "dim_sigma", "yaw_sigma",
                       "fp_rate", "calib_gamma", "nms_thresh"});
  DetectorProfile p;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(where + ".name", "expected a string");
    p.name = j["name"].get<std::string>();
  }
  p.sigma0 = get_number(j, where, "sigma0", p.sigma0);
  p.n_half = get_number(j, where, "n_half", p.n_half);
  p.p_scale = get_number(j, where, "p_scale", p.p_scale);
  p.dim_sigma = get_number(j, where, "dim_sigma", p.dim_sigma);
  p.yaw_sigma = get_number(j, where, "yaw_sigma", p.yaw_sigma);
  p.fp_rate = get_number(j, where, "fp_rate", p.fp_rate);
  p.calib_gamma = get_number(j, where, "calib_gamma", p.calib_gamma);
  p.nms_thresh = get_number(j, where, "nms_thresh", p.nms_thresh);
  if (p.sigma0 < 0 || p.n_half < 0 || p.p_scale < 0 || p.dim_sigma < 0 || p.yaw_sigma < 0 ||
      p.fp_rate < 0) {
    fail(where, "profile scales must be >= 0");
  }
  if (p.calib_gamma <= 0) fail(where + ".calib_gamma", "must be > 0");
  if (!(p.nms_thresh > 0 && p.nms_thresh < 1)) fail(where + ".nms_thresh", "must lie in (0, 1)");
  return p;
}

json box_to_json(const OrientedBox3& b) {
  return json{{"cx", b.cx}, {"cy", b.cy}, {"cz", b.cz}, {"l", b.l},
              {"w", b.w},   {"h", b.h},   {"yaw", b.yaw}};
}

OrientedBox3 box_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_keys(j, where, {"cx", "cy", "cz", "l", "w", "h", "yaw"});
  for (const char* key : {"cx", "cy", "cz", "l", "w", "h", "yaw"}) {
    if (!j.contains(key) || !j[key].is_number()) fail(where + "." + key, "expected a number");
  }
  try {
    return OrientedBox3(j["cx"].get<double>(), j["cy"].get<double>(), j["cz"].get<double>(),
                        j["l"].get<double>(), j["w"].get<double>(), j["h"].get<double>(),
                        j["yaw"].get<double>());
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

json detection_to_json(const Detection& d) {
  return json{{"box", box_to_json(d.box)}, {"c", d.c}, {"ux", d.ux}, {"uy", d.uy}};
}

json pose_to_json(const PlanarPose& p) {
  return json{{"x", p.x}, {"y", p.y}, {"yaw", p.yaw}};
}

PlanarPose pose_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_keys(j, where, {"x", "y", "yaw"});
  for (const char* key : {"x", "y", "yaw"}) {
    if (!j.contains(key) || !j[key].is_number()) fail(where + "." + key, "expected a number");
  }
  return PlanarPose(j["x"].get<double>(), j["y"].get<double>(), j["yaw"].get<double>());
}

json sensor_to_json(const SensorConfig& sc) {
  return json{{"n_rays", sc.n_rays},
              {"max_range", sc.max_range},
              {"range_noise_sigma", sc.range_noise_sigma},
              {"background_rate", sc.background_rate},
              {"z_mount", sc.z_mount}};
}

SensorConfig sensor_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_keys(
      j, where, {"n_rays", "max_range", "range_noise_sigma", "background_rate", "z_mount"});
  SensorConfig sc;
  sc.n_rays = static_cast<int>(get_integer(j, where, "n_rays", sc.n_rays));
  sc.max_range = get_number(j, where, "max_range", sc.max_range);
  sc.range_noise_sigma = get_number(j, where, "range_noise_sigma", sc.range_noise_sigma);
  sc.background_rate = get_number(j, where, "background_rate", sc.background_rate);
  sc.z_mount = get_number(j, where, "z_mount", sc.z_mount);
  if (sc.n_rays < 1) fail(where + ".n_rays", "must be >= 1");
  if (sc.max_range <= 0) fail(where + ".max_range", "must be > 0");
  if (sc.range_noise_sigma < 0) fail(where + ".range_noise_sigma", "must be >= 0");
  if (sc.background_rate < 0) fail(where + ".background_rate", "must be >= 0");
  return sc;
}

constexpr const char* kSvgPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                       "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                       "#bcbd22"};

}  // namespace

ExperimentConfig default_experiment_config() { return ExperimentConfig{}; }

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  require_object(j, "$");
  reject_unknown_keys(j, "$",
                      {"world", "sensor", "detector", "packer", "fusion", "strategies",
                       "switch_threshold_floats", "budgets_floats", "n_trials", "pose_sigma",
                       "master_seed"});

  ExperimentConfig cfg = default_experiment_config();
  MatrixConfig& m = cfg.matrix;

  if (j.contains("world")) {
    const json& w = j["world"];
    const std::string where = "world";
    require_object(w, where);
    reject_unknown_keys(w, where,
                        {"x_range", "y_range", "n_objects", "n_agents", "object_length_range",
                         "object_width_range", "object_height_range", "min_gap"});
    m.world.x_range = get_interval(w, where, "x_range", m.world.x_range);
    m.world.y_range = get_interval(w, where, "y_range", m.world.y_range);
    if (w.contains("n_objects")) {
      const json& v = w["n_objects"];
      if (v.is_number_integer()) {
        m.world.n_objects_min = m.world.n_objects_max = v.get<int>();
      } else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() &&
                 v[1].is_number_integer()) {
        m.world.n_objects_min = v[0].get<int>();
        m.world.n_objects_max = v[1].get<int>();
      } else {
        fail("world.n_objects", "expected an integer or [min, max]");
      }
    }
    m.world.n_agents = static_cast<int>(get_integer(w, where, "n_agents", m.world.n_agents));
    m.world.length_range = get_interval(w, where, "object_length_range", m.world.length_range);
    m.world.width_range = get_interval(w, where, "object_width_range", m.world.width_range);
    m.world.height_range = get_interval(w, where, "object_height_range", m.world.height_range);
    m.world.min_gap = get_number(w, where, "min_gap", m.world.min_gap);
    if (m.world.n_agents < 1) fail("world.n_agents", "must be >= 1");
    if (m.world.n_objects_min < 0 || m.world.n_objects_max < m.world.n_objects_min) {
      fail("world.n_objects", "must satisfy 0 <= min <= max");
    }
    if (m.world.min_gap < 0) fail("world.min_gap", "must be >= 0");
    if (m.world.x_range.length() <= 0 || m.world.y_range.length() <= 0) {
      fail("world.x_range", "world ranges must be non-empty");
    }
  }

  if (j.contains("sensor")) m.sensor = sensor_from_json(j["sensor"], "sensor");

  if (j.contains("detector")) {
    const json& d = j["detector"];
    require_object(d, "detector");
    reject_unknown_keys(d, "detector", {"hetero", "profiles"});
    m.hetero = get_bool(d, "detector", "hetero", m.hetero);
    if (d.contains("profiles")) {
      if (!d["profiles"].is_array() || d["profiles"].empty()) {
        fail("detector.profiles", "expected a non-empty array");
      }
      m.profiles.clear();
      for (std::size_t i = 0; i < d["profiles"].size(); ++i) {
        m.profiles.push_back(profile_from_json(
            d["profiles"][i], "detector.profiles[" + std::to_string(i) + "]"));
      }
    }
  }

  if (j.contains("packer")) {
    const json& p = j["packer"];
    require_object(p, "packer");
    reject_unknown_keys(p, "packer", {"delta", "expand_cap"});
    m.strategy.packer.delta = get_number(p, "packer", "delta", m.strategy.packer.delta);
    m.strategy.packer.expand_cap =
        get_number(p, "packer", "expand_cap", m.strategy.packer.expand_cap);
    if (m.strategy.packer.delta <= 0) fail("packer.delta", "must be > 0");
    if (m.strategy.packer.expand_cap < 0) fail("packer.expand_cap", "must be >= 0");
  }

  if (j.contains("fusion")) {
    const json& f = j["fusion"];
    require_object(f, "fusion");
    reject_unknown_keys(f, "fusion", {"nms_thresh", "recv_box_score"});
    m.strategy.fusion.nms_thresh =
        get_number(f, "fusion", "nms_thresh", m.strategy.fusion.nms_thresh);
    m.strategy.fusion.recv_box_score =
        get_number(f, "fusion", "recv_box_score", m.strategy.fusion.recv_box_score);
    if (!(m.strategy.fusion.nms_thresh > 0 && m.strategy.fusion.nms_thresh < 1)) {
      fail("fusion.nms_thresh", "must lie in (0, 1)");
    }
    if (!(m.strategy.fusion.recv_box_score > 0 && m.strategy.fusion.recv_box_score < 1)) {
      fail("fusion.recv_box_score", "must lie in (0, 1)");
    }
  }

  if (j.contains("strategies")) {
    if (!j["strategies"].is_array() || j["strategies"].empty()) {
      fail("strategies", "expected a non-empty array of strategy names");
    }
    m.strategies.clear();
    for (const json& name : j["strategies"]) {
      if (!name.is_string()) fail("strategies", "expected strategy names as strings");
      const auto id = strategy_from_string(name.get<std::string>());
      if (!id) fail("strategies", "unknown strategy '" + name.get<std::string>() + "'");
      m.strategies.push_back(*id);
    }
  }

  m.strategy.switch_threshold_floats =
      get_u64(j, "$", "switch_threshold_floats", m.strategy.switch_threshold_floats);

  if (j.contains("budgets_floats")) {
    if (!j["budgets_floats"].is_array() || j["budgets_floats"].empty()) {
      fail("budgets_floats", "expected a non-empty array");
    }
    m.budgets_floats.clear();
    for (const json& b : j["budgets_floats"]) {
      if (!b.is_number_integer() || b.get<std::int64_t>() < 0) {
        fail("budgets_floats", "expected non-negative integers");
      }
      m.budgets_floats.push_back(b.get<std::uint64_t>());
    }
    for (std::size_t i = 1; i < m.budgets_floats.size(); ++i) {
      if (m.budgets_floats[i] <= m.budgets_floats[i - 1]) {
        fail("budgets_floats", "budgets must be strictly increasing");
      }
    }
  }

  m.n_trials = static_cast<int>(get_integer(j, "$", "n_trials", m.n_trials));
  if (m.n_trials < 1) fail("n_trials", "must be >= 1");

  const double pose_sigma = get_number(j, "$", "pose_sigma", m.strategy.pose_sigma_xy);
  if (pose_sigma < 0) fail("pose_sigma", "must be >= 0");
  m.strategy.pose_sigma_xy = pose_sigma;
  m.strategy.pose_sigma_yaw = pose_sigma;

  m.master_seed = get_u64(j, "$", "master_seed", m.master_seed);
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  const MatrixConfig& m = cfg.matrix;
  json profiles = json::array();
  for (const DetectorProfile& p : m.profiles) profiles.push_back(profile_to_json(p));
  json strategies = json::array();
  for (StrategyId id : m.strategies) strategies.push_back(std::string(to_string(id)));
  json budgets = json::array();
  for (std::uint64_t b : m.budgets_floats) budgets.push_back(b);

  const json j{
      {"world",
       {{"x_range", interval_to_json(m.world.x_range)},
        {"y_range", interval_to_json(m.world.y_range)},
        {"n_objects", json::array({m.world.n_objects_min, m.world.n_objects_max})},
        {"n_agents", m.world.n_agents},
        {"object_length_range", interval_to_json(m.world.length_range)},
        {"object_width_range", interval_to_json(m.world.width_range)},
        {"object_height_range", interval_to_json(m.world.height_range)},
        {"min_gap", m.world.min_gap}}},
      {"sensor", sensor_to_json(m.sensor)},
      {"detector", {{"hetero", m.hetero}, {"profiles", profiles}}},
      {"packer",
       {{"delta", m.strategy.packer.delta}, {"expand_cap", m.strategy.packer.expand_cap}}},
      {"fusion",
       {{"nms_thresh", m.strategy.fusion.nms_thresh},
        {"recv_box_score", m.strategy.fusion.recv_box_score}}},
      {"strategies", strategies},
      {"switch_threshold_floats", m.strategy.switch_threshold_floats},
      {"budgets_floats", budgets},
      {"n_trials", m.n_trials},
      {"pose_sigma", m.strategy.pose_sigma_xy},
      {"master_seed", m.master_seed},
  };
  return j.dump(2) + "\n";
}

std::string scenario_to_json(const Scenario& s) {
  json objects = json::array();
  for (const WorldObject& o : s.objects) {
    objects.push_back(json{{"id", o.id}, {"box", box_to_json(o.box)}});
  }
  json agents = json::array();
  for (const Agent& a : s.agents) {
    agents.push_back(json{{"id", a.id},
                          {"pose", pose_to_json(a.pose)},
                          {"sensor", sensor_to_json(a.sensor)},
                          {"neighbors", a.neighbors}});
  }
  const json j{{"seed", s.seed},
               {"bounds",
                {{"x", interval_to_json(s.bounds.x)}, {"y", interval_to_json(s.bounds.y)}}},
               {"objects", objects},
               {"agents", agents}};
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario error: invalid JSON: ") + e.what());
  }
  require_object(j, "$");
  reject_unknown_keys(j, "$", {"seed", "bounds", "objects", "agents"});
  Scenario s;
  s.seed = get_u64(j, "$", "seed", 0);
  if (!j.contains("bounds")) fail("bounds", "missing");
  require_object(j["bounds"], "bounds");
  reject_unknown_keys(j["bounds"], "bounds", {"x", "y"});
  s.bounds.x = get_interval(j["bounds"], "bounds", "x", Interval{});
  s.bounds.y = get_interval(j["bounds"], "bounds", "y", Interval{});

  if (!j.contains("objects") || !j["objects"].is_array()) fail("objects", "expected an array");
  for (std::size_t i = 0; i < j["objects"].size(); ++i) {
    const json& o = j["objects"][i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    require_object(o, where);
    reject_unknown_keys(o, where, {"id", "box"});
    WorldObject obj;
    obj.id = static_cast<int>(get_integer(o, where, "id", static_cast<std::int64_t>(i)));
    if (!o.contains("box")) fail(where + ".box", "missing");
    obj.box = box_from_json(o["box"], where + ".box");
    s.objects.push_back(obj);
  }

  if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty()) {
    fail("agents", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < j["agents"].size(); ++i) {
    const json& a = j["agents"][i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    require_object(a, where);
    reject_unknown_keys(a, where, {"id", "pose", "sensor", "neighbors"});
    Agent ag;
    ag.id = static_cast<int>(get_integer(a, where, "id", static_cast<std::int64_t>(i)));
    if (!a.contains("pose")) fail(where + ".pose", "missing");
    ag.pose = pose_from_json(a["pose"], where + ".pose");
    if (a.contains("sensor")) ag.sensor = sensor_from_json(a["sensor"], where + ".sensor");
    if (a.contains("neighbors")) {
      if (!a["neighbors"].is_array()) fail(where + ".neighbors", "expected an array");
      for (const json& n : a["neighbors"]) {
        if (!n.is_number_integer()) fail(where + ".neighbors", "expected integers");
        ag.neighbors.push_back(n.get<int>());
      }
    }
    s.agents.push_back(std::move(ag));
  }
  for (const Agent& ag : s.agents) {
    for (int n : ag.neighbors) s.agent_index(n);  // throws on dangling ids
  }
  return s;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "strategy,budget_floats,volume_log2_bytes,ap30,ap50,ap70,ap30_sd,ap50_sd,ap70_sd,"
         "n_trials,seed\n";
  for (const SweepRow& row : result.rows) {
    out << to_string(row.strategy) << ',' << row.budget_floats << ','
        << fmt6(row.volume_log2_mean) << ',' << fmt6(row.ap30_mean) << ','
        << fmt6(row.ap50_mean) << ',' << fmt6(row.ap70_mean) << ',' << fmt6(row.ap30_sd)
        << ',' << fmt6(row.ap50_sd) << ',' << fmt6(row.ap70_sd) << ',' << row.n_trials << ','
        << row.master_seed << '\n';
  }
  return out.str();
}

std::string sweep_to_svg(const SweepResult& result) {
  constexpr double kWidth = 880, kHeight = 520;
  constexpr double kLeft = 70, kRight = 240, kTop = 30, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_max = 1.0;
  for (const SweepRow& row : result.rows) x_max = std::max(x_max, row.volume_log2_mean);
  x_max = std::ceil(x_max) + 1.0;

  const auto sx = [&](double v) { return kLeft + plot_w * (v / x_max); };
  const auto sy = [&](double v) { return kTop + plot_h * (1.0 - v); };

  std::vector<StrategyId> order;
  for (const SweepRow& row : result.rows) {
    if (std::find(order.begin(), order.end(), row.strategy) == order.end()) {
      order.push_back(row.strategy);
    }
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g font-family=\"monospace\" font-size=\"12\">\n";

  // axes
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int gx = 0; gx <= static_cast<int>(x_max); gx += 2) {
    svg << "<line x1=\"" << sx(gx) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << sx(gx)
        << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx(gx) << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\">" << gx << "</text>\n";
  }
  for (int gy = 0; gy <= 10; gy += 2) {
    const double v = gy / 10.0;
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(v) << "\" x2=\"" << kLeft
        << "\" y2=\"" << sy(v) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 10 << "\" y=\"" << sy(v) + 4
        << "\" text-anchor=\"end\">" << fmt6(v).substr(0, 3) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">communication volume (log2 bytes)</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kTop + plot_h / 2
      << ")\">AP@0.50</text>\n";

  for (std::size_t si = 0; si < order.size(); ++si) {
    const char* color = kSvgPalette[si % (sizeof(kSvgPalette) / sizeof(kSvgPalette[0]))];
    std::vector<std::pair<double, double>> pts;
    for (const SweepRow& row : result.rows) {
      if (row.strategy == order[si]) pts.emplace_back(row.volume_log2_mean, row.ap50_mean);
    }
    std::sort(pts.begin(), pts.end());
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [vx, vy] : pts) svg << sx(vx) << ',' << sy(vy) << ' ';
    svg << "\"/>\n";
    for (const auto& [vx, vy] : pts) {
      svg << "<circle cx=\"" << sx(vx) << "\" cy=\"" << sy(vy) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = kTop + 16 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << kLeft + plot_w + 14 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kLeft + plot_w + 38 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w + 44 << "\" y=\"" << ly << "\">"
        << to_string(order[si]) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string replay_to_json(const ExperimentConfig& cfg, const Scenario& scenario,
                           StrategyId strategy, std::uint64_t budget_floats,
                           std::uint64_t run_seed) {
  const MatrixConfig& m = cfg.matrix;
  const std::vector<DetectorProfile> profiles =
      m.hetero ? heterogeneous_profiles(3) : m.profiles;
  const StrategyOutcome outcome = run_strategy(strategy, scenario, m.ego_id,
                                               Budget{budget_floats}, m.strategy, profiles,
                                               run_seed);

  const int ego_index = scenario.agent_index(m.ego_id);
  const PlanarPose ego_pose = scenario.agents[static_cast<std::size_t>(ego_index)].pose;
  std::vector<OrientedBox3> gt_ego;
  gt_ego.reserve(scenario.objects.size());
  for (const WorldObject& o : scenario.objects) {
    gt_ego.push_back(transform_box_to_frame(o.box, PlanarPose{}, ego_pose));
  }
  const ApResult ap = evaluate(outcome.detections, gt_ego);

  json pre = json::array();
  for (const Detection& d : outcome.ego_single.items) pre.push_back(detection_to_json(d));
  json post = json::array();
  for (const Detection& d : outcome.detections.items) post.push_back(detection_to_json(d));
  json messages = json::array();
  for (const SenderTrace& t : outcome.messages) {
    messages.push_back(json{{"sender", t.sender_id},
                            {"n_boxes", t.message.boxes.size()},
                            {"n_points", t.message.points.size()},
                            {"payload_bytes", t.message.payload_bytes()},
                            {"wire_bytes", serialize(t.message).size()}});
  }
  const json j{{"strategy", std::string(to_string(strategy))},
               {"budget_floats", budget_floats},
               {"seed", run_seed},
               {"ego_id", m.ego_id},
               {"pre_fusion", pre},
               {"post_fusion", post},
               {"messages", messages},
               {"volume",
                {{"payload_bytes", outcome.volume.payload_bytes},
                 {"log2_bytes", outcome.volume.log2_bytes}}},
               {"ap", {{"ap30", ap.ap30}, {"ap50", ap.ap50}, {"ap70", ap.ap70}}}};
  return j.dump(2) + "\n";
}

}  // namespace hycomm
