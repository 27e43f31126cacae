#include "wf/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "wf/io.hpp"

namespace wf {

namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string(what) + " file not found: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void expect_keys(const json& j, const std::set<std::string>& allowed,
                 const std::set<std::string>& required, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  for (const auto& key : required)
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number())
    throw ConfigError("'" + key + "' in " + where + " must be a number");
  return j.at(key).get<double>();
}

}  // namespace

FarmFile load_farm(const std::filesystem::path& path) {
  const json j = read_json(path, "farm");
  expect_keys(j, {"schema_version", "name", "turbine", "ambient", "positions_m"},
              {"schema_version", "turbine", "ambient", "positions_m"}, "farm config");
  if (j.at("schema_version").get<int>() != 1)
    throw ConfigError("unsupported farm schema_version in " + path.string());

  FarmFile farm;
  farm.name = j.value("name", path.stem().string());

  const json& turbine = j.at("turbine");
  expect_keys(turbine, {"rotor_diameter_m", "hub_height_m", "rated_power_w"},
              {"rotor_diameter_m", "hub_height_m", "rated_power_w"}, "farm.turbine");
  TurbineSpec spec;
  spec.rotor_diameter = number(turbine, "rotor_diameter_m", "farm.turbine");
  spec.hub_height = number(turbine, "hub_height_m", "farm.turbine");
  spec.rated_power = number(turbine, "rated_power_w", "farm.turbine");

  const json& ambient_json = j.at("ambient");
  expect_keys(ambient_json,
              {"u_inf_ms", "wind_direction_deg", "turbulence_intensity", "air_density_kgm3"},
              {"u_inf_ms", "wind_direction_deg", "turbulence_intensity"}, "farm.ambient");
  Ambient ambient;
  ambient.u_inf = number(ambient_json, "u_inf_ms", "farm.ambient");
  // meteorological (direction the wind comes FROM, clockwise from north)
  // -> internal flow heading, counter-clockwise from +x
  const double met_deg = number(ambient_json, "wind_direction_deg", "farm.ambient");
  ambient.wind_direction = deg2rad(270.0 - met_deg);
  ambient.turbulence_intensity = number(ambient_json, "turbulence_intensity", "farm.ambient");
  if (ambient_json.contains("air_density_kgm3"))
    farm.air_density = number(ambient_json, "air_density_kgm3", "farm.ambient");
  if (!(farm.air_density > 0.0)) throw ConfigError("air density must be positive");

  const json& positions = j.at("positions_m");
  if (!positions.is_array() || positions.empty())
    throw ConfigError("farm positions_m must be a non-empty array");
  farm.layout.ambient = ambient;
  for (const auto& p : positions) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ConfigError("each entry of positions_m must be [x, y]");
    farm.layout.turbines.push_back({spec, p[0].get<double>(), p[1].get<double>()});
  }
  try {
    farm.layout.validate();
  } catch (const std::exception& e) {
    throw ConfigError("invalid farm layout in " + path.string() + ": " + e.what());
  }
  return farm;
}

void save_farm(const std::filesystem::path& path, const FarmFile& farm) {
  json j;
  j["schema_version"] = 1;
  j["name"] = farm.name;
  const TurbineSpec& spec = farm.layout.turbines.front().spec;
  j["turbine"] = {{"rotor_diameter_m", spec.rotor_diameter},
                  {"hub_height_m", spec.hub_height},
                  {"rated_power_w", spec.rated_power}};
  j["ambient"] = {{"u_inf_ms", farm.layout.ambient.u_inf},
                  {"wind_direction_deg", 270.0 - rad2deg(farm.layout.ambient.wind_direction)},
                  {"turbulence_intensity", farm.layout.ambient.turbulence_intensity},
                  {"air_density_kgm3", farm.air_density}};
  j["positions_m"] = json::array();
  for (const auto& t : farm.layout.turbines) j["positions_m"].push_back({t.x, t.y});
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write farm file " + path.string());
  out << j.dump(1) << '\n';
}

void RunConfig::validate() const {
  if (model != "cosine" && model != "fitted")
    throw ConfigError("model must be 'cosine' or 'fitted'");
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (episodes_per_batch < 1) throw ConfigError("episodes_per_batch must be >= 1");
  if (episode_length < 1) throw ConfigError("episode_length must be >= 1");
  if (group_size < 2) throw ConfigError("group_size must be >= 2");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (pid_steps < 0) throw ConfigError("pid steps must be >= 0");
  if (!(pid_dt > 0.0)) throw ConfigError("pid dt must be positive");
  if (std::abs(pid_initial_yaw_deg) > 45.0) throw ConfigError("pid initial yaw out of range");
  try {
    grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid grid config: ") + e.what());
  }
  if (!farm_path.empty() && !std::filesystem::exists(farm_path))
    throw ConfigError("farm file not found: " + farm_path);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = read_json(path, "run config");
  expect_keys(j,
              {"schema_version", "farm", "model", "out_dir", "seed", "train", "grid", "pid"},
              {"schema_version"}, "run config");
  if (j.at("schema_version").get<int>() != 1)
    throw ConfigError("unsupported run config schema_version in " + path.string());

  RunConfig config;
  if (j.contains("farm")) config.farm_path = j.at("farm").get<std::string>();
  if (j.contains("model")) config.model = j.at("model").get<std::string>();
  if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("seed")) config.seed = j.at("seed").get<uint64_t>();

  if (j.contains("train")) {
    const json& t = j.at("train");
    expect_keys(t,
                {"episodes", "episodes_per_batch", "episode_length", "group_size", "workers",
                 "jitter", "checkpoint_every"},
                {}, "run config train");
    config.episodes = t.value("episodes", config.episodes);
    config.episodes_per_batch = t.value("episodes_per_batch", config.episodes_per_batch);
    config.episode_length = t.value("episode_length", config.episode_length);
    config.group_size = t.value("group_size", config.group_size);
    config.workers = t.value("workers", config.workers);
    config.jitter = t.value("jitter", config.jitter);
    config.checkpoint_every = t.value("checkpoint_every", config.checkpoint_every);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    expect_keys(g, {"gamma_levels_deg", "beta_levels_deg", "alpha_levels", "passes"}, {},
                "run config grid");
    if (g.contains("gamma_levels_deg"))
      config.grid.gamma_levels_deg = g.at("gamma_levels_deg").get<std::vector<double>>();
    if (g.contains("beta_levels_deg"))
      config.grid.beta_levels_deg = g.at("beta_levels_deg").get<std::vector<double>>();
    if (g.contains("alpha_levels"))
      config.grid.alpha_levels = g.at("alpha_levels").get<std::vector<double>>();
    config.grid.passes = g.value("passes", config.grid.passes);
  }
  if (j.contains("pid")) {
    const json& p = j.at("pid");
    expect_keys(p, {"kp", "ki", "kd", "initial_yaw_deg", "steps", "dt"}, {}, "run config pid");
    config.pid_gains.kp = p.value("kp", config.pid_gains.kp);
    config.pid_gains.ki = p.value("ki", config.pid_gains.ki);
    config.pid_gains.kd = p.value("kd", config.pid_gains.kd);
    config.pid_initial_yaw_deg = p.value("initial_yaw_deg", config.pid_initial_yaw_deg);
    config.pid_steps = p.value("steps", config.pid_steps);
    config.pid_dt = p.value("dt", config.pid_dt);
  }
  config.validate();
  return config;
}

}  // namespace wf
