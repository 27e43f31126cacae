#include "wf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "wf/checkpoint.hpp"
#include "wf/config.hpp"
#include "wf/del.hpp"
#include "wf/io.hpp"

namespace wf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

PowerModel build_power_model(const RunConfig& config, const FarmFile& farm) {
  PowerModel model = PowerModel::from_name(config.model);
  model.air_density = farm.air_density;
  return model;
}

WindFarmEnv build_env(const FarmFile& farm, const RunConfig& config) {
  const WtaPartition partition = build_partition(farm.layout.count(), config.group_size);
  EnvConfig env_config;
  env_config.episode_length = config.episode_length;
  env_config.jitter = config.jitter;
  return WindFarmEnv(farm.layout, partition, build_power_model(config, farm), env_config);
}

json turbine_table(const FarmState& state, const FarmPower& power) {
  json rows = json::array();
  for (int i = 0; i < state.layout.count(); ++i) {
    const auto [del_y, del_x] = del_components(rad2deg(state.setpoints[i].gamma));
    rows.push_back({{"id", i + 1},
                    {"x_m", state.layout.turbines[i].x},
                    {"y_m", state.layout.turbines[i].y},
                    {"alpha", state.setpoints[i].alpha},
                    {"gamma_deg", rad2deg(state.setpoints[i].gamma)},
                    {"beta_deg", rad2deg(state.setpoints[i].beta)},
                    {"u_eff_ms", power.velocities[i]},
                    {"power_w", power.per_turbine[i]},
                    {"del_y", del_y},
                    {"del_x", del_x}});
  }
  return rows;
}

json state_report(const std::string& farm_name, const std::string& controller,
                  const FarmState& state, const PowerModel& model) {
  const FarmPower power = farm_power_direct(state, model);
  const DelReport del = build_del_report(state, model);
  json j;
  j["schema_version"] = 1;
  j["farm"] = farm_name;
  j["controller"] = controller;
  j["farm_power_w"] = power.total;
  j["total_del"] = del.total_magnitude;
  j["avg_del_per_power"] =
      del.avg_del_per_power ? json(*del.avg_del_per_power) : json(nullptr);
  j["turbines"] = turbine_table(state, power);
  return j;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file " + path.string());
  out << j.dump(1) << '\n';
}

/// Shared flag bundle; values explicitly passed on the command line win
/// over the run-config file, which wins over defaults.
struct CommonArgs {
  std::string config_path;
  std::string farm_path;
  std::string model;
  std::string out_dir;
  uint64_t seed = 0;

  CLI::Option* farm_opt = nullptr;
  CLI::Option* model_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "run-config JSON file with defaults");
    farm_opt = cmd.add_option("--farm", farm_path, "farm layout JSON file");
    model_opt = cmd.add_option("--model", model, "coefficient model: cosine|fitted");
    out_opt = cmd.add_option("--out", out_dir, "output directory");
    seed_opt = cmd.add_option("--seed", seed, "random seed");
  }

  RunConfig resolve() const {
    RunConfig config;
    if (!config_path.empty()) config = load_run_config(config_path);
    if (farm_opt->count()) config.farm_path = farm_path;
    if (model_opt->count()) config.model = model;
    if (out_opt->count()) config.out_dir = out_dir;
    if (seed_opt->count()) config.seed = seed;
    if (config.farm_path.empty()) throw ConfigError("no farm file given (--farm)");
    config.validate();
    return config;
  }
};

FarmState baseline_state(const std::string& name, const FarmFile& farm,
                         const RunConfig& config, const PowerModel& model) {
  if (name == "greedy") return greedy_baseline(farm.layout);
  if (name == "pid")
    return pid_baseline(farm.layout, config.pid_gains, deg2rad(config.pid_initial_yaw_deg),
                        config.pid_steps, config.pid_dt);
  if (name == "grid")
    return coordinated_grid_search(greedy_baseline(farm.layout), config.grid, model).state;
  throw ConfigError("unknown baseline '" + name + "' (greedy|pid|grid)");
}

TrainedPolicy load_policy_for(const std::string& checkpoint_path, const WindFarmEnv& env) {
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
  if (checkpoint.group_size != env.group_size())
    throw std::invalid_argument("checkpoint group size does not match the farm partition");
  return checkpoint.policy;
}

int cmd_simulate(const CommonArgs& common, const std::string& baseline,
                 const std::string& checkpoint_path, int nx, int ny) {
  const RunConfig config = common.resolve();
  const FarmFile farm = load_farm(config.farm_path);
  const PowerModel model = build_power_model(config, farm);

  FarmState state;
  if (!checkpoint_path.empty()) {
    WindFarmEnv env = build_env(farm, config);
    state = evaluate_policy(load_policy_for(checkpoint_path, env), env, config.seed).final_state;
  } else {
    state = baseline_state(baseline, farm, config, model);
  }

  const double d = farm.layout.turbines.front().spec.rotor_diameter;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& t : farm.layout.turbines) {
    min_x = std::min(min_x, t.x);
    max_x = std::max(max_x, t.x);
    min_y = std::min(min_y, t.y);
    max_y = std::max(max_y, t.y);
  }
  const double x0 = min_x - 2.0 * d, x1 = max_x + 8.0 * d;
  const double y0 = min_y - 3.0 * d, y1 = max_y + 3.0 * d;
  const Eigen::MatrixXd grid = rasterize_flow(state, x0, x1, y0, y1, nx, ny);

  const fs::path out(config.out_dir);
  write_flow_csv(out / "flow.csv", grid, x0, x1, y0, y1);
  write_flow_ppm(out / "flow.ppm", grid, state.layout.ambient.u_inf);
  write_power_csv(out / "power.csv", state, farm_power_direct(state, model));
  std::cout << "wrote " << (out / "flow.csv").string() << ", flow.ppm, power.csv\n";
  return 0;
}

int cmd_train(const CommonArgs& common,
              const std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>>&
                  applied_overrides) {
  RunConfig config = common.resolve();
  for (const auto& [opt, apply] : applied_overrides)
    if (opt->count()) apply(config);
  config.validate();

  const FarmFile farm = load_farm(config.farm_path);
  const WindFarmEnv env = build_env(farm, config);

  TrainConfig train_config;
  train_config.episodes = config.episodes;
  train_config.episodes_per_batch = config.episodes_per_batch;
  train_config.episode_length = config.episode_length;
  train_config.seed = config.seed;
  train_config.workers = config.workers;

  const fs::path out(config.out_dir);
  fs::create_directories(out);
  auto to_checkpoint = [&](const TrainResult& progress, int episodes_done) {
    return Checkpoint{progress.policy,     progress.critic,  progress.actor_opts,
                      progress.critic_opt, env.group_size(), episodes_done,
                      config.seed};
  };
  BatchCallback on_batch = nullptr;
  if (config.checkpoint_every > 0) {
    int batch_index = 0;
    on_batch = [&, batch_index](int episodes_done, const TrainResult& progress) mutable {
      ++batch_index;
      if (batch_index % config.checkpoint_every != 0) return;
      save_checkpoint(out / ("checkpoint_ep" + std::to_string(episodes_done) + ".json"),
                      to_checkpoint(progress, episodes_done));
    };
  }

  const TrainResult result = train(train_config, env, on_batch);
  write_training_curve_csv(out / "training_curve.csv", result.curve);
  save_checkpoint(out / "checkpoint.json", to_checkpoint(result, config.episodes));

  double final_mean_power = 0.0;
  const int tail = std::min<int>(100, result.curve.size());
  for (int i = 0; i < tail; ++i)
    final_mean_power += result.curve[result.curve.size() - 1 - i].mean_power_w / std::max(tail, 1);
  std::cout << "trained " << config.episodes << " episodes; final-" << tail
            << "-episode mean power " << final_mean_power << " W\n"
            << "wrote " << (out / "training_curve.csv").string() << " and checkpoint.json\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& common, const std::string& baseline,
                 const std::string& checkpoint_path, bool dump_trajectory) {
  const RunConfig config = common.resolve();
  const FarmFile farm = load_farm(config.farm_path);
  const PowerModel model = build_power_model(config, farm);
  const fs::path out(config.out_dir);

  json report;
  if (!checkpoint_path.empty()) {
    WindFarmEnv env = build_env(farm, config);
    const EvalReport eval =
        evaluate_policy(load_policy_for(checkpoint_path, env), env, config.seed);
    report = state_report(farm.name, "policy", eval.final_state, model);
    report["mean_reward"] = eval.mean_reward;
    if (dump_trajectory) write_trajectory_csv(out / "trajectory.csv", eval.trajectory);
  } else {
    const FarmState state = baseline_state(baseline, farm, config, model);
    report = state_report(farm.name, baseline, state, model);
  }
  write_json(out / "evaluate.json", report);
  std::cout << report.dump(1) << '\n';
  return 0;
}

int cmd_optimize(const CommonArgs& common, CLI::Option* passes_opt, int passes) {
  RunConfig config = common.resolve();
  if (passes_opt->count()) config.grid.passes = passes;
  config.validate();
  const FarmFile farm = load_farm(config.farm_path);
  const PowerModel model = build_power_model(config, farm);

  const FarmState greedy = greedy_baseline(farm.layout);
  const double greedy_power = farm_power_direct(greedy, model).total;
  const GridSearchResult result = coordinated_grid_search(greedy, config.grid, model);

  json report = state_report(farm.name, "grid", result.state, model);
  report["greedy_power_w"] = greedy_power;
  report["pass_powers_w"] = result.pass_powers;
  write_json(fs::path(config.out_dir) / "optimize.json", report);
  std::cout << report.dump(1) << '\n';
  return 0;
}

int cmd_del_report(const CommonArgs& common, const std::string& baseline,
                   const std::string& checkpoint_path) {
  const RunConfig config = common.resolve();
  const FarmFile farm = load_farm(config.farm_path);
  const PowerModel model = build_power_model(config, farm);

  FarmState state;
  std::string controller = baseline;
  if (!checkpoint_path.empty()) {
    WindFarmEnv env = build_env(farm, config);
    state = evaluate_policy(load_policy_for(checkpoint_path, env), env, config.seed).final_state;
    controller = "policy";
  } else {
    state = baseline_state(baseline, farm, config, model);
  }

  const DelReport del = build_del_report(state, model);
  json j;
  j["schema_version"] = 1;
  j["farm"] = farm.name;
  j["controller"] = controller;
  j["farm_power_w"] = del.farm_power;
  j["total_del"] = del.total_magnitude;
  j["avg_del_per_power"] = del.avg_del_per_power ? json(*del.avg_del_per_power) : json(nullptr);
  j["turbines"] = json::array();
  for (int i = 0; i < state.layout.count(); ++i)
    j["turbines"].push_back({{"id", i + 1},
                             {"gamma_deg", rad2deg(state.setpoints[i].gamma)},
                             {"del_y", del.del_y[i]},
                             {"del_x", del.del_x[i]},
                             {"magnitude", del.magnitude[i]}});
  write_json(fs::path(config.out_dir) / "del_report.json", j);
  std::cout << j.dump(1) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"wind-farm wake simulator and HCMAPPO trainer"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "rasterize the flow field and per-turbine power");
  CommonArgs sim_common;
  sim_common.attach(*sim);
  std::string sim_baseline = "greedy";
  std::string sim_checkpoint;
  int sim_nx = 301, sim_ny = 121;
  sim->add_option("--baseline", sim_baseline, "setpoints: greedy|pid|grid");
  sim->add_option("--checkpoint", sim_checkpoint, "simulate a trained policy's setpoints");
  sim->add_option("--grid-nx", sim_nx, "raster width in cells");
  sim->add_option("--grid-ny", sim_ny, "raster height in cells");

  // train
  auto* tr = app.add_subcommand("train", "train the HCMAPPO policy on a farm");
  CommonArgs tr_common;
  tr_common.attach(*tr);
  RunConfig tr_flags;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> tr_overrides;
  auto add_train_override = [&](CLI::Option* opt, std::function<void(RunConfig&)> apply) {
    tr_overrides.emplace_back(opt, std::move(apply));
  };
  add_train_override(tr->add_option("--episodes", tr_flags.episodes, "training episodes"),
                     [&](RunConfig& c) { c.episodes = tr_flags.episodes; });
  add_train_override(
      tr->add_option("--batch-episodes", tr_flags.episodes_per_batch, "episodes per update"),
      [&](RunConfig& c) { c.episodes_per_batch = tr_flags.episodes_per_batch; });
  add_train_override(
      tr->add_option("--episode-length", tr_flags.episode_length, "steps per episode"),
      [&](RunConfig& c) { c.episode_length = tr_flags.episode_length; });
  add_train_override(tr->add_option("--group-size", tr_flags.group_size, "turbines per WTA"),
                     [&](RunConfig& c) { c.group_size = tr_flags.group_size; });
  add_train_override(
      tr->add_option("--workers", tr_flags.workers,
                     "rollout worker threads (results are order-deterministic)"),
      [&](RunConfig& c) { c.workers = tr_flags.workers; });
  add_train_override(tr->add_flag("--jitter", tr_flags.jitter, "randomize u_inf +-10% per episode"),
                     [&](RunConfig& c) { c.jitter = tr_flags.jitter; });
  add_train_override(
      tr->add_option("--checkpoint-every", tr_flags.checkpoint_every,
                     "also checkpoint every N update batches"),
      [&](RunConfig& c) { c.checkpoint_every = tr_flags.checkpoint_every; });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "report power and DEL for a policy or baseline");
  CommonArgs ev_common;
  ev_common.attach(*ev);
  std::string ev_baseline = "greedy";
  std::string ev_checkpoint;
  bool ev_trajectory = false;
  ev->add_option("--baseline", ev_baseline, "greedy|pid|grid");
  ev->add_option("--checkpoint", ev_checkpoint, "trained policy checkpoint");
  ev->add_flag("--trajectory", ev_trajectory, "also write trajectory.csv (policy only)");

  // optimize
  auto* opt = app.add_subcommand("optimize", "coordinated grid-search baseline");
  CommonArgs opt_common;
  opt_common.attach(*opt);
  int opt_passes = 3;
  CLI::Option* opt_passes_opt = opt->add_option("--passes", opt_passes, "coordinate-descent sweeps");

  // del-report
  auto* del = app.add_subcommand("del-report", "damage-equivalent-load report");
  CommonArgs del_common;
  del_common.attach(*del);
  std::string del_baseline = "greedy";
  std::string del_checkpoint;
  del->add_option("--baseline", del_baseline, "greedy|pid|grid");
  del->add_option("--checkpoint", del_checkpoint, "trained policy checkpoint");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("windfarm");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_common, sim_baseline, sim_checkpoint, sim_nx, sim_ny);
    if (tr->parsed()) return cmd_train(tr_common, tr_overrides);
    if (ev->parsed()) return cmd_evaluate(ev_common, ev_baseline, ev_checkpoint, ev_trajectory);
    if (opt->parsed()) return cmd_optimize(opt_common, opt_passes_opt, opt_passes);
    if (del->parsed()) return cmd_del_report(del_common, del_baseline, del_checkpoint);
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace wf
