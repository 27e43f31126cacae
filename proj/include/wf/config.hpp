#pragma once

#include <filesystem>
#include <string>

#include "wf/baselines.hpp"
#include "wf/farm.hpp"

namespace wf {

/// Configuration problems (missing files, schema violations) map to CLI
/// exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FarmFile {
  std::string name;
  FarmLayout layout;
  double air_density = 1.225;
};

/// Loads and validates a versioned farm layout file. Wind direction is
/// meteorological degrees in the file and converted to the internal flow
/// heading.
FarmFile load_farm(const std::filesystem::path& path);
void save_farm(const std::filesystem::path& path, const FarmFile& farm);

/// Shared run parameters; CLI flags override file values.
struct RunConfig {
  std::string farm_path;
  std::string model = "cosine";
  std::string out_dir = "out";
  uint64_t seed = 1;

  // train
  int episodes = 2000;
  int episodes_per_batch = 10;
  int episode_length = 25;
  int group_size = 4;
  int workers = 1;
  bool jitter = false;
  int checkpoint_every = 0;  // batches; 0 = final checkpoint only

  // optimize
  GridSearchConfig grid;

  // pid baseline
  PidGains pid_gains;
  double pid_initial_yaw_deg = 20.0;
  int pid_steps = 50;
  double pid_dt = 1.0;

  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace wf
