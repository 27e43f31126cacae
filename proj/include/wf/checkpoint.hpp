#pragma once

#include <filesystem>

#include "wf/ppo.hpp"

namespace wf {

/// Everything needed to resume or transfer: actor bundle, critic and both
/// optimizer states. JSON container; doubles round-trip bit-exactly.
struct Checkpoint {
  TrainedPolicy policy;
  Mlp critic;
  std::vector<RmsProp> actor_opts;
  RmsProp critic_opt;
  int group_size = 0;
  int episodes_trained = 0;
  uint64_t seed = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wf
