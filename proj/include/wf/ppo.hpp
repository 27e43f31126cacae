#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wf/env.hpp"
#include "wf/mlp.hpp"

namespace wf {

struct TrainConfig {
  int episodes = 2000;
  int episodes_per_batch = 10;
  int episode_length = 25;
  double discount = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double actor_lr = 5e-4;
  double critic_lr = 5e-4;
  double entropy_coef = 0.01;
  int actor_epochs = 15;
  int critic_epochs = 15;
  uint64_t seed = 1;
  int workers = 1;
  std::vector<int> hidden = {64, 64};
  double actor_output_gain = 0.01;
  bool shared_actor = true;  // one set of weights for every WTA agent
  double divergence_threshold = 10.0;  // abort when mean |ratio-1| exceeds this

  void validate() const;
};

/// Exponentially-weighted TD-residual advantages and the matching returns.
/// `bootstrap` is the value of the state after the last reward.
std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_gae(const Eigen::VectorXd& rewards,
                                                        const Eigen::VectorXd& values,
                                                        double bootstrap, double discount,
                                                        double lambda);

/// Clipped-surrogate policy loss with entropy bonus. Samples with a
/// non-finite ratio are excluded from the mean and counted in
/// `excluded_samples` when provided.
double ppo_actor_loss(const Eigen::VectorXd& log_probs_new, const Eigen::VectorXd& log_probs_old,
                      const Eigen::VectorXd& advantages, double clip_epsilon, double entropy,
                      double entropy_coef, int* excluded_samples = nullptr);

double critic_loss(const Eigen::VectorXd& values_pred, const Eigen::VectorXd& returns);

struct ActorEpochStats {
  double loss = 0.0;
  double mean_abs_ratio_gap = 0.0;  // mean |ratio - 1| over included samples
  int excluded = 0;
};

/// One clipped-surrogate epoch over column-major samples, applying the
/// RMSprop step in place. With ratios pinned at 1 (old = new) and zero
/// advantages the network gradient vanishes and only the entropy term
/// moves log_std.
ActorEpochStats update_actor_epoch(GaussianPolicy& actor, RmsProp& optimizer,
                                   const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions,
                                   const Eigen::VectorXd& old_log_probs,
                                   const Eigen::VectorXd& advantages, const TrainConfig& config);

/// Actor bundle; a shared bundle holds one network used by every agent.
struct TrainedPolicy {
  bool shared = true;
  std::vector<GaussianPolicy> actors;

  const GaussianPolicy& actor_for(int agent) const {
    return shared ? actors.front() : actors.at(agent);
  }
  GaussianPolicy& actor_for(int agent) { return shared ? actors.front() : actors.at(agent); }
};

/// Episode-aligned on-policy storage; samples are matrix columns, rewards
/// and critic values are shared across agents (common objective).
struct RolloutBuffer {
  int num_agents = 0;
  int episode_length = 0;
  int episodes = 0;
  std::vector<Eigen::MatrixXd> obs;        // per agent, obs_dim x S
  std::vector<Eigen::MatrixXd> actions;    // per agent, act_dim x S (raw)
  std::vector<Eigen::VectorXd> log_probs;  // per agent, S
  Eigen::VectorXd rewards;                 // S
  Eigen::VectorXd values;                  // S
  Eigen::MatrixXd global_states;           // state_dim x S
  Eigen::VectorXd bootstrap_values;        // per episode
  Eigen::VectorXd episode_mean_reward;     // per episode
  Eigen::VectorXd episode_mean_power;      // per episode, W

  int total_samples() const { return episode_length * episodes; }
};

/// Rolls out `episodes` full episodes. Episode e derives its env and
/// sampling streams from (seed, base_episode + e), so the buffer is
/// identical for any worker count. The critic output is multiplied by
/// `value_scale` (the trainer keeps critic targets on the per-step reward
/// scale so the value head converges quickly under the small pinned
/// learning rate).
RolloutBuffer collect_rollouts(const WindFarmEnv& env_prototype, const TrainedPolicy& policy,
                               const Mlp& critic, int episodes, int base_episode, uint64_t seed,
                               int workers = 1, double value_scale = 1.0);

struct EpisodeStat {
  int episode = 0;
  double mean_reward = 0.0;
  double mean_power_w = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  TrainedPolicy policy;
  Mlp critic;
  std::vector<RmsProp> actor_opts;  // one per actor bundle entry
  RmsProp critic_opt;
  std::vector<EpisodeStat> curve;
};

struct TrainingDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Batch callback, e.g. for checkpoint cadence; called after each update
/// with the number of episodes consumed so far.
using BatchCallback = std::function<void(int episodes_done, const TrainResult& progress)>;

/// HCMAPPO: alternating rollout collection and clipped-surrogate updates of
/// the shared actor(s) and the centralized critic. Aborts with
/// TrainingDivergence when the mean |ratio-1| of an epoch exceeds 10.
TrainResult train(const TrainConfig& config, const WindFarmEnv& env_prototype,
                  const BatchCallback& on_batch = nullptr);

struct TrajectoryRow {
  int step = 0;
  std::vector<Setpoint> setpoints;
  Eigen::VectorXd per_turbine_power;  // W
  double reward = 0.0;
};

struct EvalReport {
  double mean_reward = 0.0;
  double farm_power = 0.0;  // final step, W
  FarmState final_state;
  std::vector<TrajectoryRow> trajectory;
};

/// Decentralized execution: each agent acts on its own observation only
/// (no critic involved). `deterministic` uses the policy mean.
EvalReport evaluate_policy(const TrainedPolicy& policy, const WindFarmEnv& env_prototype,
                           uint64_t seed, bool deterministic = true);

/// Runs a policy trained on one farm on another farm with the same group
/// size; requires a shared actor (or matching agent count).
EvalReport evaluate_transfer(const TrainedPolicy& policy, const FarmLayout& layout,
                             int group_size, const PowerModel& model, const EnvConfig& config,
                             uint64_t seed);

}  // namespace wf
