#include "wf/ppo.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace wf {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr uint64_t kInitStream = 0x11;
constexpr uint64_t kEnvStream = 0x22;
constexpr uint64_t kSampleStream = 0x33;

struct EpisodeRollout {
  std::vector<Eigen::MatrixXd> obs;
  std::vector<Eigen::MatrixXd> actions;
  std::vector<Eigen::VectorXd> log_probs;
  Eigen::VectorXd rewards;
  Eigen::VectorXd values;
  Eigen::MatrixXd global_states;
  double bootstrap = 0.0;
  double mean_reward = 0.0;
  double mean_power = 0.0;
};

EpisodeRollout run_episode(const WindFarmEnv& prototype, const TrainedPolicy& policy,
                           const Mlp& critic, double value_scale, uint64_t seed,
                           int episode_index) {
  WindFarmEnv env = prototype;
  const int agents = env.num_agents();
  const int length = env.episode_length();

  EpisodeRollout ep;
  ep.obs.assign(agents, Eigen::MatrixXd(env.obs_dim(), length));
  ep.actions.assign(agents, Eigen::MatrixXd(env.act_dim(), length));
  ep.log_probs.assign(agents, Eigen::VectorXd(length));
  ep.rewards.resize(length);
  ep.values.resize(length);
  ep.global_states.resize(critic.input_dim(), length);

  std::vector<Eigen::VectorXd> obs = env.reset(mix_seed(seed, kEnvStream, episode_index));
  Rng sample_rng(mix_seed(seed, kSampleStream, episode_index));

  double power_sum = 0.0;
  for (int t = 0; t < length; ++t) {
    const Eigen::VectorXd global = env.global_state();
    ep.global_states.col(t) = global;
    ep.values[t] = value_scale * critic.forward(global)[0];

    std::vector<Eigen::VectorXd> raw(agents);
    for (int m = 0; m < agents; ++m) {
      const auto sample = policy.actor_for(m).sample(obs[m], sample_rng);
      ep.obs[m].col(t) = obs[m];
      ep.actions[m].col(t) = sample.action;
      ep.log_probs[m][t] = sample.log_prob;
      raw[m] = sample.action;
    }
    const WindFarmEnv::Step step = env.step(raw);
    ep.rewards[t] = step.reward;
    power_sum += step.farm_power;
    obs = step.observations;
  }
  ep.bootstrap = value_scale * critic.forward(env.global_state())[0];
  ep.mean_reward = ep.rewards.mean();
  ep.mean_power = power_sum / length;
  return ep;
}

}  // namespace

ActorEpochStats update_actor_epoch(GaussianPolicy& actor, RmsProp& optimizer,
                                   const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions,
                                   const Eigen::VectorXd& old_log_probs,
                                   const Eigen::VectorXd& advantages,
                                   const TrainConfig& config) {
  const int samples = static_cast<int>(obs.cols());
  const int act_dim = actor.act_dim();

  ForwardCache cache;
  const Eigen::MatrixXd mean = forward_cached(actor.net, obs, cache);
  const Eigen::ArrayXd inv_std = (-actor.log_std.array()).exp();
  const Eigen::ArrayXXd z = ((actions - mean).array().colwise() * inv_std);

  const Eigen::ArrayXd lp_new = (-0.5 * z.square()).colwise().sum().transpose() -
                                actor.log_std.sum() - 0.5 * act_dim * kLog2Pi;
  const Eigen::ArrayXd ratio = (lp_new - old_log_probs.array()).exp();

  const Eigen::ArrayXd term_raw = ratio * advantages.array();
  const Eigen::ArrayXd term_clip =
      ratio.min(1.0 + config.clip_epsilon).max(1.0 - config.clip_epsilon) * advantages.array();

  ActorEpochStats stats;
  double objective_sum = 0.0;
  double ratio_gap_sum = 0.0;
  int included = 0;
  Eigen::ArrayXd dlp = Eigen::ArrayXd::Zero(samples);
  for (int s = 0; s < samples; ++s) {
    if (!std::isfinite(ratio[s])) {
      ++stats.excluded;
      continue;
    }
    ++included;
    ratio_gap_sum += std::abs(ratio[s] - 1.0);
    if (term_raw[s] <= term_clip[s]) {
      objective_sum += term_raw[s];
      dlp[s] = term_raw[s];  // d(min)/d(log prob) flows through the raw term
    } else {
      objective_sum += term_clip[s];
      // clipped branch active only when the ratio is outside the band,
      // where the clip derivative vanishes
    }
  }
  if (included == 0) throw TrainingDivergence("every PPO ratio was non-finite");

  const double entropy = actor.entropy();
  stats.loss = -objective_sum / included - config.entropy_coef * entropy;
  stats.mean_abs_ratio_gap = ratio_gap_sum / included;

  dlp /= -static_cast<double>(included);  // dLoss/dlp per sample
  const Eigen::MatrixXd dmean =
      ((z.rowwise() * dlp.transpose()).colwise() * inv_std).matrix();
  Eigen::VectorXd dlog_std =
      ((z.square() - 1.0).rowwise() * dlp.transpose()).rowwise().sum().matrix();
  dlog_std.array() -= config.entropy_coef;  // from the -c_H * H term

  const MlpGrads grads = backward(actor.net, cache, dmean);
  optimizer.step(actor.net, grads);
  optimizer.step_extra(actor.log_std, dlog_std);
  return stats;
}

void TrainConfig::validate() const {
  if (episodes < 0) throw std::invalid_argument("episodes must be >= 0");
  if (episodes_per_batch < 1) throw std::invalid_argument("batch must hold >= 1 episode");
  if (episode_length < 1) throw std::invalid_argument("episode length must be >= 1");
  if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("discount out of (0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("gae lambda out of [0, 1]");
  if (!(clip_epsilon > 0.0)) throw std::invalid_argument("clip epsilon must be > 0");
  if (actor_epochs < 0 || critic_epochs < 0)
    throw std::invalid_argument("update steps must be >= 0");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (!(divergence_threshold > 0.0))
    throw std::invalid_argument("divergence threshold must be > 0");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_gae(const Eigen::VectorXd& rewards,
                                                        const Eigen::VectorXd& values,
                                                        double bootstrap, double discount,
                                                        double lambda) {
  if (rewards.size() != values.size())
    throw std::invalid_argument("rewards/values length mismatch");
  const int n = static_cast<int>(rewards.size());
  Eigen::VectorXd advantages(n);
  double carry = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const double next_value = t + 1 < n ? values[t + 1] : bootstrap;
    const double delta = rewards[t] + discount * next_value - values[t];
    carry = delta + discount * lambda * carry;
    advantages[t] = carry;
  }
  return {advantages, advantages + values};
}

double ppo_actor_loss(const Eigen::VectorXd& log_probs_new, const Eigen::VectorXd& log_probs_old,
                      const Eigen::VectorXd& advantages, double clip_epsilon, double entropy,
                      double entropy_coef, int* excluded_samples) {
  if (log_probs_new.size() != log_probs_old.size() ||
      log_probs_new.size() != advantages.size())
    throw std::invalid_argument("loss inputs must have equal length");
  double objective_sum = 0.0;
  int included = 0;
  int excluded = 0;
  for (int s = 0; s < log_probs_new.size(); ++s) {
    const double ratio = std::exp(log_probs_new[s] - log_probs_old[s]);
    if (!std::isfinite(ratio)) {
      ++excluded;
      continue;
    }
    const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    objective_sum += std::min(ratio * advantages[s], clipped * advantages[s]);
    ++included;
  }
  if (excluded_samples) *excluded_samples = excluded;
  if (included == 0) return -entropy_coef * entropy;
  return -objective_sum / included - entropy_coef * entropy;
}

double critic_loss(const Eigen::VectorXd& values_pred, const Eigen::VectorXd& returns) {
  if (values_pred.size() != returns.size())
    throw std::invalid_argument("loss inputs must have equal length");
  return 0.5 * (values_pred - returns).squaredNorm() / values_pred.size();
}

RolloutBuffer collect_rollouts(const WindFarmEnv& env_prototype, const TrainedPolicy& policy,
                               const Mlp& critic, int episodes, int base_episode, uint64_t seed,
                               int workers, double value_scale) {
  for (int m = 0; m < env_prototype.num_agents(); ++m)
    if (policy.actor_for(m).obs_dim() != env_prototype.obs_dim() ||
        policy.actor_for(m).act_dim() != env_prototype.act_dim())
      throw std::invalid_argument("policy dimensions do not match the environment");
  if (critic.input_dim() != env_prototype.num_agents() * env_prototype.obs_dim())
    throw std::invalid_argument("critic input must cover the global state");

  std::vector<EpisodeRollout> slots(episodes);
  auto work = [&](int e) {
    slots[e] = run_episode(env_prototype, policy, critic, value_scale, seed, base_episode + e);
  };
  if (workers <= 1 || episodes <= 1) {
    for (int e = 0; e < episodes; ++e) work(e);
  } else {
    std::atomic<int> next{0};
    auto drain = [&] {
      for (int e = next.fetch_add(1); e < episodes; e = next.fetch_add(1)) work(e);
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min(workers, episodes);
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }

  const int agents = env_prototype.num_agents();
  const int length = env_prototype.episode_length();
  RolloutBuffer buffer;
  buffer.num_agents = agents;
  buffer.episode_length = length;
  buffer.episodes = episodes;
  const int total = length * episodes;
  buffer.obs.assign(agents, Eigen::MatrixXd(env_prototype.obs_dim(), total));
  buffer.actions.assign(agents, Eigen::MatrixXd(env_prototype.act_dim(), total));
  buffer.log_probs.assign(agents, Eigen::VectorXd(total));
  buffer.rewards.resize(total);
  buffer.values.resize(total);
  buffer.global_states.resize(critic.input_dim(), total);
  buffer.bootstrap_values.resize(episodes);
  buffer.episode_mean_reward.resize(episodes);
  buffer.episode_mean_power.resize(episodes);
  for (int e = 0; e < episodes; ++e) {
    const auto& ep = slots[e];
    const int offset = e * length;
    for (int m = 0; m < agents; ++m) {
      buffer.obs[m].middleCols(offset, length) = ep.obs[m];
      buffer.actions[m].middleCols(offset, length) = ep.actions[m];
      buffer.log_probs[m].segment(offset, length) = ep.log_probs[m];
    }
    buffer.rewards.segment(offset, length) = ep.rewards;
    buffer.values.segment(offset, length) = ep.values;
    buffer.global_states.middleCols(offset, length) = ep.global_states;
    buffer.bootstrap_values[e] = ep.bootstrap;
    buffer.episode_mean_reward[e] = ep.mean_reward;
    buffer.episode_mean_power[e] = ep.mean_power;
  }
  return buffer;
}

TrainResult train(const TrainConfig& config, const WindFarmEnv& env_prototype,
                  const BatchCallback& on_batch) {
  config.validate();
  WindFarmEnv proto = env_prototype;

  Rng init_rng(mix_seed(config.seed, kInitStream, 0));
  TrainResult result;
  result.policy.shared = config.shared_actor;
  const int actor_count = config.shared_actor ? 1 : proto.num_agents();
  for (int i = 0; i < actor_count; ++i)
    result.policy.actors.push_back(GaussianPolicy::create(
        proto.obs_dim(), config.hidden, proto.act_dim(), config.actor_output_gain, init_rng));
  result.critic = Mlp::create(proto.num_agents() * proto.obs_dim(), config.hidden, 1, 1.0,
                              init_rng);

  std::vector<RmsProp>& actor_opts = result.actor_opts;
  for (int i = 0; i < actor_count; ++i)
    actor_opts.push_back(RmsProp::for_net(result.policy.actors[i].net, config.actor_lr,
                                          proto.act_dim()));
  RmsProp& critic_opt = result.critic_opt;
  critic_opt = RmsProp::for_net(result.critic, config.critic_lr);

  // the critic learns on the per-step reward scale; its output is
  // multiplied back up so GAE sees values on the return scale
  const double value_scale =
      config.discount < 1.0 ? 1.0 / (1.0 - config.discount) : config.episode_length;

  int episodes_done = 0;
  while (episodes_done < config.episodes) {
    const int batch_episodes =
        std::min(config.episodes_per_batch, config.episodes - episodes_done);
    const RolloutBuffer buffer = collect_rollouts(proto, result.policy, result.critic,
                                                  batch_episodes, episodes_done, config.seed,
                                                  config.workers, value_scale);
    const int samples = buffer.total_samples();

    // advantages/returns per episode, then batch normalization
    Eigen::VectorXd advantages(samples);
    Eigen::VectorXd returns(samples);
    for (int e = 0; e < batch_episodes; ++e) {
      const int offset = e * buffer.episode_length;
      const auto [adv, ret] = compute_gae(
          buffer.rewards.segment(offset, buffer.episode_length),
          buffer.values.segment(offset, buffer.episode_length), buffer.bootstrap_values[e],
          config.discount, config.gae_lambda);
      advantages.segment(offset, buffer.episode_length) = adv;
      returns.segment(offset, buffer.episode_length) = ret;
    }
    const double adv_mean = advantages.mean();
    const double adv_std =
        std::sqrt((advantages.array() - adv_mean).square().sum() / samples);
    const Eigen::VectorXd norm_advantages =
        ((advantages.array() - adv_mean) / (adv_std + 1e-8)).matrix();

    // actor epochs; a shared actor trains on every agent's samples at once
    double actor_loss = 0.0;
    double entropy = 0.0;
    if (config.shared_actor) {
      const int big = samples * buffer.num_agents;
      Eigen::MatrixXd obs(proto.obs_dim(), big);
      Eigen::MatrixXd actions(proto.act_dim(), big);
      Eigen::VectorXd old_lp(big);
      Eigen::VectorXd adv(big);
      for (int m = 0; m < buffer.num_agents; ++m) {
        obs.middleCols(m * samples, samples) = buffer.obs[m];
        actions.middleCols(m * samples, samples) = buffer.actions[m];
        old_lp.segment(m * samples, samples) = buffer.log_probs[m];
        adv.segment(m * samples, samples) = norm_advantages;
      }
      for (int epoch = 0; epoch < config.actor_epochs; ++epoch) {
        const ActorEpochStats stats = update_actor_epoch(result.policy.actors[0],
                                                         actor_opts[0], obs, actions, old_lp,
                                                         adv, config);
        if (stats.mean_abs_ratio_gap > config.divergence_threshold)
          throw TrainingDivergence("policy ratios diverged (mean |ratio-1| = " +
                                   std::to_string(stats.mean_abs_ratio_gap) + " after " +
                                   std::to_string(episodes_done) + " episodes)");
        actor_loss = stats.loss;
      }
      entropy = result.policy.actors[0].entropy();
    } else {
      for (int m = 0; m < buffer.num_agents; ++m) {
        for (int epoch = 0; epoch < config.actor_epochs; ++epoch) {
          const ActorEpochStats stats = update_actor_epoch(
              result.policy.actors[m], actor_opts[m], buffer.obs[m], buffer.actions[m],
              buffer.log_probs[m], norm_advantages, config);
          if (stats.mean_abs_ratio_gap > config.divergence_threshold)
            throw TrainingDivergence("policy ratios diverged for agent " + std::to_string(m));
          actor_loss = stats.loss;
        }
        entropy += result.policy.actors[m].entropy() / buffer.num_agents;
      }
    }

    // critic epochs on the global states, targets on the per-step scale
    const Eigen::VectorXd critic_targets = returns / value_scale;
    double value_loss = 0.0;
    for (int epoch = 0; epoch < config.critic_epochs; ++epoch) {
      ForwardCache cache;
      const Eigen::MatrixXd pred = forward_cached(result.critic, buffer.global_states, cache);
      const Eigen::VectorXd residual = pred.row(0).transpose() - critic_targets;
      value_loss = 0.5 * residual.squaredNorm() / samples;
      const Eigen::MatrixXd dpred = residual.transpose() / samples;
      critic_opt.step(result.critic, backward(result.critic, cache, dpred));
    }

    for (int e = 0; e < batch_episodes; ++e) {
      EpisodeStat stat;
      stat.episode = episodes_done + e;
      stat.mean_reward = buffer.episode_mean_reward[e];
      stat.mean_power_w = buffer.episode_mean_power[e];
      stat.actor_loss = actor_loss;
      stat.critic_loss = value_loss;
      stat.entropy = entropy;
      result.curve.push_back(stat);
    }
    episodes_done += batch_episodes;
    if (on_batch) on_batch(episodes_done, result);
  }
  return result;
}

EvalReport evaluate_policy(const TrainedPolicy& policy, const WindFarmEnv& env_prototype,
                           uint64_t seed, bool deterministic) {
  WindFarmEnv env = env_prototype;
  for (int m = 0; m < env.num_agents(); ++m)
    if (policy.actor_for(m).obs_dim() != env.obs_dim() ||
        policy.actor_for(m).act_dim() != env.act_dim())
      throw std::invalid_argument("policy dimensions do not match the environment");
  if (!policy.shared && static_cast<int>(policy.actors.size()) != env.num_agents())
    throw std::invalid_argument("per-agent policy does not match the agent count");

  std::vector<Eigen::VectorXd> obs = env.reset(mix_seed(seed, kEnvStream, 0));
  Rng sample_rng(mix_seed(seed, kSampleStream, 0));

  EvalReport report;
  double reward_sum = 0.0;
  for (int t = 0; t < env.episode_length(); ++t) {
    std::vector<Eigen::VectorXd> raw(env.num_agents());
    for (int m = 0; m < env.num_agents(); ++m)
      raw[m] = deterministic ? policy.actor_for(m).mean(obs[m])
                             : policy.actor_for(m).sample(obs[m], sample_rng).action;
    const WindFarmEnv::Step step = env.step(raw);
    reward_sum += step.reward;
    obs = step.observations;

    TrajectoryRow row;
    row.step = t;
    row.setpoints = env.state().setpoints;
    row.per_turbine_power = farm_power_direct(env.state(), env.power_model()).per_turbine;
    row.reward = step.reward;
    report.trajectory.push_back(std::move(row));
    report.farm_power = step.farm_power;
  }
  report.mean_reward = reward_sum / env.episode_length();
  report.final_state = env.state();
  return report;
}

EvalReport evaluate_transfer(const TrainedPolicy& policy, const FarmLayout& layout,
                             int group_size, const PowerModel& model, const EnvConfig& config,
                             uint64_t seed) {
  const WtaPartition partition = build_partition(layout.count(), group_size);
  WindFarmEnv env(layout, partition, model, config);
  return evaluate_policy(policy, env, seed, /*deterministic=*/true);
}

}  // namespace wf
