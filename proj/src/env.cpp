#include "wf/env.hpp"

#include <algorithm>
#include <cmath>

#include "wf/baselines.hpp"

namespace wf {

namespace {

// Group members that are not shared with a neighboring group. Falls back to
// the whole group when every member is a bridge.
std::vector<int> low_level_members(const WtaPartition& partition, int m) {
  const auto& group = partition.groups[m];
  std::vector<int> low;
  const bool has_left = m > 0;
  const bool has_right = m + 1 < partition.num_groups();
  for (size_t k = 0; k < group.size(); ++k) {
    if (has_left && k == 0) continue;
    if (has_right && k + 1 == group.size()) continue;
    low.push_back(group[k]);
  }
  if (low.empty()) low = group;
  return low;
}

}  // namespace

std::vector<Eigen::VectorXd> route_messages(const Eigen::VectorXd& u, const Eigen::VectorXd& wd,
                                            const WtaPartition& partition) {
  if (u.size() != wd.size()) throw std::invalid_argument("u/wd length mismatch");
  const int num_groups = partition.num_groups();

  // step 1: intra-group aggregation at the bridge turbines
  std::vector<std::pair<double, double>> aggregates(num_groups);
  for (int m = 0; m < num_groups; ++m) {
    double su = 0.0, sw = 0.0;
    const auto low = low_level_members(partition, m);
    for (int id : low) {
      su += u[id];
      sw += wd[id];
    }
    aggregates[m] = {su / low.size(), sw / low.size()};
  }

  // steps 2+3: bridges exchange aggregates with adjacent groups only, then
  // share them group-wide; zeta = (left u, left wd, right u, right wd)
  std::vector<Eigen::VectorXd> zetas(num_groups);
  for (int m = 0; m < num_groups; ++m) {
    Eigen::VectorXd zeta = Eigen::VectorXd::Zero(4);
    if (m > 0) {
      zeta[0] = aggregates[m - 1].first;
      zeta[1] = aggregates[m - 1].second;
    }
    if (m + 1 < num_groups) {
      zeta[2] = aggregates[m + 1].first;
      zeta[3] = aggregates[m + 1].second;
    }
    zetas[m] = std::move(zeta);
  }
  return zetas;
}

Eigen::VectorXd build_observation(const Eigen::MatrixX2d& positions, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& wd, const WtaPartition& partition,
                                  int agent, const Eigen::VectorXd& zeta) {
  if (agent < 0 || agent >= partition.num_groups())
    throw std::invalid_argument("agent index out of range");
  const auto& group = partition.groups[agent];
  const int n = static_cast<int>(group.size());
  Eigen::VectorXd obs(4 * n + zeta.size());
  for (int k = 0; k < n; ++k) {
    obs[k] = positions(group[k], 0);
    obs[n + k] = positions(group[k], 1);
    obs[2 * n + k] = u[group[k]];
    obs[3 * n + k] = wd[group[k]];
  }
  obs.tail(zeta.size()) = zeta;
  return obs;
}

ActionApplication apply_action(const FarmState& state, const WtaPartition& partition,
                               const std::vector<Eigen::VectorXd>& squashed_actions) {
  if (static_cast<int>(squashed_actions.size()) != partition.num_groups())
    throw std::invalid_argument("one action vector per agent required");

  auto to_setpoint = [](const Eigen::VectorXd& a, int n, int k) {
    Setpoint sp;
    sp.alpha = (std::clamp(a[k], -1.0, 1.0) + 1.0) / 6.0;
    sp.beta = kMaxTiltRad * std::clamp(a[n + k], -1.0, 1.0);
    sp.gamma = kMaxYawRad * std::clamp(a[2 * n + k], -1.0, 1.0);
    return sp;
  };

  ActionApplication result;
  result.state = state;
  std::vector<bool> written(state.layout.count(), false);
  double conflict_sum = 0.0;
  int conflict_count = 0;
  for (int m = 0; m < partition.num_groups(); ++m) {
    const auto& group = partition.groups[m];
    const int n = static_cast<int>(group.size());
    const Eigen::VectorXd& action = squashed_actions[m];
    if (action.size() != 3 * n) throw std::invalid_argument("action dim must be 3N");
    if (!action.allFinite()) throw std::domain_error("non-finite action rejected");
    for (int k = 0; k < n; ++k) {
      const Setpoint proposal = to_setpoint(action, n, k);
      const int id = group[k];
      if (written[id]) {
        // upstream (lower-indexed) group keeps control of the bridge turbine
        const Setpoint& kept = result.state.setpoints[id];
        conflict_sum += std::abs(kept.alpha - proposal.alpha) +
                        std::abs(kept.beta - proposal.beta) +
                        std::abs(kept.gamma - proposal.gamma);
        ++conflict_count;
      } else {
        result.state.setpoints[id] = proposal;
        written[id] = true;
      }
    }
  }
  result.conflict_magnitude = conflict_count > 0 ? conflict_sum / conflict_count : 0.0;
  return result;
}

WindFarmEnv::WindFarmEnv(FarmLayout layout, WtaPartition partition, PowerModel power_model,
                         EnvConfig config)
    : layout_(std::move(layout)),
      partition_(std::move(partition)),
      power_model_(std::move(power_model)),
      config_(std::move(config)) {
  layout_.validate();
  partition_.validate(layout_.count());
  for (const auto& g : partition_.groups)
    if (g.size() != partition_.groups.front().size())
      throw std::invalid_argument("all WTA groups must have equal size");
  if (config_.episode_length < 1) throw std::invalid_argument("episode length must be >= 1");

  const FarmLayout frame = rotate_to_wind_frame(layout_);
  frame_positions_.resize(frame.count(), 2);
  for (int i = 0; i < frame.count(); ++i) {
    frame_positions_(i, 0) = frame.turbines[i].x;
    frame_positions_(i, 1) = frame.turbines[i].y;
  }
  position_scale_ = std::max(1.0, frame_positions_.cwiseAbs().maxCoeff());
  for (const auto& t : layout_.turbines) rated_total_ += t.spec.rated_power;

  state_ = greedy_baseline(layout_);
  refresh_flow();
}

void WindFarmEnv::refresh_flow() {
  flow_ = effective_flow(state_);
  zetas_ = route_messages(flow_.u, flow_.theta, partition_);
  last_power_ = farm_power_direct(state_, power_model_).total;
}

std::vector<Eigen::VectorXd> WindFarmEnv::reset(uint64_t seed) {
  Rng rng(seed);
  state_ = greedy_baseline(layout_);
  if (config_.jitter) {
    const double nominal = layout_.ambient.u_inf;
    state_.layout.ambient.u_inf =
        nominal * (1.0 + config_.jitter_fraction * rng.uniform(-1.0, 1.0));
  }
  steps_taken_ = 0;
  last_conflict_ = 0.0;
  refresh_flow();
  return observations();
}

WindFarmEnv::Step WindFarmEnv::step(const std::vector<Eigen::VectorXd>& raw_actions) {
  if (done()) throw std::logic_error("episode is done; call reset()");
  std::vector<Eigen::VectorXd> squashed(raw_actions.size());
  for (size_t m = 0; m < raw_actions.size(); ++m) {
    if (!raw_actions[m].allFinite()) throw std::domain_error("non-finite action rejected");
    squashed[m] = raw_actions[m].array().tanh().matrix();
  }
  ActionApplication applied = apply_action(state_, partition_, squashed);
  state_ = std::move(applied.state);
  last_conflict_ = applied.conflict_magnitude;
  refresh_flow();
  ++steps_taken_;

  Step result;
  result.observations = observations();
  result.farm_power = last_power_;
  result.reward = last_power_ / rated_total_;
  result.done = done();
  return result;
}

Eigen::VectorXd WindFarmEnv::raw_observation(int agent) const {
  return build_observation(frame_positions_, flow_.u, flow_.theta, partition_, agent,
                           zetas_[agent]);
}

Eigen::VectorXd WindFarmEnv::normalize(const Eigen::VectorXd& raw) const {
  const int n = group_size();
  const double u_scale = std::max(state_.layout.ambient.u_inf, 1e-9);
  Eigen::VectorXd out = raw;
  out.segment(0, 2 * n) /= position_scale_;
  out.segment(2 * n, n) /= u_scale;
  out.segment(3 * n, n) /= kPi;
  out[4 * n + 0] /= u_scale;
  out[4 * n + 1] /= kPi;
  out[4 * n + 2] /= u_scale;
  out[4 * n + 3] /= kPi;
  return out;
}

std::vector<Eigen::VectorXd> WindFarmEnv::observations() const {
  std::vector<Eigen::VectorXd> obs(num_agents());
  for (int m = 0; m < num_agents(); ++m) obs[m] = normalize(raw_observation(m));
  return obs;
}

Eigen::VectorXd WindFarmEnv::global_state() const {
  Eigen::VectorXd state(num_agents() * obs_dim());
  const auto obs = observations();
  for (int m = 0; m < num_agents(); ++m) state.segment(m * obs_dim(), obs_dim()) = obs[m];
  return state;
}

}  // namespace wf
