#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wf/farm.hpp"
#include "wf/rng.hpp"

namespace wf {

// Hierarchical-communication POMDP wrapper around the farm model. Each WTA
// group is one agent; observations follow the (x.., y.., u.., wd.., zeta)
// layout with zeta the two neighboring groups' (u, wd) aggregates,
// zero-padded, so |obs| = 4 N + 4 and the learned action is 3 N wide
// ([alpha.., beta.., gamma..] before squashing).

/// Three-phase routing: low-level turbines' (u, wd) are mean-aggregated at
/// each group's bridge turbines, bridges exchange aggregates with adjacent
/// groups only, and the received aggregates are shared group-wide. Returns
/// one zeta vector (left u, left wd, right u, right wd) per agent.
std::vector<Eigen::VectorXd> route_messages(const Eigen::VectorXd& u, const Eigen::VectorXd& wd,
                                            const WtaPartition& partition);

/// Raw observation of one agent from per-turbine flow quantities;
/// `positions` are wind-frame coordinates, one row per turbine.
Eigen::VectorXd build_observation(const Eigen::MatrixX2d& positions, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& wd, const WtaPartition& partition,
                                  int agent, const Eigen::VectorXd& zeta);

/// Affine map from squashed [-1,1] actions to setpoints; shared turbines
/// take the lower-indexed group's proposal.
struct ActionApplication {
  FarmState state;
  double conflict_magnitude = 0.0;  // mean L1 setpoint gap on shared turbines
};
ActionApplication apply_action(const FarmState& state, const WtaPartition& partition,
                               const std::vector<Eigen::VectorXd>& squashed_actions);

struct EnvConfig {
  int episode_length = 25;
  bool jitter = false;           // domain randomization of u_inf on reset
  double jitter_fraction = 0.1;  // +-10%
};

class WindFarmEnv {
 public:
  WindFarmEnv(FarmLayout layout, WtaPartition partition, PowerModel power_model,
              EnvConfig config);

  /// Re-seeds the episode, resets setpoints to the greedy defaults and
  /// returns the normalized per-agent observations.
  std::vector<Eigen::VectorXd> reset(uint64_t seed);

  struct Step {
    std::vector<Eigen::VectorXd> observations;  // normalized
    double reward = 0.0;                        // shared across agents
    bool done = false;
    double farm_power = 0.0;  // W
  };

  /// Applies tanh-squashed actions (one raw vector of length 3N per agent),
  /// re-equilibrates the flow and returns the shared normalized reward.
  Step step(const std::vector<Eigen::VectorXd>& raw_actions);

  int num_agents() const { return partition_.num_groups(); }
  int group_size() const { return static_cast<int>(partition_.groups.front().size()); }
  int obs_dim() const { return 4 * group_size() + 4; }
  int act_dim() const { return 3 * group_size(); }
  int episode_length() const { return config_.episode_length; }
  bool done() const { return steps_taken_ >= config_.episode_length; }

  const FarmState& state() const { return state_; }
  const WtaPartition& partition() const { return partition_; }
  const PowerModel& power_model() const { return power_model_; }
  double rated_total() const { return rated_total_; }
  double last_conflict() const { return last_conflict_; }
  double farm_power() const { return last_power_; }
  double u_inf() const { return state_.layout.ambient.u_inf; }

  /// Unnormalized observation of one agent in the spec layout.
  Eigen::VectorXd raw_observation(int agent) const;
  std::vector<Eigen::VectorXd> observations() const;
  /// Concatenation of all agents' normalized observations.
  Eigen::VectorXd global_state() const;

 private:
  Eigen::VectorXd normalize(const Eigen::VectorXd& raw) const;
  void refresh_flow();

  FarmLayout layout_;  // as configured
  WtaPartition partition_;
  PowerModel power_model_;
  EnvConfig config_;

  Eigen::MatrixX2d frame_positions_;  // wind-frame coordinates
  double position_scale_ = 1.0;
  double rated_total_ = 0.0;

  FarmState state_;
  FlowAtTurbines flow_;
  std::vector<Eigen::VectorXd> zetas_;
  int steps_taken_ = 0;
  double last_power_ = 0.0;
  double last_conflict_ = 0.0;
};

}  // namespace wf
