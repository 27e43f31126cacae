#pragma once

#include <vector>

#include "wf/farm.hpp"

namespace wf {

/// Locally-optimal no-coordination reference: every turbine at the Betz
/// setpoint (alpha = 1/3, no misalignment).
FarmState greedy_baseline(const FarmLayout& layout);

struct PidGains {
  double kp = 0.5;
  double ki = 0.1;
  double kd = 0.0;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
};

/// One positional PID step on the yaw error; returns the new yaw clamped to
/// the actuator range. A zero error with an empty integrator leaves the yaw
/// unchanged.
double pid_yaw_step(double current_gamma, double target_gamma, const PidGains& gains,
                    PidState& state, double dt);

/// Univariate yaw-regulation proxy: starts every turbine at
/// `initial_yaw` and regulates toward the aligned greedy target.
FarmState pid_baseline(const FarmLayout& layout, const PidGains& gains, double initial_yaw,
                       int steps, double dt);

struct GridSearchConfig {
  std::vector<double> gamma_levels_deg = {-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0};
  std::vector<double> beta_levels_deg = {-15.0, -7.5, 0.0, 7.5, 15.0};
  std::vector<double> alpha_levels = {0.20, 0.25, 0.30, 1.0 / 3.0};
  int passes = 3;
  bool upstream_first = true;

  void validate() const;
};

struct GridSearchResult {
  FarmState state;
  double power = 0.0;                 // W
  std::vector<double> pass_powers;    // farm power after each sweep
};

/// Discrete coordinate descent over per-turbine setpoint triples in
/// upstream-to-downstream order, keeping the farm-power argmax at each
/// turbine; farm power is non-decreasing across accepted moves.
GridSearchResult coordinated_grid_search(const FarmState& start, const GridSearchConfig& config,
                                         const PowerModel& model);

}  // namespace wf
