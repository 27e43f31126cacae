#include "wf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wf {

FarmState greedy_baseline(const FarmLayout& layout) {
  FarmState state;
  state.layout = layout;
  state.setpoints.assign(layout.count(), Setpoint{kMaxAxialInduction, 0.0, 0.0});
  return state;
}

double pid_yaw_step(double current_gamma, double target_gamma, const PidGains& gains,
                    PidState& state, double dt) {
  if (!std::isfinite(current_gamma) || !std::isfinite(target_gamma) || !(dt > 0.0))
    throw std::domain_error("pid inputs must be finite with dt > 0");
  const double error = target_gamma - current_gamma;
  state.integral += error * dt;
  const double derivative = state.has_prev ? (error - state.prev_error) / dt : 0.0;
  state.prev_error = error;
  state.has_prev = true;
  const double correction =
      dt * (gains.kp * error + gains.ki * state.integral + gains.kd * derivative);
  return std::clamp(current_gamma + correction, -kMaxYawRad, kMaxYawRad);
}

FarmState pid_baseline(const FarmLayout& layout, const PidGains& gains, double initial_yaw,
                       int steps, double dt) {
  FarmState state = greedy_baseline(layout);
  for (auto& sp : state.setpoints) sp.gamma = initial_yaw;
  std::vector<PidState> controllers(layout.count());
  for (int k = 0; k < steps; ++k)
    for (int i = 0; i < layout.count(); ++i)
      state.setpoints[i].gamma =
          pid_yaw_step(state.setpoints[i].gamma, 0.0, gains, controllers[i], dt);
  return state;
}

void GridSearchConfig::validate() const {
  if (passes < 1) throw std::invalid_argument("grid search needs passes >= 1");
  if (gamma_levels_deg.empty() || beta_levels_deg.empty() || alpha_levels.empty())
    throw std::invalid_argument("grid levels must be non-empty");
  for (double g : gamma_levels_deg)
    if (std::abs(g) > 45.0) throw std::invalid_argument("gamma level out of bounds");
  for (double b : beta_levels_deg)
    if (std::abs(b) > 15.0) throw std::invalid_argument("beta level out of bounds");
  for (double a : alpha_levels)
    if (a < 0.0 || a > kMaxAxialInduction + 1e-12)
      throw std::invalid_argument("alpha level out of bounds");
}

GridSearchResult coordinated_grid_search(const FarmState& start, const GridSearchConfig& config,
                                         const PowerModel& model) {
  config.validate();
  start.validate();

  const int n = start.layout.count();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (config.upstream_first) {
    const FarmLayout frame = rotate_to_wind_frame(start.layout);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frame.turbines[a].x < frame.turbines[b].x; });
  }

  GridSearchResult result;
  result.state = start;
  result.power = farm_power_direct(result.state, model).total;
  for (int pass = 0; pass < config.passes; ++pass) {
    for (int idx : order) {
      Setpoint best = result.state.setpoints[idx];
      double best_power = result.power;
      for (double alpha : config.alpha_levels)
        for (double beta_deg : config.beta_levels_deg)
          for (double gamma_deg : config.gamma_levels_deg) {
            result.state.setpoints[idx] = {alpha, deg2rad(gamma_deg), deg2rad(beta_deg)};
            const double p = farm_power_direct(result.state, model).total;
            if (p > best_power) {
              best_power = p;
              best = result.state.setpoints[idx];
            }
          }
      result.state.setpoints[idx] = best;
      result.power = best_power;
    }
    result.pass_powers.push_back(result.power);
  }
  return result;
}

}  // namespace wf
