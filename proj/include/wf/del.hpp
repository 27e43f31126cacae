#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "wf/farm.hpp"

namespace wf {

/// Blade damage-equivalent loads along the in-plane and out-of-plane
/// directions as quadratic fits in the yaw angle (degrees).
std::pair<double, double> del_components(double gamma_deg);

struct DelReport {
  Eigen::VectorXd del_y;
  Eigen::VectorXd del_x;
  Eigen::VectorXd magnitude;           // sqrt(del_y^2 + del_x^2)
  double total_magnitude = 0.0;
  double farm_power = 0.0;             // W
  std::optional<double> avg_del_per_power;  // absent when farm power is zero
};

DelReport build_del_report(const FarmState& state, const PowerModel& model);

/// Mean DEL per unit power; absent when the farm produces no power.
std::optional<double> avg_del_per_power(const FarmState& state, const PowerModel& model);

}  // namespace wf
