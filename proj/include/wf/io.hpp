#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wf/farm.hpp"
#include "wf/ppo.hpp"

namespace wf {

/// Shortest round-trip decimal representation, used by every writer so
/// outputs are deterministic.
std::string format_double(double value);

/// Flow grid as long-format CSV "x_m,y_m,u_ms", row-major over y then x.
void write_flow_csv(const std::filesystem::path& path, const Eigen::MatrixXd& grid, double x0,
                    double x1, double y0, double y1);

/// Binary P6 heatmap, one gray pixel per grid cell. Intensity is the
/// affine map [0, u_max] -> [0, 255]; image row 0 is the top (max y).
void write_flow_ppm(const std::filesystem::path& path, const Eigen::MatrixXd& grid,
                    double u_max);

/// Per-turbine operating point: "turbine,x_m,y_m,alpha,gamma_deg,beta_deg,
/// u_eff_ms,power_w". Turbine IDs are 1-based.
void write_power_csv(const std::filesystem::path& path, const FarmState& state,
                     const FarmPower& power);

/// "episode,mean_reward,mean_power_w,actor_loss,critic_loss,entropy".
void write_training_curve_csv(const std::filesystem::path& path,
                              const std::vector<EpisodeStat>& curve);

/// "step,reward" then per turbine i: "alpha_i,gamma_deg_i,beta_deg_i,power_w_i".
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryRow>& trajectory);

}  // namespace wf
