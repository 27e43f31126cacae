#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wf/power.hpp"
#include "wf/types.hpp"
#include "wf/wake.hpp"

namespace wf {

struct PlacedTurbine {
  TurbineSpec spec;
  double x = 0.0;  // m
  double y = 0.0;  // m
};

/// Turbine order is the canonical ID (1-based in file formats and reports).
struct FarmLayout {
  std::vector<PlacedTurbine> turbines;
  Ambient ambient;

  int count() const { return static_cast<int>(turbines.size()); }
  void validate() const;
};

struct FarmState {
  FarmLayout layout;
  std::vector<Setpoint> setpoints;

  void validate() const;
};

/// Overlapping turbine groups; consecutive groups share exactly one
/// high-level (bridge) turbine. Indices are 0-based internally.
struct WtaPartition {
  std::vector<std::vector<int>> groups;
  std::vector<int> high_level_ids;

  int num_groups() const { return static_cast<int>(groups.size()); }
  void validate(int turbine_count) const;
};

/// Rigidly rotates positions so the flow blows along +x; the returned
/// layout has wind_direction = 0.
FarmLayout rotate_to_wind_frame(const FarmLayout& layout);

/// Single-row layout along the wind at `spacing_diameters` rotor diameters,
/// the layout used for the studied farm sizes.
FarmLayout make_row_layout(int count, const TurbineSpec& spec, const Ambient& ambient,
                           double spacing_diameters = 7.0);

struct FlowAtTurbines {
  Eigen::VectorXd u;      // effective velocity per turbine, m/s
  Eigen::VectorXd theta;  // superposed local skew per turbine, rad
};

/// Linear deficit superposition over all strictly-upstream wakes within
/// their 15 D windows, clamped to [0, u_inf].
FlowAtTurbines effective_flow(const FarmState& state);
Eigen::VectorXd effective_velocities(const FarmState& state);

struct FarmPower {
  double total = 0.0;             // W
  Eigen::VectorXd per_turbine;    // W
  Eigen::VectorXd velocities;     // m/s
};

FarmPower farm_power_direct(const FarmState& state, const PowerModel& model);

/// Group sums minus the shared-turbine double counts; equals the direct sum
/// identically.
double farm_power_wta(const FarmState& state, const WtaPartition& partition,
                      const PowerModel& model);

/// Overlapping groups of `group_size` consecutive IDs. Requires
/// count == 1 (mod group_size-1); farms with count <= group_size form a
/// single group.
WtaPartition build_partition(int turbine_count, int group_size);

/// Velocity field on a regular grid at hub height, original-frame
/// coordinates; row r is y = y0 + r*dy, column c is x = x0 + c*dx.
Eigen::MatrixXd rasterize_flow(const FarmState& state, double x0, double x1, double y0,
                               double y1, int nx, int ny);

}  // namespace wf
