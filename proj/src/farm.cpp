#include "wf/farm.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace wf {

void FarmLayout::validate() const {
  ambient.validate();
  for (const auto& t : turbines) t.spec.validate();
  for (size_t i = 0; i < turbines.size(); ++i)
    for (size_t j = i + 1; j < turbines.size(); ++j) {
      const double dx = turbines[i].x - turbines[j].x;
      const double dy = turbines[i].y - turbines[j].y;
      if (dx * dx + dy * dy < 1e-12)
        throw std::invalid_argument("turbine positions must be pairwise distinct");
    }
}

void FarmState::validate() const {
  layout.validate();
  if (static_cast<int>(setpoints.size()) != layout.count())
    throw std::invalid_argument("setpoint count does not match turbine count");
  for (const auto& s : setpoints) s.validate();
}

void WtaPartition::validate(int turbine_count) const {
  if (groups.empty()) throw std::invalid_argument("partition has no groups");
  std::set<int> covered;
  for (size_t m = 0; m < groups.size(); ++m) {
    const auto& g = groups[m];
    if (g.empty()) throw std::invalid_argument("empty WTA group");
    for (size_t k = 0; k + 1 < g.size(); ++k)
      if (g[k] >= g[k + 1]) throw std::invalid_argument("group IDs must be strictly increasing");
    for (int id : g) {
      if (id < 0 || id >= turbine_count) throw std::invalid_argument("group ID out of range");
      covered.insert(id);
    }
    if (m > 0) {
      std::vector<int> overlap;
      std::set_intersection(groups[m - 1].begin(), groups[m - 1].end(), g.begin(), g.end(),
                            std::back_inserter(overlap));
      if (overlap.size() != 1)
        throw std::invalid_argument("consecutive WTA groups must overlap in exactly one turbine");
    }
  }
  if (static_cast<int>(covered.size()) != turbine_count)
    throw std::invalid_argument("WTA groups must cover every turbine");
}

FarmLayout rotate_to_wind_frame(const FarmLayout& layout) {
  const double phi = layout.ambient.wind_direction;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  FarmLayout rotated = layout;
  for (auto& t : rotated.turbines) {
    const double x = t.x;
    const double y = t.y;
    t.x = c * x + s * y;
    t.y = -s * x + c * y;
  }
  rotated.ambient.wind_direction = 0.0;
  return rotated;
}

FarmLayout make_row_layout(int count, const TurbineSpec& spec, const Ambient& ambient,
                           double spacing_diameters) {
  if (count < 1) throw std::invalid_argument("turbine count must be >= 1");
  FarmLayout layout;
  layout.ambient = ambient;
  layout.turbines.reserve(count);
  for (int i = 0; i < count; ++i)
    layout.turbines.push_back({spec, i * spacing_diameters * spec.rotor_diameter, 0.0});
  return layout;
}

FlowAtTurbines effective_flow(const FarmState& state) {
  state.validate();
  const FarmLayout frame = rotate_to_wind_frame(state.layout);
  const int n = frame.count();
  std::vector<WakeGeometry> geometries;
  geometries.reserve(n);
  for (int i = 0; i < n; ++i)
    geometries.push_back(
        make_wake_geometry(frame.turbines[i].spec, state.setpoints[i], frame.ambient));

  FlowAtTurbines flow;
  flow.u = Eigen::VectorXd::Constant(n, frame.ambient.u_inf);
  flow.theta = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double deficit = 0.0;
    double skew = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = frame.turbines[i].x - frame.turbines[j].x;
      if (dx <= 0.0) continue;  // only strictly upstream wakes act
      const WakeSample sample =
          sample_wake(geometries[j], dx, frame.turbines[i].y - frame.turbines[j].y,
                      frame.turbines[i].spec.hub_height);
      deficit += frame.ambient.u_inf - sample.u;
      skew += sample.theta;
    }
    flow.u[i] = std::clamp(frame.ambient.u_inf - deficit, 0.0, frame.ambient.u_inf);
    flow.theta[i] = skew;
  }
  return flow;
}

Eigen::VectorXd effective_velocities(const FarmState& state) { return effective_flow(state).u; }

FarmPower farm_power_direct(const FarmState& state, const PowerModel& model) {
  FarmPower result;
  result.velocities = effective_velocities(state);
  const int n = state.layout.count();
  result.per_turbine.resize(n);
  for (int i = 0; i < n; ++i)
    result.per_turbine[i] = turbine_power(state.layout.turbines[i].spec, state.setpoints[i],
                                          result.velocities[i], model);
  result.total = result.per_turbine.sum();
  return result;
}

double farm_power_wta(const FarmState& state, const WtaPartition& partition,
                      const PowerModel& model) {
  partition.validate(state.layout.count());
  const FarmPower direct = farm_power_direct(state, model);
  double total = 0.0;
  for (size_t m = 0; m < partition.groups.size(); ++m) {
    for (int id : partition.groups[m]) total += direct.per_turbine[id];
    if (m > 0) total -= direct.per_turbine[partition.groups[m].front()];
  }
  return total;
}

WtaPartition build_partition(int turbine_count, int group_size) {
  if (turbine_count < 1) throw std::invalid_argument("turbine count must be >= 1");
  if (group_size < 2) throw std::invalid_argument("group size must be >= 2");
  WtaPartition partition;
  if (turbine_count <= group_size) {
    partition.groups.emplace_back();
    for (int i = 0; i < turbine_count; ++i) partition.groups.back().push_back(i);
    return partition;
  }
  const int stride = group_size - 1;
  if ((turbine_count - 1) % stride != 0)
    throw std::invalid_argument(
        "turbine count " + std::to_string(turbine_count) +
        " does not tile into overlapping groups of " + std::to_string(group_size) +
        "; need count = 1 (mod " + std::to_string(stride) + ")");
  const int num_groups = (turbine_count - 1) / stride;
  for (int m = 0; m < num_groups; ++m) {
    std::vector<int> group(group_size);
    for (int k = 0; k < group_size; ++k) group[k] = m * stride + k;
    partition.groups.push_back(std::move(group));
    if (m > 0) partition.high_level_ids.push_back(m * stride);
  }
  return partition;
}

Eigen::MatrixXd rasterize_flow(const FarmState& state, double x0, double x1, double y0,
                               double y1, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("raster resolution must be positive");
  state.validate();
  const FarmLayout frame = rotate_to_wind_frame(state.layout);
  const int n = frame.count();
  std::vector<WakeGeometry> geometries;
  geometries.reserve(n);
  for (int i = 0; i < n; ++i)
    geometries.push_back(
        make_wake_geometry(frame.turbines[i].spec, state.setpoints[i], frame.ambient));

  const double phi = state.layout.ambient.wind_direction;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double dx = nx > 1 ? (x1 - x0) / (nx - 1) : 0.0;
  const double dy = ny > 1 ? (y1 - y0) / (ny - 1) : 0.0;

  Eigen::MatrixXd grid(ny, nx);
  for (int r = 0; r < ny; ++r) {
    const double y = y0 + r * dy;
    for (int col = 0; col < nx; ++col) {
      const double x = x0 + col * dx;
      // original-frame cell -> wind frame
      const double wx = c * x + s * y;
      const double wy = -s * x + c * y;
      double deficit = 0.0;
      for (int j = 0; j < n; ++j) {
        const WakeSample sample = sample_wake(geometries[j], wx - frame.turbines[j].x,
                                              wy - frame.turbines[j].y,
                                              frame.turbines[j].spec.hub_height);
        deficit += frame.ambient.u_inf - sample.u;
      }
      grid(r, col) = std::clamp(frame.ambient.u_inf - deficit, 0.0, frame.ambient.u_inf);
    }
  }
  return grid;
}

}  // namespace wf
