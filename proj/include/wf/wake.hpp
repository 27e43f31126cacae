#pragma once

#include <utility>

#include <Eigen/Dense>

#include "wf/types.hpp"

namespace wf {

// Gaussian wake model of a single yawed/tilted rotor. All functions are pure;
// downstream distances are measured from the rotor plane along the wind (+x).

/// Actuator-disc closure between induction and thrust, C_T = 4a(1-a).
double thrust_coefficient(double alpha);

/// Velocity inside the potential core, u0 = u_inf*sqrt(1-C_T).
double core_velocity(const Ambient& ambient, double ct);

/// Local turbulence intensity sqrt(I0^2 + dI^2) with the power-law added
/// term; the normalized distance is clamped at 0.1 D to avoid the
/// singularity at the rotor plane.
double turbulence_intensity(const Ambient& ambient, double alpha, double downstream_distance,
                            const TurbineSpec& spec);

/// Potential-core length. `ambient_ti` is the ambient intensity I0; the
/// added wake turbulence has not developed in the near field.
double potential_core_length(const TurbineSpec& spec, double gamma, double ct,
                             double ambient_ti);

/// Near-wake deflection skew angle, odd in gamma.
double near_wake_skew(double gamma, double ct);

/// Initial wake widths (sigma_y0, sigma_z0) at the end of the potential core.
std::pair<double, double> initial_wake_widths(const TurbineSpec& spec, const Ambient& ambient,
                                              double gamma, double beta, double alpha, double ct);

/// Rotor-plane velocity with the tilt-modified closure; analytic limit
/// u_R = u_inf as C_T -> 0.
double rotor_velocity(const Ambient& ambient, double gamma, double beta, double ct);

/// Per-turbine wake constants, independent of the query point.
struct WakeGeometry {
  double x0 = 0.0;        // potential-core length, m
  double theta_c0 = 0.0;  // near-wake skew, rad
  double sigma_y0 = 0.0;  // initial lateral width, m
  double sigma_z0 = 0.0;  // initial vertical width, m
  double u0 = 0.0;        // core velocity, m/s
  double u_r = 0.0;       // rotor velocity, m/s
  double k_y = 0.0;       // growth rate at ambient intensity
  double k_z = 0.0;

  // context carried along so a sample needs only the geometry
  double u_inf = 0.0;
  double hub_height = 0.0;
  double rotor_diameter = 0.0;
  double alpha = 0.0;
  double ambient_ti = 0.0;
  double c0 = 0.0;  // 1 - u0/u_inf
  double m0 = 0.0;  // c0*(2-c0)
  double e0 = 0.0;  // c0^2 - 3 e^(1/12) c0 + 3 e^(1/3)

  double window() const { return 15.0 * rotor_diameter; }
};

WakeGeometry make_wake_geometry(const TurbineSpec& spec, const Setpoint& setpoint,
                                const Ambient& ambient);

/// Far-wake widths at `downstream_distance`; the growth rate is recomputed
/// from the supplied local intensity. Frozen at the initial widths inside
/// the potential core.
std::pair<double, double> wake_widths(const WakeGeometry& geometry, double downstream_distance,
                                      double ti_local);

/// Centerline deflection for downstream_distance > x0; continuous with the
/// near-wake branch theta_c0*x at x0. Zero when M0 = 0 (no deficit).
double far_wake_deflection(const WakeGeometry& geometry, double downstream_distance,
                           double sigma_y, double sigma_z);

struct WakeSample {
  double u = 0.0;      // m/s
  double theta = 0.0;  // local skew, rad
};

/// Wake velocity and skew at offsets (dx, dy, z) from the rotor position,
/// dx along the wind. Free stream outside the window (0, 15 D].
WakeSample sample_wake(const WakeGeometry& geometry, double dx, double dy, double z);

/// Spec-level entry point: wake of a turbine at `turbine_position` (wind
/// frame, wind along +x) evaluated at `query_point` = (x, y, z).
WakeSample wake_velocity_at(const Eigen::Vector2d& turbine_position, const TurbineSpec& spec,
                            const Setpoint& setpoint, const Ambient& ambient,
                            const Eigen::Vector3d& query_point);

}  // namespace wf
