#include "wf/wake.hpp"

#include <algorithm>
#include <cmath>

namespace wf {

namespace {
constexpr double kAlphaCoef = 0.58;   // k_alpha in the core-length law
constexpr double kBetaCoef = 0.077;   // k_beta
constexpr double kGrowthSlope = 0.38;
constexpr double kGrowthOffset = 0.004;
constexpr double kMinNormDistance = 0.1;  // clamp for the added-TI power law
}  // namespace

double thrust_coefficient(double alpha) {
  if (!(alpha >= 0.0 && alpha <= kMaxAxialInduction + 1e-12))
    throw std::domain_error("axial induction out of [0, 1/3]");
  return 4.0 * alpha * (1.0 - alpha);
}

double core_velocity(const Ambient& ambient, double ct) {
  if (!(ct >= 0.0 && ct < 1.0)) throw std::domain_error("thrust coefficient out of [0, 1)");
  return ambient.u_inf * std::sqrt(1.0 - ct);
}

double turbulence_intensity(const Ambient& ambient, double alpha, double downstream_distance,
                            const TurbineSpec& spec) {
  if (alpha == 0.0) return ambient.turbulence_intensity;
  const double s = std::max(downstream_distance / spec.rotor_diameter, kMinNormDistance);
  const double added = 0.9 * std::pow(alpha, 0.8) *
                       std::pow(ambient.turbulence_intensity, 0.1) * std::pow(s, -0.32);
  return std::hypot(ambient.turbulence_intensity, added);
}

double potential_core_length(const TurbineSpec& spec, double gamma, double ct,
                             double ambient_ti) {
  const double cg = std::cos(gamma);
  if (!(ct * cg < 1.0)) throw std::domain_error("C_T cos(gamma) must be < 1");
  const double numerator = spec.rotor_diameter * cg * (1.0 + std::sqrt(1.0 - ct * cg));
  const double denominator =
      std::sqrt(2.0) * (4.0 * kAlphaCoef * ambient_ti + 2.0 * kBetaCoef * std::sqrt(1.0 - ct));
  return numerator / denominator;
}

double near_wake_skew(double gamma, double ct) {
  const double cg = std::cos(gamma);
  if (!(ct * cg < 1.0)) throw std::domain_error("C_T cos(gamma) must be < 1");
  return 0.3 * gamma / cg * (1.0 - std::sqrt(1.0 - ct * cg));
}

double rotor_velocity(const Ambient& ambient, double gamma, double beta, double ct) {
  const double cgb = std::cos(gamma) * std::cos(beta);
  if (!(ct * cgb < 1.0)) throw std::domain_error("C_T cos(gamma) cos(beta) must be < 1");
  // x/(2(1-sqrt(1-x))) == (1+sqrt(1-x))/2, which stays finite as C_T -> 0
  // (the raw form divides by an underflowing difference)
  return ambient.u_inf * 0.5 * (1.0 + std::sqrt(1.0 - ct * cgb));
}

std::pair<double, double> initial_wake_widths(const TurbineSpec& spec, const Ambient& ambient,
                                              double gamma, double beta, double alpha,
                                              double ct) {
  const double u0 = core_velocity(ambient, ct);
  const double ur = rotor_velocity(ambient, gamma, beta, ct);
  const double sigma_z0 =
      0.5 * spec.rotor_diameter * std::sqrt(ur / (ambient.u_inf + u0));
  const double sigma_y0 = sigma_z0 * std::cos(gamma) * std::cos(alpha);
  return {sigma_y0, sigma_z0};
}

WakeGeometry make_wake_geometry(const TurbineSpec& spec, const Setpoint& setpoint,
                                const Ambient& ambient) {
  const double ct = thrust_coefficient(setpoint.alpha);
  WakeGeometry g;
  g.u_inf = ambient.u_inf;
  g.hub_height = spec.hub_height;
  g.rotor_diameter = spec.rotor_diameter;
  g.alpha = setpoint.alpha;
  g.ambient_ti = ambient.turbulence_intensity;
  g.u0 = core_velocity(ambient, ct);
  g.x0 = potential_core_length(spec, setpoint.gamma, ct, ambient.turbulence_intensity);
  g.theta_c0 = near_wake_skew(setpoint.gamma, ct);
  g.u_r = rotor_velocity(ambient, setpoint.gamma, setpoint.beta, ct);
  std::tie(g.sigma_y0, g.sigma_z0) =
      initial_wake_widths(spec, ambient, setpoint.gamma, setpoint.beta, setpoint.alpha, ct);
  g.k_y = g.k_z = kGrowthSlope * ambient.turbulence_intensity + kGrowthOffset;
  g.c0 = ambient.u_inf > 0.0 ? 1.0 - g.u0 / ambient.u_inf : 0.0;
  g.m0 = g.c0 * (2.0 - g.c0);
  g.e0 = g.c0 * g.c0 - 3.0 * std::exp(1.0 / 12.0) * g.c0 + 3.0 * std::exp(1.0 / 3.0);
  return g;
}

std::pair<double, double> wake_widths(const WakeGeometry& geometry, double downstream_distance,
                                      double ti_local) {
  if (!(downstream_distance >= 0.0)) throw std::domain_error("downstream distance must be >= 0");
  if (downstream_distance <= geometry.x0) return {geometry.sigma_y0, geometry.sigma_z0};
  const double k = kGrowthSlope * ti_local + kGrowthOffset;
  const double growth = k * (downstream_distance - geometry.x0);
  return {growth + geometry.sigma_y0, growth + geometry.sigma_z0};
}

double far_wake_deflection(const WakeGeometry& geometry, double downstream_distance,
                           double sigma_y, double sigma_z) {
  if (downstream_distance <= geometry.x0) return geometry.theta_c0 * downstream_distance;
  if (geometry.m0 <= 0.0) return 0.0;  // no deficit, no deflection
  const double root_m0 = std::sqrt(geometry.m0);
  const double expansion =
      std::sqrt(sigma_y * sigma_z / (geometry.sigma_y0 * geometry.sigma_z0));
  const double log_term = std::log(((1.6 + root_m0) * (1.6 * expansion - root_m0)) /
                                   ((1.6 - root_m0) * (1.6 * expansion + root_m0)));
  const double prefactor =
      geometry.theta_c0 * geometry.e0 / 5.2 *
      std::sqrt(geometry.sigma_y0 * geometry.sigma_z0 / (geometry.k_y * geometry.k_z * geometry.m0));
  return geometry.theta_c0 * geometry.x0 + prefactor * log_term;
}

WakeSample sample_wake(const WakeGeometry& geometry, double dx, double dy, double z) {
  if (!(dx > 0.0) || dx > geometry.window()) return {geometry.u_inf, 0.0};

  Ambient ambient;
  ambient.u_inf = geometry.u_inf;
  ambient.turbulence_intensity = geometry.ambient_ti;
  const double ti = turbulence_intensity(ambient, geometry.alpha, dx,
                                         {.rotor_diameter = geometry.rotor_diameter,
                                          .hub_height = geometry.hub_height});
  const auto [sigma_y, sigma_z] = wake_widths(geometry, dx, ti);
  const double deflection = far_wake_deflection(geometry, dx, sigma_y, sigma_z);

  const double radicand = std::clamp(
      1.0 - geometry.sigma_y0 * geometry.sigma_z0 * geometry.m0 / (sigma_y * sigma_z), 0.0, 1.0);
  const double amplitude = 1.0 - std::sqrt(radicand);

  const double gy = std::exp(-(dy - deflection) * (dy - deflection) / (2.0 * sigma_y * sigma_y));
  const double gz = std::exp(-(z - geometry.hub_height) * (z - geometry.hub_height) /
                             (2.0 * sigma_z * sigma_z));
  const double u = std::clamp(geometry.u_inf * (1.0 - amplitude * gy * gz), 0.0, geometry.u_inf);

  const double sy_off = dy - deflection + sigma_y;
  const double theta =
      geometry.theta_c0 * std::exp(-sy_off * sy_off / (2.0 * sigma_y * sigma_y)) * gz;
  return {u, theta};
}

WakeSample wake_velocity_at(const Eigen::Vector2d& turbine_position, const TurbineSpec& spec,
                            const Setpoint& setpoint, const Ambient& ambient,
                            const Eigen::Vector3d& query_point) {
  const WakeGeometry geometry = make_wake_geometry(spec, setpoint, ambient);
  return sample_wake(geometry, query_point.x() - turbine_position.x(),
                     query_point.y() - turbine_position.y(), query_point.z());
}

}  // namespace wf
