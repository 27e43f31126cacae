#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wf {

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Control bounds shared by the optimizer, the environment and the baselines.
inline constexpr double kMaxAxialInduction = 1.0 / 3.0;
inline constexpr double kMaxYawRad = deg2rad(45.0);
inline constexpr double kMaxTiltRad = deg2rad(15.0);

/// Static geometry and rating of one turbine.
struct TurbineSpec {
  double rotor_diameter = 126.0;  // m
  double hub_height = 90.0;       // m
  double rated_power = 5.0e6;     // W

  double rotor_area() const { return 0.25 * kPi * rotor_diameter * rotor_diameter; }

  void validate() const {
    if (!(rotor_diameter > 0.0)) throw std::domain_error("rotor diameter must be positive");
    if (!(hub_height > 0.0)) throw std::domain_error("hub height must be positive");
    if (!(rated_power > 0.0)) throw std::domain_error("rated power must be positive");
  }
};

/// Per-turbine control triple. Angles in radians.
struct Setpoint {
  double alpha = kMaxAxialInduction;  // axial induction factor
  double gamma = 0.0;                 // yaw, rad
  double beta = 0.0;                  // tilt, rad

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= kMaxAxialInduction + 1e-12))
      throw std::domain_error("axial induction out of [0, 1/3]");
    if (!(std::abs(gamma) <= kMaxYawRad + 1e-12))
      throw std::domain_error("yaw out of [-45deg, 45deg]");
    if (!(std::abs(beta) <= kMaxTiltRad + 1e-12))
      throw std::domain_error("tilt out of [-15deg, 15deg]");
  }
};

/// Free-stream conditions. `wind_direction` is the flow heading in radians,
/// measured counter-clockwise from +x (config files use the meteorological
/// convention and are converted on load).
struct Ambient {
  double u_inf = 8.0;            // m/s
  double wind_direction = 0.0;   // rad, 0 = flow along +x
  double turbulence_intensity = 0.05;

  void validate() const {
    if (!(u_inf >= 0.0)) throw std::domain_error("free-stream speed must be >= 0");
    if (!(turbulence_intensity > 0.0 && turbulence_intensity < 1.0))
      throw std::domain_error("ambient turbulence intensity must be in (0, 1)");
    if (!std::isfinite(wind_direction)) throw std::domain_error("wind direction must be finite");
  }
};

}  // namespace wf
