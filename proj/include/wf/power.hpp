#pragma once

#include <array>
#include <string>
#include <vector>

#include "wf/types.hpp"

namespace wf {

enum class CoefficientKind { CosinePower, Fitted };

/// Misalignment-loss curve, either cos^p or one of the fitted curves
/// (cubic polynomial for yaw, sinusoid series for tilt, both taking the
/// angle in degrees). Fitted curves are shifted by `normalization_offset`
/// so the coefficient is exactly 1 at zero misalignment, and every
/// evaluation is clamped to [0, 1].
struct CoefficientModel {
  CoefficientKind kind = CoefficientKind::CosinePower;
  double exponent = 3.0;
  std::vector<double> poly_coeffs;                 // ascending powers of the angle (deg)
  std::vector<std::array<double, 3>> wave_terms;   // {omega, cos amp, sin amp}, angle in deg
  double normalization_offset = 0.0;

  static CoefficientModel cosine_power(double p = 3.0);
  static CoefficientModel fitted_yaw();
  static CoefficientModel fitted_tilt();

  double value(double angle_rad) const;

 private:
  double raw(double angle_deg) const;
};

/// C_p = 4a(1-a)^2, maximal 16/27 at a = 1/3.
double power_coefficient(double alpha);

double yaw_coefficient(const CoefficientModel& model, double gamma_rad);
double tilt_coefficient(const CoefficientModel& model, double beta_rad);

struct PowerModel {
  CoefficientModel yaw_model = CoefficientModel::cosine_power();
  CoefficientModel tilt_model = CoefficientModel::cosine_power();
  double air_density = 1.225;  // kg/m^3

  static PowerModel cosine();
  static PowerModel fitted();
  /// "cosine" or "fitted"; throws std::invalid_argument otherwise.
  static PowerModel from_name(const std::string& name);
};

/// Steady-state electrical power at effective velocity u, capped at the
/// turbine rating.
double turbine_power(const TurbineSpec& spec, const Setpoint& setpoint, double u,
                     const PowerModel& model);

}  // namespace wf
