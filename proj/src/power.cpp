#include "wf/power.hpp"

#include <algorithm>
#include <cmath>

namespace wf {

CoefficientModel CoefficientModel::cosine_power(double p) {
  CoefficientModel m;
  m.kind = CoefficientKind::CosinePower;
  m.exponent = p;
  return m;
}

CoefficientModel CoefficientModel::fitted_yaw() {
  CoefficientModel m;
  m.kind = CoefficientKind::Fitted;
  m.poly_coeffs = {0.0, 0.997, -0.000025, -0.0003};
  m.normalization_offset = 1.0 - m.raw(0.0);
  return m;
}

CoefficientModel CoefficientModel::fitted_tilt() {
  CoefficientModel m;
  m.kind = CoefficientKind::Fitted;
  m.poly_coeffs = {-0.185};
  m.wave_terms = {{0.105, 0.285, 0.014},
                  {0.209, -0.144, -0.017},
                  {0.314, 0.060, 0.011},
                  {0.419, -0.016, -0.005}};
  m.normalization_offset = 1.0 - m.raw(0.0);
  return m;
}

double CoefficientModel::raw(double angle_deg) const {
  double v = 0.0;
  double p = 1.0;
  for (double c : poly_coeffs) {
    v += c * p;
    p *= angle_deg;
  }
  for (const auto& [omega, a, b] : wave_terms)
    v += a * std::cos(omega * angle_deg) + b * std::sin(omega * angle_deg);
  return v;
}

double CoefficientModel::value(double angle_rad) const {
  if (kind == CoefficientKind::CosinePower)
    return std::clamp(std::pow(std::cos(angle_rad), exponent), 0.0, 1.0);
  return std::clamp(raw(rad2deg(angle_rad)) + normalization_offset, 0.0, 1.0);
}

double power_coefficient(double alpha) {
  if (!(alpha >= 0.0 && alpha <= kMaxAxialInduction + 1e-12))
    throw std::domain_error("axial induction out of [0, 1/3]");
  return 4.0 * alpha * (1.0 - alpha) * (1.0 - alpha);
}

double yaw_coefficient(const CoefficientModel& model, double gamma_rad) {
  if (!(std::abs(gamma_rad) <= kMaxYawRad + 1e-12))
    throw std::domain_error("yaw out of [-45deg, 45deg]");
  return model.value(gamma_rad);
}

double tilt_coefficient(const CoefficientModel& model, double beta_rad) {
  if (!(std::abs(beta_rad) <= kMaxTiltRad + 1e-12))
    throw std::domain_error("tilt out of [-15deg, 15deg]");
  return model.value(beta_rad);
}

PowerModel PowerModel::cosine() { return PowerModel{}; }

PowerModel PowerModel::fitted() {
  PowerModel m;
  m.yaw_model = CoefficientModel::fitted_yaw();
  m.tilt_model = CoefficientModel::fitted_tilt();
  return m;
}

PowerModel PowerModel::from_name(const std::string& name) {
  if (name == "cosine") return cosine();
  if (name == "fitted") return fitted();
  throw std::invalid_argument("unknown coefficient model '" + name + "' (cosine|fitted)");
}

double turbine_power(const TurbineSpec& spec, const Setpoint& setpoint, double u,
                     const PowerModel& model) {
  if (!(u >= 0.0)) throw std::domain_error("effective velocity must be >= 0");
  setpoint.validate();
  const double p = 0.5 * power_coefficient(setpoint.alpha) *
                   yaw_coefficient(model.yaw_model, setpoint.gamma) *
                   tilt_coefficient(model.tilt_model, setpoint.beta) * model.air_density *
                   spec.rotor_area() * u * u * u;
  return std::min(p, spec.rated_power);
}

}  // namespace wf
