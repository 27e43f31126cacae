#include "wf/del.hpp"

#include <cmath>

namespace wf {

std::pair<double, double> del_components(double gamma_deg) {
  if (!(std::abs(gamma_deg) <= 45.0 + 1e-9))
    throw std::domain_error("yaw out of [-45deg, 45deg]");
  const double del_y = 0.01 * gamma_deg * gamma_deg - 0.59 * gamma_deg + 585.6;
  const double del_x = -0.07 * gamma_deg * gamma_deg + 3.99 * gamma_deg + 76.69;
  return {del_y, del_x};
}

DelReport build_del_report(const FarmState& state, const PowerModel& model) {
  const int n = state.layout.count();
  DelReport report;
  report.del_y.resize(n);
  report.del_x.resize(n);
  report.magnitude.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto [dy, dx] = del_components(rad2deg(state.setpoints[i].gamma));
    report.del_y[i] = dy;
    report.del_x[i] = dx;
    report.magnitude[i] = std::hypot(dy, dx);
  }
  report.total_magnitude = report.magnitude.sum();
  report.farm_power = farm_power_direct(state, model).total;
  if (report.farm_power > 0.0)
    report.avg_del_per_power = report.total_magnitude / report.farm_power;
  return report;
}

std::optional<double> avg_del_per_power(const FarmState& state, const PowerModel& model) {
  return build_del_report(state, model).avg_del_per_power;
}

}  // namespace wf
