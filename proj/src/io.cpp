#include "wf/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace wf {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_flow_csv(const std::filesystem::path& path, const Eigen::MatrixXd& grid, double x0,
                    double x1, double y0, double y1) {
  std::ofstream out = open_for_write(path);
  out << "x_m,y_m,u_ms\n";
  const int ny = static_cast<int>(grid.rows());
  const int nx = static_cast<int>(grid.cols());
  const double dx = nx > 1 ? (x1 - x0) / (nx - 1) : 0.0;
  const double dy = ny > 1 ? (y1 - y0) / (ny - 1) : 0.0;
  for (int r = 0; r < ny; ++r)
    for (int c = 0; c < nx; ++c)
      out << format_double(x0 + c * dx) << ',' << format_double(y0 + r * dy) << ','
          << format_double(grid(r, c)) << '\n';
}

void write_flow_ppm(const std::filesystem::path& path, const Eigen::MatrixXd& grid,
                    double u_max) {
  if (!(u_max > 0.0)) throw std::invalid_argument("u_max must be positive");
  std::ofstream out = open_for_write(path);
  const int ny = static_cast<int>(grid.rows());
  const int nx = static_cast<int>(grid.cols());
  out << "P6\n" << nx << ' ' << ny << "\n255\n";
  for (int r = ny - 1; r >= 0; --r)  // top image row = max y
    for (int c = 0; c < nx; ++c) {
      const double scaled = std::clamp(grid(r, c) / u_max, 0.0, 1.0);
      const auto intensity = static_cast<unsigned char>(std::lround(255.0 * scaled));
      for (int ch = 0; ch < 3; ++ch) out.put(static_cast<char>(intensity));
    }
}

void write_power_csv(const std::filesystem::path& path, const FarmState& state,
                     const FarmPower& power) {
  std::ofstream out = open_for_write(path);
  out << "turbine,x_m,y_m,alpha,gamma_deg,beta_deg,u_eff_ms,power_w\n";
  for (int i = 0; i < state.layout.count(); ++i) {
    const auto& t = state.layout.turbines[i];
    const auto& sp = state.setpoints[i];
    out << (i + 1) << ',' << format_double(t.x) << ',' << format_double(t.y) << ','
        << format_double(sp.alpha) << ',' << format_double(rad2deg(sp.gamma)) << ','
        << format_double(rad2deg(sp.beta)) << ',' << format_double(power.velocities[i]) << ','
        << format_double(power.per_turbine[i]) << '\n';
  }
}

void write_training_curve_csv(const std::filesystem::path& path,
                              const std::vector<EpisodeStat>& curve) {
  std::ofstream out = open_for_write(path);
  out << "episode,mean_reward,mean_power_w,actor_loss,critic_loss,entropy\n";
  for (const auto& stat : curve)
    out << stat.episode << ',' << format_double(stat.mean_reward) << ','
        << format_double(stat.mean_power_w) << ',' << format_double(stat.actor_loss) << ','
        << format_double(stat.critic_loss) << ',' << format_double(stat.entropy) << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryRow>& trajectory) {
  std::ofstream out = open_for_write(path);
  out << "step,reward";
  const int n = trajectory.empty() ? 0 : static_cast<int>(trajectory.front().setpoints.size());
  for (int i = 1; i <= n; ++i)
    out << ",alpha_" << i << ",gamma_deg_" << i << ",beta_deg_" << i << ",power_w_" << i;
  out << '\n';
  for (const auto& row : trajectory) {
    out << row.step << ',' << format_double(row.reward);
    for (int i = 0; i < n; ++i)
      out << ',' << format_double(row.setpoints[i].alpha) << ','
          << format_double(rad2deg(row.setpoints[i].gamma)) << ','
          << format_double(rad2deg(row.setpoints[i].beta)) << ','
          << format_double(row.per_turbine_power[i]);
    out << '\n';
  }
}

}  // namespace wf
