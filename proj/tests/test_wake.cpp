#include <doctest.h>

#include <cmath>

#include "wf/rng.hpp"
#include "wf/wake.hpp"

using namespace wf;

namespace {

const TurbineSpec kSpec{126.0, 90.0, 5.0e6};

Ambient ambient(double u_inf = 8.0, double ti = 0.1) {
  Ambient a;
  a.u_inf = u_inf;
  a.turbulence_intensity = ti;
  return a;
}

Setpoint setpoint(double alpha, double gamma_deg = 0.0, double beta_deg = 0.0) {
  return {alpha, deg2rad(gamma_deg), deg2rad(beta_deg)};
}

Setpoint random_setpoint(Rng& rng) {
  return {rng.uniform(0.02, kMaxAxialInduction), rng.uniform(-kMaxYawRad, kMaxYawRad),
          rng.uniform(-kMaxTiltRad, kMaxTiltRad)};
}

}  // namespace

TEST_CASE("thrust coefficient closure") {
  CHECK(thrust_coefficient(0.0) == 0.0);
  CHECK(thrust_coefficient(1.0 / 3.0) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(thrust_coefficient(0.2) == doctest::Approx(0.64).epsilon(1e-12));
  CHECK_THROWS_AS(thrust_coefficient(-0.01), std::domain_error);
  CHECK_THROWS_AS(thrust_coefficient(0.5), std::domain_error);
}

TEST_CASE("core velocity") {
  CHECK(core_velocity(ambient(8.0), 8.0 / 9.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(core_velocity(ambient(8.0), 0.0) == 8.0);
  CHECK(core_velocity(ambient(0.0), 0.5) == 0.0);
  CHECK_THROWS_AS(core_velocity(ambient(8.0), 1.0), std::domain_error);
}

TEST_CASE("turbulence intensity") {
  const Ambient amb = ambient();
  CHECK(turbulence_intensity(amb, 0.0, 5 * 126.0, kSpec) == amb.turbulence_intensity);
  // frozen from the standalone oracle: alpha=1/3, I0=0.1, 5 D downstream
  CHECK(turbulence_intensity(amb, 1.0 / 3.0, 5 * 126.0, kSpec) ==
        doctest::Approx(0.20361577435590136).epsilon(1e-12));
  // decays back to ambient far downstream
  CHECK(turbulence_intensity(amb, 1.0 / 3.0, 1e7, kSpec) ==
        doctest::Approx(amb.turbulence_intensity).epsilon(1e-3));
  // clamp keeps the rotor-plane value finite and equal to the 0.1 D value
  CHECK(turbulence_intensity(amb, 0.3, 0.0, kSpec) ==
        turbulence_intensity(amb, 0.3, 0.1 * 126.0, kSpec));
}

TEST_CASE("potential core length") {
  const double ct = 8.0 / 9.0;
  CHECK(potential_core_length(kSpec, 0.0, ct, 0.1) ==
        doctest::Approx(419.2727267270823).epsilon(1e-12));
  // limiting algebra at C_T -> 0: numerator -> 2 D, denominator -> sqrt(2)(4 kA I0 + 2 kB)
  const double limit = 2.0 * 126.0 / (std::sqrt(2.0) * (4 * 0.58 * 0.1 + 2 * 0.077));
  CHECK(potential_core_length(kSpec, 0.0, 1e-12, 0.1) == doctest::Approx(limit).epsilon(1e-6));
  // strictly decreasing in ambient turbulence
  double prev = potential_core_length(kSpec, 0.0, ct, 0.02);
  for (double ti : {0.05, 0.1, 0.2, 0.4}) {
    const double x0 = potential_core_length(kSpec, 0.0, ct, ti);
    CHECK(x0 < prev);
    prev = x0;
  }
  CHECK(potential_core_length(kSpec, 0.0, ct, 0.05) > 0.0);
}

TEST_CASE("near-wake skew") {
  CHECK(near_wake_skew(0.0, 8.0 / 9.0) == 0.0);
  CHECK(near_wake_skew(deg2rad(20.0), 8.0 / 9.0) ==
        doctest::Approx(0.06621186152287806).epsilon(1e-12));
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const double gamma = rng.uniform(-kMaxYawRad, kMaxYawRad);
    const double ct = rng.uniform(0.0, 8.0 / 9.0);
    CHECK(near_wake_skew(-gamma, ct) == doctest::Approx(-near_wake_skew(gamma, ct)).epsilon(1e-12));
    CHECK(near_wake_skew(gamma, ct) * gamma >= 0.0);
  }
}

TEST_CASE("rotor velocity and initial widths") {
  const Ambient amb = ambient();
  const double ct = 8.0 / 9.0;
  CHECK(rotor_velocity(amb, 0.0, 0.0, ct) == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  CHECK(rotor_velocity(amb, 0.0, 0.0, 0.0) == amb.u_inf);  // analytic limit

  const auto [sy0, sz0] = initial_wake_widths(kSpec, amb, 0.0, 0.0, 1.0 / 3.0, ct);
  CHECK(sz0 == doctest::Approx(63.0 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK(sy0 == doctest::Approx(42.095684274114454).epsilon(1e-12));

  // alpha -> 0 makes the widths isotropic at zero misalignment
  const auto [sy_iso, sz_iso] = initial_wake_widths(kSpec, amb, 0.0, 0.0, 1e-9, 4e-9);
  CHECK(sy_iso == doctest::Approx(sz_iso).epsilon(1e-6));
}

TEST_CASE("wake widths grow linearly past the core") {
  const WakeGeometry g = make_wake_geometry(kSpec, setpoint(1.0 / 3.0), ambient());
  const auto [sy_at_x0, sz_at_x0] = wake_widths(g, g.x0, 0.1);
  CHECK(sy_at_x0 == g.sigma_y0);
  CHECK(sz_at_x0 == g.sigma_z0);
  // k = 0.38 I + 0.004
  const auto [sy, sz] = wake_widths(g, g.x0 + 100.0, 0.1);
  CHECK(sy == doctest::Approx(g.sigma_y0 + 0.042 * 100.0).epsilon(1e-12));
  CHECK(sz == doctest::Approx(g.sigma_z0 + 0.042 * 100.0).epsilon(1e-12));
  // frozen widths at 7 D with the local intensity of the full chain
  Ambient amb = ambient();
  const double ti_7d = turbulence_intensity(amb, 1.0 / 3.0, 7 * 126.0, kSpec);
  const auto [sy7, sz7] = wake_widths(g, 7 * 126.0, ti_7d);
  CHECK(sy7 == doctest::Approx(77.01346872171572).epsilon(1e-9));
  CHECK(sz7 == doctest::Approx(79.46551166235378).epsilon(1e-9));
}

TEST_CASE("deflection branches and oddness") {
  const Setpoint yawed = setpoint(1.0 / 3.0, 20.0);
  const WakeGeometry g = make_wake_geometry(kSpec, yawed, ambient());

  SUBCASE("zero yaw never deflects") {
    const WakeGeometry straight = make_wake_geometry(kSpec, setpoint(1.0 / 3.0), ambient());
    for (double dx : {10.0, 300.0, 900.0, 1800.0}) {
      const double ti = turbulence_intensity(ambient(), 1.0 / 3.0, dx, kSpec);
      const auto [sy, sz] = wake_widths(straight, dx, ti);
      CHECK(far_wake_deflection(straight, dx, sy, sz) == 0.0);
    }
  }

  SUBCASE("continuity at the end of the core") {
    const double near_branch = g.theta_c0 * g.x0;
    const auto [sy, sz] = wake_widths(g, g.x0, 0.1);
    const double far_branch = far_wake_deflection(g, g.x0 * (1.0 + 1e-12), sy, sz);
    CHECK(far_branch == doctest::Approx(near_branch).epsilon(1e-9));
  }

  SUBCASE("frozen anchor at 7 D, 20 degrees") {
    const double dx = 7 * 126.0;
    const double ti = turbulence_intensity(ambient(), 1.0 / 3.0, dx, kSpec);
    const auto [sy, sz] = wake_widths(g, dx, ti);
    CHECK(far_wake_deflection(g, dx, sy, sz) ==
          doctest::Approx(50.681507704146064).epsilon(1e-9));
  }

  SUBCASE("odd in gamma") {
    Rng rng(11);
    for (int i = 0; i < 40; ++i) {
      Setpoint sp = random_setpoint(rng);
      Setpoint mirrored = sp;
      mirrored.gamma = -sp.gamma;
      const WakeGeometry a = make_wake_geometry(kSpec, sp, ambient());
      const WakeGeometry b = make_wake_geometry(kSpec, mirrored, ambient());
      const double dx = rng.uniform(a.x0 * 1.01, 15 * 126.0);
      const double ti = turbulence_intensity(ambient(), sp.alpha, dx, kSpec);
      const auto [say, saz] = wake_widths(a, dx, ti);
      const auto [sby, sbz] = wake_widths(b, dx, ti);
      const double da = far_wake_deflection(a, dx, say, saz);
      const double db = far_wake_deflection(b, dx, sby, sbz);
      CHECK(da == doctest::Approx(-db).epsilon(1e-12));
    }
  }
}

TEST_CASE("wake velocity field") {
  const Eigen::Vector2d origin(0.0, 0.0);
  const Ambient amb = ambient();
  const Setpoint greedy = setpoint(1.0 / 3.0);

  SUBCASE("upstream and out-of-window queries see free stream") {
    CHECK(wake_velocity_at(origin, kSpec, greedy, amb, {-1.0, 0.0, 90.0}).u == amb.u_inf);
    CHECK(wake_velocity_at(origin, kSpec, greedy, amb, {0.0, 0.0, 90.0}).u == amb.u_inf);
    CHECK(wake_velocity_at(origin, kSpec, greedy, amb, {15 * 126.0 + 1.0, 0.0, 90.0}).u ==
          amb.u_inf);
    CHECK(wake_velocity_at(origin, kSpec, greedy, amb, {15 * 126.0, 0.0, 90.0}).u < amb.u_inf);
  }

  SUBCASE("two-turbine frozen reference at 7 D") {
    const WakeSample s = wake_velocity_at(origin, kSpec, greedy, amb, {7 * 126.0, 0.0, 90.0});
    CHECK(s.u == doctest::Approx(6.824080938280228).epsilon(1e-9));
  }

  SUBCASE("yawed frozen reference at 7 D") {
    const WakeSample s = wake_velocity_at(origin, kSpec, setpoint(1.0 / 3.0, 20.0), amb,
                                          {7 * 126.0, 0.0, 90.0});
    CHECK(s.u == doctest::Approx(7.071897910054119).epsilon(1e-9));
  }

  SUBCASE("null wake at zero induction") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector3d q(rng.uniform(-500.0, 2500.0), rng.uniform(-400.0, 400.0),
                              rng.uniform(0.0, 200.0));
      const WakeSample s = wake_velocity_at(origin, kSpec, setpoint(0.0), amb, q);
      CHECK(s.u == amb.u_inf);
      CHECK(s.theta == 0.0);
    }
  }

  SUBCASE("bounded and symmetric about the deflected centerline") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const Setpoint sp = random_setpoint(rng);
      const WakeGeometry g = make_wake_geometry(kSpec, sp, amb);
      const double dx = rng.uniform(1.0, 15 * 126.0);
      const double dy = rng.uniform(-600.0, 600.0);
      const double z = rng.uniform(0.0, 250.0);
      const WakeSample s = sample_wake(g, dx, dy, z);
      CHECK(s.u >= 0.0);
      CHECK(s.u <= amb.u_inf);

      const double ti = turbulence_intensity(amb, sp.alpha, dx, kSpec);
      const auto [sy, sz] = wake_widths(g, dx, ti);
      const double center = dx <= g.x0 ? g.theta_c0 * dx : far_wake_deflection(g, dx, sy, sz);
      const double mirrored = 2.0 * center - dy;
      CHECK(sample_wake(g, dx, mirrored, z).u == doctest::Approx(s.u).epsilon(1e-9));
    }
  }

  SUBCASE("deficit amplitude non-increasing downstream") {
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
      const Setpoint sp = random_setpoint(rng);
      const WakeGeometry g = make_wake_geometry(kSpec, sp, amb);
      double prev = 2.0;
      for (double dx = g.x0 * 1.001; dx <= 15 * 126.0; dx += 90.0) {
        const double ti = turbulence_intensity(amb, sp.alpha, dx, kSpec);
        const auto [sy, sz] = wake_widths(g, dx, ti);
        const double radicand =
            std::clamp(1.0 - g.sigma_y0 * g.sigma_z0 * g.m0 / (sy * sz), 0.0, 1.0);
        const double amplitude = 1.0 - std::sqrt(radicand);
        CHECK(amplitude <= prev + 1e-12);
        prev = amplitude;
      }
    }
  }

  SUBCASE("velocity continuity across the core boundary") {
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
      const Setpoint sp = random_setpoint(rng);
      const WakeGeometry g = make_wake_geometry(kSpec, sp, amb);
      const double dy = rng.uniform(-150.0, 150.0);
      // near branch at x0 vs the far branch in the limit from above
      const double near_branch = sample_wake(g, g.x0, dy, 90.0).u;
      const double far_branch = sample_wake(g, g.x0 * (1.0 + 1e-12), dy, 90.0).u;
      CHECK(far_branch == doctest::Approx(near_branch).epsilon(1e-9));
    }
  }

  SUBCASE("centerline velocity in the near wake equals the core velocity") {
    const WakeGeometry g = make_wake_geometry(kSpec, greedy, amb);
    const double u = sample_wake(g, 0.5 * g.x0, 0.0, 90.0).u;
    CHECK(u == doctest::Approx(g.u0).epsilon(1e-9));
  }
}
