#include <doctest.h>

#include <cmath>

#include "wf/baselines.hpp"
#include "wf/farm.hpp"
#include "wf/rng.hpp"

using namespace wf;

namespace {

const TurbineSpec kSpec{126.0, 90.0, 5.0e6};

Ambient ambient(double ti = 0.1, double direction = 0.0) {
  Ambient a;
  a.u_inf = 8.0;
  a.wind_direction = direction;
  a.turbulence_intensity = ti;
  return a;
}

FarmState random_state(int count, Rng& rng, double ti) {
  FarmState state = greedy_baseline(make_row_layout(count, kSpec, ambient(ti)));
  for (auto& sp : state.setpoints)
    sp = {rng.uniform(0.02, kMaxAxialInduction), rng.uniform(-kMaxYawRad, kMaxYawRad),
          rng.uniform(-kMaxTiltRad, kMaxTiltRad)};
  return state;
}

}  // namespace

TEST_CASE("wind-frame rotation is rigid") {
  FarmLayout layout = make_row_layout(4, kSpec, ambient());
  layout.turbines[1].y = 300.0;
  layout.turbines[3].y = -150.0;

  SUBCASE("identity when the flow is along +x") {
    const FarmLayout rotated = rotate_to_wind_frame(layout);
    for (int i = 0; i < layout.count(); ++i) {
      CHECK(rotated.turbines[i].x == layout.turbines[i].x);
      CHECK(rotated.turbines[i].y == layout.turbines[i].y);
    }
  }

  SUBCASE("180 degrees negates both coordinates") {
    layout.ambient.wind_direction = kPi;
    const FarmLayout rotated = rotate_to_wind_frame(layout);
    for (int i = 0; i < layout.count(); ++i) {
      CHECK(rotated.turbines[i].x == doctest::Approx(-layout.turbines[i].x).epsilon(1e-12));
      CHECK(rotated.turbines[i].y == doctest::Approx(-layout.turbines[i].y).epsilon(1e-12));
    }
  }

  SUBCASE("pairwise distances preserved for any direction") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
      layout.ambient.wind_direction = rng.uniform(-kPi, kPi);
      const FarmLayout rotated = rotate_to_wind_frame(layout);
      for (int i = 0; i < layout.count(); ++i)
        for (int j = i + 1; j < layout.count(); ++j) {
          const double before = std::hypot(layout.turbines[i].x - layout.turbines[j].x,
                                           layout.turbines[i].y - layout.turbines[j].y);
          const double after = std::hypot(rotated.turbines[i].x - rotated.turbines[j].x,
                                          rotated.turbines[i].y - rotated.turbines[j].y);
          CHECK(after == doctest::Approx(before).epsilon(1e-9));
        }
    }
  }
}

TEST_CASE("effective velocities") {
  SUBCASE("single turbine sees free stream") {
    const FarmState state = greedy_baseline(make_row_layout(1, kSpec, ambient()));
    CHECK(effective_velocities(state)[0] == 8.0);
  }

  SUBCASE("three-turbine frozen chain at I0=0.1") {
    const FarmState state = greedy_baseline(make_row_layout(3, kSpec, ambient()));
    const Eigen::VectorXd u = effective_velocities(state);
    CHECK(u[0] == 8.0);
    CHECK(u[1] == doctest::Approx(6.824080938280228).epsilon(1e-9));
    CHECK(u[2] == doctest::Approx(6.428900719099343).epsilon(1e-9));
  }

  SUBCASE("pairwise case matches the single-wake sample") {
    const FarmState state = greedy_baseline(make_row_layout(2, kSpec, ambient()));
    const WakeSample s =
        wake_velocity_at({0.0, 0.0}, kSpec, state.setpoints[0], state.layout.ambient,
                         {7 * 126.0, 0.0, 90.0});
    CHECK(effective_velocities(state)[1] == doctest::Approx(s.u).epsilon(1e-12));
  }

  SUBCASE("most-upstream turbine always at free stream") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const FarmState state = random_state(6, rng, 0.05);
      CHECK(effective_velocities(state)[0] == 8.0);
    }
  }

  SUBCASE("adding a turbine never speeds anyone up") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
      FarmState big = random_state(7, rng, 0.05);
      FarmState small = big;
      small.layout.turbines.pop_back();
      small.setpoints.pop_back();
      const Eigen::VectorXd u_small = effective_velocities(small);
      const Eigen::VectorXd u_big = effective_velocities(big);
      for (int i = 0; i < small.layout.count(); ++i) CHECK(u_big[i] <= u_small[i] + 1e-12);
    }
  }

  SUBCASE("wake steering frees the downstream rotor") {
    FarmState state = greedy_baseline(make_row_layout(2, kSpec, ambient(0.05)));
    const double aligned = effective_velocities(state)[1];
    state.setpoints[0].gamma = deg2rad(25.0);
    const double steered = effective_velocities(state)[1];
    CHECK(steered > aligned);
  }

  SUBCASE("rotating the whole problem changes nothing") {
    Rng rng(35);
    for (int trial = 0; trial < 10; ++trial) {
      FarmState state = random_state(5, rng, 0.05);
      state.layout.turbines[2].y = 130.0;
      const Eigen::VectorXd reference = effective_velocities(state);
      const double angle = rng.uniform(-kPi, kPi);
      FarmState rotated = state;
      rotated.layout.ambient.wind_direction += angle;
      const double c = std::cos(angle), s = std::sin(angle);
      for (auto& t : rotated.layout.turbines) {
        const double x = t.x, y = t.y;
        t.x = c * x - s * y;
        t.y = s * x + c * y;
      }
      const Eigen::VectorXd moved = effective_velocities(rotated);
      for (int i = 0; i < state.layout.count(); ++i)
        CHECK(moved[i] == doctest::Approx(reference[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("farm power") {
  const PowerModel model = PowerModel::cosine();

  SUBCASE("zero induction everywhere means zero power") {
    FarmState state = greedy_baseline(make_row_layout(4, kSpec, ambient()));
    for (auto& sp : state.setpoints) sp.alpha = 0.0;
    CHECK(farm_power_direct(state, model).total == 0.0);
  }

  SUBCASE("single turbine equals turbine_power") {
    const FarmState state = greedy_baseline(make_row_layout(1, kSpec, ambient()));
    CHECK(farm_power_direct(state, model).total ==
          doctest::Approx(turbine_power(kSpec, state.setpoints[0], 8.0, model)).epsilon(1e-12));
  }

  SUBCASE("13-turbine greedy frozen regression") {
    const FarmState at_i01 = greedy_baseline(make_row_layout(13, kSpec, ambient(0.1)));
    CHECK(farm_power_direct(at_i01, model).total ==
          doctest::Approx(16983479.140469715).epsilon(1e-9));
    const FarmState at_i005 = greedy_baseline(make_row_layout(13, kSpec, ambient(0.05)));
    CHECK(farm_power_direct(at_i005, model).total ==
          doctest::Approx(7697396.314241218).epsilon(1e-9));
  }
}

TEST_CASE("WTA partition") {
  SUBCASE("table layouts") {
    const WtaPartition p13 = build_partition(13, 4);
    REQUIRE(p13.num_groups() == 4);
    CHECK(p13.groups[0] == std::vector<int>{0, 1, 2, 3});
    CHECK(p13.groups[1] == std::vector<int>{3, 4, 5, 6});
    CHECK(p13.groups[2] == std::vector<int>{6, 7, 8, 9});
    CHECK(p13.groups[3] == std::vector<int>{9, 10, 11, 12});
    CHECK(p13.high_level_ids == std::vector<int>{3, 6, 9});
    p13.validate(13);

    const WtaPartition p22 = build_partition(22, 4);
    REQUIRE(p22.num_groups() == 7);
    CHECK(p22.groups.back() == std::vector<int>{18, 19, 20, 21});
    p22.validate(22);

    CHECK(build_partition(16, 4).num_groups() == 5);
    CHECK(build_partition(19, 4).num_groups() == 6);
  }

  SUBCASE("single group when the farm is small") {
    const WtaPartition p = build_partition(4, 4);
    REQUIRE(p.num_groups() == 1);
    CHECK(p.groups[0] == std::vector<int>{0, 1, 2, 3});
    CHECK(build_partition(1, 4).groups[0] == std::vector<int>{0});
  }

  SUBCASE("incompatible counts are rejected with the required congruence") {
    CHECK_THROWS_WITH_AS(build_partition(14, 4), doctest::Contains("mod 3"),
                         std::invalid_argument);
  }

  SUBCASE("malformed partitions are rejected") {
    WtaPartition bad;
    bad.groups = {{0, 1}, {2, 3}};  // no overlap
    CHECK_THROWS_AS(bad.validate(4), std::invalid_argument);
    bad.groups = {{0, 1, 2}, {1, 2, 3}};  // two shared turbines
    CHECK_THROWS_AS(bad.validate(4), std::invalid_argument);
  }
}

TEST_CASE("WTA power identity") {
  const PowerModel model = PowerModel::cosine();
  Rng rng(41);
  for (int count : {13, 16, 19, 22}) {
    const WtaPartition partition = build_partition(count, 4);
    for (int trial = 0; trial < 25; ++trial) {
      const FarmState state = random_state(count, rng, 0.05);
      const double direct = farm_power_direct(state, model).total;
      const double wta = farm_power_wta(state, partition, model);
      CHECK(wta == doctest::Approx(direct).epsilon(1e-9));
    }
  }
  // single group reduces to the plain sum
  const FarmState state = greedy_baseline(make_row_layout(4, kSpec, ambient()));
  CHECK(farm_power_wta(state, build_partition(4, 4), model) ==
        doctest::Approx(farm_power_direct(state, model).total).epsilon(1e-12));
}

TEST_CASE("flow raster") {
  SUBCASE("empty farm is uniform free stream") {
    FarmState state;
    state.layout.ambient = ambient();
    const Eigen::MatrixXd grid = rasterize_flow(state, 0.0, 100.0, -50.0, 50.0, 8, 5);
    CHECK(grid.rows() == 5);
    CHECK(grid.cols() == 8);
    CHECK(grid.minCoeff() == 8.0);
    CHECK(grid.maxCoeff() == 8.0);
  }

  SUBCASE("hub cells reproduce effective velocities") {
    const FarmState state = greedy_baseline(make_row_layout(3, kSpec, ambient()));
    const Eigen::VectorXd u = effective_velocities(state);
    // grid row y=0 passes through the hubs, x spacing lands on them exactly
    const Eigen::MatrixXd grid = rasterize_flow(state, 0.0, 2 * 882.0, 0.0, 0.0, 3, 1);
    for (int i = 0; i < 3; ++i) CHECK(grid(0, i) == doctest::Approx(u[i]).epsilon(1e-12));
  }

  SUBCASE("cells stay within [0, u_inf]") {
    Rng rng(43);
    const FarmState state = random_state(5, rng, 0.05);
    const Eigen::MatrixXd grid = rasterize_flow(state, -252.0, 5000.0, -400.0, 400.0, 40, 17);
    CHECK(grid.minCoeff() >= 0.0);
    CHECK(grid.maxCoeff() <= 8.0);
  }

  SUBCASE("resolution must be positive") {
    const FarmState state = greedy_baseline(make_row_layout(2, kSpec, ambient()));
    CHECK_THROWS_AS(rasterize_flow(state, 0, 1, 0, 1, 0, 3), std::invalid_argument);
  }
}
