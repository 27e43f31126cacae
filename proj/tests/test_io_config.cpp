#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "wf/baselines.hpp"
#include "wf/config.hpp"
#include "wf/io.hpp"

using namespace wf;
namespace fs = std::filesystem;

namespace {

const char* kLayoutDir = WF_SOURCE_DIR "/layouts";

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "wf_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("shipped farm layouts") {
  for (int count : {13, 16, 19, 22}) {
    const FarmFile farm =
        load_farm(fs::path(kLayoutDir) / ("farm" + std::to_string(count) + ".json"));
    CHECK(farm.layout.count() == count);
    CHECK(farm.air_density == 1.225);
    CHECK(farm.layout.ambient.u_inf == 8.0);
    CHECK(farm.layout.ambient.turbulence_intensity == 0.05);
    // met 270 deg = wind from the west = flow along +x
    CHECK(std::abs(farm.layout.ambient.wind_direction) < 1e-12);
    const FarmLayout reference = make_row_layout(
        count, farm.layout.turbines.front().spec, farm.layout.ambient, 7.0);
    for (int i = 0; i < count; ++i) {
      CHECK(farm.layout.turbines[i].x == reference.turbines[i].x);
      CHECK(farm.layout.turbines[i].y == reference.turbines[i].y);
    }
  }
}

TEST_CASE("farm config validation") {
  const fs::path dir = temp_dir();

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_farm(dir / "nope.json"), ConfigError);
  }

  SUBCASE("malformed json") {
    const fs::path path = dir / "broken.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_farm(path), ConfigError);
  }

  SUBCASE("unknown keys are rejected") {
    const fs::path path = dir / "extra.json";
    std::ofstream(path) << R"({"schema_version":1,"turbine":{"rotor_diameter_m":126,
      "hub_height_m":90,"rated_power_w":5e6},"ambient":{"u_inf_ms":8,
      "wind_direction_deg":270,"turbulence_intensity":0.05},
      "positions_m":[[0,0]],"surprise":2})";
    CHECK_THROWS_AS(load_farm(path), ConfigError);
  }

  SUBCASE("duplicate positions are rejected") {
    const fs::path path = dir / "dup.json";
    std::ofstream(path) << R"({"schema_version":1,"turbine":{"rotor_diameter_m":126,
      "hub_height_m":90,"rated_power_w":5e6},"ambient":{"u_inf_ms":8,
      "wind_direction_deg":270,"turbulence_intensity":0.05},
      "positions_m":[[0,0],[0,0]]})";
    CHECK_THROWS_AS(load_farm(path), ConfigError);
  }

  SUBCASE("round trip through save_farm") {
    const FarmFile farm = load_farm(fs::path(kLayoutDir) / "farm13.json");
    const fs::path path = dir / "roundtrip.json";
    save_farm(path, farm);
    const FarmFile again = load_farm(path);
    CHECK(again.layout.count() == 13);
    CHECK(again.layout.ambient.u_inf == farm.layout.ambient.u_inf);
    CHECK(again.layout.turbines[5].x == farm.layout.turbines[5].x);
  }
}

TEST_CASE("run config") {
  const fs::path dir = temp_dir();

  SUBCASE("defaults and overrides") {
    const fs::path path = dir / "run.json";
    std::ofstream(path) << R"({"schema_version":1,"model":"fitted","seed":7,
      "train":{"episodes":50,"workers":2},
      "grid":{"passes":2},
      "pid":{"kp":0.7}})";
    const RunConfig config = load_run_config(path);
    CHECK(config.model == "fitted");
    CHECK(config.seed == 7);
    CHECK(config.episodes == 50);
    CHECK(config.workers == 2);
    CHECK(config.episodes_per_batch == 10);
    CHECK(config.grid.passes == 2);
    CHECK(config.pid_gains.kp == 0.7);
    CHECK(config.pid_gains.ki == 0.1);
  }

  SUBCASE("schema violations are config errors") {
    const fs::path path = dir / "bad.json";
    std::ofstream(path) << R"({"schema_version":1,"train":{"episodes":-3}})";
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    std::ofstream(path, std::ios::trunc) << R"({"schema_version":1,"mystery":true})";
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    std::ofstream(path, std::ios::trunc) << R"({"schema_version":2})";
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
  }
}

TEST_CASE("csv and ppm writers") {
  const fs::path dir = temp_dir();

  SUBCASE("flow csv carries the full grid") {
    Eigen::MatrixXd grid(2, 3);
    grid << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    const fs::path path = dir / "flow.csv";
    write_flow_csv(path, grid, 0.0, 20.0, -5.0, 5.0);
    const std::string text = slurp(path);
    CHECK(text ==
          "x_m,y_m,u_ms\n"
          "0,-5,1\n10,-5,2\n20,-5,3\n"
          "0,5,4\n10,5,5\n20,5,6\n");
  }

  SUBCASE("ppm header matches the grid and intensity is affine") {
    Eigen::MatrixXd grid(2, 3);
    grid << 0.0, 4.0, 8.0, 8.0, 2.0, 0.0;
    const fs::path path = dir / "flow.ppm";
    write_flow_ppm(path, grid, 8.0);
    const std::string bytes = slurp(path);
    CHECK(bytes.substr(0, 9) == "P6\n3 2\n25");
    const size_t header = bytes.find("255\n") + 4;
    REQUIRE(bytes.size() == header + 3 * 2 * 3);
    // top image row is the max-y grid row (row 1): 8, 2, 0
    CHECK(static_cast<unsigned char>(bytes[header + 0]) == 255);
    CHECK(static_cast<unsigned char>(bytes[header + 3]) == 64);
    CHECK(static_cast<unsigned char>(bytes[header + 6]) == 0);
    // bottom row: 0, 4, 8
    CHECK(static_cast<unsigned char>(bytes[header + 9]) == 0);
    CHECK(static_cast<unsigned char>(bytes[header + 12]) == 128);
    CHECK(static_cast<unsigned char>(bytes[header + 15]) == 255);
  }

  SUBCASE("deterministic output files") {
    Eigen::MatrixXd grid(3, 4);
    for (Eigen::Index i = 0; i < grid.size(); ++i) grid.data()[i] = std::sqrt(2.0) * i / 7.0;
    const fs::path a = dir / "a.csv";
    const fs::path b = dir / "b.csv";
    write_flow_csv(a, grid, 0.0, 1.0, 0.0, 1.0);
    write_flow_csv(b, grid, 0.0, 1.0, 0.0, 1.0);
    CHECK(slurp(a) == slurp(b));
  }

  SUBCASE("format_double survives a parse round trip") {
    for (double v : {1.0 / 3.0, 2317198.528901866, 1e-17, -0.0, 5.267718}) {
      CHECK(std::stod(format_double(v)) == v);
    }
  }
}
