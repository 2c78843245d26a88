#include <doctest.h>

#include <filesystem>

#include "dmnls/config.hpp"
#include "dmnls/text_io.hpp"

using namespace dmnls;

TEST_CASE("key-value parsing") {
  const auto kv = KeyValueConfig::parse("# header\n\n grid.n = 512  # trailing\ntime.dt=0.01\noutput.name = a b\n");
  CHECK(kv.get("grid.n") == "512");
  CHECK(kv.get("time.dt") == "0.01");
  CHECK(kv.get("output.name") == "a b");
  CHECK_FALSE(kv.has("grid.L"));
  CHECK_THROWS_AS(kv.get("grid.L"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("grid.n 512\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("= 3\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("grid.n =\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("grid.n = 1\ngrid.n = 2\n"), ConfigError);
  // round trip through the echo
  const auto again = KeyValueConfig::parse(kv.to_text());
  CHECK(again.values() == kv.values());
}

TEST_CASE("mapping to SimConfig") {
  SUBCASE("defaults") {
    const auto c = to_sim_config(KeyValueConfig{});
    CHECK(c.epsilon == 0.1);
    CHECK(c.n == 4096);
    CHECK(c.profile.d_av == 1.0);
    CHECK(c.quad_order == 16);
  }
  SUBCASE("every key") {
    const auto c = to_sim_config(KeyValueConfig::parse(
        "grid.n = 1024\ngrid.L = 300\ngrid.dealias = false\ndispersion.d_plus = 4\ndispersion.d_minus = 2\n"
        "dispersion.t_plus = 0.4\ndispersion.c = 2\ndispersion.quad_order = 8\ninitial.epsilon = 0.05\n"
        "time.dt = 0.02\ntime.t_end = 20\ntime.snapshots = 0, 1, 5, 20\nparallel.threads = 2\noutput.name = x\n"));
    CHECK(c.n == 1024);
    CHECK(c.length == 300.0);
    CHECK_FALSE(c.dealias);
    CHECK(c.profile.d_av == doctest::Approx(0.4 * 4 - 0.6 * 2));
    CHECK(c.profile.c == 2.0);
    CHECK(c.quad_order == 8);
    CHECK(c.epsilon == 0.05);
    CHECK(c.dt == 0.02);
    CHECK(c.t_end == 20.0);
    CHECK(c.snapshot_times == std::vector<double>{0, 1, 5, 20});
    CHECK(c.threads == 2);
  }
  SUBCASE("constant dispersion") {
    const auto c = to_sim_config(KeyValueConfig::parse("dispersion.kind = constant\ndispersion.d_av = 2\n"));
    CHECK(c.profile.d_av == 2.0);
    CHECK_THROWS_AS(to_sim_config(KeyValueConfig::parse("dispersion.kind = constant\ndispersion.d_plus = 2\n")),
                    ConfigError);
  }
  SUBCASE("errors name the key") {
    auto message = [](const std::string& text) {
      try {
        to_sim_config(KeyValueConfig::parse(text));
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string("no error");
    };
    CHECK(message("grid.m = 3\n").find("grid.m") != std::string::npos);
    CHECK(message("grid.n = 1000\n").find("n") != std::string::npos);
    CHECK(message("time.dt = fast\n").find("time.dt") != std::string::npos);
    CHECK(message("grid.n = -4\n").find("grid.n") != std::string::npos);
    CHECK(message("grid.dealias = maybe\n").find("grid.dealias") != std::string::npos);
    CHECK(message("dispersion.kind = wave\n").find("dispersion.kind") != std::string::npos);
    CHECK(message("dispersion.d_plus = 1\ndispersion.d_minus = 1\n") != "no error");  // d_av = 0
    CHECK(message("time.dt = 0\n") != "no error");
    CHECK(message("initial.epsilon = -1\n") != "no error");
    CHECK(message("time.snapshots = 5, 1\n") != "no error");
    CHECK(message("initial.shape = file\n") != "no error");
  }
}

TEST_CASE("initial.file resolves against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "dmnls_cfg_test";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "a.cfg", "initial.shape = custom-file\ninitial.file = data/u0.csv\n");
  const auto c = to_sim_config(KeyValueConfig::load(dir / "a.cfg"));
  CHECK(c.shape == InitialShape::file);
  CHECK(c.initial_file == dir / "data/u0.csv");
  CHECK_THROWS_AS(KeyValueConfig::load(dir / "missing.cfg"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep expansion") {
  const auto kv = KeyValueConfig::parse("initial.epsilon = 0.05, 0.1, 0.2\ndispersion.d_plus = 3, 4\ngrid.n = 256\n");
  const auto cells = expand_sweep(kv);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].get("initial.epsilon") == "0.05");
  CHECK(cells[0].get("dispersion.d_plus") == "3");
  CHECK(cells[1].get("dispersion.d_plus") == "4");
  CHECK(cells[5].get("initial.epsilon") == "0.2");
  for (const auto& c : cells) CHECK(c.get("grid.n") == "256");
  CHECK(expand_sweep(KeyValueConfig::parse("grid.n = 256\n")).size() == 1);
  CHECK_THROWS_AS(expand_sweep(KeyValueConfig::parse("grid.n = 256, 512\n")), ConfigError);
  CHECK_THROWS_AS(expand_sweep(KeyValueConfig::parse("initial.epsilon = 0.1,\n")), ConfigError);
  // snapshot lists are not sweep axes
  CHECK(expand_sweep(KeyValueConfig::parse("time.snapshots = 0, 1\n")).size() == 1);
}
