#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "dmnls/commands.hpp"
#include "dmnls/rundir.hpp"
#include "dmnls/text_io.hpp"

using namespace dmnls;
namespace fs = std::filesystem;

namespace {

struct TempRoot {
  fs::path path;
  TempRoot() : path(fs::temp_directory_path() / ("dmnls_rundir_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempRoot() { fs::remove_all(path); }
};

const char* kTiny = "grid.n = 256\ngrid.L = 64\ntime.t_end = 2\noutput.name = tiny\n";

}  // namespace

TEST_CASE("run directory layout and round trip") {
  TempRoot root;
  const auto kv = KeyValueConfig::parse(kTiny);
  const auto o = execute_run(kv, {root.path});
  REQUIRE(o.exit == RunExit::ok);
  CHECK(o.cert.all());
  CHECK(o.self_test.passed);
  CHECK(fs::is_regular_file(o.dir / "manifest.json"));
  CHECK(fs::is_regular_file(o.dir / "observables.csv"));
  CHECK(fs::is_regular_file(o.dir / "config.cfg"));
  CHECK_FALSE(fs::exists(o.dir / "abort_state.csv"));

  const auto schedule = to_sim_config(kv).snapshots();
  const auto run = load_run(o.dir);
  CHECK(run.status == "completed");
  CHECK(run.cert.all());
  CHECK(run.scheme == Scheme::rk4_interaction);
  REQUIRE(run.trajectory.size() == schedule.size());
  // stored snapshots reproduce a fresh in-memory run exactly
  const auto fresh = Simulator(to_sim_config(kv)).run();
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    CHECK(run.trajectory[k].t == fresh.trajectory[k].t);
    CHECK(run.trajectory[k].f_hat == fresh.trajectory[k].f_hat);
    CHECK(run.trajectory[k].theta == fresh.trajectory[k].theta);
    CHECK(run.trajectory[k].obs.mass == fresh.trajectory[k].obs.mass);
  }

  // a second run with the same name gets its own directory
  const auto o2 = execute_run(kv, {root.path});
  CHECK(o2.dir.filename() == "tiny-2");
}

TEST_CASE("config errors never create a directory") {
  TempRoot root;
  CHECK_THROWS_AS(execute_run(KeyValueConfig::parse("grid.n = 100\n"), {root.path}), ConfigError);
  CHECK_THROWS_AS(execute_run(KeyValueConfig::parse(kTiny), {root.path, Scheme::strang}), ConfigError);
  CHECK_FALSE(fs::exists(root.path / "tiny"));
}

TEST_CASE("numerical abort keeps the last good state") {
  TempRoot root;
  const auto o = execute_run(KeyValueConfig::parse(std::string(kTiny) + "dispersion.c = 1e300\n"), {root.path});
  CHECK(o.exit == RunExit::numerical_abort);
  CHECK(fs::is_regular_file(o.dir / "abort_state.csv"));
  CHECK(fs::is_regular_file(o.dir / "manifest.json"));
  const auto run = load_run(o.dir);
  CHECK(run.status != "completed");
}

TEST_CASE("uncertified runs are flagged") {
  // dt = 1 on large data: energy drift and the self-test order both fail
  TempRoot root;
  const auto o = execute_run(
      KeyValueConfig::parse("grid.n = 256\ngrid.L = 64\ntime.t_end = 2\ntime.dt = 1\ninitial.epsilon = 0.5\n"), {root.path});
  CHECK(o.exit == RunExit::uncertified);
  CHECK_FALSE(o.cert.energy);
  CHECK_FALSE(o.cert.dt_order);
  CHECK(o.cert.mass);
  CHECK(load_run(o.dir).status == "completed");
  std::ostringstream out, err;
  CHECK(cmd_scatter(o.dir, {}, out, err) == 4);
}

TEST_CASE("load_run rejects incomplete directories") {
  TempRoot root;
  fs::create_directories(root.path / "empty");
  CHECK_THROWS_AS(load_run(root.path / "empty"), std::runtime_error);
  const auto o = execute_run(KeyValueConfig::parse(kTiny), {root.path});
  fs::remove(o.dir / "snapshots" / "f_00003.csv");
  CHECK_THROWS(load_run(o.dir));
}

TEST_CASE("scatter is reproducible bit for bit") {
  TempRoot root;
  const auto o = execute_run(KeyValueConfig::parse(kTiny), {root.path});
  ScatterOptions opt;
  opt.analysis.allow_short = true;
  opt.analysis.t_min = 1.0;
  std::ostringstream out, err;
  REQUIRE(cmd_scatter(o.dir, opt, out, err) == 0);
  const auto csv1 = read_file(o.dir / "scattering.csv");
  const auto rates1 = read_file(o.dir / "rates.json");
  REQUIRE(cmd_scatter(o.dir, opt, out, err) == 0);
  CHECK(read_file(o.dir / "scattering.csv") == csv1);
  CHECK(read_file(o.dir / "rates.json") == rates1);
  CHECK(csv1.rfind("xi,W0_re,W0_im,Phi_inf,W_re,W_im\n", 0) == 0);
  // short runs are refused unless asked for
  CHECK(cmd_scatter(o.dir, {}, out, err) == 1);
}

TEST_CASE("zero data: profiles vanish and fits refuse") {
  TempRoot root;
  const auto o = execute_run(KeyValueConfig::parse(std::string(kTiny) + "initial.epsilon = 0\n"), {root.path});
  REQUIRE(o.exit == RunExit::ok);
  ScatterOptions opt;
  opt.analysis.allow_short = true;
  opt.analysis.t_min = 1.0;
  std::ostringstream out, err;
  REQUIRE(cmd_scatter(o.dir, opt, out, err) == 0);
  CHECK(out.str().find("must be positive") != std::string::npos);
  std::istringstream csv(read_file(o.dir / "scattering.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) CHECK(line.substr(line.find(',')) == ",0,0,0,0,0");
}

TEST_CASE("sweep marks invalid cells and continues") {
  TempRoot root;
  fs::create_directories(root.path);
  write_file_atomic(root.path / "s.cfg", "grid.n = 256\ngrid.L = 64\ntime.t_end = 2\noutput.name = s\n"
                                         "dispersion.d_plus = 3, 1\ninitial.epsilon = 0.05, 0.1\n");
  ::setenv("DMNLS_OUT", (root.path / "out").c_str(), 1);
  SweepOptions opt;
  opt.jobs = 2;
  opt.analysis.allow_short = true;
  opt.analysis.t_min = 1.0;
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(root.path / "s.cfg", opt, out, err) == 0);
  ::unsetenv("DMNLS_OUT");
  std::istringstream csv(read_file(root.path / "out" / "s" / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "eps,d_plus,d_minus,t_plus,decay_exp,residual_exp,g_rate,status");
  std::vector<std::string> rows;
  while (std::getline(csv, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].rfind("0.05,1,1,0.5,", 0) == 0);
  CHECK(rows[1].ends_with("config_error"));
  CHECK(rows[3].ends_with("config_error"));
  CHECK_FALSE(rows[0].ends_with("config_error"));
  CHECK_FALSE(rows[2].ends_with("config_error"));
}
