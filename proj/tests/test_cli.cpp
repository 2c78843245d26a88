#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "dmnls/text_io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& out) {
  const std::string cmd = "DMNLS_OUT='" + out.string() + "' '" DMNLS_CLI "' " + args + " > '" +
                          (out.parent_path() / "cli.log").string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("command-line exit codes") {
  const auto base = fs::temp_directory_path() / ("dmnls_cli_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  const auto out = base / "runs";

  CHECK(run("run '" + (base / "missing.cfg").string() + "'", base / "runs") == 2);
  CHECK(dmnls::read_file(base / "cli.log").find("missing.cfg") != std::string::npos);

  dmnls::write_file_atomic(base / "tiny.cfg", "grid.n = 256\ngrid.L = 64\ntime.t_end = 2\noutput.name = tiny\n");
  CHECK(run("run '" + (base / "tiny.cfg").string() + "'", out) == 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(out / "tiny"))
    if (e.is_regular_file()) ++files;
  CHECK(files >= 3);

  dmnls::write_file_atomic(base / "bad.cfg", "grid.n = 100\n");
  CHECK(run("run '" + (base / "bad.cfg").string() + "'", out) == 2);
  dmnls::write_file_atomic(base / "blow.cfg", "grid.n = 256\ngrid.L = 64\ntime.t_end = 2\ndispersion.c = 1e300\n");
  // boundary breach is a numerical abort as well
  dmnls::write_file_atomic(base / "box.cfg", "grid.n = 256\ngrid.L = 8\ntime.t_end = 2\n");
  CHECK(run("run '" + (base / "box.cfg").string() + "'", out) == 3);
  CHECK(run("run '" + (base / "blow.cfg").string() + "'", out) == 3);
  dmnls::write_file_atomic(base / "edge.cfg", "grid.n = 256\ngrid.L = 64\ntime.t_end = 2\ntime.dt = 1\ninitial.epsilon = 0.5\noutput.name = edge\n");
  CHECK(run("run '" + (base / "edge.cfg").string() + "'", out) == 4);
  CHECK(run("scatter '" + (out / "edge").string() + "'", out) == 4);
  CHECK(run("scatter '" + (out / "tiny").string() + "' --allow-short --t-min 1", out) == 0);
  CHECK(fs::is_regular_file(out / "tiny" / "scattering.csv"));
  CHECK(fs::is_regular_file(out / "tiny" / "rates.json"));

  CHECK(run("verify --level fast", out) == 0);
  CHECK(run("verify --kernel-sign flipped", out) == 1);
  const auto report = dmnls::read_file(base / "cli.log");
  CHECK(report.find("PASS parseval") != std::string::npos);
  CHECK(report.find("FAIL transform_phase") != std::string::npos);
  CHECK(report.find("FAIL spectral_derivative") != std::string::npos);
  CHECK(run("bogus", out) != 0);
  fs::remove_all(base);
}
