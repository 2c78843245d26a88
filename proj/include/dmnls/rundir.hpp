#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmnls/config.hpp"
#include "dmnls/integrator.hpp"
#include "dmnls/scattering.hpp"

namespace dmnls {

enum class Scheme { rk4_interaction, strang };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct Certification {
  bool mass = false;
  bool energy = false;
  bool boundary = false;
  bool dt_order = false;
  bool j_identity = false;

  bool all() const { return mass && energy && boundary && dt_order && j_identity; }
};

Certification certify(const RunStats& stats, const OrderTest& self_test, const RunOptions& tol = {});

/// Exit codes of `dmnls run`.
enum class RunExit { ok = 0, config_error = 2, numerical_abort = 3, uncertified = 4 };

struct RunRequest {
  std::filesystem::path out_root = "runs";
  Scheme scheme = Scheme::rk4_interaction;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
};

struct RunOutcome {
  std::filesystem::path dir;
  RunExit exit = RunExit::ok;
  std::string message;
  RunResult result;
  OrderTest self_test;
  Certification cert;
};

/// Fresh directory under `root`: `name`, or `name-2`, `name-3`, ... if taken.
std::filesystem::path claim_run_directory(const std::filesystem::path& root, const std::string& name);

/// Self-test, run and directory output:
///   manifest.json, config.cfg, observables.csv,
///   snapshots/f_NNNNN.csv (profile transform), snapshots/theta_NNNNN.csv,
///   abort_state.csv after a numerical abort.
/// Snapshots are written as they are produced; the manifest is written last.
/// Throws ConfigError for invalid configurations before touching the disk.
RunOutcome execute_run(const KeyValueConfig& kv, const RunRequest& req);

/// A run directory read back from disk.
struct StoredRun {
  std::filesystem::path dir;
  KeyValueConfig config;
  SimConfig sim;
  Scheme scheme = Scheme::rk4_interaction;
  std::string status;
  Certification cert;
  Trajectory trajectory;

  ScatteringContext context() const;
};

/// Throws std::runtime_error for a missing manifest or inconsistent files.
StoredRun load_run(const std::filesystem::path& dir);

/// scattering.csv: xi,W0_re,W0_im,Phi_inf,W_re,W_im
std::string scattering_csv(const Grid& grid, const ScatteringProfiles& p);

/// Summary of an analysis as JSON text.
std::string rates_json(const ScatteringResult& r, const AnalysisOptions& opt);

}  // namespace dmnls
