#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dmnls/rundir.hpp"
#include "dmnls/verify.hpp"

namespace dmnls {

/// Output root: $DMNLS_OUT if set and non-empty, else ./runs.
std::filesystem::path output_root();

/// Each command returns its process exit code.
int cmd_run(const std::filesystem::path& config, Scheme scheme, std::ostream& out, std::ostream& err,
            bool quiet = false);

int cmd_verify(const VerifyOptions& opt, std::ostream& out);

struct ScatterOptions {
  AnalysisOptions analysis;
};

int cmd_scatter(const std::filesystem::path& run_dir, const ScatterOptions& opt, std::ostream& out, std::ostream& err);

struct SweepOptions {
  unsigned jobs = 1;
  AnalysisOptions analysis;
};

/// Cells run in a pool of `jobs` workers; sweep.csv is written once at the end.
/// Returns 0 unless the sweep itself could not be set up.
int cmd_sweep(const std::filesystem::path& config, const SweepOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace dmnls
