#include "dmnls/commands.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "dmnls/text_io.hpp"

namespace dmnls {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

struct Analysis {
  StoredRun run;
  ScatteringResult result;
};

// load, analyze, write scattering.csv and rates.json next to the manifest
Analysis analyze_run(const fs::path& dir, const AnalysisOptions& opt) {
  Analysis a{load_run(dir), {}};
  const auto ctx = a.run.context();
  a.result = analyze(ctx, a.run.trajectory, build_quadrature(a.run.sim.profile, a.run.sim.quad_order), opt);
  write_file_atomic(dir / "scattering.csv", scattering_csv(*ctx.grid, a.result.profiles));
  write_file_atomic(dir / "rates.json", rates_json(a.result, opt));
  return a;
}

std::string exponent_cell(const std::optional<PowerFit>& f) { return f ? format_double(f->exponent) : ""; }

}  // namespace

fs::path output_root() {
  const char* env = std::getenv("DMNLS_OUT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

int cmd_run(const fs::path& config, Scheme scheme, std::ostream& out, std::ostream& err, bool quiet) {
  RunOutcome o;
  try {
    const auto kv = KeyValueConfig::load(config);
    o = execute_run(kv, {output_root(), scheme, quiet ? nullptr : &out});
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(RunExit::config_error);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(RunExit::config_error);
  }
  if (o.exit != RunExit::ok) {
    err << o.message << "\n";
    if (o.exit == RunExit::uncertified) {
      const auto& c = o.cert;
      err << "  mass " << (c.mass ? "ok" : "FAIL") << ", energy " << (c.energy ? "ok" : "FAIL") << ", boundary "
          << (c.boundary ? "ok" : "FAIL") << ", dt_order " << (c.dt_order ? "ok" : "FAIL") << ", j_identity "
          << (c.j_identity ? "ok" : "FAIL") << "\n";
    }
  }
  out << o.dir.string() << "\n";
  return static_cast<int>(o.exit);
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  VerifyOptions o = opt;
  o.on_result = [&](const CheckResult& r) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  value " << format_double(r.value) << "  tolerance "
        << format_double(r.tolerance) << "  (" << fixed(r.seconds, 2) << " s)";
    if (!r.detail.empty()) out << "  " << r.detail;
    out << std::endl;
  };
  const auto results = run_verify(o);
  std::vector<std::string> failed;
  for (const auto& r : results)
    if (!r.passed) failed.push_back(r.name);
  if (failed.empty()) {
    out << "all " << results.size() << " checks passed\n";
    return 0;
  }
  out << failed.size() << " of " << results.size() << " checks failed:";
  for (const auto& f : failed) out << " " << f;
  out << "\n";
  return 1;
}

int cmd_scatter(const fs::path& run_dir, const ScatterOptions& opt, std::ostream& out, std::ostream& err) {
  StoredRun run;
  try {
    run = load_run(run_dir);
  } catch (const std::exception& e) {
    err << "cannot read run directory: " << e.what() << "\n";
    return 2;
  }
  if (run.status != "completed" || !run.cert.all()) {
    err << run_dir.string() << ": run is not certified (status " << run.status << ")\n";
    return 4;
  }
  Analysis a;
  try {
    a = analyze_run(run_dir, opt.analysis);
  } catch (const std::exception& e) {
    err << "analysis failed: " << e.what() << "\n";
    return 1;
  }
  const auto& r = a.result;
  auto row = [&](const char* label, const std::optional<PowerFit>& f, double predicted) {
    out << label << "  ";
    if (f)
      out << fixed(f->exponent) << "  predicted " << fixed(predicted) << "  r2 " << fixed(f->r2, 5) << "  window ["
          << format_double(f->t_min) << ", " << format_double(f->t_max) << "]\n";
    else
      out << "no fit  predicted " << fixed(predicted) << "\n";
  };
  out << "T = " << format_double(r.profiles.t_final) << "\n";
  row("decay exponent    ", r.decay, -0.5);
  row("residual exponent ", r.residual, -(0.5 + kRateExponent));
  row("g-convergence rate", r.g_rate, -kRateExponent);
  if (r.dtg) out << "dg/dt exponent      " << fixed(r.dtg->exponent) << "\n";
  out << "profile stable under T -> T/2: " << (r.stable ? "yes" : "no") << " (change " << format_double(r.halving_change)
      << ", envelope " << format_double(r.envelope) << ")\n";
  for (const auto& e : r.fit_errors) out << "fit refused: " << e << "\n";
  out << "wrote " << (run_dir / "scattering.csv").string() << " and " << (run_dir / "rates.json").string() << "\n";
  return 0;
}

int cmd_sweep(const fs::path& config, const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  KeyValueConfig base;
  std::vector<KeyValueConfig> cells;
  try {
    base = KeyValueConfig::load(config);
    cells = expand_sweep(base);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  const fs::path root = claim_run_directory(output_root(), output_name(base));
  out << "sweep directory: " << root.string() << " (" << cells.size() << " cells)" << std::endl;

  struct Row {
    std::string status = "pending";
    std::optional<PowerFit> decay, residual, g_rate;
  };
  std::vector<Row> rows(cells.size());
  std::mutex io;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cells.size();) {
      Row& row = rows[k];
      KeyValueConfig cell = cells[k];
      char name[32];
      std::snprintf(name, sizeof name, "cell_%03zu", k);
      cell.set("output.name", name);
      try {
        const auto o = execute_run(cell, {root, Scheme::rk4_interaction, nullptr});
        if (o.exit == RunExit::numerical_abort) {
          row.status = "numerical_abort";
        } else if (o.exit == RunExit::uncertified) {
          row.status = "uncertified";
        } else {
          const auto a = analyze_run(o.dir, opt.analysis);
          row.decay = a.result.decay;
          row.residual = a.result.residual;
          row.g_rate = a.result.g_rate;
          row.status = a.result.fit_errors.empty() ? "ok" : "fit_error";
        }
      } catch (const ConfigError& e) {
        row.status = "config_error";
      } catch (const std::exception& e) {
        row.status = "analysis_error";
      }
      std::lock_guard lock(io);
      out << name << ": " << row.status << std::endl;
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  const SimConfig defaults;
  auto value = [&](const KeyValueConfig& kv, const std::string& key, double fallback) {
    return kv.has(key) ? kv.get(key) : format_double(fallback);
  };
  std::string csv = "eps,d_plus,d_minus,t_plus,decay_exp,residual_exp,g_rate,status\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& kv = cells[k];
    csv += value(kv, "initial.epsilon", defaults.epsilon) + "," + value(kv, "dispersion.d_plus", defaults.profile.d_plus) +
           "," + value(kv, "dispersion.d_minus", defaults.profile.d_minus) + "," +
           value(kv, "dispersion.t_plus", defaults.profile.t_plus) + "," + exponent_cell(rows[k].decay) + "," +
           exponent_cell(rows[k].residual) + "," + exponent_cell(rows[k].g_rate) + "," + rows[k].status + "\n";
  }
  write_file_atomic(root / "sweep.csv", csv);
  out << "wrote " << (root / "sweep.csv").string() << "\n";
  return 0;
}

}  // namespace dmnls
