#include "dmnls/rundir.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dmnls/oracle.hpp"
#include "dmnls/text_io.hpp"

namespace dmnls {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string index_name(const char* prefix, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05zu.csv", prefix, k);
  return buf;
}

std::string theta_csv(const Grid& g, std::span<const double> theta, double t) {
  std::string out = "# theta t=" + format_double(t) + " n=" + std::to_string(g.n()) + "\nxi,theta\n";
  const auto xi = g.xi();
  for (std::size_t i = 0; i < theta.size(); ++i) out += format_double(xi[i]) + "," + format_double(theta[i]) + "\n";
  return out;
}

std::vector<double> read_theta_csv(const fs::path& path, std::size_t n) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<double> theta;
  theta.reserve(n);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("xi,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path.string() + ": malformed line");
    theta.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  if (theta.size() != n) throw std::runtime_error(path.string() + ": expected " + std::to_string(n) + " rows");
  return theta;
}

json order_json(const OrderTest& o) {
  return {{"dt", o.dt},         {"horizon", o.horizon},         {"n", o.n},
          {"L", o.length},      {"err_coarse", o.err_coarse},   {"err_fine", o.err_fine},
          {"order", o.order},   {"roundoff_limited", o.roundoff_limited}, {"passed", o.passed}};
}

json stats_json(const RunStats& s) {
  return {{"steps", s.steps},
          {"wall_seconds", s.wall_seconds},
          {"mass0", s.mass0},
          {"max_mass_drift", s.max_mass_drift},
          {"energy0", s.energy0},
          {"max_energy_drift", s.max_energy_drift},
          {"max_boundary_fraction", s.max_boundary_fraction},
          {"max_j_gap", s.max_j_gap},
          {"theta_monotone", s.theta_monotone}};
}

json cert_json(const Certification& c) {
  return {{"mass", c.mass}, {"energy", c.energy}, {"boundary", c.boundary}, {"dt_order", c.dt_order},
          {"j_identity", c.j_identity}};
}

json fit_json(const std::optional<PowerFit>& f) {
  if (!f) return nullptr;
  return {{"exponent", f->exponent}, {"prefactor", f->prefactor}, {"r2", f->r2},
          {"points", f->points},     {"t_min", f->t_min},         {"t_max", f->t_max}};
}

// echo with initial.file resolved, so the directory is self-describing
KeyValueConfig echo_config(const KeyValueConfig& kv, const SimConfig& sim) {
  KeyValueConfig e = kv;
  if (kv.has("initial.file")) e.set("initial.file", fs::absolute(sim.initial_file).lexically_normal().string());
  e.set_base_dir(".");
  return e;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::strang ? "strang" : "rk4-interaction"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "rk4-interaction" || s == "rk4") return Scheme::rk4_interaction;
  if (s == "strang") return Scheme::strang;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected rk4 or strang)");
}

Certification certify(const RunStats& stats, const OrderTest& self_test, const RunOptions& tol) {
  Certification c;
  c.mass = stats.max_mass_drift < tol.mass_tolerance;
  c.energy = stats.max_energy_drift < tol.energy_tolerance;
  c.boundary = stats.max_boundary_fraction < tol.boundary_tolerance;
  c.dt_order = self_test.passed;
  c.j_identity = stats.max_j_gap < kJIdentityTolerance;
  return c;
}

fs::path claim_run_directory(const fs::path& root, const std::string& name) {
  if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..")
    throw ConfigError("output.name: '" + name + "' is not a plain directory name");
  fs::create_directories(root);
  for (int k = 1;; ++k) {
    const fs::path dir = root / (k == 1 ? name : name + "-" + std::to_string(k));
    // create_directory is atomic: false means another process owns it
    if (fs::create_directory(dir)) return dir;
  }
}

RunOutcome execute_run(const KeyValueConfig& kv, const RunRequest& req) {
  const SimConfig cfg = to_sim_config(kv);
  if (req.scheme == Scheme::strang)
    for (const auto& node : build_quadrature(cfg.profile, cfg.quad_order).nodes)
      if (node.D != 0.0) throw ConfigError("scheme strang requires dispersion.kind = constant");
  const std::string started = utc_now();

  RunOutcome out;
  out.dir = claim_run_directory(req.out_root, output_name(kv));
  fs::create_directories(out.dir / "snapshots");
  const KeyValueConfig echo = echo_config(kv, cfg);
  write_file_atomic(out.dir / "config.cfg", echo.to_text());

  auto say = [&](const std::string& s) {
    if (req.log) *req.log << s << std::endl;
  };
  say("run directory: " + out.dir.string());

  out.self_test = req.scheme == Scheme::strang ? strang_self_test(cfg) : rk4_self_test(cfg);
  say("self-test: order " + format_double(out.self_test.order) + (out.self_test.roundoff_limited ? " (roundoff-limited)" : "") +
      (out.self_test.passed ? " ok" : " FAILED"));

  const GridPtr grid = Grid::make(cfg.n, cfg.domain_length());
  std::vector<ObservablesRecord> records;
  std::size_t index = 0;
  RunOptions opt;
  opt.on_snapshot = [&](const Snapshot& s) {
    write_field_csv(out.dir / "snapshots" / index_name("f", index), Field(grid, s.f_hat, Space::frequency), s.t);
    write_file_atomic(out.dir / "snapshots" / index_name("theta", index), theta_csv(*grid, s.theta, s.t));
    records.push_back(s.obs);
    write_file_atomic(out.dir / "observables.csv", observables_csv(records));
    ++index;
    say("t = " + format_double(s.t) + "  mass = " + format_double(s.obs.mass) + "  |u|_inf = " + format_double(s.obs.linf_u));
  };

  out.result = req.scheme == Scheme::strang ? run_oracle(cfg, opt) : Simulator(cfg).run(opt);
  out.result.trajectory.clear();  // on disk already
  out.cert = certify(out.result.stats, out.self_test, opt);

  if (out.result.status != RunStatus::completed) {
    out.exit = RunExit::numerical_abort;
    out.message = "numerical abort (" + to_string(out.result.status) + "): " + out.result.message;
    if (out.result.last_good)
      write_field_csv(out.dir / "abort_state.csv", Field(grid, out.result.last_good->f_hat, Space::frequency),
                      out.result.last_good->t);
  } else if (!out.cert.all()) {
    out.exit = RunExit::uncertified;
    out.message = "certification failed";
  }
  if (records.empty()) write_file_atomic(out.dir / "observables.csv", observables_csv(records));

  json m;
  m["format"] = "dmnls-run";
  m["version"] = DMNLS_VERSION;
  m["scheme"] = to_string(req.scheme);
  m["config"] = json(echo.values());
  m["start_time"] = started;
  m["end_time"] = utc_now();
  m["status"] = to_string(out.result.status);
  m["message"] = out.result.message;
  m["certified"] = out.cert.all();
  m["certification"] = cert_json(out.cert);
  m["stats"] = stats_json(out.result.stats);
  m["self_test"] = order_json(out.self_test);
  m["grid"] = {{"n", cfg.n}, {"L", cfg.domain_length()}};
  m["snapshots"] = index;
  write_file_atomic(out.dir / "manifest.json", m.dump(2) + "\n");
  say(out.exit == RunExit::ok ? "completed, certified" : out.message);
  return out;
}

ScatteringContext StoredRun::context() const {
  return {Grid::make(sim.n, sim.domain_length()), sim.profile.d_av, sim.profile.c};
}

StoredRun load_run(const fs::path& dir) {
  const fs::path mpath = dir / "manifest.json";
  if (!fs::is_regular_file(mpath)) throw std::runtime_error(dir.string() + ": no manifest.json (not a run directory)");
  json m;
  try {
    m = json::parse(read_file(mpath));
  } catch (const json::exception& e) {
    throw std::runtime_error(mpath.string() + ": " + e.what());
  }
  StoredRun r;
  r.dir = dir;
  try {
    for (const auto& [k, v] : m.at("config").items()) r.config.set(k, v.get<std::string>());
    r.sim = to_sim_config(r.config);
    r.scheme = parse_scheme(m.at("scheme").get<std::string>());
    r.status = m.at("status").get<std::string>();
    const auto& c = m.at("certification");
    r.cert = {c.at("mass").get<bool>(), c.at("energy").get<bool>(), c.at("boundary").get<bool>(),
              c.at("dt_order").get<bool>(), c.at("j_identity").get<bool>()};
  } catch (const json::exception& e) {
    throw std::runtime_error(mpath.string() + ": " + e.what());
  }
  const std::size_t count = m.value("snapshots", std::size_t{0});
  const auto records = parse_observables_csv(read_file(dir / "observables.csv"));
  if (records.size() != count) throw std::runtime_error(dir.string() + ": observables.csv does not match the manifest");
  const GridPtr grid = Grid::make(r.sim.n, r.sim.domain_length());
  for (std::size_t k = 0; k < count; ++k) {
    double t = 0.0;
    const Field f = read_field_csv(dir / "snapshots" / index_name("f", k), grid, &t);
    if (f.space() != Space::frequency) throw std::runtime_error("snapshot " + std::to_string(k) + " is not a profile transform");
    if (t != records[k].t) throw std::runtime_error("snapshot " + std::to_string(k) + " time does not match observables.csv");
    Snapshot s{t, std::vector<cplx>(f.values().begin(), f.values().end()),
               read_theta_csv(dir / "snapshots" / index_name("theta", k), grid->n()), records[k]};
    r.trajectory.push_back(std::move(s));
  }
  return r;
}

std::string scattering_csv(const Grid& grid, const ScatteringProfiles& p) {
  std::string out = "xi,W0_re,W0_im,Phi_inf,W_re,W_im\n";
  const auto xi = grid.xi();
  for (std::size_t i = 0; i < p.W0.size(); ++i)
    out += format_double(xi[i]) + "," + format_double(p.W0[i].real()) + "," + format_double(p.W0[i].imag()) + "," +
           format_double(p.Phi_inf[i]) + "," + format_double(p.W[i].real()) + "," + format_double(p.W[i].imag()) + "\n";
  return out;
}

std::string rates_json(const ScatteringResult& r, const AnalysisOptions& opt) {
  auto exponent = [](const std::optional<PowerFit>& f) -> json { return f ? json(f->exponent) : json(nullptr); };
  json j;
  j["t_final"] = r.profiles.t_final;
  j["decay_exponent"] = exponent(r.decay);
  j["residual_exponent"] = exponent(r.residual);
  j["g_convergence_rate"] = exponent(r.g_rate);
  j["dtg_exponent"] = exponent(r.dtg);
  j["lemma_constant"] = r.lemma_constant;
  j["theta_kernel_constant"] = r.theta_kernel_constant;
  j["predicted"] = {{"decay_exponent", -0.5}, {"residual_exponent", -(0.5 + kRateExponent)}, {"g_convergence_rate", -kRateExponent}};
  j["fits"] = {{"decay", fit_json(r.decay)}, {"residual", fit_json(r.residual)}, {"g_rate", fit_json(r.g_rate)}, {"dtg", fit_json(r.dtg)}};
  j["window"] = {{"t_min", opt.t_min}, {"g_t_min", opt.g_t_min}, {"t_max", r.profiles.t_final}};
  j["halving"] = {{"time", r.halving_time}, {"change", r.halving_change}, {"envelope", r.envelope}, {"stable", r.stable}};
  j["fit_errors"] = r.fit_errors;
  return j.dump(2) + "\n";
}

}  // namespace dmnls
