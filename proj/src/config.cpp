#include "dmnls/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "dmnls/text_io.hpp"

namespace dmnls {

namespace {

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = v.find(',', start);
    out.emplace_back(trim(std::string_view(v).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double number(const KeyValueConfig& kv, const std::string& key, double fallback) {
  if (!kv.has(key)) return fallback;
  try {
    return parse_double(kv.get(key));
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + kv.get(key) + "'");
  }
}

std::size_t count(const KeyValueConfig& kv, const std::string& key, std::size_t fallback) {
  if (!kv.has(key)) return fallback;
  const auto& s = kv.get(key);
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

bool boolean(const KeyValueConfig& kv, const std::string& key, bool fallback) {
  if (!kv.has(key)) return fallback;
  const auto& s = kv.get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& source) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (kv.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    kv.values_[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
  auto kv = parse(read_file(path), path.string());
  kv.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return kv;
}

const std::string& KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "grid.n",           "grid.L",           "grid.dealias",       "dispersion.kind",  "dispersion.d_plus",
      "dispersion.d_minus", "dispersion.t_plus", "dispersion.d_av",   "dispersion.c",     "dispersion.quad_order",
      "initial.epsilon",  "initial.shape",    "initial.file",       "time.dt",          "time.t_end",
      "time.snapshots",   "parallel.threads",     "output.name"};
  return keys;
}

const std::vector<std::string>& sweep_keys() {
  static const std::vector<std::string> keys{"initial.epsilon", "dispersion.d_plus", "dispersion.d_minus",
                                             "dispersion.t_plus", "dispersion.d_av", "dispersion.c"};
  return keys;
}

SimConfig to_sim_config(const KeyValueConfig& kv) {
  const auto& known = known_keys();
  for (const auto& [k, v] : kv.values())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown key '" + k + "'");

  SimConfig c;
  c.epsilon = number(kv, "initial.epsilon", c.epsilon);
  if (kv.has("initial.shape")) {
    try {
      c.shape = parse_initial_shape(kv.get("initial.shape"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (kv.has("initial.file")) {
    std::filesystem::path p = kv.get("initial.file");
    c.initial_file = p.is_absolute() ? p : kv.base_dir() / p;
  }
  c.n = count(kv, "grid.n", c.n);
  c.length = number(kv, "grid.L", 0.0);
  c.dealias = boolean(kv, "grid.dealias", true);

  const std::string kind = kv.has("dispersion.kind") ? kv.get("dispersion.kind") : "map";
  const double coeff = number(kv, "dispersion.c", 1.0);
  if (kind == "constant") {
    for (const char* k : {"dispersion.d_plus", "dispersion.d_minus", "dispersion.t_plus"})
      if (kv.has(k)) throw ConfigError(std::string(k) + ": not used with dispersion.kind = constant");
    c.profile = DispersionProfile::constant(number(kv, "dispersion.d_av", 1.0), coeff);
  } else if (kind == "map") {
    c.profile = DispersionProfile::from_map(number(kv, "dispersion.d_plus", 3.0), number(kv, "dispersion.d_minus", 1.0),
                                            number(kv, "dispersion.t_plus", 0.5), coeff);
    if (kv.has("dispersion.d_av")) c.profile.d_av = number(kv, "dispersion.d_av", 0.0);
  } else {
    throw ConfigError("dispersion.kind: expected map or constant, got '" + kind + "'");
  }
  c.quad_order = static_cast<int>(count(kv, "dispersion.quad_order", 16));

  c.dt = number(kv, "time.dt", c.dt);
  c.t_end = number(kv, "time.t_end", c.t_end);
  if (kv.has("time.snapshots") && kv.get("time.snapshots") != "default") {
    for (const auto& s : split_list(kv.get("time.snapshots"))) {
      try {
        c.snapshot_times.push_back(parse_double(s));
      } catch (const std::exception&) {
        throw ConfigError("time.snapshots: bad entry '" + s + "'");
      }
    }
  }
  c.threads = static_cast<unsigned>(count(kv, "parallel.threads", 1));
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::string output_name(const KeyValueConfig& kv) { return kv.has("output.name") ? kv.get("output.name") : "run"; }

std::vector<KeyValueConfig> expand_sweep(const KeyValueConfig& kv) {
  const auto& allowed = sweep_keys();
  for (const auto& [k, v] : kv.values())
    if (k != "time.snapshots" && v.find(',') != std::string::npos &&
        std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError(k + ": lists are only allowed on initial.epsilon and dispersion parameters");
  std::vector<KeyValueConfig> cells{kv};
  for (const auto& key : allowed) {
    if (!kv.has(key) || kv.get(key).find(',') == std::string::npos) continue;
    const auto options = split_list(kv.get(key));
    std::vector<KeyValueConfig> next;
    for (const auto& cell : cells)
      for (const auto& o : options) {
        if (o.empty()) throw ConfigError(key + ": empty list entry");
        KeyValueConfig c = cell;
        c.set(key, o);
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  }
  return cells;
}

}  // namespace dmnls
