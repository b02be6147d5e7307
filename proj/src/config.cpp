#include "qdyn/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace qdyn {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void range_error(const std::string& key, const std::string& why) {
  fail(errc::range, "config key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (...) {
    range_error(key, "not a number: '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (...) {
    range_error(key, "not an integer: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  range_error(key, "not a boolean: '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (period < 2 || period > 16) fail(errc::range, "period must lie in [2, 16]");
  if (!(rho > 0 && rho <= 0.1)) fail(errc::range, "rho must lie in (0, 0.1]");
  if (!(delta >= 1.0 && delta <= 2.0)) fail(errc::range, "delta must lie in [1, 2]");
  if (!(delta_lo >= 1.0 && delta_hi <= 2.0 && delta_lo < delta_hi))
    fail(errc::range, "delta range must lie within [1, 2]");
  if (truncation < 0 || truncation > 200) fail(errc::range, "truncation must lie in [0, 200]");
  if (prune_threshold < 0) fail(errc::range, "prune threshold must be >= 0");
  if (grid_radial < 1 || grid_angular < 4) fail(errc::range, "grid too small");
  if (profile_depth < 2 || profile_depth > 24) fail(errc::range, "profile depth in [2, 24]");
  if (samples < 1) fail(errc::range, "samples must be positive");
  if (mc_budget < 1) fail(errc::range, "mc budget must be positive");
  if (!(track_factor > 0 && track_factor < 1)) fail(errc::range, "track factor in (0, 1)");
  if (precision != "double" && precision != "extended")
    fail(errc::range, "precision must be 'double' or 'extended'");
  if (!(kappa > 0 && kappa < 0.5)) fail(errc::range, "kappa must lie in (0, 1/2)");
  if (!(epsilon > 0 && epsilon < 2)) fail(errc::range, "epsilon must lie in (0, 2)");
  if (kmax < 1 || kmax > 10000) fail(errc::range, "kmax must lie in [1, 10000]");
  if (degree < 8 || degree > 40) fail(errc::range, "degree must lie in [8, 40]");
  if (threads < 0) fail(errc::range, "threads must be >= 0");
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value,
                        int line) {
  auto unknown = [&]() {
    std::ostringstream os;
    os << "unknown key '" << key << "'";
    if (line > 0) os << " at line " << line;
    fail(errc::parse, os.str());
  };
  if (key == "period") cfg.period = static_cast<int>(to_int(key, value));
  else if (key == "rho") cfg.rho = to_double(key, value);
  else if (key == "delta") cfg.delta = to_double(key, value);
  else if (key == "delta_lo") cfg.delta_lo = to_double(key, value);
  else if (key == "delta_hi") cfg.delta_hi = to_double(key, value);
  else if (key == "bisect_tol") cfg.bisect_tol = to_double(key, value);
  else if (key == "truncation") cfg.truncation = static_cast<int>(to_int(key, value));
  else if (key == "prune_threshold") cfg.prune_threshold = to_double(key, value);
  else if (key == "grid_radial") cfg.grid_radial = static_cast<int>(to_int(key, value));
  else if (key == "grid_angular") cfg.grid_angular = static_cast<int>(to_int(key, value));
  else if (key == "node_budget") cfg.node_budget = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "profile_depth") cfg.profile_depth = static_cast<int>(to_int(key, value));
  else if (key == "samples") cfg.samples = static_cast<int>(to_int(key, value));
  else if (key == "mc_budget") cfg.mc_budget = static_cast<int>(to_int(key, value));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "track_factor") cfg.track_factor = to_double(key, value);
  else if (key == "precision") cfg.precision = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "paper_inequality_mode") cfg.paper_inequality_mode = to_bool(key, value);
  else if (key == "area_paper_mode") cfg.area_paper_mode = to_bool(key, value);
  else if (key == "threads") cfg.threads = static_cast<int>(to_int(key, value));
  else if (key == "kappa") cfg.kappa = to_double(key, value);
  else if (key == "epsilon") cfg.epsilon = to_double(key, value);
  else if (key == "kmax") cfg.kmax = static_cast<int>(to_int(key, value));
  else if (key == "degree") cfg.degree = static_cast<int>(to_int(key, value));
  else unknown();
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(errc::io, "cannot open config file " + path);
  RunConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(errc::parse, "line " + std::to_string(line) + ": expected 'key = value', got '" + s +
                            "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty())
      fail(errc::parse, "line " + std::to_string(line) + ": empty key or value");
    apply_config_entry(cfg, key, value, line);
  }
  cfg.validate();
  return cfg;
}

}  // namespace qdyn
