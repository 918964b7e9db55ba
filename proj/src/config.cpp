#include "skewprod/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "skewprod/csv.hpp"

namespace skewprod {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument(key + ": not a number: '" + v + "'");
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  double as_double = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && ptr == v.data() + v.size()) return out;
  // Accept integral values written in exponent form, e.g. 1e7.
  as_double = parse_double(key, v);
  if (as_double < 0.0 || as_double != static_cast<double>(static_cast<std::uint64_t>(as_double))) {
    throw std::invalid_argument(key + ": not a non-negative integer: '" + v + "'");
  }
  return static_cast<std::uint64_t>(as_double);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

template <class T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += f(xs[i]);
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + what);
}

}  // namespace

ClassifyConfig ScenarioConfig::classify_config() const {
  ClassifyConfig c;
  c.M = M;
  c.I = I();
  c.J = J();
  c.grid = graph_grid;
  c.depth = graph_depth;
  c.pinch_tol = pinch_tol;
  c.refine = refine;
  c.max_period = max_period;
  c.lambda_samples = lambda_samples;
  c.seed = seed;
  c.strip_y = strip_y;
  c.band_margin = band_margin;
  c.b2ii_tol = b2ii_tol;
  c.fibre_h = fibre_h;
  c.fibre_x = fibre_x;
  c.envelope_cells = envelope_cells;
  return c;
}

std::vector<std::string> preset_names() { return {"fig1a", "fig1b", "fig1c", "fig2"}; }

void apply_preset(ScenarioConfig& cfg, const std::string& name) {
  static const std::map<std::string, double> eps{
      {"fig1a", 0.018}, {"fig1b", 0.019}, {"fig1c", 0.04}, {"fig2", 0.08}};
  const auto it = eps.find(name);
  if (it == eps.end()) throw std::invalid_argument("unknown preset '" + name + "'");
  cfg.preset = name;
  cfg.scenario = name;
  cfg.eps = it->second;
  cfg.r = 1.1;
  cfg.a = 0.5;
  cfg.M = 0.86;
  cfg.I_lo = -0.858;
  cfg.I_hi = 0.858;
}

void set_config_value(ScenarioConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  const auto d = [&] { return parse_double(key, v); };
  const auto u = [&] { return static_cast<std::size_t>(parse_unsigned(key, v)); };
  if (key == "preset") apply_preset(c, v);
  else if (key == "scenario") c.scenario = v;
  else if (key == "r") c.r = d();
  else if (key == "eps") c.eps = d();
  else if (key == "a") c.a = d();
  else if (key == "M") c.M = d();
  else if (key == "I_lo") c.I_lo = d();
  else if (key == "I_hi") c.I_hi = d();
  else if (key == "seed") {
    c.seed = parse_unsigned(key, v);
    c.has_seed = true;
  } else if (key == "output_dir") c.output_dir = v;
  else if (key == "hypothesis_grid") c.hypothesis_grid = u();
  else if (key == "override_hypotheses") c.override_hypotheses = parse_bool(key, v);
  else if (key == "graph_grid") c.graph_grid = u();
  else if (key == "graph_depth") c.graph_depth = u();
  else if (key == "pinch_tol") c.pinch_tol = d();
  else if (key == "refine") c.refine = u();
  else if (key == "max_period") c.max_period = static_cast<int>(u());
  else if (key == "lambda_samples") c.lambda_samples = u();
  else if (key == "strip_y") c.strip_y = d();
  else if (key == "band_margin") c.band_margin = d();
  else if (key == "b2ii_tol") c.b2ii_tol = d();
  else if (key == "fibre_h") c.fibre_h = d();
  else if (key == "fibre_x") c.fibre_x = d();
  else if (key == "envelope_cells") c.envelope_cells = u();
  else if (key == "trajectory_steps") c.trajectory_steps = u();
  else if (key == "burn_in") c.burn_in = u();
  else if (key == "max_rows") c.max_rows = u();
  else if (key == "trajectory_y0") {
    c.trajectory_y0.clear();
    for (const auto& s : split_list(v)) c.trajectory_y0.push_back(parse_double(key, s));
  } else if (key == "levelset_nx") c.levelset_nx = u();
  else if (key == "levelset_ny") c.levelset_ny = u();
  else if (key == "fibre_y") {
    c.fibre_y.clear();
    for (const auto& s : split_list(v)) c.fibre_y.push_back(parse_double(key, s));
  } else if (key == "dimension_orders") {
    c.dimension_orders.clear();
    for (const auto& s : split_list(v)) {
      c.dimension_orders.push_back(static_cast<std::size_t>(parse_unsigned(key, s)));
    }
  } else if (key == "dimension_phi_hat") {
    c.dimension_phi_hat = split_list(v);
  } else if (key == "strip_threshold") c.strip_threshold = d();
  else if (key == "strip_window_lo") c.strip_window_lo = d();
  else if (key == "strip_window_hi") c.strip_window_hi = d();
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

ScenarioConfig parse_config(std::istream& is, ScenarioConfig base) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  for (const auto& [k, v] : entries) {
    if (k == "preset") set_config_value(base, k, v);
  }
  for (const auto& [k, v] : entries) {
    if (k != "preset") set_config_value(base, k, v);
  }
  return base;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

void validate(const ScenarioConfig& c) {
  require(c.has_seed, "seed is mandatory");
  require(c.r > 0.0, "r must be > 0");
  require(c.eps >= 0.0, "eps must be >= 0");
  require(c.a > 0.0 && c.a < 1.0, "a must lie in (0,1)");
  require(c.M > 0.0, "M must be > 0");
  require(c.I_lo < c.I_hi, "I_lo must be < I_hi");
  require(-c.M <= c.I_lo && c.I_hi <= c.M, "I must lie inside J = [-M, M]");
  require(c.hypothesis_grid >= 100, "hypothesis_grid must be >= 100");
  require(c.graph_grid >= 16, "graph_grid must be >= 16");
  require(c.graph_depth >= 1, "graph_depth must be >= 1");
  require(c.pinch_tol > 0.0, "pinch_tol must be > 0");
  require(c.refine >= 1, "refine must be >= 1");
  require(c.max_period >= 1 && c.max_period <= 12, "max_period must lie in [1,12]");
  require(c.lambda_samples >= 2, "lambda_samples must be >= 2");
  require(c.band_margin >= 0.0, "band_margin must be >= 0");
  require(c.b2ii_tol > 0.0, "b2ii_tol must be > 0");
  require(c.fibre_h > 0.0 && c.fibre_h <= 1e-3, "fibre_h must lie in (0, 1e-3]");
  require(c.fibre_x >= 0.0 && c.fibre_x < 1.0, "fibre_x must lie in [0,1)");
  require(c.trajectory_steps >= 1, "trajectory_steps must be >= 1");
  require(c.burn_in < c.trajectory_steps, "burn_in must be < trajectory_steps");
  require(c.max_rows >= 1, "max_rows must be >= 1");
  require(!c.trajectory_y0.empty(), "trajectory_y0 must not be empty");
  require(c.levelset_nx >= 2 && c.levelset_ny >= 2, "levelset grid must be >= 2 per axis");
  for (double y : c.fibre_y) require(-c.M < y && y < c.M, "fibre_y values must lie inside J");
  for (std::size_t n : c.dimension_orders) require(n >= 1 && n <= 16, "dimension_orders must lie in [1,16]");
  for (const auto& k : c.dimension_phi_hat) {
    require(k == "upper" || k == "lower" || k == "middle", "dimension_phi_hat entries: upper, lower, middle");
  }
  require(c.strip_window_lo >= 0.0 && c.strip_window_lo < c.strip_window_hi && c.strip_window_hi <= 1.0,
          "strip window must be a proper subinterval of [0,1]");
}

void write_config(std::ostream& os, const ScenarioConfig& c) {
  const auto dbl = [](const double& v) { return num(v); };
  const auto sz = [](const std::size_t& v) { return num(static_cast<std::uint64_t>(v)); };
  const auto str = [](const std::string& v) { return v; };
  const auto b = [](bool v) { return v ? "true" : "false"; };
  os << "scenario = " << c.scenario << '\n'
     << "r = " << num(c.r) << '\n'
     << "eps = " << num(c.eps) << '\n'
     << "a = " << num(c.a) << '\n'
     << "M = " << num(c.M) << '\n'
     << "I_lo = " << num(c.I_lo) << '\n'
     << "I_hi = " << num(c.I_hi) << '\n'
     << "seed = " << c.seed << '\n'
     << "output_dir = " << c.output_dir << '\n'
     << "hypothesis_grid = " << c.hypothesis_grid << '\n'
     << "override_hypotheses = " << b(c.override_hypotheses) << '\n'
     << "graph_grid = " << c.graph_grid << '\n'
     << "graph_depth = " << c.graph_depth << '\n'
     << "pinch_tol = " << num(c.pinch_tol) << '\n'
     << "refine = " << c.refine << '\n'
     << "max_period = " << c.max_period << '\n'
     << "lambda_samples = " << c.lambda_samples << '\n'
     << "strip_y = " << num(c.strip_y) << '\n'
     << "band_margin = " << num(c.band_margin) << '\n'
     << "b2ii_tol = " << num(c.b2ii_tol) << '\n'
     << "fibre_h = " << num(c.fibre_h) << '\n'
     << "fibre_x = " << num(c.fibre_x) << '\n'
     << "envelope_cells = " << c.envelope_cells << '\n'
     << "trajectory_steps = " << c.trajectory_steps << '\n'
     << "burn_in = " << c.burn_in << '\n'
     << "max_rows = " << c.max_rows << '\n'
     << "trajectory_y0 = " << join<double>(c.trajectory_y0, dbl) << '\n'
     << "levelset_nx = " << c.levelset_nx << '\n'
     << "levelset_ny = " << c.levelset_ny << '\n'
     << "fibre_y = " << join<double>(c.fibre_y, dbl) << '\n'
     << "dimension_orders = " << join<std::size_t>(c.dimension_orders, sz) << '\n'
     << "dimension_phi_hat = " << join<std::string>(c.dimension_phi_hat, str) << '\n'
     << "strip_threshold = " << num(c.strip_threshold) << '\n'
     << "strip_window_lo = " << num(c.strip_window_lo) << '\n'
     << "strip_window_hi = " << num(c.strip_window_hi) << '\n';
}

}  // namespace skewprod
