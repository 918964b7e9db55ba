#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewprod/classify.hpp"
#include "skewprod/common.hpp"

namespace skewprod {

/// Flat key = value configuration. Lines starting with '#' are comments.
/// Lists are comma separated. Every key is documented in README.md.
struct ScenarioConfig {
  std::string scenario = "custom";
  std::string preset;
  double r = 1.1;
  double eps = 0.1;
  double a = 0.5;
  double M = 0.86;
  double I_lo = -0.858;
  double I_hi = 0.858;
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  std::size_t hypothesis_grid = 1000;
  bool override_hypotheses = false;

  std::size_t graph_grid = 4096;
  std::size_t graph_depth = 200;
  double pinch_tol = 1e-3;
  std::size_t refine = 16;
  int max_period = 8;
  std::size_t lambda_samples = 20000;
  double strip_y = 0.3;
  double band_margin = 0.1;
  double b2ii_tol = 1e-3;
  double fibre_h = 1e-4;
  double fibre_x = 0.5;
  std::size_t envelope_cells = 2;

  std::size_t trajectory_steps = 10000000;
  std::size_t burn_in = 1000;
  std::size_t max_rows = 1000000;
  std::vector<double> trajectory_y0{-1.0, 1.0};

  std::size_t levelset_nx = 400;
  std::size_t levelset_ny = 400;

  std::vector<double> fibre_y{-0.6, -0.3, 0.3, 0.6};

  std::vector<std::size_t> dimension_orders{8, 10};
  std::vector<std::string> dimension_phi_hat{"upper", "lower", "middle"};

  double strip_threshold = -0.1;
  double strip_window_lo = 0.25;
  double strip_window_hi = 0.75;

  Interval I() const { return {I_lo, I_hi}; }
  Interval J() const { return {-M, M}; }
  ClassifyConfig classify_config() const;
};

/// Names accepted by apply_preset: fig1a, fig1b, fig1c, fig2.
std::vector<std::string> preset_names();
/// Sets scenario and eps (and the shared r, M, I, a) for a named preset.
/// Throws std::invalid_argument for unknown names.
void apply_preset(ScenarioConfig& cfg, const std::string& name);

/// Sets one key; throws std::invalid_argument for unknown keys or bad values.
void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Parses a config stream. A `preset` key is applied before all other keys,
/// whatever its position.
ScenarioConfig parse_config(std::istream& is, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});

/// Throws std::invalid_argument naming the first field outside its range,
/// including a missing seed.
void validate(const ScenarioConfig& cfg);

/// Resolved configuration in the same key = value format (round-trips
/// through parse_config).
void write_config(std::ostream& os, const ScenarioConfig& cfg);

}  // namespace skewprod
