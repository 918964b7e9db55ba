#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/classify.hpp"
#include "skewprod/config.hpp"
#include "skewprod/dimension.hpp"
#include "skewprod/fibre.hpp"
#include "skewprod/hypotheses.hpp"

namespace skewprod {

struct Crossing {
  std::size_t trajectory = 0;
  std::uint64_t step = 0;  ///< index of the first iterate with the new sign
  double y_before = 0.0;
  double y_after = 0.0;
};

struct TrajectoryStats {
  std::size_t rows = 0;
  std::vector<Crossing> crossings;
  double final_y = 0.0;
};

/// Forward orbit y_{j+1} = f_{x_j}(y_j), x_{j+1} = branch_{d_j}(x_j) for `steps`
/// steps. x_0 and the digits of xi are drawn from streams of `seed`. Rows
/// (step, xi, x, y) are written for steps >= burn_in with a stride that keeps
/// at most max_rows rows; xi is rebuilt from the next 64 digits. Crossings
/// (sign changes of y) are recorded at full resolution from step 1.
TrajectoryStats run_trajectory(const FibreFamily& fam, const BakerSystem& sys, std::uint64_t seed,
                               std::size_t index, double y0, std::size_t steps,
                               std::size_t burn_in, std::size_t max_rows, std::ostream* csv);

/// Columns x, y, below with below = 1 where f_x(f_{tau x}(y)) < y, over cell
/// centres of [0,1) x J.
void write_levelset_csv(std::ostream& os, const FibreFamily& fam, const BakerSystem& sys,
                        Interval J, std::size_t nx, std::size_t ny);

/// Seed passed to run_trajectory by run_scenario for configuration seed `seed`.
std::uint64_t trajectory_seed(std::uint64_t seed);

void write_crossings_csv(std::ostream& os, const std::vector<Crossing>& crossings);

struct ScenarioSummary {
  HypothesisCertificate certificate;
  ClassificationReport report;
  std::vector<DimensionEstimate> dimensions;
  bool has_strip = false;
  StripBound strip;
  std::size_t crossings = 0;
  std::vector<std::string> files;
  std::vector<std::string> notes;
};

/// Runs every stage and writes into cfg.output_dir: resolved_config.txt,
/// certificate.txt, trajectory_<i>.csv, crossings.csv, levelset.csv,
/// fibre_<k>.csv, graph_upper.csv, graph_lower.csv, graph_middle.csv,
/// classification.txt, classification_margins.csv, exponents.csv,
/// dimension.csv and strip_bound.txt (a = 1/2 only). Throws HypothesisError
/// when the certificate fails and override_hypotheses is false, after writing
/// the configuration and the certificate.
ScenarioSummary run_scenario(const ScenarioConfig& cfg);

void write_summary(std::ostream& os, const ScenarioSummary& s);
void write_strip_bound(std::ostream& os, const StripBound& s);

}  // namespace skewprod
