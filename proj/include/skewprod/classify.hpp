#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/common.hpp"
#include "skewprod/fibre.hpp"
#include "skewprod/lyapunov.hpp"

namespace skewprod {

struct PinchRecord {
  double x = 0.0;
  std::uint64_t num = 0;  ///< exact x = num / den under doubling (den == 0 otherwise)
  std::uint64_t den = 0;
  int period = 1;
  std::vector<FixedPoint> fixed_points;  ///< of f_{tau x} o ... o f_{tau^p x} on J
  bool pinched = false;   ///< unique fixed point, so phi-(x) = phi+(x)
  bool resolved = true;   ///< false when root separation failed
  std::string note;
};

/// Every periodic x of minimal period 1..max_period (max_period <= 12).
/// Throws RootSeparationError on the first unresolved point when `propagate`,
/// otherwise records it with resolved = false.
std::vector<PinchRecord> periodic_pinch_test(const FibreFamily& fam, const BakerSystem& sys,
                                             int max_period, Interval J, bool propagate = true);

/// Two-step strip certificate above y_s: f_x(f_{tau x}(y_s)) > y_s for all x,
/// (f_x o f_{tau x})' < 1 on [y_s, M], so the strip is invariant and uniformly
/// contracted by the two-step branches.
struct StripCertificate {
  double y_s = 0.0;
  double push_margin = 0.0;      ///< padded min_x f_x(f_{tau x}(y_s)) - y_s
  double contraction_sup = 0.0;  ///< padded sup of the two-step slope on [y_s, M]
  double graph_min = 0.0;        ///< min of the upper graph over the grid
  bool pass = false;
};

StripCertificate strip_certificate(const FibreFamily& fam, const BakerSystem& sys, double y_s,
                                   double M, double graph_min, std::size_t grid = 1000);

struct ClassifyConfig {
  double M = 0.86;
  Interval I{-0.858, 0.858};
  Interval J{-0.86, 0.86};
  std::size_t grid = 4096;
  std::size_t depth = 200;
  double pinch_tol = 1e-3;
  std::size_t refine = 16;
  int max_period = 8;
  std::size_t lambda_samples = 20000;
  std::uint64_t seed = 1;
  double strip_y = 0.3;
  double band_margin = 0.1;
  double b2ii_tol = 1e-3;
  double fibre_h = 1e-4;
  double fibre_x = 0.5;
  /// Half-width in grid cells of the envelope window for band distances.
  std::size_t envelope_cells = 2;
};

struct ClassificationReport {
  std::string case_label;   ///< "A" or "B"
  std::string case_grade;   ///< "certified" or "evidence"
  std::string subcase;      ///< A1, A2, B2-i, B2-ii or "inconclusive (...)"
  std::string subcase_grade = "evidence";
  std::string case_reason;

  double min_gap = 0.0;
  double refined_min_gap = 0.0;
  double refined_argmin = 0.0;
  std::size_t pinched_grid_points = 0;
  std::size_t grid_size = 0;

  std::size_t periodic_tested = 0;
  std::size_t periodic_unresolved = 0;
  std::vector<PinchRecord> pinched_periodic;

  ExponentEstimate lambda_minus;
  ExponentEstimate lambda_star;
  ExponentEstimate lambda_plus;
  bool lambda_star_excludes_a = false;

  std::size_t middle_diverged = 0;
  /// Case A: distance of the stable fibre through the middle graph to the
  /// band envelopes, and its agreement with the middle slice.
  double fibre_band_distance = 0.0;
  double fibre_middle_distance = 0.0;

  StripCertificate strip;
  /// Case B: sup |phi_hat - l^ss| along fibres through the graph for two xi.
  double fibre_graph_distance = 0.0;
  double fibre_graph_distance_alt = 0.0;
  /// Sup distance between the fibres through one point for two xi.
  double fibre_variation = 0.0;

  std::vector<std::string> notes;
};

/// Decision rules:
///   any pinched periodic point                      -> B, certified
///   lambda*(Lebesgue) + 3 se < 0                    -> B, evidence
///   refined min gap > pinch_tol                     -> A, evidence
///   otherwise                                       -> B, evidence
/// Subcases: A1 when the fibre through the middle graph keeps band_margin from
/// both band envelopes (A2 otherwise). In case B the strip certificate selects
/// B2; B2-ii when the upper graph agrees with the stable fibres through it to
/// b2ii_tol for two xi, B2-i otherwise. Without the strip certificate the result
/// is "inconclusive (B1 or B2-i)" when the fibres vary with xi, else "inconclusive".
ClassificationReport classify_scenario(const FibreFamily& fam, const BakerSystem& sys,
                                       const ClassifyConfig& cfg);

/// key: value lines.
void write_report(std::ostream& os, const ClassificationReport& r);
/// Columns criterion, value, threshold, holds.
void write_margins_csv(std::ostream& os, const ClassificationReport& r, const ClassifyConfig& cfg);

}  // namespace skewprod
