#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/common.hpp"
#include "skewprod/fibre.hpp"
#include "skewprod/grid_extremum.hpp"

namespace skewprod {

/// Numerical certificate for the standing hypotheses on T x J:
///   f'_x(y) > 0, Schwarzian < 0, inf tau'(x) f'_{tau x}(y) > 1,
///   f(T x J) inside the interior of I, and I inside the interior of J.
/// Grid extrema are padded by the model of padded_extremum.
struct HypothesisCertificate {
  Interval I;
  Interval J;
  std::size_t grid = 0;

  double inf_fy = 0.0;            ///< padded inf f' over T x J
  double expansion = 0.0;         ///< padded inf tau' f'_{tau x}(y)
  double expansion_margin = 0.0;  ///< expansion - 1
  double image_lo = 0.0;          ///< padded inf f over T x J
  double image_hi = 0.0;          ///< padded sup f over T x J
  double invariance_margin = 0.0; ///< min(I.hi - image_hi, image_lo - I.lo)
  double eps0 = 0.0;              ///< min(I.lo - J.lo, J.hi - I.hi)
  double schwarzian_max = 0.0;    ///< padded sup of the Schwarzian over T x J
  double padding_fy = 0.0;
  double padding_image = 0.0;

  bool pass = false;
  /// Constraint with the smallest margin (failing one when pass is false):
  /// "expansion", "invariance", "nesting", "schwarzian" or "monotone".
  std::string binding;
};

/// Throws std::invalid_argument unless I and J are proper intervals with I
/// contained in J, or when grid < 100.
HypothesisCertificate check_hypotheses(const FibreFamily& fam, const BakerSystem& sys, Interval I,
                                       Interval J, std::size_t grid = 1000);

void write_certificate(std::ostream& os, const HypothesisCertificate& c);

struct RegionCell {
  double M = 0.0;
  double r = 0.0;
  bool pass = false;
  double expansion_margin = 0.0;
  double invariance_margin = 0.0;
};

/// I chosen for J = [-M, M]: the padded image hull of f over T x J inflated by
/// 10% of the slack on each side. Falls back to a thin interval inside J when
/// the hull is not inside J, so that the resulting certificate fails on
/// invariance rather than on the interval preconditions.
Interval auto_invariant_interval(const FibreFamily& fam, Interval J, std::size_t grid);

/// Region map of (M, r) for the arctan family with amplitude eps. Nodes are
/// M_range.lo + i (M_range.hi - M_range.lo) / (nM - 1), likewise for r; each
/// node is certified with J = [-M, M] and I from auto_invariant_interval at
/// cell_grid per axis. Output is row-major in M then r.
std::vector<RegionCell> scan_region(double eps, double a, Interval M_range, Interval r_range,
                                    std::size_t nM, std::size_t nr, std::size_t cell_grid = 200);

void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells);

/// Padded extremum over x in `window` of the two-step map x -> f_x(f_{tau x}(y)),
/// evaluated separately on each branch of tau (closed pieces) so that every
/// piece is smooth. Each piece gets about grid * width nodes.
PaddedExtremum two_step_value_extremum(const FibreFamily& fam, const BakerSystem& sys, double y,
                                       Interval window, Extremum mode, std::size_t grid = 20000);

/// Padded sup over x in [0,1] and y in `band` of (f_x o f_{tau x})'(y), per branch.
PaddedExtremum two_step_slope_sup(const FibreFamily& fam, const BakerSystem& sys, Interval band,
                                  std::size_t grid = 1000);

}  // namespace skewprod
