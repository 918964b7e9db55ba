#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/common.hpp"
#include "skewprod/fibre.hpp"
#include "skewprod/graphs.hpp"
#include "skewprod/markov_oracle.hpp"

namespace skewprod {

/// Cylinder data of order n for the x-itinerary shift. Cylinder w has digits
/// e_0 ... e_{n-1} (e_0 most significant), tau maps it onto the cylinders
/// e_1 ... e_{n-1} e for e in {0,1}.
struct PressureModel {
  std::size_t order = 0;
  std::vector<double> xs;       ///< cylinder midpoints
  std::vector<double> psi;      ///< log f'_x(phi_hat(x)) at the midpoint
  std::vector<double> psi_3pt;  ///< average over the points at 1/4, 1/2, 3/4 of the cylinder
  std::vector<double> log_tau;  ///< log tau' on the cylinder
  /// Leading eigenvector of the last evaluation, reused as a warm start.
  mutable std::vector<double> eigvec;
  mutable std::size_t last_sweeps = 0;
  mutable std::size_t evaluations = 0;

  std::size_t states() const { return psi.size(); }
  /// max |psi - psi_3pt|
  double cylinder_diagnostic() const;
};

/// Cylinder midpoints x_w = g_{e_0}(g_{e_1}(... g_{e_{n-1}}(c))) with c = 1/2.
std::vector<double> cylinder_points(const BakerSystem& sys, std::size_t order, double c = 0.5);

/// Potential from a graph. Upper and lower graphs are re-evaluated exactly by
/// the pullback at their depth and anchor; the middle graph is interpolated.
/// Throws NumericError when the potential is not finite, std::invalid_argument
/// unless 1 <= order <= 16.
PressureModel make_pressure_model(const FibreFamily& fam, const BakerSystem& sys,
                                  const GraphGrid& graph, std::size_t order);

/// Model with a given potential (2^order entries); psi_3pt = psi.
PressureModel make_pressure_model(const BakerSystem& sys, std::vector<double> psi,
                                  std::size_t order);

/// log of the leading eigenvalue of L[w, w'] = exp(potential(w)) [w' = shift(w) e],
/// by power iteration with Collatz-Wielandt bounds to relative tolerance 1e-12.
/// Throws NumericError after 1e5 sweeps.
double pressure_eval(const PressureModel& m, const std::vector<double>& potential);
/// P(-q psi - s log tau').
double pressure_eval(const PressureModel& m, double q, double s);

struct DimensionEstimate {
  bool empty = false;   ///< verdict "P empty": no measure satisfies the constraint
  double value = 0.0;   ///< 1 + s* (NaN when empty)
  double s_star = 0.0;
  double q_star = 0.0;
  double g_zero = 0.0;  ///< G(0) = inf_q P(-q psi)
  bool q_unbounded = false;  ///< the q search ran to its cap
  GraphKind phi_hat = GraphKind::upper;
  std::size_t order = 0;
  double oracle_s = 0.0;       ///< s from the direct Markov program
  bool oracle_empty = false;
  double gap = 0.0;            ///< |s* - oracle_s| (1 when the verdicts differ)
  double cylinder_diagnostic = 0.0;
  std::size_t pressure_evaluations = 0;

  std::string verdict() const;
};

struct DimensionOptions {
  double q_initial = 1.0;  ///< initial upper end of the q bracket
  double q_cap = 1e6;
  bool check_gap = true;
  /// Throw NumericError when the gap exceeds gap_tol.
  bool strict = true;
  double gap_tol = 1e-2;
};

/// G(s) = inf_{q >= 0} P(-q psi - s log tau') by golden-section search on an
/// expanding bracket; s* in [0,1] solves G(s*) = 0 (directly when log tau' is
/// constant, by bisection otherwise). G(0) < 0 gives the verdict "P empty".
DimensionEstimate dimension_estimate(const PressureModel& m, GraphKind phi_hat,
                                     const DimensionOptions& opt = {});

DimensionEstimate dimension_estimate(const FibreFamily& fam, const BakerSystem& sys,
                                     const GraphGrid& graph, std::size_t order,
                                     const DimensionOptions& opt = {});

/// inf_{q >= 0} P(-q psi - s log tau'), with the minimizer.
struct DualValue {
  double value = 0.0;
  double q = 0.0;
  bool unbounded = false;
};
DualValue dual_function(const PressureModel& m, double s, const DimensionOptions& opt = {});

struct BernoulliRow {
  double p = 0.0;  ///< probability of digit 1 in the x-itinerary
  double entropy = 0.0;
  double lambda = 0.0;
  double std_error = 0.0;
  bool feasible = false;
  double bound = 1.0;  ///< 1 + h / integral log tau'
};

struct BernoulliBound {
  std::vector<BernoulliRow> rows;
  bool any_feasible = false;
  double best = 1.0;  ///< max bound over feasible rows
};

/// Monte Carlo estimate of the graph exponent under Bernoulli(p) itineraries
/// of x for each p; feasible when lambda + 3 se <= 0.
BernoulliBound bernoulli_lower_bound(const FibreFamily& fam, const BakerSystem& sys,
                                     const GraphGrid& graph, const std::vector<double>& p_grid,
                                     std::size_t samples, std::uint64_t seed);

struct StripBound {
  double threshold = 0.0;
  Interval window;
  double sup = 0.0;       ///< padded sup over window of f_x(f_{tau x}(threshold))
  double padding = 0.0;
  bool pass = false;
  std::size_t quaternary_digits = 0;  ///< base-4 digit intervals inside the window
  double cantor_dimension = 0.0;      ///< log(digits) / log 4
  double bound = 0.0;                 ///< 1 + cantor_dimension when pass (NaN otherwise)
};

/// Checks sup_{y < threshold} f_x(f_{tau x}(y)) < threshold over x in window.
/// The set of x whose even tau-iterates stay in the base-4 digit intervals
/// inside the window has dimension log k / log 4, which gives
/// dim_H{phi- < threshold} >= 1 + log k / log 4. Requires a = 1/2.
StripBound negative_strip_bound(const FibreFamily& fam, const BakerSystem& sys, double threshold,
                                Interval window);

/// Columns scenario, phi_hat, n, q_star, s_star, dim, gap_diagnostic.
void write_dimension_header(std::ostream& os);
void write_dimension_row(std::ostream& os, const std::string& scenario, const DimensionEstimate& d);

}  // namespace skewprod
