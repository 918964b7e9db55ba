#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/common.hpp"
#include "skewprod/digits.hpp"
#include "skewprod/fibre.hpp"

namespace skewprod {

enum class GraphKind { upper, lower, middle };

const char* to_string(GraphKind k);
/// Parses "upper", "lower" or "middle"; throws std::invalid_argument otherwise.
GraphKind parse_graph_kind(const std::string& s);

/// Sampled invariant graph over a uniform grid of [0,1).
///
/// The bounding graphs depend on x only and satisfy phi(x) = f_{tau x}(phi(tau x)).
/// The middle graph depends on the future of xi as well; a GraphGrid of kind
/// middle is the slice x -> phi*(xi, x) for the digit sequence xi_digits.
struct GraphGrid {
  GraphKind kind = GraphKind::upper;
  std::size_t depth = 0;
  double anchor = 0.0;
  /// Nonzero when xs[i] == i / denominator exactly and tau is evaluated in
  /// exact rational arithmetic (doubling map); zero for a floating grid.
  std::uint64_t denominator = 0;
  std::vector<double> xs;
  std::vector<double> values;
  /// Middle graph only: 1 where the inverse folds left J (value is NaN).
  std::vector<std::uint8_t> diverged;
  /// Middle graph only: digits of the xi slice.
  DigitSequence xi_digits;
  /// Max invariance defect over the grid (see invariance_residual).
  double residual = 0.0;

  std::size_t size() const { return xs.size(); }
  std::size_t diverged_count() const;
  /// Linear interpolation on the circle. NaN neighbours give NaN.
  double at(double x) const;
};

/// Grid size used for a requested resolution. Under the doubling map this is
/// 6p with p the smallest prime >= requested/6 (and >= 5) having 2 as a
/// primitive root: the grid then contains 0, 1/6, ..., 5/6 exactly and every
/// other node has tau-period p - 1, so the pullback never collapses onto a
/// short periodic orbit. For other a the requested size is used.
std::size_t graph_grid_size(const BakerSystem& sys, std::size_t requested);

/// psi_k(x) = f_{tau x} o f_{tau^2 x} o ... o f_{tau^k x}(anchor) with exact
/// rational tau-orbit.
double pullback_value(const FibreFamily& fam, RationalPoint x, std::size_t k, double anchor);
/// Same with floating tau-orbit.
double pullback_value(const FibreFamily& fam, const BakerSystem& sys, double x, std::size_t k,
                      double anchor);
/// Same for the point whose tau-itinerary is `x_digits` (size >= k + 1). The
/// orbit points are reconstructed backwards from the tail, so no precision is
/// lost under doubling.
double pullback_value_digits(const FibreFamily& fam, const BakerSystem& sys,
                             std::span<const std::uint8_t> x_digits, std::size_t k, double anchor);

/// Upper (anchor +M) or lower (anchor -M) graph at depth k. Each grid value is
/// also computed at depth k + 1; throws NumericError when the pullback is not
/// monotone in k (anchor inside the attractor). residual is max |psi_k - psi_{k+1}|,
/// which equals the invariance defect on an exact grid.
GraphGrid pullback_graph(const FibreFamily& fam, const BakerSystem& sys, GraphKind kind,
                         std::size_t requested_n, std::size_t k, double M);

/// phi*_k(xi, x) = f^{-1}_{x_0} o ... o f^{-1}_{x_{k-1}}(y0) along the forward
/// x-orbit x_0 = x, x_{j+1} = branch_{d_j}(x_j). Inverses are taken inside J;
/// empty when a preimage leaves J.
std::optional<double> middle_value(const FibreFamily& fam, const BakerSystem& sys,
                                   std::span<const std::uint8_t> xi_digits, double x,
                                   std::size_t k, double y0, Interval J);

/// Middle graph slice for xi_digits (size >= k + 1). residual is the max over
/// non-diverged nodes of |f_x(phi*_k(xi, x)) - phi*_k(T(xi, x))|.
GraphGrid middle_graph(const FibreFamily& fam, const BakerSystem& sys, std::size_t requested_n,
                       std::size_t k, double y0, Interval J, DigitSequence xi_digits);

struct PinchScan {
  double min_gap = 0.0;
  std::vector<double> argmin;  ///< grid nodes attaining min_gap (within 1e-12)
  std::vector<std::uint8_t> pinched;
  std::size_t pinched_count = 0;
  /// After local refinement (equal to min_gap without refinement).
  double refined_min_gap = 0.0;
  double refined_argmin = 0.0;
};

/// Grid-only scan; upper and lower must share xs.
PinchScan pinched_scan(const GraphGrid& upper, const GraphGrid& lower, double tol);

/// Grid scan followed by evaluation on a grid refined by `refine` around the
/// `minima` smallest local minima of the gap.
PinchScan pinched_scan(const FibreFamily& fam, const BakerSystem& sys, const GraphGrid& upper,
                       const GraphGrid& lower, double tol, std::size_t refine = 16,
                       std::size_t minima = 8);

struct InvarianceResidual {
  double max_defect = 0.0;
  /// Bound on the linear interpolation error at tau x (zero on an exact grid).
  double interpolation_bound = 0.0;
};

/// max_i |f_{tau x_i}(phi(tau x_i)) - phi(x_i)| for the bounding graphs, which
/// is the relation phi(x) = f_{tau x}(phi(tau x)). Middle graphs carry their own
/// residual from middle_graph and are returned as stored.
InvarianceResidual invariance_residual(const FibreFamily& fam, const BakerSystem& sys,
                                       const GraphGrid& g);

/// Columns x, value, kind, k, residual.
void write_graph_csv(std::ostream& os, const GraphGrid& g);

}  // namespace skewprod
