#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/common.hpp"
#include "skewprod/digits.hpp"

namespace skewprod {

struct FibreDerivs {
  double f = 0.0;
  double f_y = 0.0;    ///< d f_x / dy
  double f_x = 0.0;    ///< d f_x / dx (forcing direction)
  double f_yy = 0.0;
  double f_yyy = 0.0;
  double schwarzian = 0.0;
};

/// Family x -> f_x of increasing fibre maps, 1-periodic in x.
class FibreFamily {
 public:
  virtual ~FibreFamily() = default;

  virtual double value(double x, double y) const = 0;
  /// Fibre derivative f'_x(y).
  virtual double dy(double x, double y) const = 0;
  virtual double dx(double x, double y) const = 0;
  /// Full derivative record; throws NumericError if f'_x(y) <= 0.
  virtual FibreDerivs derivs(double x, double y) const = 0;
  virtual std::string describe() const = 0;

  /// Preimage of z under f_x inside `bracket`, by bisection. Empty when z is
  /// not in f_x(bracket).
  virtual std::optional<double> inverse(double x, double z, Interval bracket) const;
};

/// f_x(y) = arctan(r y) + eps cos(2 pi x).
class ArctanFamily final : public FibreFamily {
 public:
  ArctanFamily(double r, double eps);

  double r() const { return r_; }
  double eps() const { return eps_; }

  double value(double x, double y) const override;
  double dy(double x, double y) const override;
  double dx(double x, double y) const override;
  FibreDerivs derivs(double x, double y) const override;
  std::string describe() const override;
  /// Closed form tan(z - eps cos 2 pi x) / r.
  std::optional<double> inverse(double x, double z, Interval bracket) const override;

 private:
  double r_;
  double eps_;
};

enum class Stability { stable, unstable, neutral };

const char* to_string(Stability s);

struct FixedPoint {
  double y = 0.0;
  double slope = 0.0;  ///< derivative of the map at y
  Stability stability = Stability::neutral;
};

/// Scan resolution could not decide whether a near-tangency hides roots.
class RootSeparationError : public NumericError {
 public:
  RootSeparationError(const std::string& what, std::size_t suggested_cells)
      : NumericError(what), suggested_cells_(suggested_cells) {}
  std::size_t suggested_cells() const { return suggested_cells_; }

 private:
  std::size_t suggested_cells_;
};

struct ScalarMap {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

/// Fixed points of an increasing scalar map on `bracket`: uniform sign-change
/// scan of g(y) = F(y) - y, bisection to 1e-12, then local subdivision of
/// cells where g approaches zero without changing sign. A root whose slope is
/// within 1e-9 of one is reported neutral.
std::vector<FixedPoint> fixed_points_of(const ScalarMap& map, Interval bracket, double tol,
                                        std::size_t cells = 10000);

/// Fixed points of f_x on `bracket`.
std::vector<FixedPoint> fixed_points(const FibreFamily& fam, double x, Interval bracket,
                                     double tol, std::size_t cells = 10000);

struct OrbitResult {
  double x_n = 0.0;
  double y_n = 0.0;
  double log_deriv_sum = 0.0;
};

/// n forward steps of the skew product from (xi, x, y), where xi is given by its
/// digit stream: x_{j+1} = T's x-branch for digit j, y_{j+1} = f_{x_j}(y_j).
/// Accumulates sum_j log f'_{x_j}(y_j). Throws FibreEscape if a y_j leaves
/// `guard` (when given).
OrbitResult orbit_compose(const FibreFamily& fam, const BakerSystem& sys, DigitStream& xi,
                          double x, double y, std::size_t n,
                          std::optional<Interval> guard = std::nullopt);

OrbitResult orbit_compose(const FibreFamily& fam, const BakerSystem& sys,
                          std::span<const std::uint8_t> xi_digits, double x, double y,
                          std::size_t n, std::optional<Interval> guard = std::nullopt);

/// Bound constants over T x J from padded grid extrema (see padded_extremum).
struct BoundConstants {
  double sup_abs_a = 0.0;       ///< sup |A|, A = (d f/dx) / f'
  double inf_fy = 0.0;          ///< inf f'
  double gamma_norm = 0.0;      ///< sup sigma / f' = max(a, 1-a) / inf f'
  double c0 = 0.0;              ///< sup |d log f' / dy|
  double c_prime = 0.0;         ///< sup |dA/dy|
  double schwarzian_max = 0.0;  ///< max Schwarzian on the grid (no safety factor)
  /// Slope bound for strong stable fibres: sup |A| / (1 - gamma_norm); infinite
  /// when gamma_norm >= 1.
  double slope_bound = 0.0;
};

BoundConstants compute_bounds(const FibreFamily& fam, const BakerSystem& sys, Interval J,
                              std::size_t grid = 400);

}  // namespace skewprod
