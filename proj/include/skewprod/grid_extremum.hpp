#pragma once

#include <cstddef>
#include <functional>

#include "skewprod/common.hpp"

namespace skewprod {

enum class Extremum { max, min };

/// Grid extremum of a C^2 function with a padding that bounds how far the true
/// extremum over the rectangle can exceed the sampled one.
///
/// Derivative bounds are the largest first and second grid differences scaled
/// by 1.05. Two paddings are valid and the smaller is used:
///   first order  (hx Dx + hy Dy) / 2         every point is within half a cell of a node
///   second order (hx^2 Dxx + hy^2 Dyy) / 8   bilinear interpolation error
struct PaddedExtremum {
  double grid_value = 0.0;
  double padding = 0.0;
  double bound = 0.0;  ///< grid_value + padding for max, grid_value - padding for min
  double arg_x = 0.0;
  double arg_y = 0.0;
  double dx_bound = 0.0;
  double dy_bound = 0.0;
};

/// When x_periodic is set the x-range is treated as a circle of length
/// xr.width() sampled at nx nodes; otherwise nx + 1 nodes including both ends.
PaddedExtremum padded_extremum(const std::function<double(double, double)>& g, Interval xr,
                               Interval yr, std::size_t nx, std::size_t ny, Extremum mode,
                               bool x_periodic = true);

/// One-dimensional version on the closed interval xr with n + 1 nodes.
PaddedExtremum padded_extremum_1d(const std::function<double(double)>& g, Interval xr,
                                  std::size_t n, Extremum mode);

}  // namespace skewprod
