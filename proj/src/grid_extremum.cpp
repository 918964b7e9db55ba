#include "skewprod/grid_extremum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace skewprod {

PaddedExtremum padded_extremum(const std::function<double(double, double)>& g, Interval xr,
                               Interval yr, std::size_t nx, std::size_t ny, Extremum mode,
                               bool x_periodic) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("padded_extremum needs at least 2 cells per axis");
  constexpr double kSafety = 1.05;
  const std::size_t cols = x_periodic ? nx : nx + 1;
  const std::size_t rows = ny + 1;
  const double hx = xr.width() / static_cast<double>(nx);
  const double hy = yr.width() / static_cast<double>(ny);

  std::vector<double> v(cols * rows);
  for (std::size_t i = 0; i < cols; ++i) {
    const double x = (i == nx) ? xr.hi : xr.lo + hx * static_cast<double>(i);
    for (std::size_t j = 0; j < rows; ++j) {
      const double y = (j == ny) ? yr.hi : yr.lo + hy * static_cast<double>(j);
      v[i * rows + j] = g(x, y);
    }
  }
  const auto at = [&](std::size_t i, std::size_t j) { return v[i * rows + j]; };

  PaddedExtremum out;
  out.grid_value = mode == Extremum::max ? -std::numeric_limits<double>::infinity()
                                         : std::numeric_limits<double>::infinity();
  double dx = 0.0, dy = 0.0, dxx = 0.0, dyy = 0.0;
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j < rows; ++j) {
      const double val = at(i, j);
      if (!std::isfinite(val)) throw std::domain_error("padded_extremum: non-finite sample");
      const bool better = mode == Extremum::max ? val > out.grid_value : val < out.grid_value;
      if (better) {
        out.grid_value = val;
        out.arg_x = xr.lo + hx * static_cast<double>(i);
        out.arg_y = yr.lo + hy * static_cast<double>(j);
      }
      if (j + 1 < rows) dy = std::max(dy, std::abs(at(i, j + 1) - val));
      if (j + 2 < rows) dyy = std::max(dyy, std::abs(at(i, j + 2) - 2.0 * at(i, j + 1) + val));
      const bool has_next = x_periodic || i + 1 < cols;
      const bool has_next2 = x_periodic || i + 2 < cols;
      if (has_next) dx = std::max(dx, std::abs(at((i + 1) % cols, j) - val));
      if (has_next2) {
        dxx = std::max(dxx, std::abs(at((i + 2) % cols, j) - 2.0 * at((i + 1) % cols, j) + val));
      }
    }
  }
  out.dx_bound = kSafety * dx / hx;
  out.dy_bound = kSafety * dy / hy;
  const double dxx_bound = kSafety * dxx / (hx * hx);
  const double dyy_bound = kSafety * dyy / (hy * hy);
  const double first = 0.5 * (hx * out.dx_bound + hy * out.dy_bound);
  const double second = (hx * hx * dxx_bound + hy * hy * dyy_bound) / 8.0;
  out.padding = std::min(first, second);
  out.bound = mode == Extremum::max ? out.grid_value + out.padding : out.grid_value - out.padding;
  return out;
}

PaddedExtremum padded_extremum_1d(const std::function<double(double)>& g, Interval xr,
                                  std::size_t n, Extremum mode) {
  if (n < 2) throw std::invalid_argument("padded_extremum_1d needs at least 2 cells");
  constexpr double kSafety = 1.05;
  const double h = xr.width() / static_cast<double>(n);
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    v[i] = g(i == n ? xr.hi : xr.lo + h * static_cast<double>(i));
    if (!std::isfinite(v[i])) throw std::domain_error("padded_extremum_1d: non-finite sample");
  }
  PaddedExtremum out;
  out.grid_value = v[0];
  out.arg_x = xr.lo;
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const bool better = mode == Extremum::max ? v[i] > out.grid_value : v[i] < out.grid_value;
    if (better) {
      out.grid_value = v[i];
      out.arg_x = xr.lo + h * static_cast<double>(i);
    }
    if (i + 1 <= n) d1 = std::max(d1, std::abs(v[i + 1] - v[i]));
    if (i + 2 <= n) d2 = std::max(d2, std::abs(v[i + 2] - 2.0 * v[i + 1] + v[i]));
  }
  out.dx_bound = h > 0.0 ? kSafety * d1 / h : 0.0;
  const double first = 0.5 * kSafety * d1;
  const double second = kSafety * d2 / 8.0;
  out.padding = std::min(first, second);
  out.bound = mode == Extremum::max ? out.grid_value + out.padding : out.grid_value - out.padding;
  return out;
}

}  // namespace skewprod
