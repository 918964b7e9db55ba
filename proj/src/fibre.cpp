#include "skewprod/fibre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "skewprod/grid_extremum.hpp"

namespace skewprod {

std::optional<double> FibreFamily::inverse(double x, double z, Interval bracket) const {
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (z < value(x, lo) || z > value(x, hi)) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value(x, mid) < z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ArctanFamily::ArctanFamily(double r, double eps) : r_(r), eps_(eps) {
  if (!(r > 0.0)) throw std::invalid_argument("arctan steepness r must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("forcing amplitude must be non-negative");
}

double ArctanFamily::value(double x, double y) const {
  return std::atan(r_ * y) + eps_ * std::cos(kTwoPi * x);
}

double ArctanFamily::dy(double, double y) const {
  const double ry = r_ * y;
  return r_ / (1.0 + ry * ry);
}

double ArctanFamily::dx(double x, double) const { return -kTwoPi * eps_ * std::sin(kTwoPi * x); }

FibreDerivs ArctanFamily::derivs(double x, double y) const {
  const double ry = r_ * y;
  const double q = 1.0 + ry * ry;
  FibreDerivs d;
  d.f = value(x, y);
  d.f_y = r_ / q;
  d.f_x = dx(x, y);
  d.f_yy = -2.0 * r_ * r_ * ry / (q * q);
  d.f_yyy = 2.0 * r_ * r_ * r_ * (3.0 * ry * ry - 1.0) / (q * q * q);
  if (!(d.f_y > 0.0)) throw NumericError("fibre map is not increasing");
  const double ratio = d.f_yy / d.f_y;
  d.schwarzian = d.f_yyy / d.f_y - 1.5 * ratio * ratio;
  return d;
}

std::string ArctanFamily::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "arctan(r=" << r_ << ", eps=" << eps_ << ")";
  return os.str();
}

std::optional<double> ArctanFamily::inverse(double x, double z, Interval bracket) const {
  const double w = z - eps_ * std::cos(kTwoPi * x);
  if (!(std::abs(w) < 0.25 * kTwoPi)) return std::nullopt;
  const double y = std::tan(w) / r_;
  if (!bracket.contains(y)) return std::nullopt;
  return y;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::neutral:
      return "neutral";
  }
  return "?";
}

namespace {

constexpr int kMaxSubdivisionDepth = 3;
constexpr std::size_t kSubcells = 256;

double bisect_root(const std::function<double(double)>& g, double lo, double hi, double glo) {
  for (int it = 0; it < 200 && hi - lo > 1e-12 * 0.5; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void scan(const std::function<double(double)>& g, double lo, double hi, std::size_t cells,
          double tol, int depth, std::size_t base_cells, std::vector<double>& roots,
          std::vector<double>& tangencies) {
  const double h = (hi - lo) / static_cast<double>(cells);
  std::vector<double> ys(cells + 1), gs(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    ys[i] = (i == cells) ? hi : lo + h * static_cast<double>(i);
    gs[i] = g(ys[i]);
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (gs[i] == 0.0) {
      roots.push_back(ys[i]);
    } else if (gs[i + 1] != 0.0 && (gs[i] < 0.0) != (gs[i + 1] < 0.0)) {
      roots.push_back(bisect_root(g, ys[i], ys[i + 1], gs[i]));
    }
  }
  if (gs[cells] == 0.0) roots.push_back(ys[cells]);

  // Interior local minima of |g| with no neighbouring sign change may hide a
  // pair of close roots or a tangency.
  for (std::size_t i = 1; i < cells; ++i) {
    const double a = std::abs(gs[i]);
    if (gs[i] == 0.0) continue;
    if (!(a <= std::abs(gs[i - 1]) && a <= std::abs(gs[i + 1]))) continue;
    if ((gs[i - 1] < 0.0) != (gs[i] < 0.0) || (gs[i + 1] < 0.0) != (gs[i] < 0.0)) continue;
    const double lip = std::max(std::abs(gs[i] - gs[i - 1]), std::abs(gs[i + 1] - gs[i])) / h;
    if (a > 1.05 * lip * h) continue;
    if (a <= tol * (1.0 + std::abs(ys[i]))) {
      tangencies.push_back(ys[i]);
      continue;
    }
    if (depth >= kMaxSubdivisionDepth) {
      std::ostringstream os;
      os << "cannot separate roots near y=" << ys[i] << " (|g|=" << a << ")";
      std::size_t suggested = base_cells;
      for (int k = 0; k <= depth; ++k) suggested *= kSubcells;
      throw RootSeparationError(os.str(), suggested);
    }
    scan(g, ys[i - 1], ys[i + 1], kSubcells, tol, depth + 1, base_cells, roots, tangencies);
  }
}

}  // namespace

std::vector<FixedPoint> fixed_points_of(const ScalarMap& map, Interval bracket, double tol,
                                        std::size_t cells) {
  if (!(tol > 0.0)) throw std::invalid_argument("fixed point tolerance must be positive");
  if (cells < 2) throw std::invalid_argument("fixed point scan needs at least two cells");
  const auto g = [&](double y) { return map.value(y) - y; };
  std::vector<double> roots;
  std::vector<double> tangencies;
  scan(g, bracket.lo, bracket.hi, cells, tol, 0, cells, roots, tangencies);

  std::vector<FixedPoint> out;
  const auto add = [&](double y, bool tangent) {
    for (const auto& fp : out) {
      if (std::abs(fp.y - y) < 1e-9) return;
    }
    if (std::abs(g(y)) > tol * (1.0 + std::abs(y)) && !tangent) return;
    FixedPoint fp;
    fp.y = y;
    fp.slope = map.slope(y);
    if (tangent || std::abs(fp.slope - 1.0) <= 1e-9) {
      fp.stability = Stability::neutral;
    } else {
      fp.stability = fp.slope < 1.0 ? Stability::stable : Stability::unstable;
    }
    out.push_back(fp);
  };
  std::sort(roots.begin(), roots.end());
  for (double y : roots) add(y, false);
  for (double y : tangencies) add(y, true);
  std::sort(out.begin(), out.end(), [](const FixedPoint& l, const FixedPoint& r) { return l.y < r.y; });
  return out;
}

std::vector<FixedPoint> fixed_points(const FibreFamily& fam, double x, Interval bracket, double tol,
                                     std::size_t cells) {
  ScalarMap map{[&](double y) { return fam.value(x, y); }, [&](double y) { return fam.dy(x, y); }};
  return fixed_points_of(map, bracket, tol, cells);
}

namespace {

template <class NextDigit>
OrbitResult compose_impl(const FibreFamily& fam, const BakerSystem& sys, NextDigit&& next_digit,
                         double x, double y, std::size_t n, const std::optional<Interval>& guard) {
  OrbitResult res{x, y, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    res.log_deriv_sum += std::log(fam.dy(res.x_n, res.y_n));
    const double y_next = fam.value(res.x_n, res.y_n);
    res.x_n = sys.inverse_branch(next_digit(j), res.x_n);
    res.y_n = y_next;
    if (guard && !guard->contains(res.y_n)) {
      std::ostringstream os;
      os << "fibre orbit escaped [" << guard->lo << ", " << guard->hi << "] at step " << j + 1
         << " (y=" << res.y_n << ")";
      throw FibreEscape(os.str());
    }
  }
  return res;
}

}  // namespace

OrbitResult orbit_compose(const FibreFamily& fam, const BakerSystem& sys, DigitStream& xi, double x,
                          double y, std::size_t n, std::optional<Interval> guard) {
  return compose_impl(fam, sys, [&](std::size_t) { return xi.next(); }, x, y, n, guard);
}

OrbitResult orbit_compose(const FibreFamily& fam, const BakerSystem& sys,
                          std::span<const std::uint8_t> xi_digits, double x, double y, std::size_t n,
                          std::optional<Interval> guard) {
  if (xi_digits.size() < n) throw std::invalid_argument("orbit_compose: not enough xi digits");
  return compose_impl(fam, sys, [&](std::size_t j) { return xi_digits[j]; }, x, y, n, guard);
}

BoundConstants compute_bounds(const FibreFamily& fam, const BakerSystem& sys, Interval J,
                              std::size_t grid) {
  const Interval torus{0.0, 1.0};
  const auto sup_abs = [&](const std::function<double(double, double)>& g) {
    return padded_extremum([&](double x, double y) { return std::abs(g(x, y)); }, torus, J, grid,
                           grid, Extremum::max)
        .bound;
  };
  BoundConstants b;
  b.inf_fy = padded_extremum([&](double x, double y) { return fam.dy(x, y); }, torus, J, grid, grid,
                             Extremum::min)
                 .bound;
  if (!(b.inf_fy > 0.0)) throw NumericError("fibre derivative bound is not positive on J");
  b.sup_abs_a = sup_abs([&](double x, double y) { return fam.dx(x, y) / fam.dy(x, y); });
  b.c0 = sup_abs([&](double x, double y) {
    const FibreDerivs d = fam.derivs(x, y);
    return d.f_yy / d.f_y;
  });
  const double fd = 1e-6 * std::max(1.0, J.width());
  b.c_prime = sup_abs([&](double x, double y) {
    const double a_plus = fam.dx(x, y + fd) / fam.dy(x, y + fd);
    const double a_minus = fam.dx(x, y - fd) / fam.dy(x, y - fd);
    return (a_plus - a_minus) / (2.0 * fd);
  });
  b.schwarzian_max = padded_extremum([&](double x, double y) { return fam.derivs(x, y).schwarzian; },
                                     torus, J, grid, grid, Extremum::max)
                         .grid_value;
  b.gamma_norm = std::max(sys.a(), 1.0 - sys.a()) / b.inf_fy;
  b.slope_bound = b.gamma_norm < 1.0 ? b.sup_abs_a / (1.0 - b.gamma_norm)
                                     : std::numeric_limits<double>::infinity();
  return b;
}

}  // namespace skewprod
