#include "skewprod/hypotheses.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "skewprod/csv.hpp"
#include "skewprod/grid_extremum.hpp"

namespace skewprod {

namespace {

void require_interval(const Interval& v, const char* name) {
  if (!(v.lo < v.hi)) throw std::invalid_argument(std::string(name) + " must satisfy lo < hi");
}

struct ImageHull {
  PaddedExtremum lo;
  PaddedExtremum hi;
};

ImageHull image_hull(const FibreFamily& fam, Interval J, std::size_t grid) {
  const Interval torus{0.0, 1.0};
  const auto f = [&](double x, double y) { return fam.value(x, y); };
  return {padded_extremum(f, torus, J, grid, grid, Extremum::min),
          padded_extremum(f, torus, J, grid, grid, Extremum::max)};
}

}  // namespace

HypothesisCertificate check_hypotheses(const FibreFamily& fam, const BakerSystem& sys, Interval I,
                                       Interval J, std::size_t grid) {
  require_interval(I, "I");
  require_interval(J, "J");
  if (I.lo < J.lo || I.hi > J.hi) throw std::invalid_argument("I must be contained in J");
  if (grid < 100) throw std::invalid_argument("hypothesis grid must have at least 100 cells per axis");

  const Interval torus{0.0, 1.0};
  HypothesisCertificate c;
  c.I = I;
  c.J = J;
  c.grid = grid;

  const PaddedExtremum fy = padded_extremum([&](double x, double y) { return fam.dy(x, y); }, torus,
                                            J, grid, grid, Extremum::min);
  c.inf_fy = fy.bound;
  c.padding_fy = fy.padding;
  // tau maps each branch onto the whole circle, so the infimum splits.
  c.expansion = std::min(1.0 / sys.a(), 1.0 / (1.0 - sys.a())) * c.inf_fy;
  c.expansion_margin = c.expansion - 1.0;

  const ImageHull hull = image_hull(fam, J, grid);
  c.image_lo = hull.lo.bound;
  c.image_hi = hull.hi.bound;
  c.padding_image = std::max(hull.lo.padding, hull.hi.padding);
  c.invariance_margin = std::min(I.hi - c.image_hi, c.image_lo - I.lo);
  c.eps0 = std::min(I.lo - J.lo, J.hi - I.hi);

  c.schwarzian_max = padded_extremum(
                         [&](double x, double y) {
                           const double q = fam.dy(x, y);
                           return q > 0.0 ? fam.derivs(x, y).schwarzian : 0.0;
                         },
                         torus, J, grid, grid, Extremum::max)
                         .bound;

  const std::pair<const char*, double> margins[] = {
      {"monotone", c.inf_fy},
      {"expansion", c.expansion_margin},
      {"invariance", c.invariance_margin},
      {"nesting", c.eps0},
      {"schwarzian", -c.schwarzian_max},
  };
  c.pass = true;
  double smallest = margins[0].second;
  c.binding = margins[0].first;
  for (const auto& [name, m] : margins) {
    if (!(m > 0.0)) c.pass = false;
    if (m < smallest) {
      smallest = m;
      c.binding = name;
    }
  }
  return c;
}

void write_certificate(std::ostream& os, const HypothesisCertificate& c) {
  os << "pass: " << (c.pass ? "true" : "false") << '\n'
     << "binding_constraint: " << c.binding << '\n'
     << "I: [" << num(c.I.lo) << ", " << num(c.I.hi) << "]\n"
     << "J: [" << num(c.J.lo) << ", " << num(c.J.hi) << "]\n"
     << "grid: " << c.grid << '\n'
     << "inf_fy: " << num(c.inf_fy) << '\n'
     << "expansion: " << num(c.expansion) << '\n'
     << "expansion_margin: " << num(c.expansion_margin) << '\n'
     << "image: [" << num(c.image_lo) << ", " << num(c.image_hi) << "]\n"
     << "invariance_margin: " << num(c.invariance_margin) << '\n'
     << "eps0: " << num(c.eps0) << '\n'
     << "schwarzian_max: " << num(c.schwarzian_max) << '\n'
     << "padding_fy: " << num(c.padding_fy) << '\n'
     << "padding_image: " << num(c.padding_image) << '\n';
}

Interval auto_invariant_interval(const FibreFamily& fam, Interval J, std::size_t grid) {
  const ImageHull hull = image_hull(fam, J, grid);
  const double slack_lo = hull.lo.bound - J.lo;
  const double slack_hi = J.hi - hull.hi.bound;
  if (slack_lo > 0.0 && slack_hi > 0.0) {
    return {hull.lo.bound - 0.1 * slack_lo, hull.hi.bound + 0.1 * slack_hi};
  }
  const double inset = 1e-3 * J.width();
  return {std::max(J.lo + inset, std::min(hull.lo.bound, J.hi - 2.0 * inset)),
          std::min(J.hi - inset, std::max(hull.hi.bound, J.lo + 2.0 * inset))};
}

std::vector<RegionCell> scan_region(double eps, double a, Interval M_range, Interval r_range,
                                    std::size_t nM, std::size_t nr, std::size_t cell_grid) {
  if (nM < 2 || nr < 2) throw std::invalid_argument("region scan needs at least 2 nodes per axis");
  const BakerSystem sys(a);
  std::vector<RegionCell> cells(nM * nr);
  parallel_for(cells.size(), [&](std::size_t idx) {
    const std::size_t i = idx / nr;
    const std::size_t j = idx % nr;
    RegionCell& cell = cells[idx];
    cell.M = M_range.lo + M_range.width() * static_cast<double>(i) / static_cast<double>(nM - 1);
    cell.r = r_range.lo + r_range.width() * static_cast<double>(j) / static_cast<double>(nr - 1);
    const ArctanFamily fam(cell.r, eps);
    const Interval J{-cell.M, cell.M};
    const Interval I = auto_invariant_interval(fam, J, cell_grid);
    const HypothesisCertificate c = check_hypotheses(fam, sys, I, J, cell_grid);
    cell.pass = c.pass;
    cell.expansion_margin = c.expansion_margin;
    cell.invariance_margin = c.invariance_margin;
  });
  return cells;
}

void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells) {
  write_row(os, {"M", "r", "pass", "expansion_margin", "invariance_margin"});
  for (const auto& c : cells) {
    write_row(os, {num(c.M), num(c.r), c.pass ? "1" : "0", num(c.expansion_margin),
                   num(c.invariance_margin)});
  }
}

PaddedExtremum two_step_value_extremum(const FibreFamily& fam, const BakerSystem& sys, double y,
                                       Interval window, Extremum mode, std::size_t grid) {
  const double a = sys.a();
  const Interval pieces[2] = {{std::max(window.lo, 0.0), std::min(window.hi, a)},
                              {std::max(window.lo, a), std::min(window.hi, 1.0)}};
  bool have = false;
  PaddedExtremum best;
  for (int d = 0; d < 2; ++d) {
    const Interval& piece = pieces[d];
    if (!(piece.width() > 0.0)) continue;
    const double lo = d == 0 ? 0.0 : a;
    const double len = d == 0 ? a : 1.0 - a;
    const auto g = [&](double x) {
      const double z = (x - lo) / len;
      return fam.value(x, fam.value(z, y));
    };
    const auto n = std::max<std::size_t>(
        16, static_cast<std::size_t>(static_cast<double>(grid) * piece.width()));
    const PaddedExtremum e = padded_extremum_1d(g, piece, n, mode);
    const bool better = mode == Extremum::max ? e.bound > best.bound : e.bound < best.bound;
    if (!have || better) best = e;
    have = true;
  }
  if (!have) throw std::invalid_argument("two-step window is empty");
  return best;
}

PaddedExtremum two_step_slope_sup(const FibreFamily& fam, const BakerSystem& sys, Interval band,
                                  std::size_t grid) {
  PaddedExtremum best;
  for (int d = 0; d < 2; ++d) {
    const auto g = [&](double z, double y) {
      const double x = sys.inverse_branch(d, z);
      return fam.dy(x, fam.value(z, y)) * fam.dy(z, y);
    };
    const PaddedExtremum e =
        padded_extremum(g, Interval{0.0, 1.0}, band, grid, grid, Extremum::max, false);
    if (d == 0 || e.bound > best.bound) {
      best = e;
      best.arg_x = sys.inverse_branch(d, e.arg_x);
    }
  }
  return best;
}

}  // namespace skewprod
