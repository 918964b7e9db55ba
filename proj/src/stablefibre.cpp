#include "skewprod/stablefibre.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "skewprod/csv.hpp"

namespace skewprod {

double stable_tail_bound(const BoundConstants& b, std::size_t terms) {
  return std::pow(b.gamma_norm, static_cast<double>(terms)) * b.sup_abs_a / (1.0 - b.gamma_norm);
}

StableField make_stable_field(const FibreFamily& fam, const BakerSystem& sys, Interval I,
                              Interval J, double tail_target, std::size_t terms,
                              std::size_t grid) {
  StableField f;
  f.I = I;
  f.J = J;
  f.eps0 = std::min(I.lo - J.lo, J.hi - I.hi);
  f.bounds = compute_bounds(fam, sys, J, grid);
  if (!(f.bounds.gamma_norm < 1.0)) {
    std::ostringstream os;
    os << "||Gamma|| = " << f.bounds.gamma_norm << " >= 1: strong stable field undefined on J";
    throw HypothesisError(os.str());
  }
  if (terms == 0) {
    if (!(tail_target > 0.0)) throw std::invalid_argument("tail target must be positive");
    terms = 1;
    while (stable_tail_bound(f.bounds, terms) >= tail_target) ++terms;
  }
  f.terms = terms;
  f.tail_bound = stable_tail_bound(f.bounds, terms);
  return f;
}

XiOrbit::XiOrbit(const BakerSystem& sys, std::span<const std::uint8_t> xi_digits,
                 std::size_t length)
    : offset_(length), scale_(length), contraction_(length) {
  if (xi_digits.size() < length) throw std::invalid_argument("XiOrbit needs more xi digits");
  double off = 0.0;
  double sc = 1.0;
  for (std::size_t j = 0; j < length; ++j) {
    offset_[j] = off;
    scale_[j] = sc;
    const int d = xi_digits[j];
    contraction_[j] = sys.branch_contraction(d);
    off = sys.inverse_branch(d, off);
    sc *= contraction_[j];
  }
}

double x3_eval(const StableField& field, const FibreFamily& fam, const XiOrbit& orbit, double u,
               double y, std::size_t terms) {
  if (orbit.length() < terms) throw std::invalid_argument("x3_eval: orbit shorter than N");
  double sum = 0.0;
  double gamma = 1.0;
  for (std::size_t k = 0; k < terms; ++k) {
    const double x = orbit.x_at(k, u);
    const double fy = fam.dy(x, y);
    sum += gamma * fam.dx(x, y) / fy;
    gamma *= orbit.contraction(k) / fy;
    y = fam.value(x, y);
    if (k + 1 < terms && !field.J.contains(y)) {
      std::ostringstream os;
      os << "strong stable series: orbit left J at step " << k + 1 << " (y=" << y << ")";
      throw FibreEscape(os.str());
    }
  }
  return -sum;
}

double x3_eval(const StableField& field, const FibreFamily& fam, const BakerSystem& sys,
               std::span<const std::uint8_t> xi_digits, double x, double y) {
  const XiOrbit orbit(sys, xi_digits, field.terms);
  return x3_eval(field, fam, orbit, x, y, field.terms);
}

double StableFibre::at(double u) const {
  if (us.empty() || u < us.front() || u > us.back()) {
    throw std::out_of_range("stable fibre evaluated outside its domain");
  }
  auto it = std::upper_bound(us.begin(), us.end(), u);
  if (it == us.end()) return ells.back();
  const std::size_t i = static_cast<std::size_t>(it - us.begin());
  if (i == 0) return ells.front();
  const double t = (u - us[i - 1]) / (us[i] - us[i - 1]);
  return (1.0 - t) * ells[i - 1] + t * ells[i];
}

namespace {

// Integrates from (u0, l0) towards `end`; appends samples excluding the start.
void integrate_side(const StableField& field, const FibreFamily& fam, const XiOrbit& orbit,
                    double u0, double l0, double end, double h, std::vector<double>& us,
                    std::vector<double>& ls) {
  const double dir = end > u0 ? 1.0 : -1.0;
  const auto rhs = [&](double u, double l) -> std::optional<double> {
    if (!field.J.contains(l)) return std::nullopt;
    return x3_eval(field, fam, orbit, u, l, field.terms);
  };
  double u = u0;
  double l = l0;
  while (dir * (end - u) > 0.0) {
    const double step = dir * std::min(h, dir * (end - u));
    const auto k1 = rhs(u, l);
    if (!k1) break;
    const auto k2 = rhs(u + 0.5 * step, l + 0.5 * step * *k1);
    if (!k2) break;
    const auto k3 = rhs(u + 0.5 * step, l + 0.5 * step * *k2);
    if (!k3) break;
    const auto k4 = rhs(u + step, l + step * *k3);
    if (!k4) break;
    const double l_next = l + step / 6.0 * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if (!field.J.contains(l_next)) break;
    // Land exactly on the end point when the remaining distance is below h.
    u = (dir * (end - u) <= h) ? end : u + step;
    l = l_next;
    us.push_back(u);
    ls.push_back(l);
  }
}

}  // namespace

StableFibre integrate_fibre(const StableField& field, const FibreFamily& fam,
                            const BakerSystem& sys, DigitSequence xi_digits, double x, double y,
                            double h) {
  if (!(h > 0.0 && h <= 1e-3)) throw std::invalid_argument("fibre step must lie in (0, 1e-3]");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("fibre anchor x must lie in [0,1]");
  if (!field.J.contains(y)) throw std::invalid_argument("fibre anchor y must lie in J");
  const XiOrbit orbit(sys, xi_digits, field.terms);

  StableFibre fib;
  fib.xi = point_from_digits(sys, xi_digits);
  fib.xi_digits = std::move(xi_digits);
  fib.x_anchor = x;
  fib.y_anchor = y;
  fib.h = h;
  fib.terms = field.terms;
  fib.delta = field.delta();

  std::vector<double> left_u, left_l, right_u, right_l;
  integrate_side(field, fam, orbit, x, y, 0.0, h, left_u, left_l);
  integrate_side(field, fam, orbit, x, y, 1.0, h, right_u, right_l);

  fib.us.reserve(left_u.size() + right_u.size() + 1);
  fib.ells.reserve(fib.us.capacity());
  for (std::size_t i = left_u.size(); i-- > 0;) {
    fib.us.push_back(left_u[i]);
    fib.ells.push_back(left_l[i]);
  }
  fib.us.push_back(x);
  fib.ells.push_back(y);
  fib.us.insert(fib.us.end(), right_u.begin(), right_u.end());
  fib.ells.insert(fib.ells.end(), right_l.begin(), right_l.end());
  fib.domain = {fib.us.front(), fib.us.back()};
  fib.domain_full = fib.domain.lo == 0.0 && fib.domain.hi == 1.0;

  if (field.I.contains(y)) {
    // One step of slack: the domain is only resolved to the step size.
    const double need_lo = std::max(0.0, x - fib.delta + h);
    const double need_hi = std::min(1.0, x + fib.delta - h);
    if (fib.domain.lo > need_lo || fib.domain.hi < need_hi) {
      std::ostringstream os;
      os << "stable fibre through (" << x << ", " << y << ") stops at [" << fib.domain.lo << ", "
         << fib.domain.hi << "], inside the guaranteed half-width " << fib.delta;
      throw NumericError(os.str());
    }
  }
  return fib;
}

EquivarianceResult equivariance_residual(const StableFibre& fibre, const StableField& field,
                                         const FibreFamily& fam, const BakerSystem& sys,
                                         std::size_t n, std::size_t stride) {
  EquivarianceResult res;
  const double width = fibre.domain.width();
  res.envelope = field.slope_bound() * std::pow(std::max(sys.a(), 1.0 - sys.a()),
                                                static_cast<double>(n)) * width;
  if (stride == 0) stride = 1;
  if (n == 0) {
    for (std::size_t i = 0; i < fibre.us.size(); i += stride) ++res.compared;
    return res;
  }
  if (fibre.xi_digits.size() < n + field.terms) {
    throw std::invalid_argument("equivariance_residual needs n + N xi digits on the fibre");
  }
  const XiOrbit orbit(sys, fibre.xi_digits, n + 1);
  const std::span<const std::uint8_t> all(fibre.xi_digits);

  double y_n = fibre.y_anchor;
  for (std::size_t j = 0; j < n; ++j) y_n = fam.value(orbit.x_at(j, fibre.x_anchor), y_n);
  const double x_n = orbit.x_at(n, fibre.x_anchor);
  const StableFibre image = integrate_fibre(field, fam, sys, DigitSequence(all.begin() + n, all.end()),
                                            x_n, y_n, fibre.h);

  double d2 = 0.0;
  for (std::size_t i = 1; i + 1 < image.ells.size(); ++i) {
    d2 = std::max(d2, std::abs(image.ells[i + 1] - 2.0 * image.ells[i] + image.ells[i - 1]));
  }
  res.budget = 2.0 * field.tail_bound + d2 / 8.0 + 1e-12;

  for (std::size_t i = 0; i < fibre.us.size(); i += stride) {
    const double u = fibre.us[i];
    double y = fibre.ells[i];
    for (std::size_t j = 0; j < n; ++j) y = fam.value(orbit.x_at(j, u), y);
    const double pu = orbit.x_at(n, u);
    if (pu < image.domain.lo || pu > image.domain.hi) {
      ++res.mismatched;
      continue;
    }
    ++res.compared;
    res.residual = std::max(res.residual, std::abs(y - image.at(pu)));
  }
  return res;
}

void write_fibre_csv(std::ostream& os, const StableFibre& fibre, bool header) {
  if (header) write_row(os, {"xi", "x_anchor", "y_anchor", "u", "ell_u"});
  const std::string xi = num(fibre.xi);
  const std::string xa = num(fibre.x_anchor);
  const std::string ya = num(fibre.y_anchor);
  for (std::size_t i = 0; i < fibre.us.size(); ++i) {
    write_row(os, {xi, xa, ya, num(fibre.us[i]), num(fibre.ells[i])});
  }
}

}  // namespace skewprod
