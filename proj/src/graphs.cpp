#include "skewprod/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "skewprod/csv.hpp"

namespace skewprod {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMonotoneTol = 1e-12;

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e > 0) {
    if (e & 1ULL) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

bool two_is_primitive_root(std::uint64_t p) {
  std::uint64_t n = p - 1;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    if (pow_mod(2, (p - 1) / q, p) == 1) return false;
    while (n % q == 0) n /= q;
  }
  if (n > 1 && pow_mod(2, (p - 1) / n, p) == 1) return false;
  return true;
}

double compose_orbit(const FibreFamily& fam, std::span<const double> orbit, double y) {
  for (std::size_t j = orbit.size(); j-- > 0;) y = fam.value(orbit[j], y);
  return y;
}

void check_monotone(GraphKind kind, double psi_k, double psi_k1, double x) {
  const bool bad = kind == GraphKind::upper ? psi_k1 > psi_k + kMonotoneTol
                                            : psi_k1 < psi_k - kMonotoneTol;
  if (bad) {
    std::ostringstream os;
    os << "pullback of the " << to_string(kind) << " graph is not monotone in depth at x=" << x
       << " (anchor inside the attractor)";
    throw NumericError(os.str());
  }
}

}  // namespace

const char* to_string(GraphKind k) {
  switch (k) {
    case GraphKind::upper:
      return "upper";
    case GraphKind::lower:
      return "lower";
    case GraphKind::middle:
      return "middle";
  }
  return "?";
}

GraphKind parse_graph_kind(const std::string& s) {
  if (s == "upper") return GraphKind::upper;
  if (s == "lower") return GraphKind::lower;
  if (s == "middle") return GraphKind::middle;
  throw std::invalid_argument("unknown graph kind '" + s + "'");
}

std::size_t GraphGrid::diverged_count() const {
  return static_cast<std::size_t>(std::count(diverged.begin(), diverged.end(), 1));
}

double GraphGrid::at(double x) const {
  const std::size_t n = xs.size();
  if (n == 0) throw std::logic_error("empty graph grid");
  double u = (x - std::floor(x)) * static_cast<double>(n);
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= n) i = n - 1;
  const double t = u - static_cast<double>(i);
  const double v0 = values[i];
  const double v1 = values[(i + 1) % n];
  return (1.0 - t) * v0 + t * v1;
}

std::size_t graph_grid_size(const BakerSystem& sys, std::size_t requested) {
  if (requested < 2) throw std::invalid_argument("graph grid needs at least 2 nodes");
  if (!sys.is_doubling()) return requested;
  std::uint64_t p = std::max<std::uint64_t>(5, (requested + 5) / 6);
  while (!(is_prime(p) && two_is_primitive_root(p))) ++p;
  return static_cast<std::size_t>(6 * p);
}

double pullback_value(const FibreFamily& fam, RationalPoint x, std::size_t k, double anchor) {
  std::vector<double> orbit(k);
  for (std::size_t j = 0; j < k; ++j) {
    x = x.doubled();
    orbit[j] = x.value();
  }
  return compose_orbit(fam, orbit, anchor);
}

double pullback_value(const FibreFamily& fam, const BakerSystem& sys, double x, std::size_t k,
                      double anchor) {
  std::vector<double> orbit(k);
  for (std::size_t j = 0; j < k; ++j) {
    x = sys.tau(x);
    orbit[j] = x;
  }
  return compose_orbit(fam, orbit, anchor);
}

double pullback_value_digits(const FibreFamily& fam, const BakerSystem& sys,
                             std::span<const std::uint8_t> x_digits, std::size_t k, double anchor) {
  if (x_digits.size() < k + 1) throw std::invalid_argument("pullback needs at least k + 1 digits");
  std::vector<double> orbit(k);
  double x = 0.5;
  for (std::size_t j = x_digits.size(); j-- > 1;) {
    x = sys.inverse_branch(x_digits[j], x);
    if (j <= k) orbit[j - 1] = x;
  }
  return compose_orbit(fam, orbit, anchor);
}

GraphGrid pullback_graph(const FibreFamily& fam, const BakerSystem& sys, GraphKind kind,
                         std::size_t requested_n, std::size_t k, double M) {
  if (kind == GraphKind::middle) throw std::invalid_argument("pullback_graph builds upper or lower");
  if (k < 1) throw std::invalid_argument("pullback depth must be at least 1");
  GraphGrid g;
  g.kind = kind;
  g.depth = k;
  g.anchor = kind == GraphKind::upper ? M : -M;
  const std::size_t n = graph_grid_size(sys, requested_n);
  g.denominator = sys.is_doubling() ? n : 0;
  g.xs.resize(n);
  g.values.resize(n);
  std::vector<double> defect(n);

  parallel_for(n, [&](std::size_t i) {
    std::vector<double> orbit(k + 1);
    if (g.denominator != 0) {
      RationalPoint q{i, n};
      g.xs[i] = q.value();
      for (std::size_t j = 0; j <= k; ++j) {
        q = q.doubled();
        orbit[j] = q.value();
      }
    } else {
      double x = static_cast<double>(i) / static_cast<double>(n);
      g.xs[i] = x;
      for (std::size_t j = 0; j <= k; ++j) {
        x = sys.tau(x);
        orbit[j] = x;
      }
    }
    const std::span<const double> head(orbit.data(), k);
    const double psi_k = compose_orbit(fam, head, g.anchor);
    const double psi_k1 = compose_orbit(fam, head, fam.value(orbit[k], g.anchor));
    g.values[i] = psi_k;
    defect[i] = psi_k1 - psi_k;
  });
  for (std::size_t i = 0; i < n; ++i) {
    check_monotone(kind, g.values[i], g.values[i] + defect[i], g.xs[i]);
    defect[i] = std::abs(defect[i]);
  }

  g.residual = *std::max_element(defect.begin(), defect.end());
  return g;
}

std::optional<double> middle_value(const FibreFamily& fam, const BakerSystem& sys,
                                   std::span<const std::uint8_t> xi_digits, double x,
                                   std::size_t k, double y0, Interval J) {
  if (xi_digits.size() < k) throw std::invalid_argument("middle graph needs at least k xi digits");
  std::vector<double> orbit(k);
  for (std::size_t j = 0; j < k; ++j) {
    orbit[j] = x;
    x = sys.inverse_branch(xi_digits[j], x);
  }
  double y = y0;
  for (std::size_t j = k; j-- > 0;) {
    const auto pre = fam.inverse(orbit[j], y, J);
    if (!pre) return std::nullopt;
    y = *pre;
  }
  return y;
}

GraphGrid middle_graph(const FibreFamily& fam, const BakerSystem& sys, std::size_t requested_n,
                       std::size_t k, double y0, Interval J, DigitSequence xi_digits) {
  if (k < 1) throw std::invalid_argument("middle graph depth must be at least 1");
  if (xi_digits.size() < k + 1) throw std::invalid_argument("middle graph needs k + 1 xi digits");
  if (!J.contains(y0)) throw std::invalid_argument("middle graph anchor must lie in J");
  GraphGrid g;
  g.kind = GraphKind::middle;
  g.depth = k;
  g.anchor = y0;
  const std::size_t n = graph_grid_size(sys, requested_n);
  g.denominator = sys.is_doubling() ? n : 0;
  g.xs.resize(n);
  g.values.resize(n);
  g.diverged.assign(n, 0);
  g.xi_digits = std::move(xi_digits);
  std::vector<double> defect(n, 0.0);
  const std::span<const std::uint8_t> digits(g.xi_digits);

  parallel_for(n, [&](std::size_t i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    g.xs[i] = x;
    const auto v = middle_value(fam, sys, digits, x, k, y0, J);
    if (!v) {
      g.values[i] = kNaN;
      g.diverged[i] = 1;
      return;
    }
    g.values[i] = *v;
    const double x1 = sys.inverse_branch(digits[0], x);
    const auto v1 = middle_value(fam, sys, digits.subspan(1), x1, k, y0, J);
    defect[i] = v1 ? std::abs(fam.value(x, *v) - *v1) : 0.0;
  });
  g.residual = *std::max_element(defect.begin(), defect.end());
  return g;
}

PinchScan pinched_scan(const GraphGrid& upper, const GraphGrid& lower, double tol) {
  if (upper.xs != lower.xs) throw std::invalid_argument("pinched_scan needs matching grids");
  const std::size_t n = upper.size();
  PinchScan s;
  s.pinched.assign(n, 0);
  s.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = upper.values[i] - lower.values[i];
    if (gap < tol) {
      s.pinched[i] = 1;
      ++s.pinched_count;
    }
    s.min_gap = std::min(s.min_gap, gap);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (upper.values[i] - lower.values[i] <= s.min_gap + 1e-12) s.argmin.push_back(upper.xs[i]);
  }
  s.refined_min_gap = s.min_gap;
  s.refined_argmin = s.argmin.empty() ? 0.0 : s.argmin.front();
  return s;
}

PinchScan pinched_scan(const FibreFamily& fam, const BakerSystem& sys, const GraphGrid& upper,
                       const GraphGrid& lower, double tol, std::size_t refine,
                       std::size_t minima) {
  PinchScan s = pinched_scan(upper, lower, tol);
  const std::size_t n = upper.size();
  if (refine < 2 || n < 3) return s;

  std::vector<double> gap(n);
  for (std::size_t i = 0; i < n; ++i) gap[i] = upper.values[i] - lower.values[i];
  std::vector<std::size_t> local;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = gap[(i + n - 1) % n];
    const double r = gap[(i + 1) % n];
    if (gap[i] <= l && gap[i] <= r) local.push_back(i);
  }
  std::sort(local.begin(), local.end(), [&](std::size_t a, std::size_t b) { return gap[a] < gap[b]; });
  if (local.size() > minima) local.resize(minima);

  const std::size_t k = upper.depth;
  const std::size_t fine_n = n * refine;
  const auto r = static_cast<std::ptrdiff_t>(refine);
  for (std::size_t i : local) {
    std::vector<double> vals(2 * refine + 1);
    std::vector<double> xs(2 * refine + 1);
    parallel_for(vals.size(), [&](std::size_t m) {
      const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) * r + static_cast<std::ptrdiff_t>(m) - r;
      const auto wrapped = static_cast<std::size_t>((idx % static_cast<std::ptrdiff_t>(fine_n) +
                                                     static_cast<std::ptrdiff_t>(fine_n)) %
                                                    static_cast<std::ptrdiff_t>(fine_n));
      double hi, lo;
      if (upper.denominator != 0) {
        const RationalPoint q{wrapped, fine_n};
        xs[m] = q.value();
        hi = pullback_value(fam, q, k, upper.anchor);
        lo = pullback_value(fam, q, lower.depth, lower.anchor);
      } else {
        xs[m] = static_cast<double>(wrapped) / static_cast<double>(fine_n);
        hi = pullback_value(fam, sys, xs[m], k, upper.anchor);
        lo = pullback_value(fam, sys, xs[m], lower.depth, lower.anchor);
      }
      vals[m] = hi - lo;
    });
    for (std::size_t m = 0; m < vals.size(); ++m) {
      if (vals[m] < s.refined_min_gap) {
        s.refined_min_gap = vals[m];
        s.refined_argmin = xs[m];
      }
    }
  }
  return s;
}

InvarianceResidual invariance_residual(const FibreFamily& fam, const BakerSystem& sys,
                                       const GraphGrid& g) {
  InvarianceResidual res;
  if (g.kind == GraphKind::middle) {
    res.max_defect = g.residual;
    return res;
  }
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    double tx, phi_tx;
    if (g.denominator != 0) {
      const std::size_t ti = (2 * i) % n;
      tx = g.xs[ti];
      phi_tx = g.values[ti];
    } else {
      tx = sys.tau(g.xs[i]);
      phi_tx = g.at(tx);
    }
    res.max_defect = std::max(res.max_defect, std::abs(fam.value(tx, phi_tx) - g.values[i]));
  }
  if (g.denominator == 0) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2 = std::max(d2, std::abs(g.values[(i + 1) % n] - 2.0 * g.values[i] +
                                 g.values[(i + n - 1) % n]));
    }
    res.interpolation_bound = d2 / 8.0;
  }
  return res;
}

void write_graph_csv(std::ostream& os, const GraphGrid& g) {
  write_row(os, {"x", "value", "kind", "k", "residual"});
  const std::string kind = to_string(g.kind);
  const std::string depth = num(static_cast<std::uint64_t>(g.depth));
  const std::string residual = num(g.residual);
  for (std::size_t i = 0; i < g.size(); ++i) {
    write_row(os, {num(g.xs[i]), num(g.values[i]), kind, depth, residual});
  }
}

}  // namespace skewprod
