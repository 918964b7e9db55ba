#pragma once

// Independent reference computations used by the tests. None of these call
// into the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double arctan_map(double r, double eps, double x, double y) {
  return std::atan(r * y) + eps * std::cos(2.0 * M_PI * x);
}

/// Positive root of arctan(r y) = y (r > 1).
inline double y_star(double r = 1.1) {
  return bisect([r](double y) { return std::atan(r * y) - y; }, 1e-3, 2.0);
}

/// Roots of g on [lo, hi] by a sign scan with n cells and bisection.
inline std::vector<double> roots(const std::function<double(double)>& g, double lo, double hi,
                                 int n = 200000) {
  std::vector<double> out;
  double prev_x = lo;
  double prev = g(lo);
  for (int i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double v = g(x);
    if (prev == 0.0) out.push_back(prev_x);
    else if ((prev < 0.0) != (v < 0.0)) out.push_back(bisect(g, prev_x, x));
    prev_x = x;
    prev = v;
  }
  return out;
}

/// Number of points of minimal period p under doubling (Moebius inversion).
inline std::uint64_t primitive_periodic_count(int p) {
  const auto mobius = [](int n) {
    int m = 1;
    for (int d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        n /= d;
        if (n % d == 0) return 0;
        m = -m;
      }
    }
    if (n > 1) m = -m;
    return m;
  };
  std::int64_t total = 0;
  for (int d = 1; d <= p; ++d) {
    if (p % d == 0) total += mobius(p / d) * ((std::int64_t{1} << d));
  }
  return static_cast<std::uint64_t>(total);
}

inline std::uint64_t order_of_two(std::uint64_t p) {
  std::uint64_t v = 2 % p;
  std::uint64_t k = 1;
  while (v != 1) {
    v = (v * 2) % p;
    ++k;
  }
  return k;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

}  // namespace oracle
