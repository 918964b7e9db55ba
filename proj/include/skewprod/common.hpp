#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace skewprod {

/// Raised when an iterative method fails to converge or a numeric guard trips.
/// The CLI maps it to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the certified hypotheses do not hold and no override is given.
/// The CLI maps it to exit code 2.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fibre orbit left its guard interval.
class FibreEscape : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool contains_interior(const Interval& other) const { return lo < other.lo && other.hi < hi; }
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Runs fn(i) for i in [0, n) across hardware threads. Each index is written by
/// exactly one worker, so results stored per index are deterministic.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace skewprod
