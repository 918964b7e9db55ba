#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace skewprod {

/// Generalized baker map on [0,1)^2 split at a:
///   T(xi, x) = (tau(xi), a x)            if xi in [0, a)
///            = (tau(xi), a + (1 - a) x)  if xi in [a, 1)
/// xi is the expanding coordinate, x the contracting one. Branches are the
/// half-open intervals [0,a) and [a,1); the point a belongs to the right branch.
class BakerSystem {
 public:
  explicit BakerSystem(double a);

  double a() const { return a_; }
  /// True when a == 1/2, where tau is the doubling map and exact rational
  /// orbits are available.
  bool is_doubling() const { return a_ == 0.5; }

  int branch(double x) const { return x < a_ ? 0 : 1; }
  double tau(double x) const;
  double tau_prime(double x) const { return x < a_ ? 1.0 / a_ : 1.0 / (1.0 - a_); }
  /// Contraction factor of T along x, equal to 1 / tau'(xi).
  double sigma(double xi) const { return xi < a_ ? a_ : 1.0 - a_; }
  double branch_contraction(int digit) const { return digit == 0 ? a_ : 1.0 - a_; }
  /// Inverse branch of tau selected by digit: x -> a x or a + (1 - a) x. This is
  /// also the x-component of T when xi carries that digit.
  double inverse_branch(int digit, double x) const {
    return digit == 0 ? a_ * x : a_ + (1.0 - a_) * x;
  }
  double log_tau_prime_of_digit(int digit) const;

  std::pair<double, double> forward(double xi, double x) const;
  std::pair<double, double> inverse(double xi, double x) const;

 private:
  double a_;
};

struct PeriodicPoint {
  double x = 0.0;
  int minimal_period = 1;
  /// Exact rational num/den when the system is the doubling map; den == 0 otherwise.
  std::uint64_t num = 0;
  std::uint64_t den = 0;
};

/// All fixed points of tau^p in [0,1), sorted, each flagged with its minimal
/// period. Exact rationals k/(2^p - 1) when a == 1/2; otherwise the fixed point
/// of the affine composition of inverse branches for every branch word.
/// Throws std::out_of_range when 2^p - 1 does not fit in 64 bits or the list
/// would be unreasonably large.
std::vector<PeriodicPoint> periodic_points(const BakerSystem& sys, int period);

/// Rational point num/den in [0,1) with exact doubling-map arithmetic.
struct RationalPoint {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  RationalPoint doubled() const {
    const std::uint64_t twice = num << 1;
    return {twice >= den ? twice - den : twice, den};
  }
};

/// Backward x-orbit generator: successive tau-images of a base coordinate.
/// Under the doubling map with a rational start the orbit is exact; otherwise it
/// is iterated in floating point.
class TauOrbit {
 public:
  TauOrbit(const BakerSystem& sys, double x) : sys_(&sys), x_(x), exact_(false) {}
  TauOrbit(const BakerSystem& sys, RationalPoint x);

  double current() const { return exact_ ? q_.value() : x_; }
  void advance();

 private:
  const BakerSystem* sys_;
  double x_;
  RationalPoint q_{};
  bool exact_;
};

}  // namespace skewprod
