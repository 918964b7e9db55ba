#include "skewprod/baker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace skewprod {

namespace {

constexpr int kMaxEnumeratedPeriod = 24;

// Smallest d dividing p such that the p-bit word is invariant under rotation by d.
int minimal_rotation_period(std::uint64_t word, int p) {
  const std::uint64_t mask = (p == 64) ? ~0ULL : ((1ULL << p) - 1);
  for (int d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    const std::uint64_t rotated = ((word << d) | (word >> (p - d))) & mask;
    if (rotated == word) return d;
  }
  return p;
}

}  // namespace

BakerSystem::BakerSystem(double a) : a_(a) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("baker split parameter must lie in (0,1), got " + std::to_string(a));
  }
}

double BakerSystem::tau(double x) const {
  return x < a_ ? x / a_ : (x - a_) / (1.0 - a_);
}

double BakerSystem::log_tau_prime_of_digit(int digit) const {
  return digit == 0 ? -std::log(a_) : -std::log(1.0 - a_);
}

std::pair<double, double> BakerSystem::forward(double xi, double x) const {
  if (xi < a_) return {xi / a_, a_ * x};
  return {(xi - a_) / (1.0 - a_), a_ + (1.0 - a_) * x};
}

std::pair<double, double> BakerSystem::inverse(double xi, double x) const {
  if (x < a_) return {a_ * xi, x / a_};
  return {a_ + (1.0 - a_) * xi, (x - a_) / (1.0 - a_)};
}

std::vector<PeriodicPoint> periodic_points(const BakerSystem& sys, int period) {
  if (period < 1) throw std::invalid_argument("period must be positive");
  if (period > 62) {
    throw std::out_of_range("2^p - 1 overflows the exact representation for p = " +
                            std::to_string(period));
  }
  if (period > kMaxEnumeratedPeriod) {
    throw std::out_of_range("period " + std::to_string(period) + " exceeds enumeration limit " +
                            std::to_string(kMaxEnumeratedPeriod));
  }

  const std::uint64_t words = 1ULL << period;
  std::vector<PeriodicPoint> out;
  out.reserve(words - 1);

  if (sys.is_doubling()) {
    const std::uint64_t den = words - 1;
    for (std::uint64_t k = 0; k < den; ++k) {
      out.push_back({static_cast<double>(k) / static_cast<double>(den),
                     minimal_rotation_period(k, period), k, den});
    }
    return out;
  }

  // Word bit j (most significant first) is the digit of tau^j x.
  for (std::uint64_t w = 0; w + 1 < words; ++w) {
    double offset = 0.0;
    double scale = 1.0;
    for (int j = period - 1; j >= 0; --j) {
      const int digit = static_cast<int>((w >> (period - 1 - j)) & 1ULL);
      offset = sys.inverse_branch(digit, offset);
      scale *= sys.branch_contraction(digit);
    }
    out.push_back({offset / (1.0 - scale), minimal_rotation_period(w, period), 0, 0});
  }
  std::sort(out.begin(), out.end(),
            [](const PeriodicPoint& l, const PeriodicPoint& r) { return l.x < r.x; });
  return out;
}

TauOrbit::TauOrbit(const BakerSystem& sys, RationalPoint x)
    : sys_(&sys), x_(x.value()), q_(x), exact_(sys.is_doubling()) {}

void TauOrbit::advance() {
  if (exact_) {
    q_ = q_.doubled();
  } else {
    x_ = sys_->tau(x_);
  }
}

}  // namespace skewprod
