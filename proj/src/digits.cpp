#include "skewprod/digits.hpp"

#include <cmath>
#include <stdexcept>

namespace skewprod {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t probability_threshold(double p_one) {
  if (!(p_one >= 0.0 && p_one <= 1.0)) throw std::invalid_argument("digit probability outside [0,1]");
  if (p_one >= 1.0) return ~0ULL;
  return static_cast<std::uint64_t>(std::ldexp(p_one, 64));
}

}  // namespace

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

DigitStream DigitStream::bernoulli(double p_one, std::uint64_t seed) {
  DigitStream s;
  s.threshold_ = probability_threshold(p_one);
  s.fair_ = (p_one == 0.5);
  s.rng_.seed(split_seed(seed, 0xd1b54a32d192ed03ULL));
  return s;
}

DigitStream DigitStream::typical(const BakerSystem& sys, std::uint64_t seed) {
  return bernoulli(1.0 - sys.a(), seed);
}

DigitStream DigitStream::periodic(DigitSequence word) {
  if (word.empty()) throw std::invalid_argument("periodic digit word must be non-empty");
  DigitStream s;
  s.prefix_ = std::move(word);
  s.periodic_ = true;
  return s;
}

DigitStream DigitStream::with_prefix(DigitSequence prefix, double p_one, std::uint64_t seed) {
  DigitStream s = bernoulli(p_one, seed);
  s.prefix_ = std::move(prefix);
  return s;
}

DigitStream DigitStream::of_point(const BakerSystem& sys, double xi, std::uint64_t seed) {
  return with_prefix(digits_of(sys, xi, reliable_digit_count(sys)), 1.0 - sys.a(), seed);
}

std::uint8_t DigitStream::next() {
  if (periodic_) {
    const std::uint8_t d = prefix_[pos_];
    pos_ = (pos_ + 1) % prefix_.size();
    return d;
  }
  if (pos_ < prefix_.size()) return prefix_[pos_++];
  if (fair_) {
    if (bits_left_ == 0) {
      bits_ = rng_();
      bits_left_ = 64;
    }
    const std::uint8_t d = static_cast<std::uint8_t>(bits_ & 1ULL);
    bits_ >>= 1;
    --bits_left_;
    return d;
  }
  return rng_() < threshold_ ? 1 : 0;
}

DigitSequence DigitStream::take(std::size_t n) {
  DigitSequence out(n);
  for (auto& d : out) d = next();
  return out;
}

std::size_t reliable_digit_count(const BakerSystem& sys) {
  if (sys.is_doubling()) return 52;
  // Rounding error grows by at most 1/min(a, 1-a) per step.
  const double growth = -std::log2(std::min(sys.a(), 1.0 - sys.a()));
  return static_cast<std::size_t>(std::floor(40.0 / growth));
}

DigitSequence digits_of(const BakerSystem& sys, double x, std::size_t n) {
  DigitSequence out(n);
  for (auto& d : out) {
    d = static_cast<std::uint8_t>(sys.branch(x));
    x = sys.tau(x);
  }
  return out;
}

double point_from_digits(const BakerSystem& sys, std::span<const std::uint8_t> digits) {
  const std::size_t used = std::min<std::size_t>(digits.size(), 64);
  double x = 0.5;
  for (std::size_t j = used; j-- > 0;) x = sys.inverse_branch(digits[j], x);
  return x;
}

}  // namespace skewprod
