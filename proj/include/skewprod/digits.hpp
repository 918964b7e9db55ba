#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "skewprod/baker.hpp"

namespace skewprod {

/// Itinerary digits of a coordinate under tau: digit j is 0 when tau^j lies in
/// [0,a) and 1 otherwise. Forward orbits of the skew product consume the digits
/// of xi; each digit selects the branch T applies to x.
using DigitSequence = std::vector<std::uint8_t>;

/// Derives an independent 64-bit seed for sub-stream `stream` of `seed`.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic source of itinerary digits.
///
/// Three kinds exist: i.i.d. digits with a fixed probability of a one
/// (Lebesgue-typical xi uses P(1) = 1 - a), a repeating word, and an explicit
/// prefix continued by i.i.d. digits. Floating-point iteration of tau loses one
/// bit per step under doubling, so coordinates given as doubles only determine
/// a finite prefix; the continuation stands for a typical point of the cylinder.
class DigitStream {
 public:
  static DigitStream bernoulli(double p_one, std::uint64_t seed);
  static DigitStream typical(const BakerSystem& sys, std::uint64_t seed);
  static DigitStream periodic(DigitSequence word);
  static DigitStream with_prefix(DigitSequence prefix, double p_one, std::uint64_t seed);
  /// Prefix from iterating tau on xi while the digits are reliable, then typical.
  static DigitStream of_point(const BakerSystem& sys, double xi, std::uint64_t seed);

  std::uint8_t next();
  DigitSequence take(std::size_t n);

 private:
  DigitStream() = default;

  DigitSequence prefix_;
  std::size_t pos_ = 0;
  bool periodic_ = false;
  std::uint64_t threshold_ = 0;  // digit is one when rng() < threshold_
  bool fair_ = false;
  std::mt19937_64 rng_;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

/// Number of leading tau-digits of a double coordinate that are trustworthy.
std::size_t reliable_digit_count(const BakerSystem& sys);

/// Digits of x obtained by iterating tau in floating point.
DigitSequence digits_of(const BakerSystem& sys, double x, std::size_t n);

/// Coordinate whose itinerary begins with the given digits (uses at most the
/// first 64; the unresolved remainder is placed at the centre of the cylinder).
double point_from_digits(const BakerSystem& sys, std::span<const std::uint8_t> digits);

/// Uniform double in [0,1) from 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace skewprod
