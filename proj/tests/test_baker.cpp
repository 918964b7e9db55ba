#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "skewprod/baker.hpp"
#include "skewprod/digits.hpp"

using namespace skewprod;

TEST_CASE("baker map is a bijection of the square") {
  for (double a : {0.5, 0.3, 0.72}) {
    const BakerSystem sys(a);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
      const double xi = uniform01(rng);
      const double x = uniform01(rng);
      const auto [xi1, x1] = sys.forward(xi, x);
      const auto [xi0, x0] = sys.inverse(xi1, x1);
      CHECK(xi0 == doctest::Approx(xi).epsilon(1e-12));
      CHECK(x0 == doctest::Approx(x).epsilon(1e-12));
    }
  }
}

TEST_CASE("tau and its inverse branches") {
  const BakerSystem sys(0.3);
  CHECK(sys.branch(0.29) == 0);
  CHECK(sys.branch(0.3) == 1);
  for (double x : {0.0, 0.1, 0.5, 0.99}) {
    CHECK(sys.tau(sys.inverse_branch(0, x)) == doctest::Approx(x));
    CHECK(sys.tau(sys.inverse_branch(1, x)) == doctest::Approx(x));
  }
  CHECK(sys.tau_prime(0.1) == doctest::Approx(1.0 / 0.3));
  CHECK(sys.tau_prime(0.5) == doctest::Approx(1.0 / 0.7));
}

TEST_CASE("periodic points of the doubling map") {
  const BakerSystem sys(0.5);
  for (int p = 1; p <= 10; ++p) {
    const auto pts = periodic_points(sys, p);
    CHECK(pts.size() == (std::size_t{1} << p) - 1);
    std::uint64_t primitive = 0;
    for (const auto& pt : pts) {
      CHECK(pt.den == (std::uint64_t{1} << p) - 1);
      RationalPoint q{pt.num, pt.den};
      int period = 0;
      do {
        q = q.doubled();
        ++period;
      } while (q.num != pt.num);
      CHECK(period == pt.minimal_period);
      if (pt.minimal_period == p) ++primitive;
    }
    // The fixed point 0 = (2^p - 1)/(2^p - 1) is listed once as 0.
    CHECK(primitive + (p == 1 ? 1 : 0) == oracle::primitive_periodic_count(p));
  }
}

TEST_CASE("periodic points for a general split") {
  const BakerSystem sys(0.37);
  for (int p = 1; p <= 6; ++p) {
    for (const auto& pt : periodic_points(sys, p)) {
      double x = pt.x;
      for (int j = 0; j < p; ++j) x = sys.tau(x);
      CHECK(std::abs(x - pt.x) < 1e-9);
    }
  }
}

TEST_CASE("digit streams") {
  const BakerSystem sys(0.5);
  DigitStream a = DigitStream::bernoulli(0.25, 11);
  DigitStream b = DigitStream::bernoulli(0.25, 11);
  const auto da = a.take(200000);
  CHECK(da == b.take(200000));
  double ones = 0;
  for (auto d : da) ones += d;
  CHECK(ones / da.size() == doctest::Approx(0.25).epsilon(0.02));

  DigitStream per = DigitStream::periodic({0, 1, 1});
  CHECK(per.take(7) == DigitSequence{0, 1, 1, 0, 1, 1, 0});

  std::set<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 100; ++s) seeds.insert(split_seed(42, s));
  CHECK(seeds.size() == 100);

  const DigitSequence digits{1, 0, 1, 1, 0, 0, 1};
  const double x = point_from_digits(sys, digits);
  CHECK(digits_of(sys, x, digits.size()) == digits);
}

TEST_CASE("typical digits follow Lebesgue weights") {
  const BakerSystem sys(0.3);
  DigitStream s = DigitStream::typical(sys, 3);
  const auto d = s.take(200000);
  double ones = 0;
  for (auto v : d) ones += v;
  CHECK(ones / d.size() == doctest::Approx(0.7).epsilon(0.01));
}
