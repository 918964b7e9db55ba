#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "skewprod/classify.hpp"

using namespace skewprod;

namespace {
const Interval kJ{-0.86, 0.86};

}

TEST_CASE("periodic pinch test near the saddle-node") {
  const BakerSystem sys(0.5);
  const auto r18 = periodic_pinch_test(ArctanFamily(1.1, 0.018), sys, 4, kJ);
  for (const auto& rec : r18) CHECK_FALSE(rec.pinched);
  const auto r19 = periodic_pinch_test(ArctanFamily(1.1, 0.019), sys, 4, kJ);
  bool zero_pinched = false;
  for (const auto& rec : r19)
    if (rec.num == 0 && rec.pinched) zero_pinched = true;
  CHECK(zero_pinched);
}

TEST_CASE("pinch records agree with a sign-scan count") {
  const BakerSystem sys(0.5);
  const double eps = 0.04;
  const auto recs = periodic_pinch_test(ArctanFamily(1.1, eps), sys, 3, kJ);
  std::size_t expected = 0;
  for (int p = 1; p <= 3; ++p) expected += oracle::primitive_periodic_count(p);
  // x = 1 is the fixed point 0 on the circle.
  CHECK(recs.size() == expected - 1);
  for (const auto& rec : recs) {
    // Composed map F = f_{tau x} o ... o f_{tau^p x}; the orbit of x closes after p steps.
    std::vector<double> orbit;
    RationalPoint q{rec.num, rec.den};
    for (int j = 0; j < rec.period; ++j) {
      q = q.doubled();
      orbit.push_back(q.value());
    }
    const auto F = [&](double y) {
      for (int j = rec.period - 1; j >= 0; --j) y = oracle::arctan_map(1.1, eps, orbit[j], y);
      return y;
    };
    const auto roots = oracle::roots([&](double y) { return F(y) - y; }, kJ.lo, kJ.hi);
    CHECK(rec.fixed_points.size() == roots.size());
    CHECK(rec.pinched == (roots.size() == 1));
  }
}

TEST_CASE("strip certificate values") {
  const BakerSystem sys(0.5);
  const auto s18 = strip_certificate(ArctanFamily(1.1, 0.018), sys, 0.3, 0.86, 0.5);
  const auto s19 = strip_certificate(ArctanFamily(1.1, 0.019), sys, 0.3, 0.86, 0.5);
  CHECK(s18.push_margin == doctest::Approx(0.0172).epsilon(0.02));
  CHECK(s19.push_margin == doctest::Approx(0.0161).epsilon(0.02));
  CHECK(s18.contraction_sup == doctest::Approx(0.98353).epsilon(1e-3));
  CHECK(s19.contraction_sup == doctest::Approx(0.98418).epsilon(1e-3));
  CHECK(s18.pass);
  CHECK(s19.pass);
  const auto s40 = strip_certificate(ArctanFamily(1.1, 0.04), sys, 0.3, 0.86, 0.5);
  CHECK_FALSE(s40.pass);
  CHECK(s40.push_margin < 0.0);
}
