#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "skewprod/hypotheses.hpp"

using namespace skewprod;

TEST_CASE("certificate for the worked example") {
  const ArctanFamily fam(1.1, 0.1);
  const BakerSystem sys(0.5);
  const auto c = check_hypotheses(fam, sys, {-0.858, 0.858}, {-0.86, 0.86}, 1000);
  CHECK(c.pass);
  // Worst expansion 2 * 1.1 / (1 + 1.21 M^2) at y = +-M.
  const double expansion = 2.0 * 1.1 / (1.0 + 1.21 * 0.86 * 0.86);
  CHECK(c.expansion <= expansion);
  CHECK(c.expansion == doctest::Approx(expansion).epsilon(1e-5));
  // sup f = arctan(1.1 M) + eps.
  const double image_hi = std::atan(1.1 * 0.86) + 0.1;
  CHECK(c.image_hi >= image_hi);
  CHECK(c.image_hi == doctest::Approx(image_hi).epsilon(1e-5));
  CHECK(c.invariance_margin > 0.0);
  CHECK(c.eps0 == doctest::Approx(0.002));
  CHECK(c.schwarzian_max < 0.0);
  CHECK(c.binding == "invariance");
  std::ostringstream os;
  write_certificate(os, c);
  CHECK(os.str().find("pass: true") != std::string::npos);
}

TEST_CASE("certificate failures name the binding constraint") {
  const BakerSystem sys(0.5);
  // Too large M: expansion fails.
  const ArctanFamily fam(1.1, 0.1);
  const auto c1 = check_hypotheses(fam, sys, {-1.4, 1.4}, {-1.5, 1.5}, 200);
  CHECK_FALSE(c1.pass);
  CHECK(c1.binding == "expansion");
  // I too small for the image.
  const auto c2 = check_hypotheses(fam, sys, {-0.5, 0.5}, {-0.86, 0.86}, 200);
  CHECK_FALSE(c2.pass);
  CHECK(c2.binding == "invariance");
}

TEST_CASE("certificate preconditions") {
  const ArctanFamily fam(1.1, 0.1);
  const BakerSystem sys(0.5);
  CHECK_THROWS_AS(check_hypotheses(fam, sys, {-0.9, 0.9}, {-0.86, 0.86}, 200), std::invalid_argument);
  CHECK_THROWS_AS(check_hypotheses(fam, sys, {0.5, 0.1}, {-0.86, 0.86}, 200), std::invalid_argument);
  CHECK_THROWS_AS(check_hypotheses(fam, sys, {-0.8, 0.8}, {-0.86, 0.86}, 50), std::invalid_argument);
}

TEST_CASE("region scan ordering and endpoints") {
  const auto cells = scan_region(0.1, 0.5, {0.8, 0.9}, {1.0, 1.1}, 3, 2, 100);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].M == doctest::Approx(0.8));
  CHECK(cells[0].r == doctest::Approx(1.0));
  CHECK(cells[1].r == doctest::Approx(1.1));
  CHECK(cells[5].M == doctest::Approx(0.9));
  // Invariance into J needs arctan(r M) + eps < M.
  for (const auto& c : cells) {
    if (std::atan(c.r * c.M) + 0.1 > c.M) CHECK_FALSE(c.pass);
    if (std::atan(c.r * c.M) + 0.1 < c.M - 0.01) CHECK(c.pass);
  }
  CHECK_FALSE(cells[1].pass);
  CHECK(cells[0].pass);
  // Far outside the admissible region.
  const auto bad = scan_region(0.1, 0.5, {1.5, 1.6}, {1.0, 1.1}, 2, 2, 100);
  for (const auto& c : bad) CHECK_FALSE(c.pass);
}

TEST_CASE("two-step extrema against dense evaluation") {
  const BakerSystem sys(0.5);
  for (double eps : {0.018, 0.019}) {
    const ArctanFamily fam(1.1, eps);
    const auto g = [&](double x, double y) {
      return oracle::arctan_map(1.1, eps, x, oracle::arctan_map(1.1, eps, sys.tau(x), y));
    };
    double dense_min = 1e9;
    for (int i = 0; i < 200000; ++i) dense_min = std::min(dense_min, g(i / 200000.0, 0.3));
    const auto e = two_step_value_extremum(fam, sys, 0.3, {0.0, 1.0}, Extremum::min);
    CHECK(e.bound <= dense_min);
    CHECK(e.bound == doctest::Approx(dense_min).epsilon(1e-6));
  }
  // The push margin above 0.3 from a direct scan.
  const ArctanFamily f18(1.1, 0.018);
  const auto e18 = two_step_value_extremum(f18, sys, 0.3, {0.0, 1.0}, Extremum::min);
  CHECK(e18.bound - 0.3 == doctest::Approx(0.0172).epsilon(0.02));
}

TEST_CASE("two-step slope sup against dense evaluation") {
  const BakerSystem sys(0.5);
  const ArctanFamily fam(1.1, 0.019);
  double dense = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const double x = (i + 0.5) / 4000.0;
    const double tx = sys.tau(x);
    for (int j = 0; j <= 400; ++j) {
      const double y = 0.3 + (0.86 - 0.3) * j / 400.0;
      const double inner = oracle::arctan_map(1.1, 0.019, tx, y);
      const double s = 1.1 / (1 + 1.21 * inner * inner) * 1.1 / (1 + 1.21 * y * y);
      dense = std::max(dense, s);
    }
  }
  const auto e = two_step_slope_sup(fam, sys, {0.3, 0.86});
  CHECK(e.bound >= dense);
  CHECK(e.bound == doctest::Approx(dense).epsilon(1e-4));
}
