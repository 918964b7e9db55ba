#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "skewprod/stablefibre.hpp"

using namespace skewprod;

namespace {
const Interval kI{-0.858, 0.858};
const Interval kJ{-0.86, 0.86};
}

TEST_CASE("tail bound decays geometrically") {
  const ArctanFamily fam(1.1, 0.018);
  const BakerSystem sys(0.5);
  const StableField field = make_stable_field(fam, sys, kI, kJ, 1e-10);
  CHECK(field.tail_bound <= 1e-10);
  const double g = field.bounds.gamma_norm;
  CHECK(g < 1.0);
  CHECK(stable_tail_bound(field.bounds, 10) ==
        doctest::Approx(std::pow(g, 10) * field.bounds.sup_abs_a / (1 - g)));
  CHECK(stable_tail_bound(field.bounds, field.terms - 1) > 1e-10);
}

TEST_CASE("unforced field vanishes and fibres are flat") {
  const ArctanFamily fam(1.1, 0.0);
  const BakerSystem sys(0.5);
  const StableField field = make_stable_field(fam, sys, kI, kJ);
  DigitStream xi = DigitStream::typical(sys, 3);
  const auto digits = xi.take(field.terms + 64);
  CHECK(x3_eval(field, fam, sys, digits, 0.3, 0.4) == 0.0);
  const StableFibre fib = integrate_fibre(field, fam, sys, digits, 0.4, 0.2, 1e-3);
  CHECK(fib.domain_full);
  for (double v : fib.ells) CHECK(v == doctest::Approx(0.2));
}

TEST_CASE("X3 satisfies its functional equation") {
  // X3(theta) = -A(theta) + Gamma(theta) X3(F theta), with F theta = (tau xi, g x, f_x y).
  const ArctanFamily fam(1.1, 0.019);
  const BakerSystem sys(0.5);
  const StableField field = make_stable_field(fam, sys, kI, kJ);
  std::mt19937_64 rng(17);
  DigitStream xi = DigitStream::typical(sys, 9);
  for (int i = 0; i < 200; ++i) {
    const auto digits = xi.take(field.terms + 64);
    const double x = uniform01(rng);
    const double y = -0.5 + uniform01(rng);
    const double lhs = x3_eval(field, fam, sys, digits, x, y);
    const double fy = 1.1 / (1 + 1.21 * y * y);
    const double fx = -kTwoPi * 0.019 * std::sin(kTwoPi * x);
    const double sigma = 0.5;
    const double x1 = sys.inverse_branch(digits[0], x);
    const double y1 = oracle::arctan_map(1.1, 0.019, x, y);
    const std::span<const std::uint8_t> shifted(digits.data() + 1, digits.size() - 1);
    const double rhs = -fx / fy + sigma / fy * x3_eval(field, fam, sys, shifted, x1, y1);
    CHECK(std::abs(lhs - rhs) <= 2 * field.tail_bound + 1e-13);
  }
}

TEST_CASE("fibre slope matches the field and stays Lipschitz") {
  const ArctanFamily fam(1.1, 0.05);
  const BakerSystem sys(0.5);
  const StableField field = make_stable_field(fam, sys, kI, kJ);
  DigitStream xi = DigitStream::typical(sys, 4);
  const auto digits = xi.take(field.terms + 64);
  const StableFibre fib = integrate_fibre(field, fam, sys, digits, 0.5, 0.1, 1e-3);
  REQUIRE(fib.us.size() > 10);
  CHECK(fib.at(0.5) == doctest::Approx(0.1));
  for (std::size_t i = 1; i + 1 < fib.us.size(); ++i) {
    const double du = fib.us[i + 1] - fib.us[i - 1];
    const double slope = (fib.ells[i + 1] - fib.ells[i - 1]) / du;
    CHECK(std::abs(slope) <= field.slope_bound() + 1e-9);
    const double x3 = x3_eval(field, fam, sys, digits, fib.us[i], fib.ells[i]);
    CHECK(slope == doctest::Approx(x3).epsilon(1e-3).scale(1e-2));
  }
}

TEST_CASE("fibres are equivariant") {
  const ArctanFamily fam(1.1, 0.018);
  const BakerSystem sys(0.5);
  const StableField field = make_stable_field(fam, sys, kI, kJ);
  DigitStream xi = DigitStream::typical(sys, 6);
  const auto digits = xi.take(field.terms + 200);
  const StableFibre fib = integrate_fibre(field, fam, sys, digits, 0.37, 0.4, 1e-3);
  const auto eq = equivariance_residual(fib, field, fam, sys, 10, 20);
  CHECK(eq.compared > 0);
  CHECK(eq.residual <= eq.envelope + eq.budget);
}
