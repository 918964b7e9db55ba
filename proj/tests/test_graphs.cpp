#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "skewprod/graphs.hpp"

using namespace skewprod;

namespace {
const Interval kJ{-0.86, 0.86};
}

TEST_CASE("grid size uses a prime with primitive root 2") {
  const BakerSystem sys(0.5);
  for (std::size_t req : {64, 500, 4096}) {
    const std::size_t n = graph_grid_size(sys, req);
    CHECK(n % 6 == 0);
    const std::uint64_t p = n / 6;
    CHECK(p >= 5);
    CHECK(oracle::is_prime(p));
    CHECK(oracle::order_of_two(p) == p - 1);
    CHECK(n >= req);
  }
  CHECK(graph_grid_size(BakerSystem(0.3), 500) == 500);
}

TEST_CASE("unforced graphs are the constant fixed points") {
  const ArctanFamily fam(1.1, 0.0);
  const BakerSystem sys(0.5);
  const double ys = oracle::y_star();
  const GraphGrid up = pullback_graph(fam, sys, GraphKind::upper, 256, 300, 0.86);
  const GraphGrid lo = pullback_graph(fam, sys, GraphKind::lower, 256, 300, 0.86);
  for (std::size_t i = 0; i < up.size(); ++i) {
    CHECK(up.values[i] == doctest::Approx(ys).epsilon(1e-9));
    CHECK(lo.values[i] == doctest::Approx(-ys).epsilon(1e-9));
  }
  const PinchScan scan = pinched_scan(up, lo, 1e-3);
  CHECK(scan.min_gap == doctest::Approx(2 * ys).epsilon(1e-9));
  CHECK(scan.min_gap > 1.0);
  CHECK(scan.pinched_count == 0);
}

TEST_CASE("pullback value follows the definition") {
  const ArctanFamily fam(1.1, 0.05);
  const BakerSystem sys(0.5);
  const RationalPoint x{3, 7};
  double y = 0.86;
  // psi_k(x) = f_{tau x} o ... o f_{tau^k x}(M): innermost map uses tau^k x.
  std::vector<double> orbit;
  RationalPoint q = x;
  for (int j = 0; j < 12; ++j) {
    q = q.doubled();
    orbit.push_back(q.value());
  }
  for (int j = 11; j >= 0; --j) y = oracle::arctan_map(1.1, 0.05, orbit[j], y);
  CHECK(pullback_value(fam, x, 12, 0.86) == doctest::Approx(y).epsilon(1e-14));
}

TEST_CASE("graph invariance on the exact grid") {
  const BakerSystem sys(0.5);
  for (double eps : {0.018, 0.05}) {
    const ArctanFamily fam(1.1, eps);
    const GraphGrid up = pullback_graph(fam, sys, GraphKind::upper, 512, 200, 0.86);
    const auto res = invariance_residual(fam, sys, up);
    CHECK(res.max_defect <= up.residual + 1e-14);
    CHECK(res.max_defect < 1e-8);
    CHECK(res.interpolation_bound == 0.0);
    for (std::size_t i = 0; i < up.size(); ++i) {
      const double x = up.xs[i];
      const double tx = sys.tau(x);
      CHECK(std::abs(oracle::arctan_map(1.1, eps, tx, up.at(tx)) - up.values[i]) < 1e-8);
    }
  }
}

TEST_CASE("pinching at the fixed point when the graphs collapse") {
  const ArctanFamily fam(1.1, 0.04);
  const BakerSystem sys(0.5);
  const GraphGrid up = pullback_graph(fam, sys, GraphKind::upper, 512, 400, 0.86);
  const GraphGrid lo = pullback_graph(fam, sys, GraphKind::lower, 512, 400, 0.86);
  const PinchScan scan = pinched_scan(up, lo, 1e-3);
  CHECK(scan.pinched[0] == 1);
  // phi(0) is the unique fixed point of f_0.
  const auto r = oracle::roots([](double y) { return oracle::arctan_map(1.1, 0.04, 0.0, y) - y; },
                               -0.86, 0.86);
  REQUIRE(r.size() == 1);
  CHECK(up.values[0] == doctest::Approx(r[0]).epsilon(1e-9));
}

TEST_CASE("middle graph solves the backward relation") {
  const ArctanFamily fam(1.1, 0.018);
  const BakerSystem sys(0.5);
  DigitStream xi = DigitStream::typical(sys, 5);
  const GraphGrid mid = middle_graph(fam, sys, 256, 60, 0.0, kJ, xi.take(200));
  CHECK(mid.diverged_count() == 0);
  CHECK(mid.residual < 1e-3);
  for (double v : mid.values) CHECK(std::abs(v) < 0.3);
  // f_x(phi_k(xi, x)) = phi_{k-1}(shift xi, g_{xi_0}(x)).
  const auto& d = mid.xi_digits;
  const std::span<const std::uint8_t> shifted(d.data() + 1, d.size() - 1);
  for (double x : {0.1, 0.45, 0.8}) {
    const auto here = middle_value(fam, sys, d, x, 60, 0.0, kJ);
    const auto next = middle_value(fam, sys, shifted, sys.inverse_branch(d[0], x), 59, 0.0, kJ);
    REQUIRE(here.has_value());
    REQUIRE(next.has_value());
    CHECK(std::abs(oracle::arctan_map(1.1, 0.018, x, *here) - *next) < 1e-12);
  }
}

TEST_CASE("anchor inside the attractor is rejected") {
  const ArctanFamily fam(1.1, 0.018);
  const BakerSystem sys(0.5);
  CHECK_THROWS_AS(pullback_graph(fam, sys, GraphKind::upper, 64, 50, 0.1), NumericError);
}
