#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "skewprod/dimension.hpp"

using namespace skewprod;

namespace {
// psi depends on e_0 only: c0 on digit 0, c1 on digit 1.
std::vector<double> first_digit_potential(std::size_t order, double c0, double c1) {
  std::vector<double> psi(std::size_t{1} << order);
  for (std::size_t w = 0; w < psi.size(); ++w) psi[w] = ((w >> (order - 1)) & 1u) ? c1 : c0;
  return psi;
}
}

TEST_CASE("pressure of constant potentials") {
  const BakerSystem sys(0.5);
  const PressureModel m = make_pressure_model(sys, std::vector<double>(64, 0.0), 6);
  CHECK(pressure_eval(m, std::vector<double>(64, 0.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(pressure_eval(m, std::vector<double>(64, 0.7)) == doctest::Approx(std::log(2.0) + 0.7).epsilon(1e-12));
}

TEST_CASE("Rohlin identity for a general split") {
  const BakerSystem sys(0.3);
  const PressureModel m = make_pressure_model(sys, std::vector<double>(256, 0.0), 8);
  // P(-log tau') = log(a + (1 - a)) = 0.
  CHECK(std::abs(pressure_eval(m, 0.0, 1.0)) < 1e-11);
  // First-digit potential: P = log(e^{c0} + e^{c1}).
  const auto psi = first_digit_potential(8, -0.4, 0.9);
  CHECK(pressure_eval(m, psi) == doctest::Approx(std::log(std::exp(-0.4) + std::exp(0.9))).epsilon(1e-11));
}

TEST_CASE("pressure is convex") {
  const BakerSystem sys(0.5);
  const std::size_t n = 5, N = 32;
  const PressureModel m = make_pressure_model(sys, std::vector<double>(N, 0.0), n);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> A(N), B(N), C(N);
    for (std::size_t i = 0; i < N; ++i) {
      A[i] = nd(rng);
      B[i] = nd(rng);
    }
    const double t = uniform01(rng);
    for (std::size_t i = 0; i < N; ++i) C[i] = t * A[i] + (1 - t) * B[i];
    CHECK(pressure_eval(m, C) <= t * pressure_eval(m, A) + (1 - t) * pressure_eval(m, B) + 1e-10);
  }
}

TEST_CASE("constant psi gives full dimension or an empty set") {
  const BakerSystem sys(0.5);
  const auto neg = dimension_estimate(make_pressure_model(sys, std::vector<double>(256, -0.2), 8),
                                      GraphKind::upper);
  CHECK_FALSE(neg.empty);
  CHECK(neg.value == 2.0);
  const auto pos = dimension_estimate(make_pressure_model(sys, std::vector<double>(256, 0.2), 8),
                                      GraphKind::middle);
  CHECK(pos.empty);
  CHECK(pos.verdict() == "P empty");
}

TEST_CASE("active constraint matches the Bernoulli optimum") {
  // Digit frequency p <= p* = -c0 / (c1 - c0); the entropy maximizer is Bernoulli(p*).
  const BakerSystem sys(0.5);
  const double c0 = -1.0, c1 = 3.0, p_star = 0.25;
  const std::size_t n = 4;
  const PressureModel m = make_pressure_model(sys, first_digit_potential(n, c0, c1), n);
  const auto d = dimension_estimate(m, GraphKind::upper);
  const double s_ref = oracle::binary_entropy(p_star) / std::log(2.0);
  CHECK(d.s_star == doctest::Approx(s_ref).epsilon(1e-6));
  CHECK(std::abs(d.s_star - d.oracle_s) < 1e-6);
  CHECK(d.gap < 1e-6);
  const auto opt = markov_entropy_program(m.psi, m.log_tau, n);
  CHECK(opt.feasible);
  CHECK(opt.s == doctest::Approx(s_ref).epsilon(1e-6));
}

TEST_CASE("unforced graph gives the affine pressure") {
  const ArctanFamily fam(1.1, 0.0);
  const BakerSystem sys(0.5);
  const GraphGrid up = pullback_graph(fam, sys, GraphKind::upper, 256, 200, 0.86);
  const PressureModel m = make_pressure_model(fam, sys, up, 6);
  const double ys = oracle::y_star();
  const double psi = std::log(1.1 / (1 + 1.21 * ys * ys));
  for (double q : {0.0, 0.5, 2.0})
    CHECK(pressure_eval(m, q, 0.0) == doctest::Approx(std::log(2.0) - q * psi).epsilon(1e-10));
  const auto d = dimension_estimate(m, GraphKind::upper);
  CHECK(d.value == 2.0);
}

TEST_CASE("Bernoulli lower bound") {
  const ArctanFamily fam(1.1, 0.019);
  const BakerSystem sys(0.5);
  const GraphGrid up = pullback_graph(fam, sys, GraphKind::upper, 512, 200, 0.86);
  const auto b = bernoulli_lower_bound(fam, sys, up, {0.3, 0.5}, 4000, 7);
  REQUIRE(b.rows.size() == 2);
  CHECK(b.any_feasible);
  for (const auto& row : b.rows) {
    CHECK(row.entropy == doctest::Approx(oracle::binary_entropy(row.p)));
    if (row.feasible) CHECK(row.bound == doctest::Approx(1 + row.entropy / std::log(2.0)));
  }
  CHECK(b.best == doctest::Approx(2.0));
}

TEST_CASE("negative strip bound") {
  const BakerSystem sys(0.5);
  for (double eps : {0.0, 0.019}) {
    const auto s = negative_strip_bound(ArctanFamily(1.1, eps), sys, -0.1, {0.25, 0.75});
    CHECK(s.pass);
    CHECK(s.quaternary_digits == 2);
    CHECK(s.bound == doctest::Approx(1.5));
  }
  // Unforced: sup_x f(f(-0.1)) = arctan(1.1 arctan(-0.11)).
  const auto s0 = negative_strip_bound(ArctanFamily(1.1, 0.0), sys, -0.1, {0.25, 0.75});
  CHECK(s0.sup == doctest::Approx(std::atan(1.1 * std::atan(-0.11))).epsilon(1e-6));
  CHECK_THROWS(negative_strip_bound(ArctanFamily(1.1, 0.0), BakerSystem(0.3), -0.1, {0.25, 0.75}));
}
