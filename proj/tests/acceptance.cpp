// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skewprod/classify.hpp"
#include "skewprod/dimension.hpp"
#include "skewprod/graphs.hpp"
#include "skewprod/hypotheses.hpp"
#include "skewprod/lyapunov.hpp"
#include "skewprod/scenario.hpp"
#include "skewprod/stablefibre.hpp"

using namespace skewprod;

namespace {

constexpr double kR = 1.1;
constexpr double kM = 0.86;
const Interval kI{-0.858, 0.858};
const Interval kJ{-kM, kM};
constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Outcome certification() {
  const Stopwatch sw;
  const auto c = check_hypotheses(ArctanFamily(kR, 0.1), BakerSystem(0.5), kI, kJ, 1000);
  const double t = sw.seconds();
  return {c.pass && c.expansion_margin >= 0.15 && t < 10.0,
          "pass=" + std::string(c.pass ? "true" : "false") + " expansion_margin=" +
              fmt(c.expansion_margin) + " invariance_margin=" + fmt(c.invariance_margin) +
              " time=" + fmt(t, 3) + "s"};
}

Outcome region_scan() {
  const Stopwatch sw;
  const std::size_t n = 100;
  // Nodes M_i = 0.76 + 0.22 i/99 and r_j = 1 + 0.22 j/99, so r_j <= M_i + 0.24 iff j <= i.
  const auto cells = scan_region(0.1, 0.5, {0.76, 0.98}, {1.0, 1.22}, n, n);
  const double t = sw.seconds();
  std::size_t inside = 0, failed = 0;
  double worst = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const auto& c = cells[i * n + j];
      ++inside;
      if (!c.pass) ++failed;
      worst = std::min({worst, c.expansion_margin, c.invariance_margin});
    }
  }
  return {failed == 0 && t < 300.0, "triangle_points=" + std::to_string(inside) + " failed=" +
                                        std::to_string(failed) + " min_margin=" + fmt(worst) +
                                        " time=" + fmt(t, 3) + "s"};
}

Outcome fixed_point_values() {
  const auto near = [](double y, double ref) { return std::abs(y - ref) <= 0.005; };
  std::ostringstream d;
  bool ok = true;
  const ArctanFamily f19(kR, 0.019), f40(kR, 0.04);
  const auto a = fixed_points(f19, 0.0, kJ, 1e-12);
  ok = ok && a.size() == 1 && near(a[0].y, 0.610);
  d << "eps=0.019 f_0:";
  for (const auto& p : a) d << ' ' << fmt(p.y, 5);
  const auto b = fixed_points(f19, 1.0 / 3.0, kJ, 1e-12);
  std::vector<double> stable;
  for (const auto& p : b)
    if (p.stability == Stability::stable) stable.push_back(p.y);
  ok = ok && b.size() == 3 && stable.size() == 2 && near(stable[0], -0.568) && near(stable[1], 0.451);
  d << " f_1/3:";
  for (const auto& p : b) d << ' ' << fmt(p.y, 5);
  const auto c = fixed_points(f40, 0.0, kJ, 1e-12);
  ok = ok && c.size() == 1 && near(c[0].y, 0.687);
  d << " eps=0.04 f_0:";
  for (const auto& p : c) d << ' ' << fmt(p.y, 5);
  const auto e = fixed_points(f40, 1.0 / 3.0, kJ, 1e-12);
  ok = ok && e.size() == 1 && near(e[0].y, -0.614);
  d << " f_1/3:";
  for (const auto& p : e) d << ' ' << fmt(p.y, 5);
  return {ok, d.str()};
}

struct Classified {
  ClassificationReport report;
  double seconds = 0.0;
};

Classified classify_at(double eps) {
  ClassifyConfig cfg;
  cfg.seed = kSeed;
  const Stopwatch sw;
  Classified c;
  c.report = classify_scenario(ArctanFamily(kR, eps), BakerSystem(0.5), cfg);
  c.seconds = sw.seconds();
  return c;
}

Outcome case_detection(const Classified& a18, const Classified& b19, const Classified& b40) {
  std::ostringstream d;
  bool ok = a18.report.case_label == "A" && a18.report.refined_min_gap > 0.0 && a18.seconds < 600.0;
  d << "eps=0.018: " << a18.report.case_label << '/' << a18.report.case_grade
    << " refined_min_gap=" << fmt(a18.report.refined_min_gap) << " time=" << fmt(a18.seconds, 3) << "s";
  for (const auto* c : {&b19, &b40}) {
    const auto& r = c->report;
    int shortest = 0;
    for (const auto& p : r.pinched_periodic)
      if (shortest == 0 || p.period < shortest) shortest = p.period;
    ok = ok && r.case_label == "B" && r.case_grade == "certified" && shortest >= 1 && shortest <= 2 &&
         c->seconds < 600.0;
    d << "; eps=" << (c == &b19 ? "0.019" : "0.04") << ": " << r.case_label << '/' << r.case_grade
      << " pinched_periodic=" << r.pinched_periodic.size() << " shortest_period=" << shortest
      << " time=" << fmt(c->seconds, 3) << "s";
  }
  return {ok, d.str()};
}

Outcome upper_graph_bound() {
  const GraphGrid up =
      pullback_graph(ArctanFamily(kR, 0.019), BakerSystem(0.5), GraphKind::upper, 4096, 200, kM);
  const double lo = *std::min_element(up.values.begin(), up.values.end());
  return {lo > 0.3, "grid=" + std::to_string(up.size()) + " min_phi_plus=" + fmt(lo) +
                        " residual=" + fmt(up.residual, 3)};
}

Outcome contraction_constants() {
  const BakerSystem sys(0.5);
  std::ostringstream d;
  bool ok = true;
  for (const auto& [eps, bound] : {std::pair{0.018, 0.99}, std::pair{0.019, 0.997}}) {
    const ArctanFamily fam(kR, eps);
    const auto hi = two_step_slope_sup(fam, sys, {0.3, kM});
    const auto lo = two_step_slope_sup(fam, sys, {-kM, -0.3});
    const double sup = std::max(hi.bound, lo.bound);
    ok = ok && sup < bound;
    d << "eps=" << eps << " sup=" << fmt(sup) << " (upper " << fmt(hi.bound) << ", lower "
      << fmt(lo.bound) << ", padding " << fmt(std::max(hi.padding, lo.padding), 3) << ") < " << bound
      << "; ";
  }
  return {ok, d.str()};
}

Outcome strip_bound() {
  const auto s = negative_strip_bound(ArctanFamily(kR, 0.019), BakerSystem(0.5), -0.1, {0.25, 0.75});
  return {s.pass && s.bound >= 1.5, "pass=" + std::string(s.pass ? "true" : "false") + " sup=" +
                                        fmt(s.sup) + " digits=" + std::to_string(s.quaternary_digits) +
                                        " bound=" + fmt(s.bound)};
}

Outcome stable_fibres() {
  const ArctanFamily fam(kR, 0.018);
  const BakerSystem sys(0.5);
  const StableField field = make_stable_field(fam, sys, kI, kJ);
  std::mt19937_64 rng(split_seed(kSeed, 7));

  // X3 = -A + Gamma X3 o F at random points of T x I.
  double worst_ratio = 0.0;
  for (int i = 0; i < 1000; ++i) {
    DigitStream xi = DigitStream::typical(sys, split_seed(kSeed, 10000 + i));
    const auto digits = xi.take(field.terms + 64);
    const double x = uniform01(rng);
    const double y = kI.lo + (kI.hi - kI.lo) * uniform01(rng);
    const double fy = fam.dy(x, y);
    const double a = fam.dx(x, y) / fy;
    const double sigma = digits[0] == 0 ? sys.a() : 1.0 - sys.a();
    const std::span<const std::uint8_t> shifted(digits.data() + 1, digits.size() - 1);
    const double rhs =
        -a + sigma / fy *
                 x3_eval(field, fam, sys, shifted, sys.inverse_branch(digits[0], x), fam.value(x, y));
    const double res = std::abs(x3_eval(field, fam, sys, digits, x, y) - rhs);
    worst_ratio = std::max(worst_ratio, res / (2.0 * field.tail_bound));
  }

  // Equivariance and exponent constancy on 20 anchored fibres.
  std::size_t equivariant = 0, decreasing = 0;
  double worst_eq = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t stream = split_seed(kSeed, 20000 + k);
    DigitStream xi = DigitStream::typical(sys, stream);
    const auto digits = xi.take(field.terms + 256);
    const double x = 0.2 + 0.6 * uniform01(rng);
    const double y = kI.lo + (kI.hi - kI.lo) * uniform01(rng);
    const StableFibre fib = integrate_fibre(field, fam, sys, digits, x, y);
    const auto eq = equivariance_residual(fib, field, fam, sys, 10);
    if (eq.residual <= eq.envelope + eq.budget) ++equivariant;
    worst_eq = std::max(worst_eq, eq.residual / (eq.envelope + eq.budget));

    const double u = x + 0.25 <= fib.domain.hi ? x + 0.25 : std::max(fib.domain.lo, x - 0.25);
    const double v = fib.at(u);
    const auto gap = [&](std::size_t n) {
      DigitStream s1 = DigitStream::with_prefix(digits, 0.5, stream);
      DigitStream s2 = DigitStream::with_prefix(digits, 0.5, stream);
      return std::abs(forward_exponent(fam, sys, s1, x, y, n).value -
                      forward_exponent(fam, sys, s2, u, v, n).value);
    };
    if (gap(10000) < gap(1000)) ++decreasing;
  }
  const bool ok = worst_ratio <= 1.0 && equivariant == 20 && decreasing >= 18;
  return {ok, "x3_residual/(2 tail) max=" + fmt(worst_ratio, 3) + " tail=" + fmt(field.tail_bound, 3) +
                  " equivariant=" + std::to_string(equivariant) + "/20 (max residual/allowance " +
                  fmt(worst_eq, 3) + ") gap_decreasing=" + std::to_string(decreasing) + "/20"};
}

Outcome trichotomy(const ClassificationReport& r) {
  const ArctanFamily fam(kR, 0.018);
  const BakerSystem sys(0.5);
  std::mt19937_64 rng(split_seed(kSeed, 8));
  const ExponentEstimate* graphs[3] = {&r.lambda_minus, &r.lambda_star, &r.lambda_plus};
  std::size_t counts[3] = {0, 0, 0};
  std::size_t unmatched = 0;
  for (int i = 0; i < 50; ++i) {
    DigitStream xi = DigitStream::typical(sys, split_seed(kSeed, 30000 + i));
    const double x = uniform01(rng);
    const double y = kJ.lo + (kJ.hi - kJ.lo) * uniform01(rng);
    const auto e = forward_exponent(fam, sys, xi, x, y, 100000);
    bool matched = false;
    for (int g = 0; g < 3; ++g) {
      const double se = std::hypot(e.std_error, graphs[g]->std_error);
      if (std::isfinite(graphs[g]->value) && std::abs(e.value - graphs[g]->value) <= 3.0 * se) {
        ++counts[g];
        matched = true;
        break;
      }
    }
    if (!matched) ++unmatched;
  }
  return {unmatched == 0, "lambda-=" + fmt(r.lambda_minus.value) + " lambda*=" + fmt(r.lambda_star.value) +
                              " lambda+=" + fmt(r.lambda_plus.value) + " matched(-,*,+)=" +
                              std::to_string(counts[0]) + "," + std::to_string(counts[1]) + "," +
                              std::to_string(counts[2]) + " unmatched=" + std::to_string(unmatched)};
}

Outcome dimension_sanity() {
  const BakerSystem sys(0.5);
  std::ostringstream d;
  const auto neg = dimension_estimate(make_pressure_model(sys, std::vector<double>(1024, -0.3), 10),
                                      GraphKind::upper);
  const auto pos = dimension_estimate(make_pressure_model(sys, std::vector<double>(1024, 0.3), 10),
                                      GraphKind::upper);
  bool ok = !neg.empty && neg.value == 2.0 && pos.empty && pos.verdict() == "P empty";
  d << "psi=-0.3 dim=" << fmt(neg.value, 17) << "; psi=+0.3 verdict=" << pos.verdict();

  const Stopwatch sw;
  const ArctanFamily fam(kR, 0.019);
  const GraphGrid upper = pullback_graph(fam, sys, GraphKind::upper, 4096, 200, kM);
  const GraphGrid lower = pullback_graph(fam, sys, GraphKind::lower, 4096, 200, kM);
  DigitStream mxi = DigitStream::typical(sys, split_seed(kSeed, 2));
  const GraphGrid middle = middle_graph(fam, sys, 4096, 200, 0.0, kJ, mxi.take(200 + 1 + 256));
  DimensionOptions opt;
  opt.strict = false;
  for (const GraphGrid* g : {&upper, &lower, &middle}) {
    const auto d8 = dimension_estimate(fam, sys, *g, 8, opt);
    const auto d10 = dimension_estimate(fam, sys, *g, 10, opt);
    const bool same_verdict = d8.empty == d10.empty;
    const bool stable = same_verdict && (d8.empty || std::abs(d8.s_star - d10.s_star) < 5e-2);
    ok = ok && d10.gap < 1e-2 && stable;
    d << "; " << to_string(g->kind) << ": n=8 " << (d8.empty ? "P empty" : "s*=" + fmt(d8.s_star))
      << ", n=10 " << (d10.empty ? "P empty" : "s*=" + fmt(d10.s_star)) << " gap=" << fmt(d10.gap, 3);
  }
  const double t = sw.seconds();
  ok = ok && t < 900.0;
  d << "; time=" << fmt(t, 3) << "s";
  return {ok, d.str()};
}

Outcome crossings() {
  const BakerSystem sys(0.5);
  const std::uint64_t seed = trajectory_seed(kSeed);
  const auto count = [&](double eps) {
    const ArctanFamily fam(kR, eps);
    std::size_t total = 0;
    const double starts[2] = {-1.0, 1.0};
    for (std::size_t i = 0; i < 2; ++i)
      total += run_trajectory(fam, sys, seed, i, starts[i], 10000000, 1000, 1, nullptr).crossings.size();
    return total;
  };
  const std::size_t c40 = count(0.04);
  const std::size_t c80 = count(0.08);
  return {c40 >= 1 && c80 > c40, "crossings eps=0.04: " + std::to_string(c40) +
                                     ", eps=0.08: " + std::to_string(c80) + " (1e7 steps, y0 = -1, 1)"};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "hypothesis certification", certification);
  report(2, "region scan", region_scan);
  report(3, "fixed points", fixed_point_values);

  Classified a18, b19, b40;
  bool classified = true;
  std::string classify_error;
  try {
    a18 = classify_at(0.018);
    b19 = classify_at(0.019);
    b40 = classify_at(0.04);
  } catch (const std::exception& e) {
    classified = false;
    classify_error = e.what();
  }
  report(4, "case detection", [&]() -> Outcome {
    if (!classified) return {false, "exception: " + classify_error};
    return case_detection(a18, b19, b40);
  });
  report(5, "upper graph bound", upper_graph_bound);
  report(6, "contraction constants", contraction_constants);
  report(7, "strip bound", strip_bound);
  report(8, "stable-fibre invariants", stable_fibres);
  report(9, "exponent trichotomy", [&]() -> Outcome {
    if (!classified) return {false, "exception: " + classify_error};
    return trichotomy(a18.report);
  });
  report(10, "dimension estimator", dimension_sanity);
  report(11, "crossing phenomenology", crossings);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
