#include "skewprod/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "skewprod/csv.hpp"
#include "skewprod/graphs.hpp"
#include "skewprod/hypotheses.hpp"
#include "skewprod/stablefibre.hpp"

namespace skewprod {

namespace {

constexpr std::size_t kPinchCells = 2000;
constexpr double kPinchTol = 1e-10;

struct Candidate {
  double x;
  std::uint64_t num;
  std::uint64_t den;
  int period;
};

std::vector<double> tau_orbit(const BakerSystem& sys, const Candidate& c) {
  std::vector<double> orbit(static_cast<std::size_t>(c.period));
  if (c.den != 0) {
    RationalPoint q{c.num, c.den};
    for (auto& v : orbit) {
      q = q.doubled();
      v = q.value();
    }
  } else {
    double x = c.x;
    for (auto& v : orbit) {
      x = sys.tau(x);
      v = x;
    }
  }
  return orbit;
}

double sup_distance(const StableFibre& fib, const std::function<double(double)>& other) {
  double d = 0.0;
  for (std::size_t i = 0; i < fib.us.size(); ++i) {
    const double v = other(fib.us[i]);
    if (std::isnan(v)) continue;
    d = std::max(d, std::abs(fib.ells[i] - v));
  }
  return d;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

std::vector<PinchRecord> periodic_pinch_test(const FibreFamily& fam, const BakerSystem& sys,
                                             int max_period, Interval J, bool propagate) {
  if (max_period < 1 || max_period > 12) throw std::invalid_argument("max_period must lie in [1,12]");
  std::vector<Candidate> cands;
  for (int p = 1; p <= max_period; ++p) {
    for (const auto& pt : periodic_points(sys, p)) {
      if (pt.minimal_period == p) cands.push_back({pt.x, pt.num, pt.den, p});
    }
  }
  std::vector<PinchRecord> out(cands.size());
  std::vector<std::size_t> suggested(cands.size(), 0);
  parallel_for(cands.size(), [&](std::size_t i) {
    const Candidate& c = cands[i];
    PinchRecord& rec = out[i];
    rec.x = c.x;
    rec.num = c.num;
    rec.den = c.den;
    rec.period = c.period;
    const std::vector<double> orbit = tau_orbit(sys, c);
    // phi(x) = f_{tau x} o ... o f_{tau^p x}(phi(x)).
    ScalarMap F{[&](double y) {
                  for (std::size_t j = orbit.size(); j-- > 0;) y = fam.value(orbit[j], y);
                  return y;
                },
                [&](double y) {
                  double s = 1.0;
                  for (std::size_t j = orbit.size(); j-- > 0;) {
                    s *= fam.dy(orbit[j], y);
                    y = fam.value(orbit[j], y);
                  }
                  return s;
                }};
    try {
      rec.fixed_points = fixed_points_of(F, J, kPinchTol, kPinchCells);
      rec.pinched = rec.fixed_points.size() == 1;
    } catch (const RootSeparationError& e) {
      rec.resolved = false;
      rec.note = e.what();
      suggested[i] = e.suggested_cells();
    }
  });
  if (propagate) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!out[i].resolved) throw RootSeparationError(out[i].note, suggested[i]);
    }
  }
  return out;
}

StripCertificate strip_certificate(const FibreFamily& fam, const BakerSystem& sys, double y_s,
                                   double M, double graph_min, std::size_t grid) {
  StripCertificate s;
  s.y_s = y_s;
  s.graph_min = graph_min;
  s.push_margin =
      two_step_value_extremum(fam, sys, y_s, Interval{0.0, 1.0}, Extremum::min).bound - y_s;
  s.contraction_sup = two_step_slope_sup(fam, sys, Interval{y_s, M}, grid).bound;
  s.pass = s.push_margin > 0.0 && s.contraction_sup < 1.0 && graph_min > y_s;
  return s;
}

ClassificationReport classify_scenario(const FibreFamily& fam, const BakerSystem& sys,
                                       const ClassifyConfig& cfg) {
  ClassificationReport r;
  const GraphGrid upper = pullback_graph(fam, sys, GraphKind::upper, cfg.grid, cfg.depth, cfg.M);
  const GraphGrid lower = pullback_graph(fam, sys, GraphKind::lower, cfg.grid, cfg.depth, cfg.M);
  const std::size_t n = upper.size();
  r.grid_size = n;

  const PinchScan scan = pinched_scan(fam, sys, upper, lower, cfg.pinch_tol, cfg.refine);
  r.min_gap = scan.min_gap;
  r.refined_min_gap = scan.refined_min_gap;
  r.refined_argmin = scan.refined_argmin;
  r.pinched_grid_points = scan.pinched_count;

  const auto records = periodic_pinch_test(fam, sys, cfg.max_period, cfg.J, false);
  r.periodic_tested = records.size();
  for (const auto& rec : records) {
    if (!rec.resolved) ++r.periodic_unresolved;
    if (rec.pinched) r.pinched_periodic.push_back(rec);
  }
  if (r.periodic_unresolved > 0) {
    r.notes.push_back(std::to_string(r.periodic_unresolved) +
                      " periodic points could not be resolved by the fixed point scan");
  }

  r.lambda_plus = measure_exponent(fam, sys, upper, cfg.J, MeasureModel::lebesgue(cfg.seed));
  r.lambda_minus = measure_exponent(fam, sys, lower, cfg.J, MeasureModel::lebesgue(cfg.seed));
  GraphGrid middle_spec;
  middle_spec.kind = GraphKind::middle;
  middle_spec.depth = cfg.depth;
  middle_spec.anchor = 0.0;
  try {
    r.lambda_star = measure_exponent(fam, sys, middle_spec, cfg.J,
                                     MeasureModel::lebesgue(split_seed(cfg.seed, 1), false),
                                     cfg.lambda_samples);
    r.lambda_star_excludes_a = r.lambda_star.value + 3.0 * r.lambda_star.std_error < 0.0;
    if (r.lambda_star.discarded > 0) {
      r.notes.push_back("middle graph diverged for " + std::to_string(r.lambda_star.discarded) +
                        " of " + std::to_string(cfg.lambda_samples) + " lambda* samples");
    }
  } catch (const NumericError& e) {
    r.lambda_star.value = std::numeric_limits<double>::quiet_NaN();
    r.notes.push_back(std::string("lambda* unavailable: ") + e.what());
  }

  if (!r.pinched_periodic.empty()) {
    const PinchRecord& p = r.pinched_periodic.front();
    std::ostringstream os;
    os << "pinched periodic point x=" << p.x << " (period " << p.period << ")";
    r.case_label = "B";
    r.case_grade = "certified";
    r.case_reason = os.str();
  } else if (r.lambda_star_excludes_a) {
    r.case_label = "B";
    r.case_grade = "evidence";
    r.case_reason = "lambda*(Lebesgue) < 0 by more than 3 standard errors";
  } else if (r.refined_min_gap > cfg.pinch_tol) {
    r.case_label = "A";
    r.case_grade = "evidence";
    r.case_reason = "refined min gap exceeds the pinch tolerance and no periodic point is pinched";
  } else {
    r.case_label = "B";
    r.case_grade = "evidence";
    r.case_reason = "grid pinching below the tolerance";
  }

  const StableField field = make_stable_field(fam, sys, cfg.I, cfg.J);
  const std::size_t digits_needed = std::max(cfg.depth + 1, field.terms) + 64;
  DigitStream xi1 = DigitStream::typical(sys, split_seed(cfg.seed, 2));
  const DigitSequence d1 = xi1.take(digits_needed);

  if (r.case_label == "A") {
    const GraphGrid mid = middle_graph(fam, sys, cfg.grid, cfg.depth, 0.0, cfg.J, d1);
    r.middle_diverged = mid.diverged_count();
    const auto y0 = middle_value(fam, sys, d1, cfg.fibre_x, cfg.depth, 0.0, cfg.J);
    if (!y0) {
      r.subcase = "inconclusive";
      r.notes.push_back("middle graph diverged at the fibre anchor");
      return r;
    }
    const StableFibre fib = integrate_fibre(field, fam, sys, d1, cfg.fibre_x, *y0, cfg.fibre_h);
    double dist = std::numeric_limits<double>::infinity();
    const auto w = static_cast<std::ptrdiff_t>(cfg.envelope_cells);
    const auto nn = static_cast<std::ptrdiff_t>(n);
    for (std::size_t i = 0; i < fib.us.size(); ++i) {
      const auto c = static_cast<std::ptrdiff_t>(std::lround(fib.us[i] * static_cast<double>(n)));
      double up = std::numeric_limits<double>::infinity();
      double lo = -std::numeric_limits<double>::infinity();
      for (std::ptrdiff_t m = c - w; m <= c + w; ++m) {
        const auto idx = static_cast<std::size_t>(((m % nn) + nn) % nn);
        up = std::min(up, upper.values[idx]);
        lo = std::max(lo, lower.values[idx]);
      }
      dist = std::min(dist, std::min(up - fib.ells[i], fib.ells[i] - lo));
    }
    r.fibre_band_distance = dist;
    r.fibre_middle_distance = sup_distance(fib, [&](double u) { return mid.at(u); });
    r.subcase = dist > cfg.band_margin ? "A1" : "A2";
    return r;
  }

  const double graph_min = *std::min_element(upper.values.begin(), upper.values.end());
  r.strip = strip_certificate(fam, sys, cfg.strip_y, cfg.M, graph_min);

  DigitStream xi2 = DigitStream::typical(sys, split_seed(cfg.seed, 3));
  const DigitSequence d2 = xi2.take(digits_needed);
  const std::size_t i0 =
      static_cast<std::size_t>(std::lround(cfg.fibre_x * static_cast<double>(n))) % n;
  const double x0 = upper.xs[i0];
  const double y0 = upper.values[i0];
  const StableFibre f1 = integrate_fibre(field, fam, sys, d1, x0, y0, cfg.fibre_h);
  const StableFibre f2 = integrate_fibre(field, fam, sys, d2, x0, y0, cfg.fibre_h);
  const auto graph_at = [&](double u) { return upper.at(u); };
  r.fibre_graph_distance = sup_distance(f1, graph_at);
  r.fibre_graph_distance_alt = sup_distance(f2, graph_at);
  r.fibre_variation = sup_distance(f1, [&](double u) {
    return (u < f2.domain.lo || u > f2.domain.hi) ? std::numeric_limits<double>::quiet_NaN()
                                                  : f2.at(u);
  });

  if (r.strip.pass) {
    if (r.fibre_graph_distance < cfg.b2ii_tol && r.fibre_graph_distance_alt < cfg.b2ii_tol) {
      r.subcase = "B2-ii";
    } else {
      r.subcase = "B2-i";
      r.subcase_grade = "suggested";
    }
  } else {
    r.subcase = r.fibre_variation > cfg.b2ii_tol ? "inconclusive (B1 or B2-i)" : "inconclusive";
  }
  return r;
}

void write_report(std::ostream& os, const ClassificationReport& r) {
  os << "case: " << r.case_label << '\n'
     << "case_grade: " << r.case_grade << '\n'
     << "case_reason: " << r.case_reason << '\n'
     << "subcase: " << r.subcase << '\n'
     << "subcase_grade: " << r.subcase_grade << '\n'
     << "grid_size: " << r.grid_size << '\n'
     << "min_gap: " << num(r.min_gap) << '\n'
     << "refined_min_gap: " << num(r.refined_min_gap) << '\n'
     << "refined_argmin: " << num(r.refined_argmin) << '\n'
     << "pinched_grid_points: " << r.pinched_grid_points << '\n'
     << "periodic_tested: " << r.periodic_tested << '\n'
     << "periodic_unresolved: " << r.periodic_unresolved << '\n'
     << "pinched_periodic_count: " << r.pinched_periodic.size() << '\n';
  const std::size_t shown = std::min<std::size_t>(r.pinched_periodic.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& p = r.pinched_periodic[i];
    os << "pinched_periodic: x=" << num(p.x);
    if (p.den != 0) os << " (" << p.num << "/" << p.den << ")";
    os << " period=" << p.period << " y=" << num(p.fixed_points.front().y) << '\n';
  }
  os << "lambda_minus: " << num(r.lambda_minus.value) << '\n'
     << "lambda_minus_stderr: " << num(r.lambda_minus.std_error) << '\n'
     << "lambda_star: " << num(r.lambda_star.value) << '\n'
     << "lambda_star_stderr: " << num(r.lambda_star.std_error) << '\n'
     << "lambda_plus: " << num(r.lambda_plus.value) << '\n'
     << "lambda_plus_stderr: " << num(r.lambda_plus.std_error) << '\n'
     << "lambda_star_excludes_A: " << yes_no(r.lambda_star_excludes_a) << '\n';
  if (r.case_label == "A") {
    os << "middle_diverged: " << r.middle_diverged << '\n'
       << "fibre_band_distance: " << num(r.fibre_band_distance) << '\n'
       << "fibre_middle_distance: " << num(r.fibre_middle_distance) << '\n';
  } else {
    os << "strip_y: " << num(r.strip.y_s) << '\n'
       << "strip_push_margin: " << num(r.strip.push_margin) << '\n'
       << "strip_contraction_sup: " << num(r.strip.contraction_sup) << '\n'
       << "strip_graph_min: " << num(r.strip.graph_min) << '\n'
       << "strip_pass: " << yes_no(r.strip.pass) << '\n'
       << "fibre_graph_distance: " << num(r.fibre_graph_distance) << '\n'
       << "fibre_graph_distance_alt: " << num(r.fibre_graph_distance_alt) << '\n'
       << "fibre_variation: " << num(r.fibre_variation) << '\n';
  }
  for (const auto& note : r.notes) os << "note: " << note << '\n';
}

void write_margins_csv(std::ostream& os, const ClassificationReport& r, const ClassifyConfig& cfg) {
  write_row(os, {"criterion", "value", "threshold", "holds"});
  const auto row = [&](const char* name, double v, double thr, bool holds) {
    write_row(os, {name, num(v), num(thr), holds ? "1" : "0"});
  };
  row("refined_min_gap", r.refined_min_gap, cfg.pinch_tol, r.refined_min_gap > cfg.pinch_tol);
  row("pinched_periodic_count", static_cast<double>(r.pinched_periodic.size()), 0.0,
      !r.pinched_periodic.empty());
  row("lambda_star_plus_3se", r.lambda_star.value + 3.0 * r.lambda_star.std_error, 0.0,
      r.lambda_star_excludes_a);
  if (r.case_label == "A") {
    row("fibre_band_distance", r.fibre_band_distance, cfg.band_margin,
        r.fibre_band_distance > cfg.band_margin);
  } else {
    row("strip_push_margin", r.strip.push_margin, 0.0, r.strip.push_margin > 0.0);
    row("strip_contraction_sup", r.strip.contraction_sup, 1.0, r.strip.contraction_sup < 1.0);
    row("strip_graph_min", r.strip.graph_min, r.strip.y_s, r.strip.graph_min > r.strip.y_s);
    row("fibre_graph_distance", r.fibre_graph_distance, cfg.b2ii_tol,
        r.fibre_graph_distance < cfg.b2ii_tol);
    row("fibre_variation", r.fibre_variation, cfg.b2ii_tol, r.fibre_variation > cfg.b2ii_tol);
  }
}

}  // namespace skewprod
