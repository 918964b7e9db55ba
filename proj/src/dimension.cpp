#include "skewprod/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "skewprod/csv.hpp"
#include "skewprod/digits.hpp"
#include "skewprod/hypotheses.hpp"

namespace skewprod {

namespace {

constexpr std::size_t kMaxSweeps = 100000;
constexpr double kPressureTol = 1e-12;
constexpr std::size_t kKarpMaxOrder = 11;
constexpr double kGolden = 0.6180339887498948482;

std::size_t state_count(std::size_t order) {
  if (order < 1 || order > 16) throw std::invalid_argument("cylinder order must lie in [1,16]");
  return std::size_t{1} << order;
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Minimum mean of psi over cycles of the de Bruijn graph (Karp), i.e. the
// minimum of the integral of psi over invariant measures.
double min_cycle_mean(const std::vector<double>& psi, std::size_t order) {
  const std::size_t states = psi.size();
  const std::size_t mask = states - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(states + 1, std::vector<double>(states, inf));
  std::fill(d[0].begin(), d[0].end(), 0.0);
  for (std::size_t k = 1; k <= states; ++k) {
    for (std::size_t w = 0; w < states; ++w) {
      if (d[k - 1][w] == inf) continue;
      const double c = d[k - 1][w] + psi[w];
      for (std::size_t e = 0; e < 2; ++e) {
        double& t = d[k][((w << 1) | e) & mask];
        t = std::min(t, c);
      }
    }
  }
  (void)order;
  double best = inf;
  const auto n = static_cast<double>(states);
  for (std::size_t w = 0; w < states; ++w) {
    if (d[states][w] == inf) continue;
    double worst = -inf;
    for (std::size_t k = 0; k < states; ++k) {
      if (d[k][w] == inf) continue;
      worst = std::max(worst, (d[states][w] - d[k][w]) / (n - static_cast<double>(k)));
    }
    best = std::min(best, worst);
  }
  return best;
}

double graph_potential(const FibreFamily& fam, const BakerSystem& sys, const GraphGrid& graph,
                       double x) {
  const double y = graph.kind == GraphKind::middle
                       ? graph.at(x)
                       : pullback_value(fam, sys, x, graph.depth, graph.anchor);
  const double v = std::log(fam.dy(x, y));
  if (!std::isfinite(v)) throw NumericError("potential is not finite at x = " + num(x));
  return v;
}

double entropy_of(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

}  // namespace

double PressureModel::cylinder_diagnostic() const {
  double d = 0.0;
  for (std::size_t i = 0; i < psi.size() && i < psi_3pt.size(); ++i) {
    d = std::max(d, std::abs(psi[i] - psi_3pt[i]));
  }
  return d;
}

std::vector<double> cylinder_points(const BakerSystem& sys, std::size_t order, double c) {
  const std::size_t states = state_count(order);
  std::vector<double> xs(states);
  for (std::size_t w = 0; w < states; ++w) {
    double x = c;
    for (std::size_t j = 0; j < order; ++j) {
      x = sys.inverse_branch(static_cast<int>((w >> j) & 1), x);
    }
    xs[w] = x;
  }
  return xs;
}

PressureModel make_pressure_model(const FibreFamily& fam, const BakerSystem& sys,
                                  const GraphGrid& graph, std::size_t order) {
  const std::size_t states = state_count(order);
  PressureModel m;
  m.order = order;
  m.xs = cylinder_points(sys, order);
  const std::vector<double> lo = cylinder_points(sys, order, 0.25);
  const std::vector<double> hi = cylinder_points(sys, order, 0.75);
  m.psi.assign(states, 0.0);
  m.psi_3pt.assign(states, 0.0);
  m.log_tau.assign(states, 0.0);
  std::vector<std::string> errors(states);
  parallel_for(states, [&](std::size_t w) {
    try {
      m.psi[w] = graph_potential(fam, sys, graph, m.xs[w]);
      m.psi_3pt[w] = (graph_potential(fam, sys, graph, lo[w]) + m.psi[w] +
                      graph_potential(fam, sys, graph, hi[w])) /
                     3.0;
    } catch (const std::exception& e) {
      errors[w] = e.what();
    }
    m.log_tau[w] = sys.log_tau_prime_of_digit(static_cast<int>(w >> (order - 1)));
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericError(e);
  }
  return m;
}

PressureModel make_pressure_model(const BakerSystem& sys, std::vector<double> psi,
                                  std::size_t order) {
  const std::size_t states = state_count(order);
  if (psi.size() != states) throw std::invalid_argument("potential needs 2^order entries");
  PressureModel m;
  m.order = order;
  m.xs = cylinder_points(sys, order);
  m.psi = std::move(psi);
  m.psi_3pt = m.psi;
  m.log_tau.resize(states);
  for (std::size_t w = 0; w < states; ++w) {
    m.log_tau[w] = sys.log_tau_prime_of_digit(static_cast<int>(w >> (order - 1)));
  }
  return m;
}

double pressure_eval(const PressureModel& m, const std::vector<double>& potential) {
  const std::size_t states = m.states();
  if (potential.size() != states) throw std::invalid_argument("potential size mismatch");
  for (double v : potential) {
    if (!std::isfinite(v)) throw std::invalid_argument("potential must be finite");
  }
  const std::size_t mask = states - 1;
  std::vector<double>& v = m.eigvec;
  if (v.size() != states) v.assign(states, 0.0);
  std::vector<double> y(states);
  ++m.evaluations;
  // Log-domain power iteration on L + e^shift I; min/max of log(((L + e^shift I) v)_w / v_w)
  // bracket log(rho + e^shift). shift is the previous upper bound on log rho, which damps
  // eigenvalues of modulus rho other than rho itself.
  double shift = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double top = -lo;
    for (std::size_t w = 0; w < states; ++w) {
      y[w] = potential[w] + log_sum_exp(v[(w << 1) & mask], v[((w << 1) | 1) & mask]);
      if (sweep > 1) y[w] = log_sum_exp(y[w], v[w] + shift);
      const double ratio = y[w] - v[w];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      top = std::max(top, y[w]);
    }
    for (std::size_t w = 0; w < states; ++w) v[w] = y[w] - top;
    if (sweep > 1) {
      // Remove the shift: log(e^r - e^shift).
      lo = lo > shift ? lo + std::log1p(-std::exp(shift - lo)) : -std::numeric_limits<double>::infinity();
      hi = hi + std::log1p(-std::exp(shift - hi));
    }
    shift = std::min(shift, hi);
    if (hi - lo <= kPressureTol) {
      m.last_sweeps = sweep;
      return 0.5 * (lo + hi);
    }
  }
  v.assign(states, 0.0);
  throw NumericError("pressure power iteration did not converge in 1e5 sweeps");
}

double pressure_eval(const PressureModel& m, double q, double s) {
  std::vector<double> pot(m.states());
  for (std::size_t w = 0; w < pot.size(); ++w) pot[w] = -q * m.psi[w] - s * m.log_tau[w];
  return pressure_eval(m, pot);
}

DualValue dual_function(const PressureModel& m, double s, const DimensionOptions& opt) {
  const auto h = [&](double q) { return pressure_eval(m, q, s); };
  DualValue out;
  const double h0 = h(0.0);
  double q_hi = opt.q_initial;
  double h_hi = h(q_hi);
  // Convexity: once h stops decreasing the minimizer lies below the probe.
  while (h_hi < h0 && q_hi < opt.q_cap) {
    const double next = std::min(2.0 * q_hi, opt.q_cap);
    const double h_next = h(next);
    if (h_next >= h_hi) {
      q_hi = next;
      h_hi = h_next;
      break;
    }
    q_hi = next;
    h_hi = h_next;
    if (q_hi >= opt.q_cap) {
      out.value = h_hi;
      out.q = q_hi;
      out.unbounded = true;
      return out;
    }
  }
  double a = 0.0;
  double b = q_hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double hc = h(c);
  double hd = h(d);
  const double tol = 1e-10 * std::max(1.0, q_hi);
  while (b - a > tol) {
    if (hc <= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - kGolden * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + kGolden * (b - a);
      hd = h(d);
    }
  }
  out.q = 0.5 * (a + b);
  out.value = h(out.q);
  if (h0 <= out.value) {
    out.q = 0.0;
    out.value = h0;
  }
  return out;
}

std::string DimensionEstimate::verdict() const { return empty ? "P empty" : "dim = 1 + s*"; }

DimensionEstimate dimension_estimate(const PressureModel& m, GraphKind phi_hat,
                                     const DimensionOptions& opt) {
  DimensionEstimate d;
  d.phi_hat = phi_hat;
  d.order = m.order;
  d.cylinder_diagnostic = m.cylinder_diagnostic();
  const std::size_t evals_before = m.evaluations;

  bool infeasible = false;
  if (m.order <= kKarpMaxOrder) infeasible = min_cycle_mean(m.psi, m.order) > 0.0;

  DualValue g0;
  if (infeasible) {
    // G(0) = -infinity: every invariant measure has a positive integral.
    g0.value = -std::numeric_limits<double>::infinity();
    g0.q = std::numeric_limits<double>::infinity();
    g0.unbounded = true;
  } else {
    g0 = dual_function(m, 0.0, opt);
  }
  d.g_zero = g0.value;
  d.q_unbounded = g0.unbounded;
  if (infeasible || g0.value < -kPressureTol) {
    d.empty = true;
    d.value = std::numeric_limits<double>::quiet_NaN();
    d.s_star = std::numeric_limits<double>::quiet_NaN();
    d.q_star = g0.q;
  } else {
    const double l0 = m.log_tau.front();
    const bool constant_slope = std::all_of(m.log_tau.begin(), m.log_tau.end(),
                                            [&](double v) { return v == l0; });
    if (constant_slope) {
      // G(s) = G(0) - s log tau'.
      d.s_star = g0.value / l0;
      d.q_star = g0.q;
    } else {
      double lo = 0.0;
      double hi = 1.0;
      double q = g0.q;
      const DualValue g1 = dual_function(m, 1.0, opt);
      if (g1.value >= -kPressureTol) {
        lo = hi = 1.0;
        q = g1.q;
      }
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const DualValue g = dual_function(m, mid, opt);
        if (g.value > 0.0) {
          lo = mid;
          q = g.q;
        } else {
          hi = mid;
        }
      }
      d.s_star = lo;
      d.q_star = q;
    }
    if (d.s_star >= 1.0 - kPressureTol) d.s_star = 1.0;
    d.s_star = std::clamp(d.s_star, 0.0, 1.0);
    d.value = 1.0 + d.s_star;
  }
  d.pressure_evaluations = m.evaluations - evals_before;

  if (opt.check_gap) {
    const MarkovOptimum o = markov_entropy_program(m.psi, m.log_tau, m.order);
    d.oracle_empty = !o.feasible;
    d.oracle_s = o.s;
    if (d.empty != d.oracle_empty) {
      d.gap = 1.0;
    } else {
      d.gap = d.empty ? 0.0 : std::abs(d.s_star - o.s);
    }
    if (opt.strict && d.gap > opt.gap_tol) {
      throw NumericError("duality gap " + num(d.gap) + " exceeds " + num(opt.gap_tol) +
                         " at order " + std::to_string(m.order));
    }
  }
  return d;
}

DimensionEstimate dimension_estimate(const FibreFamily& fam, const BakerSystem& sys,
                                     const GraphGrid& graph, std::size_t order,
                                     const DimensionOptions& opt) {
  const PressureModel m = make_pressure_model(fam, sys, graph, order);
  return dimension_estimate(m, graph.kind, opt);
}

BernoulliBound bernoulli_lower_bound(const FibreFamily& fam, const BakerSystem& sys,
                                     const GraphGrid& graph, const std::vector<double>& p_grid,
                                     std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("bernoulli bound needs at least 2 samples");
  const double a = sys.a();
  const std::size_t k = graph.depth;
  BernoulliBound out;
  for (std::size_t j = 0; j < p_grid.size(); ++j) {
    const double p = p_grid[j];
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli p must lie in [0,1]");
    BernoulliRow row;
    row.p = p;
    row.entropy = entropy_of(p);
    const std::uint64_t stream = split_seed(seed, j);
    std::vector<double> vals(samples);
    std::vector<std::string> errors(samples);
    parallel_for(samples, [&](std::size_t i) {
      try {
        DigitStream ds = DigitStream::bernoulli(p, split_seed(stream, i));
        const DigitSequence digits = ds.take(std::max<std::size_t>(k + 1, 64));
        const double x = point_from_digits(sys, digits);
        const double y = graph.kind == GraphKind::middle
                             ? graph.at(x)
                             : pullback_value_digits(fam, sys, digits, k, graph.anchor);
        vals[i] = std::log(fam.dy(x, y));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (const auto& e : errors) {
      if (!e.empty()) throw NumericError(e);
    }
    const double n = static_cast<double>(samples);
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    row.lambda = mean;
    row.std_error = std::sqrt(ss / (n - 1.0) / n);
    if (!std::isfinite(mean)) throw NumericError("bernoulli exponent is not finite");
    row.feasible = row.lambda + 3.0 * row.std_error <= 0.0;
    const double mean_log_tau = -p * std::log1p(-a) - (1.0 - p) * std::log(a);
    row.bound = 1.0 + row.entropy / mean_log_tau;
    if (row.feasible) {
      out.best = out.any_feasible ? std::max(out.best, row.bound) : row.bound;
      out.any_feasible = true;
    }
    out.rows.push_back(row);
  }
  return out;
}

StripBound negative_strip_bound(const FibreFamily& fam, const BakerSystem& sys, double threshold,
                                Interval window) {
  if (!sys.is_doubling()) throw std::invalid_argument("negative strip bound requires a = 1/2");
  if (!(window.lo >= 0.0 && window.hi <= 1.0 && window.lo < window.hi)) {
    throw std::invalid_argument("strip window must be a proper subinterval of [0,1]");
  }
  StripBound s;
  s.threshold = threshold;
  s.window = window;
  const PaddedExtremum e = two_step_value_extremum(fam, sys, threshold, window, Extremum::max);
  s.sup = e.bound;
  s.padding = e.padding;
  s.pass = s.sup < threshold;
  for (int j = 0; j < 4; ++j) {
    if (window.lo <= 0.25 * j && 0.25 * (j + 1) <= window.hi) ++s.quaternary_digits;
  }
  s.cantor_dimension =
      s.quaternary_digits > 0 ? std::log(static_cast<double>(s.quaternary_digits)) / std::log(4.0)
                              : 0.0;
  s.bound = s.pass && s.quaternary_digits > 0 ? 1.0 + s.cantor_dimension
                                               : std::numeric_limits<double>::quiet_NaN();
  return s;
}

void write_dimension_header(std::ostream& os) {
  write_row(os, {"scenario", "phi_hat", "n", "q_star", "s_star", "dim", "gap_diagnostic"});
}

void write_dimension_row(std::ostream& os, const std::string& scenario, const DimensionEstimate& d) {
  write_row(os, {scenario, to_string(d.phi_hat), num(static_cast<std::uint64_t>(d.order)),
                 num(d.q_star), num(d.s_star), d.empty ? std::string("P empty") : num(d.value),
                 num(d.gap)});
}

}  // namespace skewprod
