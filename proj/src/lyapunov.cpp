#include "skewprod/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "skewprod/csv.hpp"

namespace skewprod {

namespace {

constexpr std::size_t kBatches = 50;
constexpr double kCheckpointSpread = 1e-3;
constexpr std::size_t kDigitTail = 60;

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double e : v) ss += (e - m) * (e - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::vector<double> markov_stationary(const MeasureModel& mu) {
  const std::size_t states = std::size_t{1} << mu.order;
  const std::size_t mask = states - 1;
  std::vector<double> pi(states, 1.0 / static_cast<double>(states)), next(states);
  for (int it = 0; it < 100000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      next[(s << 1) & mask] += pi[s] * (1.0 - mu.p_one[s]);
      next[((s << 1) | 1) & mask] += pi[s] * mu.p_one[s];
    }
    double diff = 0.0;
    for (std::size_t s = 0; s < states; ++s) diff = std::max(diff, std::abs(next[s] - pi[s]));
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  return pi;
}

namespace {

// Fixed point of the composed fibre map over the periodic orbit of x with the
// given itinerary, selected by graph kind; fills the orbit coordinates.
double periodic_graph_value(const FibreFamily& fam, const BakerSystem& sys, const DigitSequence& word,
                            GraphKind kind, Interval J, std::vector<double>& orbit) {
  const std::size_t p = word.size();
  orbit.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    DigitSequence rotated;
    while (rotated.size() < 64) rotated.push_back(word[(j + rotated.size()) % p]);
    orbit[j] = point_from_digits(sys, rotated);
  }
  // phi(x_0) = f_{x_1} o f_{x_2} o ... o f_{x_p}(phi(x_p)), x_p = x_0.
  ScalarMap F{[&](double y) {
                for (std::size_t j = p; j >= 1; --j) y = fam.value(orbit[j % p], y);
                return y;
              },
              [&](double y) {
                double slope = 1.0;
                for (std::size_t j = p; j >= 1; --j) {
                  slope *= fam.dy(orbit[j % p], y);
                  y = fam.value(orbit[j % p], y);
                }
                return slope;
              }};
  const auto fps = fixed_points_of(F, J, 1e-10, 4000);
  if (fps.empty()) throw NumericError("composed fibre map has no fixed point in J");
  switch (kind) {
    case GraphKind::upper:
      return fps.back().y;
    case GraphKind::lower:
      return fps.front().y;
    case GraphKind::middle:
      if (fps.size() == 3) return fps[1].y;
      return std::max_element(fps.begin(), fps.end(), [](const FixedPoint& a, const FixedPoint& b) {
               return a.slope < b.slope;
             })->y;
  }
  return fps.front().y;
}

}  // namespace

ExponentEstimate forward_exponent(const FibreFamily& fam, const BakerSystem& sys, DigitStream& xi,
                                  double x, double y, std::size_t n, std::optional<Interval> guard) {
  if (n < 1000) throw std::invalid_argument("forward exponent needs n >= 1000");
  ExponentEstimate e;
  e.n = n;
  const std::size_t batch = n / kBatches;
  std::vector<double> batch_means;
  batch_means.reserve(kBatches);
  const std::size_t cps[4] = {n / 4, n / 2, 3 * n / 4, n};
  std::size_t next_cp = 0;
  double total = 0.0;
  double batch_sum = 0.0;
  std::size_t in_batch = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double term = std::log(fam.dy(x, y));
    total += term;
    batch_sum += term;
    if (++in_batch == batch && batch_means.size() < kBatches) {
      batch_means.push_back(batch_sum / static_cast<double>(batch));
      batch_sum = 0.0;
      in_batch = 0;
    }
    const double y_next = fam.value(x, y);
    x = sys.inverse_branch(xi.next(), x);
    y = y_next;
    if (guard && !guard->contains(y)) throw FibreEscape("forward exponent orbit left the guard interval");
    while (next_cp < 4 && j + 1 == cps[next_cp]) {
      e.checkpoints.push_back(total / static_cast<double>(j + 1));
      ++next_cp;
    }
  }
  e.value = total / static_cast<double>(n);
  e.std_error = standard_error(batch_means);
  const auto [lo, hi] = std::minmax_element(e.checkpoints.begin() + 1, e.checkpoints.end());
  e.converged = *hi - *lo <= kCheckpointSpread;
  return e;
}

const char* to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::lebesgue:
      return "lebesgue";
    case MeasureKind::bernoulli:
      return "bernoulli";
    case MeasureKind::markov:
      return "markov";
    case MeasureKind::periodic:
      return "periodic";
  }
  return "?";
}

MeasureModel MeasureModel::lebesgue(std::uint64_t seed, bool quadrature) {
  MeasureModel m;
  m.kind = MeasureKind::lebesgue;
  m.seed = seed;
  m.quadrature = quadrature;
  return m;
}

MeasureModel MeasureModel::bernoulli(double p, std::uint64_t seed) {
  MeasureModel m;
  m.kind = MeasureKind::bernoulli;
  m.p = p;
  m.seed = seed;
  m.validate();
  return m;
}

MeasureModel MeasureModel::markov(std::size_t order, std::vector<double> p_one, std::uint64_t seed) {
  MeasureModel m;
  m.kind = MeasureKind::markov;
  m.order = order;
  m.p_one = std::move(p_one);
  m.seed = seed;
  m.validate();
  return m;
}

MeasureModel MeasureModel::periodic(DigitSequence word) {
  MeasureModel m;
  m.kind = MeasureKind::periodic;
  m.word = std::move(word);
  m.validate();
  return m;
}

void MeasureModel::validate() const {
  switch (kind) {
    case MeasureKind::lebesgue:
      return;
    case MeasureKind::bernoulli:
      if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bernoulli weight must lie in (0,1)");
      return;
    case MeasureKind::markov:
      if (order < 1 || order > 20) throw std::invalid_argument("markov order must lie in [1,20]");
      if (p_one.size() != (std::size_t{1} << order)) {
        throw std::invalid_argument("markov transition table must have 2^order rows");
      }
      for (double q : p_one) {
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("markov weights must lie in (0,1)");
      }
      return;
    case MeasureKind::periodic: {
      if (word.empty()) throw std::invalid_argument("periodic word must be non-empty");
      bool all_ones = true;
      for (auto d : word) {
        if (d > 1) throw std::invalid_argument("periodic word digits must be 0 or 1");
        all_ones = all_ones && d == 1;
      }
      if (all_ones) throw std::invalid_argument("all-ones word is not a point of [0,1)");
      return;
    }
  }
}

DigitWindow sample_window(const BakerSystem& sys, const MeasureModel& mu, std::mt19937_64& rng,
                          std::size_t past, std::size_t future,
                          const std::vector<double>& stationary) {
  DigitWindow w;
  w.x_digits.resize(past);
  w.xi_digits.resize(future);
  switch (mu.kind) {
    case MeasureKind::lebesgue:
    case MeasureKind::bernoulli: {
      const double p = mu.kind == MeasureKind::lebesgue ? 1.0 - sys.a() : mu.p;
      for (auto& d : w.x_digits) d = uniform01(rng) < p ? 1 : 0;
      for (auto& d : w.xi_digits) d = uniform01(rng) < p ? 1 : 0;
      return w;
    }
    case MeasureKind::markov: {
      const std::size_t total = past + future;
      const std::size_t states = std::size_t{1} << mu.order;
      const std::vector<double>& pi = stationary;
      if (pi.size() != states) throw std::invalid_argument("markov sampling needs the stationary law");
      double u = uniform01(rng);
      std::size_t state = states - 1;
      for (std::size_t s = 0; s < states; ++s) {
        if (u < pi[s]) {
          state = s;
          break;
        }
        u -= pi[s];
      }
      DigitSequence path(total);
      for (std::size_t t = 0; t < total; ++t) {
        const std::uint8_t d = uniform01(rng) < mu.p_one[state] ? 1 : 0;
        path[t] = d;
        state = ((state << 1) | d) & (states - 1);
      }
      for (std::size_t j = 0; j < past; ++j) w.x_digits[j] = path[past - 1 - j];
      for (std::size_t j = 0; j < future; ++j) w.xi_digits[j] = path[past + j];
      return w;
    }
    case MeasureKind::periodic:
      break;
  }
  throw std::invalid_argument("periodic measures are evaluated exactly, not sampled");
}

ExponentEstimate measure_exponent(const FibreFamily& fam, const BakerSystem& sys,
                                  const GraphGrid& graph, Interval J, const MeasureModel& mu,
                                  std::size_t samples) {
  mu.validate();
  ExponentEstimate e;

  if (mu.kind == MeasureKind::periodic) {
    std::vector<double> orbit;
    double y = periodic_graph_value(fam, sys, mu.word, graph.kind, J, orbit);
    // Values along the orbit: phi(x_{j-1}) = f_{x_j}(phi(x_j)), starting at x_0 = x_p.
    const std::size_t p = mu.word.size();
    double sum = 0.0;
    for (std::size_t j = p; j >= 1; --j) {
      const double xj = orbit[j % p];
      sum += std::log(fam.dy(xj, y));
      y = fam.value(xj, y);
    }
    e.value = sum / static_cast<double>(p);
    e.n = p;
    return e;
  }

  if (mu.kind == MeasureKind::lebesgue && mu.quadrature && graph.kind != GraphKind::middle) {
    double full = 0.0, half = 0.0;
    std::size_t nh = 0;
    for (std::size_t i = 0; i < graph.size(); ++i) {
      const double v = std::log(fam.dy(graph.xs[i], graph.values[i]));
      full += v;
      if (i % 2 == 0) {
        half += v;
        ++nh;
      }
    }
    e.value = full / static_cast<double>(graph.size());
    e.std_error = std::abs(e.value - half / static_cast<double>(nh));
    e.n = graph.size();
    return e;
  }

  if (samples < 2) throw std::invalid_argument("Monte Carlo exponent needs at least 2 samples");
  const std::size_t k = graph.depth;
  std::vector<double> vals(samples, 0.0);
  std::vector<std::uint8_t> ok(samples, 1);
  const std::vector<double> pi =
      mu.kind == MeasureKind::markov ? markov_stationary(mu) : std::vector<double>{};
  parallel_for(samples, [&](std::size_t i) {
    std::mt19937_64 rng(split_seed(mu.seed, i));
    const bool middle = graph.kind == GraphKind::middle;
    const DigitWindow w = sample_window(sys, mu, rng, k + kDigitTail, middle ? k + 1 : 0, pi);
    const double x = point_from_digits(sys, w.x_digits);
    double y;
    if (middle) {
      const auto v = middle_value(fam, sys, w.xi_digits, x, k, graph.anchor, J);
      if (!v) {
        ok[i] = 0;
        return;
      }
      y = *v;
    } else {
      y = pullback_value_digits(fam, sys, w.x_digits, k, graph.anchor);
    }
    vals[i] = std::log(fam.dy(x, y));
  });
  std::vector<double> kept;
  kept.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    if (ok[i]) kept.push_back(vals[i]);
  }
  e.discarded = samples - kept.size();
  if (kept.size() < 2) throw NumericError("middle graph diverged for almost every sample");
  e.value = mean(kept);
  e.std_error = standard_error(kept);
  e.n = kept.size();
  return e;
}

void write_exponent_header(std::ostream& os) {
  write_row(os, {"scenario", "graph_kind", "measure_kind", "value", "stderr", "n"});
}

void write_exponent_row(std::ostream& os, const std::string& scenario, GraphKind graph,
                        MeasureKind measure, const ExponentEstimate& e) {
  write_row(os, {scenario, to_string(graph), to_string(measure), num(e.value), num(e.std_error),
                 num(static_cast<std::uint64_t>(e.n))});
}

}  // namespace skewprod
