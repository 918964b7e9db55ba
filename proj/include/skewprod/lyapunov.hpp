#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/common.hpp"
#include "skewprod/digits.hpp"
#include "skewprod/fibre.hpp"
#include "skewprod/graphs.hpp"

namespace skewprod {

struct ExponentEstimate {
  double value = 0.0;       ///< nats per iteration
  double std_error = 0.0;   ///< batch-means (orbits) or sample (Monte Carlo) standard error
  std::size_t n = 0;        ///< orbit length or number of samples
  /// Partial averages at n/4, n/2, 3n/4, n (orbits); empty for spatial averages.
  std::vector<double> checkpoints;
  /// False when the last three checkpoints spread by more than 1e-3.
  bool converged = true;
  std::size_t discarded = 0;  ///< Monte Carlo samples dropped (middle graph divergence)
};

/// (1/n) log (f^n_theta)'(y) along the forward orbit of (xi, x, y), with 50
/// batch means for the standard error. Requires n >= 1000.
ExponentEstimate forward_exponent(const FibreFamily& fam, const BakerSystem& sys, DigitStream& xi,
                                  double x, double y, std::size_t n,
                                  std::optional<Interval> guard = std::nullopt);

enum class MeasureKind { lebesgue, bernoulli, markov, periodic };

const char* to_string(MeasureKind k);

/// Invariant measure on the square given by its two-sided digit process:
/// xi carries the future digits and x the past ones (x's tau-itinerary is the
/// past read backwards).
struct MeasureModel {
  MeasureKind kind = MeasureKind::lebesgue;
  double p = 0.5;  ///< bernoulli: probability of digit 1
  std::size_t order = 1;  ///< markov: memory length
  /// markov: P(next digit = 1 | previous `order` digits), indexed by the
  /// previous digits as a binary number, oldest digit most significant.
  std::vector<double> p_one;
  DigitSequence word;  ///< periodic: tau-itinerary of the periodic x
  std::uint64_t seed = 0;
  /// lebesgue: grid quadrature of the graph (true) or Monte Carlo (false).
  bool quadrature = true;

  static MeasureModel lebesgue(std::uint64_t seed, bool quadrature = true);
  static MeasureModel bernoulli(double p, std::uint64_t seed);
  static MeasureModel markov(std::size_t order, std::vector<double> p_one, std::uint64_t seed);
  static MeasureModel periodic(DigitSequence word);

  /// Throws std::invalid_argument when weights are outside (0,1) or sizes mismatch.
  void validate() const;
};

/// Stationary two-sided digit window: `past` digits of x (x's itinerary order)
/// and `future` digits of xi.
struct DigitWindow {
  DigitSequence x_digits;
  DigitSequence xi_digits;
};

/// Stationary law of the last `order` digits of a markov model.
std::vector<double> markov_stationary(const MeasureModel& mu);

/// `stationary` must be markov_stationary(mu) for markov models (ignored otherwise).
DigitWindow sample_window(const BakerSystem& sys, const MeasureModel& mu, std::mt19937_64& rng,
                          std::size_t past, std::size_t future,
                          const std::vector<double>& stationary = {});

/// lambda(nu) = integral of log f'_x(phi(theta)) d nu(theta) for the graph kind of
/// `graph` (depth and anchor are reused for off-grid evaluation; J bounds the
/// middle graph's inverse folds).
///   lebesgue + quadrature: mean over the grid, error |Q_N - Q_{N/2}|
///   Monte Carlo: `samples` draws of (xi, x) from sample_window
///   periodic: exact average over the orbit using fixed points of the composed
///             fibre map (largest for upper, smallest for lower, repelling one
///             for middle)
ExponentEstimate measure_exponent(const FibreFamily& fam, const BakerSystem& sys,
                                  const GraphGrid& graph, Interval J, const MeasureModel& mu,
                                  std::size_t samples = 100000);

/// Columns scenario, graph_kind, measure_kind, value, stderr, n.
void write_exponent_header(std::ostream& os);
void write_exponent_row(std::ostream& os, const std::string& scenario, GraphKind graph,
                        MeasureKind measure, const ExponentEstimate& e);

}  // namespace skewprod
