#pragma once

#include <cstddef>
#include <vector>

namespace skewprod {

/// Constrained entropy maximization over Markov chains on words of `order`
/// digits (state = last `order` digits, oldest most significant; a step
/// appends one digit):
///
///   maximize  h(mu) / sum_w mu(w) log_tau(w)   subject to   sum_w mu(w) psi(w) <= 0.
///
/// Solved in the primal: transitions t_w = P(append 1 | w) in [delta, 1 - delta],
/// policy-gradient stationarity from the Poisson equation of the chain, an
/// augmented Lagrangian for the constraint and Dinkelbach iteration for the ratio.
struct MarkovOptimum {
  bool feasible = false;
  double s = 0.0;           ///< optimal ratio
  double entropy = 0.0;     ///< h of the optimal chain (nats)
  double constraint = 0.0;  ///< sum mu psi at the optimum
  double mean_log_tau = 0.0;
  double multiplier = 0.0;  ///< final constraint multiplier
  std::vector<double> p_one;
  std::vector<double> stationary;
  std::size_t iterations = 0;
};

struct MarkovOracleOptions {
  double delta = 1e-12;
  double rho = 10.0;
  double damping = 0.5;  ///< initial; halved while the policy step fails to shrink
  double policy_tol = 1e-10;
  double feasibility_tol = 1e-9;
  std::size_t max_inner = 20000;
  std::size_t max_outer = 200;
  /// Multiplier beyond which the constraint is declared infeasible.
  double infeasible_multiplier = 1e8;
};

/// psi and log_tau have 2^order entries. Throws std::invalid_argument on size
/// mismatch and NumericError when an inner solve fails to converge.
MarkovOptimum markov_entropy_program(const std::vector<double>& psi,
                                     const std::vector<double>& log_tau, std::size_t order,
                                     const MarkovOracleOptions& opt = {});

/// Stationary law and entropy rate of the chain with the given transitions.
std::vector<double> markov_chain_stationary(const std::vector<double>& p_one, std::size_t order);
double markov_chain_entropy(const std::vector<double>& p_one, const std::vector<double>& pi);

}  // namespace skewprod
