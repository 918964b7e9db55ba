#include "skewprod/markov_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "skewprod/common.hpp"

namespace skewprod {

namespace {

constexpr std::size_t kMaxSweeps = 1000000;

double entropy_of(double t) {
  double h = 0.0;
  if (t > 0.0) h -= t * std::log(t);
  if (t < 1.0) h -= (1.0 - t) * std::log1p(-t);
  return h;
}

// Stationary law by power iteration, warm-started from pi.
void stationary_into(const std::vector<double>& t, std::size_t mask, std::vector<double>& pi,
                     std::vector<double>& scratch) {
  const std::size_t states = t.size();
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    std::fill(scratch.begin(), scratch.end(), 0.0);
    for (std::size_t w = 0; w < states; ++w) {
      scratch[(w << 1) & mask] += pi[w] * (1.0 - t[w]);
      scratch[((w << 1) | 1) & mask] += pi[w] * t[w];
    }
    double diff = 0.0;
    for (std::size_t w = 0; w < states; ++w) diff += std::abs(scratch[w] - pi[w]);
    pi.swap(scratch);
    if (diff < 1e-15) return;
  }
  throw NumericError("markov oracle: stationary law did not converge");
}

// Relative values of the chain with per-state reward r (Poisson equation),
// warm-started from v and normalized so that v[0] = 0.
void relative_values_into(const std::vector<double>& t, const std::vector<double>& r,
                          std::size_t mask, std::vector<double>& v, std::vector<double>& scratch) {
  const std::size_t states = t.size();
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (std::size_t w = 0; w < states; ++w) {
      scratch[w] = r[w] + (1.0 - t[w]) * v[(w << 1) & mask] + t[w] * v[((w << 1) | 1) & mask];
    }
    const double ref = scratch[0];
    double diff = 0.0;
    for (std::size_t w = 0; w < states; ++w) {
      scratch[w] -= ref;
      diff = std::max(diff, std::abs(scratch[w] - v[w]));
    }
    v.swap(scratch);
    if (diff < 1e-12) return;
  }
  throw NumericError("markov oracle: relative values did not converge");
}

struct InnerResult {
  double entropy = 0.0;
  double constraint = 0.0;
  double mean_log_tau = 0.0;
  std::size_t iterations = 0;
};

class Solver {
 public:
  Solver(const std::vector<double>& psi, const std::vector<double>& log_tau, std::size_t order,
         const MarkovOracleOptions& opt)
      : psi_(psi),
        log_tau_(log_tau),
        mask_((std::size_t{1} << order) - 1),
        opt_(opt),
        t_(psi.size(), 0.5),
        pi_(psi.size(), 1.0 / static_cast<double>(psi.size())),
        v_(psi.size(), 0.0),
        r_(psi.size()),
        scratch_(psi.size()) {}

  // Maximizes h - s * mean log_tau minus the augmented-Lagrangian penalty of
  // the constraint with multiplier lambda.
  InnerResult solve(double s, double lambda) {
    InnerResult res;
    const std::size_t states = t_.size();
    // Halved whenever the policy step fails to shrink (penalty feedback oscillates).
    double damping = opt_.damping;
    double last_step = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < opt_.max_inner; ++it) {
      stationary_into(t_, mask_, pi_, scratch_);
      double g = 0.0;
      for (std::size_t w = 0; w < states; ++w) g += pi_[w] * psi_[w];
      const double mu = std::max(0.0, lambda + opt_.rho * g);
      for (std::size_t w = 0; w < states; ++w) {
        r_[w] = entropy_of(t_[w]) - s * log_tau_[w] - mu * psi_[w];
      }
      relative_values_into(t_, r_, mask_, v_, scratch_);
      double step = 0.0;
      for (std::size_t w = 0; w < states; ++w) {
        const double gap = v_[((w << 1) | 1) & mask_] - v_[(w << 1) & mask_];
        const double target =
            std::clamp(1.0 / (1.0 + std::exp(-gap)), opt_.delta, 1.0 - opt_.delta);
        step = std::max(step, std::abs(target - t_[w]));
        t_[w] += damping * (target - t_[w]);
      }
      if (step > 0.999 * last_step) damping = std::max(0.5 * damping, 1e-4);
      last_step = step;
      res.iterations = it + 1;
      if (step < opt_.policy_tol) break;
      if (it + 1 == opt_.max_inner) throw NumericError("markov oracle: policy did not converge");
    }
    stationary_into(t_, mask_, pi_, scratch_);
    for (std::size_t w = 0; w < states; ++w) {
      res.entropy += pi_[w] * entropy_of(t_[w]);
      res.constraint += pi_[w] * psi_[w];
      res.mean_log_tau += pi_[w] * log_tau_[w];
    }
    return res;
  }

  const std::vector<double>& policy() const { return t_; }
  const std::vector<double>& stationary() const { return pi_; }

 private:
  const std::vector<double>& psi_;
  const std::vector<double>& log_tau_;
  std::size_t mask_;
  MarkovOracleOptions opt_;
  std::vector<double> t_, pi_, v_, r_, scratch_;
};

}  // namespace

std::vector<double> markov_chain_stationary(const std::vector<double>& p_one, std::size_t order) {
  if (p_one.size() != (std::size_t{1} << order)) throw std::invalid_argument("p_one size must be 2^order");
  std::vector<double> pi(p_one.size(), 1.0 / static_cast<double>(p_one.size())), scratch(p_one.size());
  stationary_into(p_one, p_one.size() - 1, pi, scratch);
  return pi;
}

double markov_chain_entropy(const std::vector<double>& p_one, const std::vector<double>& pi) {
  double h = 0.0;
  for (std::size_t w = 0; w < p_one.size(); ++w) h += pi[w] * entropy_of(p_one[w]);
  return h;
}

MarkovOptimum markov_entropy_program(const std::vector<double>& psi,
                                     const std::vector<double>& log_tau, std::size_t order,
                                     const MarkovOracleOptions& opt) {
  if (order < 1 || order > 16) throw std::invalid_argument("markov oracle order must lie in [1,16]");
  const std::size_t states = std::size_t{1} << order;
  if (psi.size() != states || log_tau.size() != states) {
    throw std::invalid_argument("markov oracle: psi and log_tau need 2^order entries");
  }
  Solver solver(psi, log_tau, order, opt);
  MarkovOptimum out;
  double s = 0.0;
  for (int dinkelbach = 0; dinkelbach < 100; ++dinkelbach) {
    double lambda = 0.0;
    InnerResult inner;
    bool converged = false;
    for (std::size_t outer = 0; outer < opt.max_outer; ++outer) {
      inner = solver.solve(s, lambda);
      out.iterations += inner.iterations;
      const double residual = std::max(inner.constraint, -lambda / opt.rho);
      lambda = std::max(0.0, lambda + opt.rho * inner.constraint);
      if (lambda > opt.infeasible_multiplier) break;
      if (std::abs(residual) < opt.feasibility_tol) {
        converged = true;
        break;
      }
    }
    out.multiplier = lambda;
    if (!converged) {
      if (lambda > opt.infeasible_multiplier || inner.constraint > opt.feasibility_tol) {
        out.feasible = false;
        out.s = 0.0;
        out.constraint = inner.constraint;
        return out;
      }
      throw NumericError("markov oracle: augmented Lagrangian did not converge");
    }
    out.feasible = true;
    out.entropy = inner.entropy;
    out.constraint = inner.constraint;
    out.mean_log_tau = inner.mean_log_tau;
    const double next = inner.entropy / inner.mean_log_tau;
    const double change = std::abs(next - s);
    s = next;
    if (change < 1e-12) break;
  }
  out.s = s;
  out.p_one = solver.policy();
  out.stationary = solver.stationary();
  return out;
}

}  // namespace skewprod
