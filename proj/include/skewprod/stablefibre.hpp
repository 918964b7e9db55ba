#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "skewprod/baker.hpp"
#include "skewprod/common.hpp"
#include "skewprod/digits.hpp"
#include "skewprod/fibre.hpp"

namespace skewprod {

/// Data for the strong stable field
///   X3(xi, x, y) = - sum_{k >= 0} Gamma^k(xi, x, y) A(f^k(xi, x, y)),
/// with Gamma = sigma(xi) / f'_x(y), Gamma^k the product along the forward orbit
/// and A = (df/dx) / f'. It satisfies X3 = -A + Gamma X3 o f.
struct StableField {
  Interval I;
  Interval J;
  double eps0 = 0.0;  ///< min(I.lo - J.lo, J.hi - I.hi)
  BoundConstants bounds;
  std::size_t terms = 0;   ///< truncation N
  double tail_bound = 0.0; ///< ||Gamma||^N sup|A| / (1 - ||Gamma||)

  /// Slope bound L for fibres.
  double slope_bound() const { return bounds.slope_bound; }
  /// Guaranteed half-width of a fibre domain around an anchor in I.
  double delta() const { return eps0 / bounds.slope_bound; }
};

/// Chooses N as the smallest truncation with tail bound below `tail_target`
/// (or uses `terms` when nonzero). Throws HypothesisError when ||Gamma|| >= 1.
StableField make_stable_field(const FibreFamily& fam, const BakerSystem& sys, Interval I,
                              Interval J, double tail_target = 1e-10, std::size_t terms = 0,
                              std::size_t grid = 400);

double stable_tail_bound(const BoundConstants& b, std::size_t terms);

/// Forward x-orbit of a fixed xi as affine maps of the start: x_j(u) =
/// offset[j] + scale[j] u, with contraction[j] = sigma(tau^j xi).
class XiOrbit {
 public:
  XiOrbit(const BakerSystem& sys, std::span<const std::uint8_t> xi_digits, std::size_t length);

  std::size_t length() const { return offset_.size(); }
  double x_at(std::size_t j, double u) const { return offset_[j] + scale_[j] * u; }
  double contraction(std::size_t j) const { return contraction_[j]; }

 private:
  std::vector<double> offset_;
  std::vector<double> scale_;
  std::vector<double> contraction_;
};

/// N-term partial sum of X3 at (xi, u, y) (xi fixed by `orbit`, which must have
/// length >= N). Throws FibreEscape when an orbit point f^k leaves J for k >= 1.
double x3_eval(const StableField& field, const FibreFamily& fam, const XiOrbit& orbit, double u,
               double y, std::size_t terms);

/// Convenience form using field.terms and the given xi digits.
double x3_eval(const StableField& field, const FibreFamily& fam, const BakerSystem& sys,
               std::span<const std::uint8_t> xi_digits, double x, double y);

struct StableFibre {
  DigitSequence xi_digits;
  double xi = 0.0;  ///< coordinate reconstructed from xi_digits
  double x_anchor = 0.0;
  double y_anchor = 0.0;
  double h = 0.0;
  std::size_t terms = 0;
  std::vector<double> us;    ///< ascending
  std::vector<double> ells;
  Interval domain;
  bool domain_full = false;
  double delta = 0.0;

  /// Linear interpolation; throws std::out_of_range outside the domain.
  double at(double u) const;
};

/// RK4 integration of l'(u) = X3(xi, u, l(u)), l(x) = y, from x to 1 and to 0
/// with step h (the last step is shortened to land on the end point). A side
/// stops early when a stage or a step leaves J. Throws NumericError when y lies
/// in I and the domain does not contain (x - delta, x + delta) within [0,1].
StableFibre integrate_fibre(const StableField& field, const FibreFamily& fam,
                            const BakerSystem& sys, DigitSequence xi_digits, double x, double y,
                            double h = 1e-4);

struct EquivarianceResult {
  double residual = 0.0;
  double envelope = 0.0;  ///< L max(a, 1-a)^n |domain|
  double budget = 0.0;    ///< truncation and interpolation error allowance
  std::size_t compared = 0;
  std::size_t mismatched = 0;  ///< samples whose image left the domain of l_n
};

/// Compares f^n_{(xi,u)}(l(u)) with l_n(pi_n(u)), where l_n is the fibre
/// through f^n of the anchor, over every `stride`-th sample.
EquivarianceResult equivariance_residual(const StableFibre& fibre, const StableField& field,
                                         const FibreFamily& fam, const BakerSystem& sys,
                                         std::size_t n, std::size_t stride = 10);

/// Columns xi, x_anchor, y_anchor, u, ell_u; header written when `header`.
void write_fibre_csv(std::ostream& os, const StableFibre& fibre, bool header = true);

}  // namespace skewprod
