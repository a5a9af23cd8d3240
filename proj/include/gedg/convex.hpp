#ifndef GEDG_CONVEX_HPP
#define GEDG_CONVEX_HPP

#include <cstdint>

#include "gedg/grid.hpp"
#include "gedg/kernel.hpp"
#include "gedg/validation.hpp"

namespace gedg {

/// Convex weight sigma with sigma(0) = sigma'(0) = 0, sigma' nondecreasing
/// and concave. `superlinear` marks whether sigma(x)/x -> infinity is part
/// of the contract (the linearized variant drops it).
struct ConvexWeight {
  ScalarFn sigma;
  ScalarFn dsigma;
  bool superlinear = true;
};

/// The shipped default: sigma(x) = (1+x)ln(1+x) - x, sigma'(x) = ln(1+x).
/// Closed forms for both, and integrable against the stock test data.
ConvexWeight default_sigma();

/// Validates the shape invariants (sampled) and throws ConfigError when
/// they fail, e.g. for sigma(x) = x with sigma'(0) != 0.
ConvexWeight make_convex_weight(ScalarFn sigma, ScalarFn dsigma,
                                bool superlinear = true);

/// Shape check behind make_convex_weight, exposed for reporting.
ValidationReport check_weight_shape(const ConvexWeight& w, bool superlinear);

/// sigma_lambda: equal to sigma below lambda, linear with matched value
/// and slope above. Used by the equi-integrability envelope tests.
ConvexWeight linearize_above(const ConvexWeight& w, double lambda);

/// Samples the three convexity inequalities on random positive pairs:
///   sigma(x) <= x sigma'(x) <= 2 sigma(x)
///   x sigma'(y) <= sigma(x) + sigma(y)
///   0 <= sigma(x+y) - sigma(x) - sigma(y) <= 2 (x sigma(y) + y sigma(x)) / (x+y)
ValidationReport check_convex_inequalities(const ConvexWeight& w,
                                           std::size_t samples,
                                           std::uint64_t seed);

/// sum_{i>=1} sigma(i*dx) c_i -- the weighted tail moment of the state.
double tail_moment(const Density& d, const SizeGrid& grid,
                   const ConvexWeight& w);

/// sum_{i>=1} sigma(c_i/dx) dx -- the convex functional of the density
/// values, whose growth along a run is exponentially bounded.
double equiintegrability_functional(const Density& d, const SizeGrid& grid,
                                    const ConvexWeight& w);

/// Everything the a-priori bounds need: the L^1_{0,1} bound on the state,
/// the four integrability constants of the initial data and envelope, the
/// plain and weighted L^1 norms of phi, and the kernel constants.
struct BoundInputs {
  double gamma = 0.0;    // M0(0) + M1(0)
  double gamma1 = 0.0;   // integral of sigma(x) zeta_in(x)
  double gamma2 = 0.0;   // integral of sigma(zeta_in(x))
  double gamma3 = 0.0;   // integral of sigma(x) phi(x)
  double gamma4 = 0.0;   // integral of sigma(phi(x))
  double phi_l1 = 0.0;   // integral of phi
  double phi_l1_01 = 0.0;  // integral of (1+x) phi
  double a_const = 0.0;
  double eta_star = 0.0;
};

/// Quadrature of the bound inputs over the truncated domain (0, n).
/// gamma comes from the projected initial state (what the solver actually
/// conserves). Throws DataError if any value is non-finite.
BoundInputs compute_bound_inputs(const Kernel& k,
                                 const std::function<double(double)>& ic,
                                 const SizeGrid& grid, const ConvexWeight& w,
                                 const Density& initial_state);

/// Sum-class tail-moment envelope:
///   Xi(T) = (gamma1 + a gamma^2 (7 gamma3 + 2 sigma(1) ||phi||) T)
///           * exp(4 a gamma ||phi|| T)
double gronwall_bound_sum(const BoundInputs& b, double sigma1_at_1, double T);

/// Product-class tail-moment envelope Lambda(T) = (a gamma^2 gamma3 T
/// + Theta1(T)) exp(Theta2(T) T) with
///   Theta1 = gamma1 + 2 a T gamma^2 (2 sigma(1)||phi|| (1 + eta*)
///            + gamma3 eta* ||phi|| + eta*^2 gamma3)
///   Theta2 = 4 a eta* ||phi||_{0,1} gamma (1 + gamma eta*)
double gronwall_bound_product(const BoundInputs& b, double sigma1_at_1,
                              double T);

/// Time-equicontinuity constant C0 = 4 a ||phi|| gamma^2.
double equicontinuity_constant(const BoundInputs& b);

/// Exponential rate of the uniqueness-regime contraction envelope,
/// 34 a gamma ||phi||.
double contraction_rate(const BoundInputs& b);

}  // namespace gedg

#endif  // GEDG_CONVEX_HPP
