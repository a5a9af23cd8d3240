#ifndef GEDG_QUADRATURE_HPP
#define GEDG_QUADRATURE_HPP

#include <functional>

namespace gedg {

using ScalarFn = std::function<double(double)>;

/// Composite midpoint rule on (a,b) with `cells` equal cells.
/// Never evaluates f at the endpoints, so integrands that are only
/// defined on the open interval are fine.
double integrate_midpoint(const ScalarFn& f, double a, double b, int cells);

/// Adaptive Simpson on [a,b] to absolute tolerance `tol`.
double integrate_adaptive(const ScalarFn& f, double a, double b,
                          double tol = 1e-10, int max_depth = 40);

}  // namespace gedg

#endif  // GEDG_QUADRATURE_HPP
