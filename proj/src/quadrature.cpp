#include "gedg/quadrature.hpp"

#include <cmath>

namespace gedg {

double integrate_midpoint(const ScalarFn& f, double a, double b, int cells) {
  if (!(b > a) || cells < 1) return 0.0;
  const double h = (b - a) / cells;
  double sum = 0.0;
  for (int m = 0; m < cells; ++m) sum += f(a + (m + 0.5) * h);
  return sum * h;
}

namespace {

double simpson(const ScalarFn& f, double a, double fa, double b, double fb,
               double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const ScalarFn& f, double a, double fa, double b, double fb,
                    double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, flm);
  const double right = simpson(f, m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const ScalarFn& f, double a, double b, double tol,
                          int max_depth) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(f, a, fa, b, fb, fm);
  return adaptive_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace gedg
