#include "gedg/convex.hpp"

#include <cmath>

#include "gedg/errors.hpp"
#include "gedg/quadrature.hpp"

namespace gedg {

ConvexWeight default_sigma() {
  return ConvexWeight{
      [](double x) { return (1.0 + x) * std::log1p(x) - x; },
      [](double x) { return std::log1p(x); },
      true,
  };
}

ValidationReport check_weight_shape(const ConvexWeight& w, bool superlinear) {
  ValidationReport report;
  auto check = [&](double lhs, double rhs, double x, const char* what) {
    if (lhs > rhs + 1e-9 * std::abs(rhs) + 1e-12)
      report.record({x, 0.0, 0.0, lhs, rhs, what});
  };
  check(std::abs(w.sigma(0.0)), 0.0, 0.0, "sigma(0) = 0");
  check(std::abs(w.dsigma(0.0)), 0.0, 0.0, "sigma'(0) = 0");
  // sigma' nondecreasing and concave on a geometric grid
  double prev_x = 1e-6, prev_d = w.dsigma(prev_x);
  for (double x = 2e-6; x <= 1e6; x *= 2.0) {
    const double dcur = w.dsigma(x);
    check(prev_d, dcur * (1.0 + 1e-9) + 1e-12, x, "sigma' nondecreasing");
    const double mid = 0.5 * (prev_x + x);
    check(0.5 * (prev_d + dcur), w.dsigma(mid) * (1.0 + 1e-9) + 1e-12, mid,
          "sigma' concave");
    prev_x = x;
    prev_d = dcur;
  }
  if (superlinear) {
    const double r2 = w.sigma(1e2) / 1e2;
    const double r4 = w.sigma(1e4) / 1e4;
    const double r6 = w.sigma(1e6) / 1e6;
    report.samples += 3;
    if (!(r2 < r4 && r4 < r6))
      report.record({1e2, 1e4, 1e6, r2, r6, "sigma(x)/x increasing"});
  }
  return report;
}

ConvexWeight make_convex_weight(ScalarFn sigma, ScalarFn dsigma,
                                bool superlinear) {
  ConvexWeight w{std::move(sigma), std::move(dsigma), superlinear};
  const auto report = check_weight_shape(w, superlinear);
  if (!report.pass()) {
    const auto& v = report.violations.front();
    throw ConfigError("convex weight rejected: " + v.bound);
  }
  return w;
}

ConvexWeight linearize_above(const ConvexWeight& w, double lambda) {
  const double s_l = w.sigma(lambda);
  const double d_l = w.dsigma(lambda);
  ScalarFn base_s = w.sigma, base_d = w.dsigma;
  return ConvexWeight{
      [=](double x) { return x <= lambda ? base_s(x) : s_l + d_l * (x - lambda); },
      [=](double x) { return x <= lambda ? base_d(x) : d_l; },
      false,
  };
}

ValidationReport check_convex_inequalities(const ConvexWeight& w,
                                           std::size_t samples,
                                           std::uint64_t seed) {
  ValidationReport report;
  report.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] { return std::pow(10.0, -6.0 + 12.0 * unit(rng)); };
  auto flag = [&](double lhs, double rhs, double x, double y,
                  const char* what) {
    if (lhs > rhs + 1e-9 * std::abs(rhs) + 1e-250)
      report.record({x, y, 0.0, lhs, rhs, what});
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = draw(), y = draw();
    const double sx = w.sigma(x), sy = w.sigma(y);
    const double dx_ = w.dsigma(x), dy_ = w.dsigma(y);
    flag(sx, x * dx_, x, y, "sigma(x) <= x sigma'(x)");
    flag(x * dx_, 2.0 * sx, x, y, "x sigma'(x) <= 2 sigma(x)");
    flag(x * dy_, sx + sy, x, y, "x sigma'(y) <= sigma(x) + sigma(y)");
    const double excess = w.sigma(x + y) - sx - sy;
    flag(0.0, excess, x, y, "superadditivity");
    flag(excess, 2.0 * (x * sy + y * sx) / (x + y), x, y,
         "excess upper bound");
  }
  return report;
}

double tail_moment(const Density& d, const SizeGrid& grid,
                   const ConvexWeight& w) {
  const double dx = grid.dx();
  double sum = 0.0;
  for (int i = 1; i < d.size(); ++i)
    if (d[i] != 0.0) sum += w.sigma(i * dx) * d[i];
  return sum;
}

double equiintegrability_functional(const Density& d, const SizeGrid& grid,
                                    const ConvexWeight& w) {
  const double dx = grid.dx();
  double sum = 0.0;
  for (int i = 1; i < d.size(); ++i)
    if (d[i] != 0.0) sum += w.sigma(d[i] / dx);
  return sum * dx;
}

BoundInputs compute_bound_inputs(const Kernel& k,
                                 const std::function<double(double)>& ic,
                                 const SizeGrid& grid, const ConvexWeight& w,
                                 const Density& initial_state) {
  BoundInputs b;
  const double n = grid.n;
  b.gamma = moment(initial_state, grid, 0.0) + moment(initial_state, grid, 1.0);
  b.gamma1 = integrate_adaptive([&](double x) { return w.sigma(x) * ic(x); },
                                0.0, n, 1e-10);
  b.gamma2 =
      integrate_adaptive([&](double x) { return w.sigma(ic(x)); }, 0.0, n,
                         1e-10);
  b.gamma3 = integrate_adaptive([&](double x) { return w.sigma(x) * k.phi(x); },
                                0.0, n, 1e-10);
  b.gamma4 = integrate_adaptive([&](double x) { return w.sigma(k.phi(x)); },
                                0.0, n, 1e-10);
  b.phi_l1 = integrate_adaptive([&](double x) { return k.phi(x); }, 0.0, n,
                                1e-12);
  b.phi_l1_01 = integrate_adaptive(
      [&](double x) { return (1.0 + x) * k.phi(x); }, 0.0, n, 1e-12);
  b.a_const = k.a_const();
  b.eta_star = k.class_tag() == KernelClass::Product ? k.eta_star() : 0.0;
  for (double v : {b.gamma, b.gamma1, b.gamma2, b.gamma3, b.gamma4, b.phi_l1,
                   b.phi_l1_01}) {
    if (!std::isfinite(v) || v < 0.0)
      throw DataError("non-finite integrability constant; check ic and phi");
  }
  return b;
}

double gronwall_bound_sum(const BoundInputs& b, double sigma1_at_1, double T) {
  const double a = b.a_const;
  const double linear =
      b.gamma1 + a * b.gamma * b.gamma *
                     (7.0 * b.gamma3 + 2.0 * sigma1_at_1 * b.phi_l1) * T;
  return linear * std::exp(4.0 * a * b.gamma * b.phi_l1 * T);
}

double gronwall_bound_product(const BoundInputs& b, double sigma1_at_1,
                              double T) {
  const double a = b.a_const;
  const double g = b.gamma;
  const double es = b.eta_star;
  const double theta1 =
      b.gamma1 + 2.0 * a * T * g * g *
                     (2.0 * sigma1_at_1 * b.phi_l1 +
                      2.0 * sigma1_at_1 * es * b.phi_l1 +
                      b.gamma3 * es * b.phi_l1 + es * es * b.gamma3);
  const double theta2 = 4.0 * a * es * b.phi_l1_01 * g * (1.0 + g * es);
  return (a * g * g * b.gamma3 * T + theta1) * std::exp(theta2 * T);
}

double equicontinuity_constant(const BoundInputs& b) {
  return 4.0 * b.a_const * b.phi_l1 * b.gamma * b.gamma;
}

double contraction_rate(const BoundInputs& b) {
  return 34.0 * b.a_const * b.gamma * b.phi_l1;
}

}  // namespace gedg
