#include "gedg/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "gedg/errors.hpp"

namespace gedg {

SizeGrid make_uniform_grid(double n, int cells) {
  if (!(n > 1.0)) throw ConfigError("grid cutoff must satisfy n > 1");
  if (cells < 2) throw ConfigError("grid needs at least 2 cells");
  return SizeGrid{n, cells};
}

Density project_initial(const std::function<double(double)>& f,
                        const SizeGrid& grid) {
  const int N = grid.cells;
  const double dx = grid.dx();
  Density d(grid.num_bins());
  constexpr int sub = 16;  // refined midpoint nodes per cell
  for (int i = 1; i <= N; ++i) {
    const double lo = (i - 1) * dx;
    double m = 0.0, mu = 0.0;
    const double h = dx / sub;
    for (int s = 0; s < sub; ++s) {
      const double x = lo + (s + 0.5) * h;
      const double v = f(x);
      m += v;
      mu += v * x;
    }
    m *= h;
    mu *= h;
    if (!std::isfinite(m) || !std::isfinite(mu))
      throw DataError("initial data quadrature is non-finite");
    if (m < 0.0) throw DataError("initial data is negative");
    if (m == 0.0) continue;
    if (i == 1) {
      d[1] += m;  // void bin starts empty
      continue;
    }
    // split so the cell's count and mass are both preserved exactly
    double theta = (mu / m - lo) / dx;
    theta = std::min(std::max(theta, 0.0), 1.0);
    d[i] += theta * m;
    d[i - 1] += (1.0 - theta) * m;
  }
  return d;
}

double moment(const Density& d, const SizeGrid& grid, double r) {
  const double dx = grid.dx();
  double sum = 0.0;
  if (r == 0.0) {
    for (double c : d.counts) sum += c;
    return sum;
  }
  if (r == 1.0) {
    for (int i = 1; i < d.size(); ++i) sum += (i * dx) * d[i];
    return sum;
  }
  for (int i = 1; i < d.size(); ++i)
    if (d[i] != 0.0) sum += std::pow(i * dx, r) * d[i];
  return sum;
}

double moment_excluding_void(const Density& d, const SizeGrid& grid, double r) {
  if (r != 0.0) return moment(d, grid, r);
  double sum = 0.0;
  for (int i = 1; i < d.size(); ++i) sum += d[i];
  return sum;
}

double weighted_l1_distance(const Density& a, const Density& b,
                            const SizeGrid& grid) {
  if (a.size() != b.size() || a.size() != grid.num_bins())
    throw std::logic_error("weighted_l1_distance: grid mismatch");
  const double dx = grid.dx();
  double sum = std::abs(a[0] - b[0]);
  for (int i = 1; i < a.size(); ++i) {
    const double w = std::max(1.0, std::sqrt(i * dx));
    sum += w * std::abs(a[i] - b[i]);
  }
  return sum;
}

}  // namespace gedg
