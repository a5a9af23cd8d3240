#ifndef GEDG_GRID_HPP
#define GEDG_GRID_HPP

#include <functional>
#include <vector>

namespace gedg {

/// Node-aligned uniform mass lattice on (0, n]: bin i sits at mass i*dx
/// with dx = n/cells, and bin 0 is the void bin (clusters of mass zero).
/// Node alignment closes the event set: for 1 <= k <= i and j+k <= N,
/// both i-k and j+k are again lattice bins, which is what makes the
/// discrete number and mass balances exact.
struct SizeGrid {
  double n = 0.0;  // mass cutoff, dx derived so that dx*cells == n
  int cells = 0;   // N

  double dx() const { return n / cells; }
  double mass(int i) const { return i * dx(); }
  int num_bins() const { return cells + 1; }
  bool operator==(const SizeGrid&) const = default;
};

/// Requires n > 1 and cells >= 2.
SizeGrid make_uniform_grid(double n, int cells);

/// Per-bin number concentrations c_i ~ zeta(t, i*dx)*dx; counts[0] holds
/// void clusters. Value-like solver state.
struct Density {
  std::vector<double> counts;

  explicit Density(int num_bins = 0) : counts(num_bins, 0.0) {}
  double& operator[](int i) { return counts[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return counts[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(counts.size()); }
};

/// Project an initial number density onto the lattice. Each cell
/// ((i-1)dx, i*dx] is integrated with a refined midpoint rule and its
/// mass is split between the two surrounding nodes so that the cell's
/// zeroth and first moments are preserved (the first cell goes entirely
/// to node 1: the void bin starts empty). Throws DataError if the
/// quadrature produces non-finite or negative cell masses.
Density project_initial(const std::function<double(double)>& f,
                        const SizeGrid& grid);

/// r-th moment sum_{i>=1} (i*dx)^r c_i; void clusters count as particles,
/// so c_0 is included when r == 0.
double moment(const Density& d, const SizeGrid& grid, double r);

/// Variant excluding the void bin at r == 0 (both conventions are
/// reported in run output).
double moment_excluding_void(const Density& d, const SizeGrid& grid, double r);

/// Distance in the uniqueness norm: sum_i max{1, sqrt(i*dx)} |c_i - c'_i|,
/// void bin weighted 1. Throws std::logic_error on grid mismatch.
double weighted_l1_distance(const Density& a, const Density& b,
                            const SizeGrid& grid);

}  // namespace gedg

#endif  // GEDG_GRID_HPP
