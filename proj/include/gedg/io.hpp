#ifndef GEDG_IO_HPP
#define GEDG_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "gedg/convex.hpp"
#include "gedg/grid.hpp"
#include "gedg/integrate.hpp"
#include "gedg/quadrature.hpp"

namespace gedg {

/// Two-column CSV (optional header line), ascending x. Used for phi and
/// initial-data tables; the snapshot format round-trips through this.
std::vector<std::pair<double, double>> read_xy_csv(const std::string& path);

/// Piecewise-linear interpolant of (x, v) points, zero outside the range.
ScalarFn piecewise_linear(std::vector<std::pair<double, double>> points);

/// Moment series CSV: header
/// t,M0,M0_with_void,M1,Msigma1,sigma2_functional,min_density,dt
/// with 17-significant-digit formatting; optional replica_id column.
std::string format_moment_csv(const std::vector<MomentRow>& rows);
std::string format_moment_csv_replicas(
    const std::vector<std::vector<MomentRow>>& replicas);

/// Snapshot CSV: header x,zeta with zeta = c_i/dx for i >= 1 in bin
/// order, then a trailing `void_count,<c_0>` line.
std::string format_snapshot_csv(const Density& d, const SizeGrid& grid);
Density read_snapshot_csv(const std::string& path, const SizeGrid& grid);

std::string format_double(double v);  // %.17g

void write_file(const std::string& path, const std::string& content);

}  // namespace gedg

#endif  // GEDG_IO_HPP
