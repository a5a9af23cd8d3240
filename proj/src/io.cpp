#include "gedg/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gedg/errors.hpp"

namespace gedg {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::pair<double, double>> read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table: " + path);
  std::vector<std::pair<double, double>> points;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, v;
    if (!(ss >> x >> v)) {
      if (lineno == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected two numeric columns");
    }
    points.emplace_back(x, v);
  }
  if (points.size() < 2)
    throw ConfigError(path + ": table needs at least two rows");
  if (!std::is_sorted(points.begin(), points.end(),
                      [](auto& a, auto& b) { return a.first < b.first; }))
    throw ConfigError(path + ": table x column must be ascending");
  return points;
}

ScalarFn piecewise_linear(std::vector<std::pair<double, double>> points) {
  return [pts = std::move(points)](double x) {
    if (x < pts.front().first || x > pts.back().first) return 0.0;
    auto it = std::lower_bound(
        pts.begin(), pts.end(), x,
        [](const auto& p, double q) { return p.first < q; });
    if (it == pts.begin()) return it->second;
    const auto& [x1, v1] = *it;
    const auto& [x0, v0] = *(it - 1);
    if (x1 == x0) return v1;
    const double t = (x - x0) / (x1 - x0);
    return v0 + t * (v1 - v0);
  };
}

namespace {

const char* kMomentHeader =
    "t,M0,M0_with_void,M1,Msigma1,sigma2_functional,min_density,dt";

void append_row(std::string& out, const MomentRow& r) {
  out += format_double(r.t);
  for (double v : {r.m0, r.m0_with_void, r.m1, r.msigma1, r.sigma2_functional,
                   r.min_density, r.dt}) {
    out += ',';
    out += format_double(v);
  }
}

}  // namespace

std::string format_moment_csv(const std::vector<MomentRow>& rows) {
  std::string out = kMomentHeader;
  out += '\n';
  for (const auto& r : rows) {
    append_row(out, r);
    out += '\n';
  }
  return out;
}

std::string format_moment_csv_replicas(
    const std::vector<std::vector<MomentRow>>& replicas) {
  std::string out = std::string(kMomentHeader) + ",replica_id\n";
  for (std::size_t id = 0; id < replicas.size(); ++id)
    for (const auto& r : replicas[id]) {
      append_row(out, r);
      out += ',';
      out += std::to_string(id);
      out += '\n';
    }
  return out;
}

std::string format_snapshot_csv(const Density& d, const SizeGrid& grid) {
  std::string out = "x,zeta\n";
  const double dx = grid.dx();
  for (int i = 1; i < d.size(); ++i) {
    out += format_double(i * dx);
    out += ',';
    out += format_double(d[i] / dx);
    out += '\n';
  }
  out += "void_count,";
  out += format_double(d[0]);
  out += '\n';
  return out;
}

Density read_snapshot_csv(const std::string& path, const SizeGrid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot: " + path);
  Density d(grid.num_bins());
  std::string line;
  int bin = 1;
  const double dx = grid.dx();
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("x,", 0) == 0) continue;
    if (line.rfind("void_count,", 0) == 0) {
      d[0] = std::stod(line.substr(11));
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos || bin >= d.size())
      throw ConfigError(path + ": malformed snapshot row");
    d[bin] = std::stod(line.substr(comma + 1)) * dx;
    ++bin;
  }
  return d;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("failed writing " + path);
}

}  // namespace gedg
