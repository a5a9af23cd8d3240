#include "gedg/rhs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gedg/errors.hpp"

namespace gedg {

namespace {

std::size_t total_run_size(int N, int j_min) {
  std::size_t total = 0;
  for (int i = 1; i <= N; ++i) {
    if (j_min == 0) total += static_cast<std::size_t>(i);
    for (int j = 1; j <= N - 1; ++j)
      total += static_cast<std::size_t>(std::min(i, N - j));
  }
  return total;
}

}  // namespace

std::size_t EventTensor::entry_count() const {
  std::size_t count = 0;
  for (double r : rate_) count += (r != 0.0);
  return count;
}

EventTensor assemble_event_tensor(const TruncatedKernel& tk,
                                  const SizeGrid& grid, bool void_accepts) {
  if (tk.cutoff() != grid.n)
    throw ConfigError("kernel cutoff and grid cutoff differ");
  const int N = grid.cells;
  const double dx = grid.dx();
  const int j_min = void_accepts ? 0 : 1;
  const std::size_t total = total_run_size(N, j_min);
  constexpr std::size_t max_entries = 200'000'000;  // ~1.6 GB of rates
  if (total > max_entries)
    throw ConfigError("event tensor too large (" + std::to_string(total) +
                      " entries); reduce cells");
  EventTensor et;
  et.cells_ = N;
  et.j_min_ = j_min;
  et.dx_ = dx;
  et.rate_.resize(total);
  std::size_t p = 0;
  for (int i = 1; i <= N; ++i) {
    const double x = i * dx;
    for (int j = j_min; j <= N - 1; ++j) {
      const double y = j * dx;
      const int len = et.run_length(i, j);
      for (int k = 1; k <= len; ++k) {
        const double r = tk(x, y, k * dx) * dx;
        if (!(r >= 0.0) || !std::isfinite(r))
          throw DataError("kernel produced a negative or non-finite rate");
        et.rate_[p++] = r;
      }
    }
  }
  return et;
}

Density eval_rhs(const Density& d, const EventTensor& et,
                 const SizeGrid& grid) {
  const int N = et.cells_;
  if (d.size() != N + 1 || grid.cells != N)
    throw std::logic_error("eval_rhs: state and tensor grids differ");
  Density out(N + 1);
  const double* c = d.counts.data();
  double* acc = out.counts.data();
  const double* rate = et.rate_.data();
  std::vector<double> fbuf(static_cast<std::size_t>(N) + 1);
  double* f = fbuf.data();
  std::size_t p = 0;
  for (int i = 1; i <= N; ++i) {
    const double ci = c[i];
    for (int j = et.j_min_; j <= N - 1; ++j) {
      const int len = et.run_length(i, j);
      const double m = ci * c[j];
      if (m == 0.0) {
        p += static_cast<std::size_t>(len);
        continue;
      }
      const double* r = rate + p;
      p += static_cast<std::size_t>(len);
      // four partial sums keep the reduction out of the dependency chain
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      int k = 0;
      for (; k + 4 <= len; k += 4) {
        const double f0 = m * r[k], f1 = m * r[k + 1];
        const double f2 = m * r[k + 2], f3 = m * r[k + 3];
        f[k] = f0;
        f[k + 1] = f1;
        f[k + 2] = f2;
        f[k + 3] = f3;
        s0 += f0;
        s1 += f1;
        s2 += f2;
        s3 += f3;
      }
      for (; k < len; ++k) {
        const double fk = m * r[k];
        f[k] = fk;
        s0 += fk;
      }
      const double s = (s0 + s1) + (s2 + s3);
      double* gain_donor = acc + i - 1;  // bins i-1 .. i-len
      for (k = 0; k < len; ++k) gain_donor[-k] += f[k];
      double* gain_acceptor = acc + j + 1;  // bins j+1 .. j+len
      for (k = 0; k < len; ++k) gain_acceptor[k] += f[k];
      acc[i] -= s;
      acc[j] -= s;
    }
  }
  return out;
}

double weak_form_rate(const Density& d, const EventTensor& et,
                      const SizeGrid& grid,
                      const std::function<double(int)>& omega) {
  const int N = et.cells_;
  if (d.size() != N + 1 || grid.cells != N)
    throw std::logic_error("weak_form_rate: state and tensor grids differ");
  std::vector<double> w(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) w[static_cast<std::size_t>(i)] = omega(i);
  const double* c = d.counts.data();
  double total = 0.0;
  std::size_t p = 0;
  for (int i = 1; i <= N; ++i) {
    for (int j = et.j_min_; j <= N - 1; ++j) {
      const int len = et.run_length(i, j);
      const double m = c[i] * c[j];
      if (m == 0.0) {
        p += static_cast<std::size_t>(len);
        continue;
      }
      for (int k = 1; k <= len; ++k, ++p) {
        const double wt = (w[static_cast<std::size_t>(j + k)] +
                           w[static_cast<std::size_t>(i - k)]) -
                          w[static_cast<std::size_t>(i)] -
                          w[static_cast<std::size_t>(j)];
        total += wt * et.rate_[p] * m;
      }
    }
  }
  return total;
}

RhsSplit eval_rhs_split(const Density& d, const EventTensor& et,
                        const SizeGrid& grid) {
  const int N = et.cells_;
  if (d.size() != N + 1 || grid.cells != N)
    throw std::logic_error("eval_rhs_split: state and tensor grids differ");
  RhsSplit split{Density(N + 1), Density(N + 1), Density(N + 1),
                 Density(N + 1)};
  et.for_each([&](int i, int j, int k, double r) {
    const double f = r * d[i] * d[j];
    split.gain_donor[i - k] += f;
    split.loss_acceptor[j] -= f;
    split.gain_acceptor[j + k] += f;
    split.loss_donor[i] -= f;
  });
  return split;
}

}  // namespace gedg
