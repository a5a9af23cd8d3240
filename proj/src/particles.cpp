#include "gedg/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gedg/errors.hpp"
#include "gedg/quadrature.hpp"

namespace gedg {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ParticleEnsemble init_ensemble(
    const std::function<double(std::mt19937_64&)>& sampler, int count,
    std::uint64_t seed) {
  if (count < 2)
    throw ConfigError("ensemble needs at least 2 particles (ordered pairs)");
  ParticleEnsemble e;
  e.rng.seed(seed);
  e.masses.resize(static_cast<std::size_t>(count));
  for (auto& m : e.masses) {
    m = sampler(e.rng);
    if (!(m >= 0.0) || !std::isfinite(m))
      throw DataError("initial mass sampler produced an invalid mass");
  }
  e.volume_scale = static_cast<double>(count);
  return e;
}

namespace {

// Prefix-sum tree over non-negative weights: O(log n) update and
// weighted sampling. Occasional full rebuilds absorb float drift.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    size_ = n;
    tree_.assign(n + 1, 0.0);
  }

  void build(const std::vector<double>& w) {
    reset(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::size_t pos = i + 1;
      tree_[pos] += w[i];
      const std::size_t parent = pos + (pos & (~pos + 1));
      if (parent <= size_) tree_[parent] += tree_[pos];
    }
  }

  void add(std::size_t i, double delta) {
    for (std::size_t pos = i + 1; pos <= size_; pos += pos & (~pos + 1))
      tree_[pos] += delta;
  }

  double total() const {
    double t = 0.0;
    for (std::size_t pos = size_; pos > 0; pos -= pos & (~pos + 1))
      t += tree_[pos];
    return t;
  }

  /// Smallest index whose prefix sum exceeds r.
  std::size_t search(double r) const {
    std::size_t pos = 0;
    std::size_t mask = std::size_t{1} << 63;
    while (mask > size_) mask >>= 1;
    for (; mask > 0; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next <= size_ && tree_[next] <= r) {
        pos = next;
        r -= tree_[next];
      }
    }
    return pos < size_ ? pos : size_ - 1;
  }

 private:
  std::size_t size_ = 0;
  std::vector<double> tree_;
};

// Rate bookkeeping for the direct method. Separable kernels factor the
// ordered-pair rate K(u,v) = D(u) E(v), so the total over pairs is
// (sum D)(sum E) - sum(D E) and each event only touches two particles'
// contributions. Other kernels keep the full pair matrix (small
// ensembles only).
class RateCache {
 public:
  RateCache(const ParticleEnsemble& e, const Kernel& k, const SsaOptions& opt)
      : kernel_(k), opt_(opt), count_(e.masses.size()) {
    separable_ = k.separable().has_value();
    if (!separable_ && count_ > 4096)
      throw ConfigError(
          "SSA with a non-separable kernel is limited to 4096 particles");
    rebuild(e);
  }

  double donor_weight(double u) const {
    if (u <= 0.0) return 0.0;
    const auto& s = *kernel_.separable();
    return s.scale * s.fx(u) *
           integrate_midpoint(kernel_.phi_fn(), 0.0, u, opt_.rate_quad_cells);
  }

  double acceptor_weight(double u) const {
    if (u == 0.0 && !opt_.void_accepts) return 0.0;
    const auto& s = *kernel_.separable();
    return s.fy(u);
  }

  double pair(const ParticleEnsemble& e, std::size_t a, std::size_t b) const {
    if (e.masses[b] == 0.0 && !opt_.void_accepts) return 0.0;
    return pair_rate(kernel_, e.masses[a], e.masses[b], opt_.rate_quad_cells);
  }

  void rebuild(const ParticleEnsemble& e) {
    if (separable_) {
      d_.resize(count_);
      a_.resize(count_);
      sum_d_ = sum_a_ = sum_da_ = 0.0;
      for (std::size_t i = 0; i < count_; ++i) {
        d_[i] = donor_weight(e.masses[i]);
        a_[i] = acceptor_weight(e.masses[i]);
        sum_d_ += d_[i];
        sum_a_ += a_[i];
        sum_da_ += d_[i] * a_[i];
      }
      fen_d_.build(d_);
      fen_a_.build(a_);
    } else {
      matrix_.assign(count_ * count_, 0.0);
      row_sum_.assign(count_, 0.0);
      for (std::size_t i = 0; i < count_; ++i)
        for (std::size_t j = 0; j < count_; ++j) {
          if (i == j) continue;
          const double r = pair(e, i, j);
          matrix_[i * count_ + j] = r;
          row_sum_[i] += r;
        }
    }
  }

  double total(double volume) const {
    double t;
    if (separable_)
      t = sum_d_ * sum_a_ - sum_da_;
    else {
      t = 0.0;
      for (double r : row_sum_) t += r;
    }
    return std::max(t, 0.0) / volume;
  }

  // pick (donor, acceptor) proportional to the pair rate
  std::pair<std::size_t, std::size_t> select(const ParticleEnsemble& e,
                                             std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (separable_) {
      // donor is wanted with weight D_a (sumE - E_a); sample from D via
      // the tree and thin with probability (sumE - E_a)/sumE, which is
      // exact and nearly always accepts for large ensembles
      const double td = fen_d_.total();
      const double ta = fen_a_.total();
      std::size_t donor = 0;
      for (int tries = 0;; ++tries) {
        donor = fen_d_.search(unit(rng) * td);
        if (!(d_[donor] > 0.0)) continue;
        const double keep = (ta - a_[donor]) / ta;
        if (unit(rng) < keep) break;
        if (tries > 100000) {  // drift guard: fall back to a full scan
          double r = unit(rng) * (sum_d_ * sum_a_ - sum_da_);
          for (std::size_t i = 0; i < count_; ++i) {
            const double w = d_[i] * (sum_a_ - a_[i]);
            if (r < w || i == count_ - 1) {
              donor = i;
              break;
            }
            r -= w;
          }
          break;
        }
      }
      std::size_t acceptor = donor;
      for (int tries = 0; acceptor == donor || !(a_[acceptor] > 0.0);
           ++tries) {
        acceptor = fen_a_.search(unit(rng) * ta);
        if (tries > 100000) {
          for (std::size_t j = 0; j < count_; ++j)
            if (j != donor && a_[j] > 0.0) {
              acceptor = j;
              break;
            }
          break;
        }
      }
      return {donor, acceptor};
    }
    double total_w = 0.0;
    for (double r : row_sum_) total_w += r;
    double r = unit(rng) * total_w;
    std::size_t donor = count_ - 1;
    for (std::size_t i = 0; i < count_; ++i) {
      if (r < row_sum_[i]) {
        donor = i;
        break;
      }
      r -= row_sum_[i];
    }
    while (donor > 0 && !(row_sum_[donor] > 0.0)) --donor;
    double r2 = unit(rng) * row_sum_[donor];
    std::size_t acceptor = count_;
    for (std::size_t j = 0; j < count_; ++j) {
      if (j == donor) continue;
      const double w = matrix_[donor * count_ + j];
      if (r2 < w) {
        acceptor = j;
        break;
      }
      r2 -= w;
    }
    if (acceptor == count_) {
      acceptor = donor == count_ - 1 ? count_ - 2 : count_ - 1;
      while (acceptor > 0 &&
             (acceptor == donor || !(matrix_[donor * count_ + acceptor] > 0.0)))
        --acceptor;
    }
    return {donor, acceptor};
  }

  void update_particle(const ParticleEnsemble& e, std::size_t i) {
    if (separable_) {
      const double nd = donor_weight(e.masses[i]);
      const double na = acceptor_weight(e.masses[i]);
      sum_d_ += nd - d_[i];
      sum_a_ += na - a_[i];
      sum_da_ += nd * na - d_[i] * a_[i];
      d_[i] = nd;
      a_[i] = na;
    } else {
      for (std::size_t j = 0; j < count_; ++j) {
        if (j == i) continue;
        const double rij = pair(e, i, j);
        row_sum_[i] += rij - matrix_[i * count_ + j];
        matrix_[i * count_ + j] = rij;
        const double rji = pair(e, j, i);
        row_sum_[j] += rji - matrix_[j * count_ + i];
        matrix_[j * count_ + i] = rji;
      }
    }
  }

 private:
  const Kernel& kernel_;
  SsaOptions opt_;
  std::size_t count_;
  bool separable_ = false;
  std::vector<double> d_, a_;
  double sum_d_ = 0.0, sum_a_ = 0.0, sum_da_ = 0.0;
  std::vector<double> matrix_, row_sum_;
};

bool engine_step(ParticleEnsemble& e, const Kernel& k, RateCache& cache,
                 const SsaOptions& opt) {
  const double rate = cache.total(e.volume_scale);
  if (!(rate > 0.0)) return false;
  std::exponential_distribution<double> waiting(rate);
  e.t += waiting(e.rng);
  const auto [donor, acceptor] = cache.select(e, e.rng);
  const double w = sample_chunk(k, e.masses[donor], e.masses[acceptor], e.rng,
                                opt.chunk_cells);
  e.masses[donor] -= w;
  if (e.masses[donor] < 0.0) e.masses[donor] = 0.0;
  e.masses[acceptor] += w;
  cache.update_particle(e, donor);
  cache.update_particle(e, acceptor);
  ++e.events;
  if (opt.refresh_every > 0 && e.events % opt.refresh_every == 0)
    cache.rebuild(e);
  return true;
}

}  // namespace

double total_rate(const ParticleEnsemble& e, const Kernel& k,
                  const SsaOptions& opt) {
  RateCache cache(e, k, opt);
  return cache.total(e.volume_scale);
}

bool ssa_step(ParticleEnsemble& e, const Kernel& k, const SsaOptions& opt) {
  RateCache cache(e, k, opt);
  return engine_step(e, k, cache, opt);
}

Density bin_ensemble(const ParticleEnsemble& e, const SizeGrid& grid) {
  Density d(grid.num_bins());
  const double inv_dx = 1.0 / grid.dx();
  for (double u : e.masses) {
    long i = std::lround(u * inv_dx);
    i = std::clamp(i, 0L, static_cast<long>(grid.cells));
    d[static_cast<int>(i)] += 1.0;
  }
  for (auto& c : d.counts) c /= e.volume_scale;
  return d;
}

SsaTrajectory run_ssa(ParticleEnsemble e, const Kernel& k, double t_end,
                      const std::vector<double>& output_times,
                      const std::vector<double>& snapshot_times,
                      const SizeGrid& bin_grid, const ConvexWeight& sigma,
                      const SsaOptions& opt) {
  SsaTrajectory out;
  RateCache cache(e, k, opt);

  std::vector<double> times = output_times;
  times.push_back(0.0);
  times.push_back(t_end);
  for (double t : snapshot_times) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  auto is_snapshot = [&](double t) {
    return std::find(snapshot_times.begin(), snapshot_times.end(), t) !=
           snapshot_times.end();
  };
  auto emit = [&](double t) {
    double m1 = 0.0, msig = 0.0;
    std::size_t nonvoid = 0;
    for (double u : e.masses) {
      m1 += u;
      if (u > 0.0) {
        ++nonvoid;
        msig += sigma.sigma(u);
      }
    }
    const double v = e.volume_scale;
    const Density hist = bin_ensemble(e, bin_grid);
    const double rate = cache.total(v);
    MomentRow row{t,
                  static_cast<double>(nonvoid) / v,
                  static_cast<double>(e.masses.size()) / v,
                  m1 / v,
                  msig / v,
                  equiintegrability_functional(hist, bin_grid, sigma),
                  0.0,
                  rate > 0.0 ? 1.0 / rate : 0.0};
    out.rows.push_back(row);
    if (is_snapshot(t)) out.snapshots.emplace_back(t, hist);
  };

  std::size_t next_out = 0;
  while (next_out < times.size() && times[next_out] <= 0.0) {
    emit(times[next_out]);
    ++next_out;
  }

  while (e.t < t_end) {
    const double rate = cache.total(e.volume_scale);
    if (!(rate > 0.0)) break;  // absorbing state, hold constant to t_end
    std::exponential_distribution<double> waiting(rate);
    const double t_event = e.t + waiting(e.rng);
    while (next_out < times.size() && times[next_out] <= std::min(t_event, t_end)) {
      emit(times[next_out]);
      ++next_out;
    }
    if (t_event >= t_end) {
      e.t = t_end;
      break;
    }
    e.t = t_event;
    const auto [donor, acceptor] = cache.select(e, e.rng);
    const double w = sample_chunk(k, e.masses[donor], e.masses[acceptor],
                                  e.rng, opt.chunk_cells);
    e.masses[donor] -= w;
    if (e.masses[donor] < 0.0) e.masses[donor] = 0.0;
    e.masses[acceptor] += w;
    cache.update_particle(e, donor);
    cache.update_particle(e, acceptor);
    ++e.events;
    if (opt.refresh_every > 0 && e.events % opt.refresh_every == 0)
      cache.rebuild(e);
  }
  while (next_out < times.size()) {
    emit(times[next_out]);
    ++next_out;
  }
  out.events = e.events;
  out.final_state = std::move(e);
  return out;
}

}  // namespace gedg
