#ifndef GEDG_PARTICLES_HPP
#define GEDG_PARTICLES_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gedg/convex.hpp"
#include "gedg/grid.hpp"
#include "gedg/integrate.hpp"
#include "gedg/kernel.hpp"

namespace gedg {

/// Finite ensemble of cluster masses (zeros are void clusters) with
/// mean-field rate scaling 1/V. Every event moves a chunk w from a donor
/// to an acceptor, so particle count is exactly invariant and total mass
/// is invariant up to one rounding each on donor and acceptor.
struct ParticleEnsemble {
  std::vector<double> masses;
  double volume_scale = 1.0;  // V; rates carry 1/V
  double t = 0.0;
  std::mt19937_64 rng;
  long long events = 0;
};

/// Derives an independent stream seed from a master seed (splitmix64
/// counter scheme), used for replica fan-out.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// count iid draws from `sampler`; V = count so empirical concentrations
/// match a deterministic run with M0(0) = 1. Requires count >= 2.
ParticleEnsemble init_ensemble(
    const std::function<double(std::mt19937_64&)>& sampler, int count,
    std::uint64_t seed);

struct SsaOptions {
  bool void_accepts = false;
  int rate_quad_cells = 256;   // cells for K(u,v) slice quadrature
  int chunk_cells = 1024;      // cells for the chunk inverse-CDF
  long long refresh_every = 10'000;  // full rate-sum recompute cadence
};

/// Sum of K(u_a, u_b)/V over ordered pairs a != b; zero iff no admissible
/// pair remains.
double total_rate(const ParticleEnsemble& e, const Kernel& k,
                  const SsaOptions& opt = {});

/// One direct-method event: exponential waiting time at the total rate,
/// ordered pair chosen proportional to its rate, chunk drawn from the
/// kernel slice. Returns false from an absorbing state (zero total rate).
bool ssa_step(ParticleEnsemble& e, const Kernel& k, const SsaOptions& opt = {});

struct SsaTrajectory {
  std::vector<MomentRow> rows;  // empirical moments, dt = mean waiting time
  std::vector<std::pair<double, Density>> snapshots;  // histograms, counts/V
  long long events = 0;
  ParticleEnsemble final_state;
};

/// Event-driven run to t_end with empirical moment rows at the output
/// times and histograms (binned onto `bin_grid` by nearest node) at the
/// snapshot times.
SsaTrajectory run_ssa(ParticleEnsemble e, const Kernel& k, double t_end,
                      const std::vector<double>& output_times,
                      const std::vector<double>& snapshot_times,
                      const SizeGrid& bin_grid, const ConvexWeight& sigma,
                      const SsaOptions& opt = {});

/// Nearest-node histogram of the ensemble on `grid`, scaled by 1/V so it
/// is directly comparable with deterministic bin counts. Masses above the
/// cutoff land in the last bin.
Density bin_ensemble(const ParticleEnsemble& e, const SizeGrid& grid);

}  // namespace gedg

#endif  // GEDG_PARTICLES_HPP
