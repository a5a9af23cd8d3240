#ifndef GEDG_DRIVER_HPP
#define GEDG_DRIVER_HPP

#include <functional>
#include <string>
#include <vector>

#include "gedg/config.hpp"
#include "gedg/convex.hpp"
#include "gedg/integrate.hpp"
#include "gedg/particles.hpp"

namespace gedg {

/// Everything a deterministic run needs, assembled from a validated
/// config (optionally overriding the cutoff/cells for sweep points).
struct PreparedRun {
  Kernel kernel;
  SizeGrid grid;
  EventTensor tensor;
  Density initial;
  ConvexWeight sigma;
  BoundInputs bounds;
  StepControl control;
  std::vector<double> output_times;
};

PreparedRun prepare_run(const RunConfig& cfg, double n_override = 0.0,
                        int cells_override = 0);

/// bounds.json payload for a prepared run (written before stepping).
std::string format_bounds_json(const PreparedRun& run, double t_end);

/// Initial-mass sampler matching the config's ic spec.
std::function<double(std::mt19937_64&)> make_ic_sampler(const RunConfig& cfg);

struct DriverResult {
  bool bounds_ok = true;  // contraction envelope held
};

/// Executes the configured mode, writing artifacts under cfg.output_dir.
/// `jobs_override` > 0 beats cfg.jobs and GEDG_JOBS.
DriverResult run_from_config(const RunConfig& cfg, int jobs_override = 0);

/// Runs fn(0..count-1) on a small worker pool; exceptions are rethrown
/// on the caller thread after the pool drains.
void parallel_tasks(int count, int jobs, const std::function<void(int)>& fn);

int resolve_jobs(const RunConfig& cfg, int jobs_override);

}  // namespace gedg

#endif  // GEDG_DRIVER_HPP
