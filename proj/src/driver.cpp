#include "gedg/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include "gedg/errors.hpp"
#include "gedg/io.hpp"
#include "json.hpp"

namespace gedg {

namespace {

std::vector<double> uniform_output_times(double t_end, int outputs) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(outputs) + 1);
  for (int k = 0; k <= outputs; ++k)
    times.push_back(t_end * k / outputs);
  return times;
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

}  // namespace

PreparedRun prepare_run(const RunConfig& cfg, double n_override,
                        int cells_override) {
  const double n = n_override > 0.0 ? n_override : cfg.n;
  const int cells = cells_override > 0 ? cells_override : cfg.cells;
  PreparedRun run{build_kernel(cfg.kernel),
                  make_uniform_grid(n, cells),
                  {},
                  {},
                  default_sigma(),
                  {},
                  {},
                  {}};
  const TruncatedKernel tk = truncate_kernel(run.kernel, n);
  run.tensor = assemble_event_tensor(tk, run.grid, cfg.void_accepts);
  run.initial = project_initial(build_ic(cfg.ic), run.grid);
  run.bounds = compute_bound_inputs(run.kernel, build_ic(cfg.ic), run.grid,
                                    run.sigma, run.initial);
  run.control.method =
      cfg.method == "rk4" ? Method::RK4Fixed : Method::RK45Adaptive;
  run.control.dt = cfg.dt;
  run.control.rtol = cfg.rtol;
  run.control.atol = cfg.atol;
  run.control.cons_tol = cfg.cons_tol;
  run.control.dt_seed = stability_dt(run.initial, tk, run.grid);
  run.output_times = uniform_output_times(cfg.t_end, cfg.outputs);
  return run;
}

std::string format_bounds_json(const PreparedRun& run, double t_end) {
  const BoundInputs& b = run.bounds;
  const double s1 = run.sigma.sigma(1.0);
  nlohmann::json j{
      {"Gamma", b.gamma},
      {"Gamma1", b.gamma1},
      {"Gamma2", b.gamma2},
      {"Gamma3", b.gamma3},
      {"Gamma4", b.gamma4},
      {"phi_l1", b.phi_l1},
      {"phi_l1_01", b.phi_l1_01},
      {"a_const", b.a_const},
      {"eta_star", b.eta_star},
      {"sigma1_at_1", s1},
      {"T", t_end},
      {"C0", equicontinuity_constant(b)},
      {"Xi_T", gronwall_bound_sum(b, s1, t_end)},
      {"Lambda_T", gronwall_bound_product(b, s1, t_end)},
      {"contraction_rate", contraction_rate(b)},
  };
  return j.dump(2) + "\n";
}

std::function<double(std::mt19937_64&)> make_ic_sampler(const RunConfig& cfg) {
  if (cfg.ic == "exp")
    return [](std::mt19937_64& rng) {
      std::exponential_distribution<double> d(1.0);
      return d(rng);
    };
  if (cfg.ic.rfind("box:", 0) == 0) {
    const auto spec = cfg.ic.substr(4);
    const auto comma = spec.find(',');
    const double a = std::stod(spec.substr(0, comma));
    const double b = std::stod(spec.substr(comma + 1));
    return [a, b](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> d(a, b);
      return d(rng);
    };
  }
  if (cfg.ic.rfind("table:", 0) == 0) {
    // inverse CDF of the tabulated density via trapezoid cumulative sums
    auto pts = read_xy_csv(cfg.ic.substr(6));
    std::vector<double> x(pts.size()), cum(pts.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) x[i] = pts[i].first;
    for (std::size_t i = 1; i < pts.size(); ++i)
      cum[i] = cum[i - 1] + 0.5 * (pts[i].second + pts[i - 1].second) *
                                (x[i] - x[i - 1]);
    const double total = cum.back();
    if (!(total > 0.0)) throw ConfigError("ic table integrates to zero");
    return [x, cum, total](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> d(0.0, 1.0);
      const double target = d(rng) * total;
      auto it = std::lower_bound(cum.begin(), cum.end(), target);
      const std::size_t hi =
          std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
      if (hi == 0) return x.front();
      const double seg = cum[hi] - cum[hi - 1];
      const double t = seg > 0.0 ? (target - cum[hi - 1]) / seg : 0.5;
      return x[hi - 1] + t * (x[hi] - x[hi - 1]);
    };
  }
  throw ConfigError("unknown ic: " + cfg.ic);
}

int resolve_jobs(const RunConfig& cfg, int jobs_override) {
  if (jobs_override > 0) return jobs_override;
  if (cfg.jobs > 0) return cfg.jobs;
  if (const char* env = std::getenv("GEDG_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_tasks(int count, int jobs, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

namespace fs = std::filesystem;

void write_snapshots(const std::string& dir, const std::string& prefix,
                     const std::vector<std::pair<double, Density>>& snaps,
                     const SizeGrid& grid) {
  for (const auto& [t, d] : snaps)
    write_file(dir + "/" + prefix + "snapshot_t" + time_tag(t) + ".csv",
               format_snapshot_csv(d, grid));
}

void mode_pde(const RunConfig& cfg, const std::string& dir) {
  PreparedRun run = prepare_run(cfg);
  write_file(dir + "/bounds.json", format_bounds_json(run, cfg.t_end));
  RunPlan plan{run.grid,          std::move(run.tensor), run.initial,
               run.control,       cfg.t_end,             run.output_times,
               cfg.snapshot_times, run.sigma};
  const Trajectory traj = gedg::run(plan);
  write_file(dir + "/moments.csv", format_moment_csv(traj.rows));
  write_snapshots(dir, "", traj.snapshots, run.grid);
}

void mode_ssa(const RunConfig& cfg, const std::string& dir, int jobs) {
  PreparedRun run = prepare_run(cfg);
  write_file(dir + "/bounds.json", format_bounds_json(run, cfg.t_end));
  const auto sampler = make_ic_sampler(cfg);
  SsaOptions opt;
  opt.void_accepts = cfg.void_accepts;
  std::vector<std::vector<MomentRow>> rows(
      static_cast<std::size_t>(cfg.replicas));
  std::vector<SsaTrajectory> trajs(static_cast<std::size_t>(cfg.replicas));
  parallel_tasks(cfg.replicas, jobs, [&](int r) {
    ParticleEnsemble e = init_ensemble(sampler, cfg.particles,
                                       derive_seed(cfg.seed, r));
    trajs[static_cast<std::size_t>(r)] =
        run_ssa(std::move(e), run.kernel, cfg.t_end, run.output_times,
                cfg.snapshot_times, run.grid, run.sigma, opt);
    rows[static_cast<std::size_t>(r)] = trajs[static_cast<std::size_t>(r)].rows;
  });
  write_file(dir + "/moments.csv", format_moment_csv_replicas(rows));
  for (int r = 0; r < cfg.replicas; ++r)
    write_snapshots(dir, "replica" + std::to_string(r) + "_",
                    trajs[static_cast<std::size_t>(r)].snapshots, run.grid);
}

bool mode_contraction(const RunConfig& cfg, const std::string& dir) {
  PreparedRun run = prepare_run(cfg);
  write_file(dir + "/bounds.json", format_bounds_json(run, cfg.t_end));

  const int bump =
      cfg.contraction_bump_bin > 0 ? cfg.contraction_bump_bin : cfg.cells / 4;
  if (bump < 1 || bump > cfg.cells)
    throw ConfigError("contraction bump bin out of range");
  Density perturbed = run.initial;
  const double w =
      std::max(1.0, std::sqrt(run.grid.mass(bump)));
  perturbed[bump] += cfg.contraction_delta / w;  // weighted distance = delta

  RunPlan base_plan{run.grid,         run.tensor,       run.initial,
                    run.control,      cfg.t_end,        run.output_times,
                    run.output_times, run.sigma};
  RunPlan pert_plan = base_plan;
  pert_plan.initial = perturbed;
  const Trajectory base = gedg::run(base_plan);
  const Trajectory pert = gedg::run(pert_plan);

  // envelope rate from the larger of the two initial L^1_{0,1} masses
  BoundInputs b = run.bounds;
  b.gamma = std::max(
      moment(run.initial, run.grid, 0.0) + moment(run.initial, run.grid, 1.0),
      moment(perturbed, run.grid, 0.0) + moment(perturbed, run.grid, 1.0));
  const double rate = contraction_rate(b);

  std::string csv = "t,weighted_distance,gronwall_envelope\n";
  bool ok = true;
  for (std::size_t s = 0; s < base.snapshots.size(); ++s) {
    const double t = base.snapshots[s].first;
    const double dist = weighted_l1_distance(
        base.snapshots[s].second, pert.snapshots[s].second, run.grid);
    const double envelope = cfg.contraction_delta * std::exp(rate * t);
    csv += format_double(t);
    csv += ',';
    csv += format_double(dist);
    csv += ',';
    csv += format_double(envelope);
    csv += '\n';
    if (dist > envelope * (1.0 + 1e-9)) ok = false;
  }
  write_file(dir + "/contraction.csv", csv);
  return ok;
}

void mode_sweep(const RunConfig& cfg, const std::string& dir, int jobs) {
  const int points = static_cast<int>(cfg.sweep_n.size());
  struct SweepRow {
    double n;
    int cells;
    double m0_drift, m1_drift, m2_final;
  };
  std::vector<SweepRow> summary(static_cast<std::size_t>(points));
  parallel_tasks(points, jobs, [&](int p) {
    const double np = cfg.sweep_n[static_cast<std::size_t>(p)];
    const int cells_p =
        static_cast<int>(std::lround(cfg.cells * np / cfg.n));
    PreparedRun run = prepare_run(cfg, np, cells_p);
    RunPlan plan{run.grid,    std::move(run.tensor), run.initial,
                 run.control, cfg.t_end,             run.output_times,
                 {cfg.t_end}, run.sigma};
    const Trajectory traj = gedg::run(plan);
    write_file(dir + "/moments_n" + time_tag(np) + ".csv",
               format_moment_csv(traj.rows));
    const auto& first = traj.rows.front();
    double d0 = 0.0, d1 = 0.0;
    for (const auto& row : traj.rows) {
      d0 = std::max(d0, std::abs(row.m0_with_void - first.m0_with_void) /
                            std::max(first.m0_with_void, 1e-30));
      d1 = std::max(d1, std::abs(row.m1 - first.m1) /
                            std::max(first.m1, 1e-30));
    }
    const double m2 =
        moment(traj.snapshots.back().second, run.grid, 2.0);
    summary[static_cast<std::size_t>(p)] = {np, cells_p, d0, d1, m2};
  });
  std::string csv = "n,cells,M0_drift,M1_drift,M2_final\n";
  for (const auto& row : summary) {
    csv += format_double(row.n);
    csv += ',';
    csv += std::to_string(row.cells);
    csv += ',';
    csv += format_double(row.m0_drift);
    csv += ',';
    csv += format_double(row.m1_drift);
    csv += ',';
    csv += format_double(row.m2_final);
    csv += '\n';
  }
  write_file(dir + "/sweep_summary.csv", csv);
}

}  // namespace

DriverResult run_from_config(const RunConfig& cfg, int jobs_override) {
  const int jobs = resolve_jobs(cfg, jobs_override);
  fs::create_directories(cfg.output_dir);
  DriverResult result;
  switch (cfg.mode) {
    case RunMode::Pde:
      mode_pde(cfg, cfg.output_dir);
      break;
    case RunMode::Ssa:
      mode_ssa(cfg, cfg.output_dir, jobs);
      break;
    case RunMode::Contraction:
      result.bounds_ok = mode_contraction(cfg, cfg.output_dir);
      break;
    case RunMode::TruncationSweep:
      mode_sweep(cfg, cfg.output_dir, jobs);
      break;
  }
  return result;
}

}  // namespace gedg
