#ifndef GEDG_INTEGRATE_HPP
#define GEDG_INTEGRATE_HPP

#include <limits>
#include <utility>
#include <vector>

#include "gedg/convex.hpp"
#include "gedg/grid.hpp"
#include "gedg/kernel.hpp"
#include "gedg/rhs.hpp"

namespace gedg {

enum class Method { RK4Fixed, RK45Adaptive };

struct StepControl {
  Method method = Method::RK45Adaptive;
  double dt = 1e-3;     // fixed-step size (RK4)
  double rtol = 1e-6;   // adaptive tolerances (RK45)
  double atol = 1e-12;
  double cons_tol = 1e-8;  // relative conservation drift that aborts the run
  double dt_seed = 0.0;    // initial adaptive step; 0 means pick from span
  int max_halvings = 40;   // consecutive positivity rejections before giving up
};

struct StepStats {
  long long steps = 0;
  long long rejected_steps = 0;
  double min_density_seen = std::numeric_limits<double>::infinity();
};

/// Time-stepper state. Conservation references are frozen at creation;
/// every accepted step must stay within cons_tol of them (a breach means
/// an RHS or integrator bug, since the discrete balances are structural).
struct SolverState {
  double t = 0.0;
  Density d;
  StepStats stats;
  double m0_ref = 0.0;  // bin count including voids
  double m1_ref = 0.0;
  double dt_next = 0.0;
};

SolverState make_solver_state(Density d0, const SizeGrid& grid, double t0 = 0.0);

/// Conservative initial step size 1/(C_L ||d||_1) from the Lipschitz
/// constant C_L = 16 a n^2 ||phi||_{L1(0,n)} of the truncated RHS
/// (four flux groups, each 4 a n^2 ||phi||). Returns +infinity for a
/// zero state: any step is stable.
double stability_dt(const Density& d, const TruncatedKernel& tk,
                    const SizeGrid& grid);

/// One accepted step of at most dt_max. Rejects and halves whenever a
/// bin would go negative (at most max_halvings times, then throws
/// StiffnessError with a diagnostic dump); adaptive mode additionally
/// rejects on the embedded error estimate. Returns the dt taken.
double step(SolverState& s, const StepControl& ctl, const EventTensor& et,
            const SizeGrid& grid,
            double dt_max = std::numeric_limits<double>::infinity());

/// Marches to t_target, landing on it exactly.
void advance_to(SolverState& s, const StepControl& ctl, const EventTensor& et,
                const SizeGrid& grid, double t_target);

struct MomentRow {
  double t = 0.0;
  double m0 = 0.0;            // clusters of positive mass
  double m0_with_void = 0.0;  // including the void bin (conserved quantity)
  double m1 = 0.0;
  double msigma1 = 0.0;
  double sigma2_functional = 0.0;
  double min_density = 0.0;
  double dt = 0.0;
};

struct Trajectory {
  std::vector<MomentRow> rows;
  std::vector<std::pair<double, Density>> snapshots;
  StepStats stats;
};

struct RunPlan {
  SizeGrid grid;
  EventTensor tensor;
  Density initial;
  StepControl control;
  double t_end = 0.0;
  std::vector<double> output_times;    // always includes 0 and t_end
  std::vector<double> snapshot_times;
  ConvexWeight sigma;
};

/// Deterministic solver run: moment rows at every output time, density
/// snapshots at the configured times.
Trajectory run(const RunPlan& plan);

}  // namespace gedg

#endif  // GEDG_INTEGRATE_HPP
