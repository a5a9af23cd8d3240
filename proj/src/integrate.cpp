#include "gedg/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "gedg/errors.hpp"
#include "gedg/quadrature.hpp"

namespace gedg {

namespace {

double min_bin(const Density& d) {
  double m = std::numeric_limits<double>::infinity();
  for (double c : d.counts) m = std::min(m, c);
  return m;
}

void axpy(Density& y, double a, const Density& x) {
  for (int i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Density combine(const Density& y, double dt,
                std::initializer_list<std::pair<double, const Density*>> terms) {
  Density out = y;
  for (const auto& [w, k] : terms) axpy(out, dt * w, *k);
  return out;
}

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

struct Attempt {
  Density y_new;
  double err = 0.0;  // weighted RMS error estimate; <= 1 accepts
};

Attempt attempt_rk4(const SolverState& s, const EventTensor& et,
                    const SizeGrid& g, double dt) {
  const Density k1 = eval_rhs(s.d, et, g);
  const Density k2 = eval_rhs(combine(s.d, dt, {{0.5, &k1}}), et, g);
  const Density k3 = eval_rhs(combine(s.d, dt, {{0.5, &k2}}), et, g);
  const Density k4 = eval_rhs(combine(s.d, dt, {{1.0, &k3}}), et, g);
  Attempt a{s.d, 0.0};
  for (int i = 0; i < a.y_new.size(); ++i)
    a.y_new[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return a;
}

Attempt attempt_rk45(const SolverState& s, const EventTensor& et,
                     const SizeGrid& g, double dt, const StepControl& ctl) {
  const Density& y = s.d;
  const Density k1 = eval_rhs(y, et, g);
  const Density k2 = eval_rhs(combine(y, dt, {{A21, &k1}}), et, g);
  const Density k3 = eval_rhs(combine(y, dt, {{A31, &k1}, {A32, &k2}}), et, g);
  const Density k4 =
      eval_rhs(combine(y, dt, {{A41, &k1}, {A42, &k2}, {A43, &k3}}), et, g);
  const Density k5 = eval_rhs(
      combine(y, dt, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}}), et, g);
  const Density k6 = eval_rhs(
      combine(y, dt,
              {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}}),
      et, g);
  Attempt a{combine(y, dt,
                    {{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}}),
            0.0};
  const Density k7 = eval_rhs(a.y_new, et, g);
  double sq = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double e = dt * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                           E6 * k6[i] + E7 * k7[i]);
    const double scale =
        ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(a.y_new[i]));
    const double q = e / scale;
    sq += q * q;
  }
  a.err = std::sqrt(sq / y.size());
  return a;
}

void check_conservation(SolverState& s, const SizeGrid& g,
                        const StepControl& ctl) {
  const double m0 = moment(s.d, g, 0.0);
  const double m1 = moment(s.d, g, 1.0);
  const double d0 = std::abs(m0 - s.m0_ref) / std::max(std::abs(s.m0_ref), 1e-30);
  const double d1 = std::abs(m1 - s.m1_ref) / std::max(std::abs(s.m1_ref), 1e-30);
  if (d0 > ctl.cons_tol || d1 > ctl.cons_tol) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "conservation breach at t=%.6g: |dM0|/M0=%.3e |dM1|/M1=%.3e "
                  "(tol %.1e)",
                  s.t, d0, d1, ctl.cons_tol);
    throw ConservationError(buf);
  }
}

}  // namespace

SolverState make_solver_state(Density d0, const SizeGrid& grid, double t0) {
  SolverState s;
  s.t = t0;
  s.d = std::move(d0);
  s.m0_ref = moment(s.d, grid, 0.0);
  s.m1_ref = moment(s.d, grid, 1.0);
  s.stats.min_density_seen = min_bin(s.d);
  return s;
}

double stability_dt(const Density& d, const TruncatedKernel& tk,
                    const SizeGrid& grid) {
  double norm = 0.0;
  for (int i = 1; i < d.size(); ++i) norm += d[i];
  if (norm <= 0.0) return std::numeric_limits<double>::infinity();
  const double phi_l1 = integrate_adaptive(
      [&](double z) { return tk.base().phi(z); }, 0.0, grid.n, 1e-12);
  const double lips =
      16.0 * tk.base().a_const() * grid.n * grid.n * phi_l1;
  if (lips <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (lips * norm);
}

double step(SolverState& s, const StepControl& ctl, const EventTensor& et,
            const SizeGrid& grid, double dt_max) {
  const bool adaptive = ctl.method == Method::RK45Adaptive;
  double dt = adaptive ? (s.dt_next > 0.0 ? s.dt_next : ctl.dt_seed)
                       : ctl.dt;
  if (!(dt > 0.0) || !std::isfinite(dt)) dt = dt_max;
  dt = std::min(dt, dt_max);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::logic_error("step: no positive step size available");

  int halvings = 0;
  int attempts = 0;
  for (;;) {
    if (++attempts > 200)
      throw StiffnessError("step: controller failed to find an acceptable dt");
    const Attempt a = adaptive ? attempt_rk45(s, et, grid, dt, ctl)
                               : attempt_rk4(s, et, grid, dt);
    const double mn = min_bin(a.y_new);
    if (mn < 0.0) {
      ++s.stats.rejected_steps;
      ++halvings;
      if (halvings > ctl.max_halvings) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "stiffness: %d positivity rejections at t=%.6g "
                      "(dt=%.3e, min bin %.3e); state M0=%.6g M1=%.6g",
                      halvings, s.t, dt, mn, moment(s.d, grid, 0.0),
                      moment(s.d, grid, 1.0));
        throw StiffnessError(buf);
      }
      dt *= 0.5;
      continue;
    }
    if (adaptive && a.err > 1.0) {
      ++s.stats.rejected_steps;
      const double shrink =
          std::max(0.2, 0.9 * std::pow(a.err, -0.2));
      dt *= std::min(shrink, 0.5);
      continue;
    }
    s.d = a.y_new;
    s.t += dt;
    ++s.stats.steps;
    s.stats.min_density_seen = std::min(s.stats.min_density_seen, mn);
    if (adaptive) {
      const double grow =
          a.err > 0.0 ? std::clamp(0.9 * std::pow(a.err, -0.2), 0.2, 5.0) : 5.0;
      s.dt_next = dt * grow;
    }
    check_conservation(s, grid, ctl);
    return dt;
  }
}

void advance_to(SolverState& s, const StepControl& ctl, const EventTensor& et,
                const SizeGrid& grid, double t_target) {
  // land exactly: the last step is clipped to the remaining span
  while (s.t < t_target) {
    const double remaining = t_target - s.t;
    if (remaining <= 1e-14 * std::max(1.0, std::abs(t_target))) {
      s.t = t_target;
      break;
    }
    step(s, ctl, et, grid, remaining);
  }
}

Trajectory run(const RunPlan& plan) {
  Trajectory traj;
  SolverState s = make_solver_state(plan.initial, plan.grid);
  StepControl ctl = plan.control;
  if (ctl.method == Method::RK45Adaptive && ctl.dt_seed <= 0.0)
    ctl.dt_seed = plan.t_end > 0.0 ? plan.t_end / 100.0 : 1.0;
  s.dt_next = ctl.dt_seed;

  std::set<double> times(plan.output_times.begin(), plan.output_times.end());
  times.insert(0.0);
  times.insert(plan.t_end);
  for (double t : plan.snapshot_times)
    if (t <= plan.t_end) times.insert(t);
  std::set<double> snap_at(plan.snapshot_times.begin(),
                           plan.snapshot_times.end());

  auto emit = [&](double dt_now) {
    const MomentRow row{
        s.t,
        moment_excluding_void(s.d, plan.grid, 0.0),
        moment(s.d, plan.grid, 0.0),
        moment(s.d, plan.grid, 1.0),
        tail_moment(s.d, plan.grid, plan.sigma),
        equiintegrability_functional(s.d, plan.grid, plan.sigma),
        s.stats.min_density_seen,
        dt_now,
    };
    traj.rows.push_back(row);
  };

  emit(ctl.method == Method::RK4Fixed ? ctl.dt : s.dt_next);
  if (snap_at.count(0.0)) traj.snapshots.emplace_back(0.0, s.d);

  double last_dt = ctl.method == Method::RK4Fixed ? ctl.dt : s.dt_next;
  for (double t_out : times) {
    if (t_out <= 0.0) continue;
    if (t_out > plan.t_end) break;
    while (s.t < t_out) {
      const double remaining = t_out - s.t;
      if (remaining <= 1e-14 * std::max(1.0, t_out)) {
        s.t = t_out;
        break;
      }
      last_dt = step(s, ctl, plan.tensor, plan.grid, remaining);
    }
    if (plan.output_times.empty() ||
        std::find(plan.output_times.begin(), plan.output_times.end(), t_out) !=
            plan.output_times.end() ||
        t_out == plan.t_end) {
      emit(last_dt);
    }
    if (snap_at.count(t_out)) traj.snapshots.emplace_back(t_out, s.d);
  }
  traj.stats = s.stats;
  return traj;
}

}  // namespace gedg
