// gedg: sectional solver, stochastic oracle and diagnostics for the
// continuous generalized exchange-driven growth model.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime abort
// (conservation breach, stiffness), 3 bound violation in check mode or
// contraction envelope failure.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "gedg/config.hpp"
#include "gedg/convex.hpp"
#include "gedg/driver.hpp"
#include "gedg/errors.hpp"
#include "gedg/io.hpp"

namespace {

void print_report(const gedg::ValidationReport& report, const char* what) {
  std::printf("%s: %zu samples, %zu violations\n", what, report.samples,
              report.total_violations);
  for (const auto& v : report.violations)
    std::printf("  violated %s at (%.6g, %.6g, %.6g): lhs %.9g > rhs %.9g\n",
                v.bound.c_str(), v.x, v.y, v.z, v.lhs, v.rhs);
  if (report.total_violations > report.violations.size())
    std::printf("  ... %zu more\n",
                report.total_violations - report.violations.size());
}

int cmd_run(const std::string& config_path, int jobs) {
  const gedg::RunConfig cfg = gedg::parse_config(config_path);
  const gedg::DriverResult result = gedg::run_from_config(cfg, jobs);
  std::printf("run complete; artifacts in %s\n", cfg.output_dir.c_str());
  if (!result.bounds_ok) {
    std::printf("contraction envelope violated (see contraction.csv)\n");
    return 3;
  }
  return 0;
}

int cmd_validate_kernel(const std::string& config_path, std::size_t samples,
                        bool derivatives) {
  const gedg::RunConfig cfg = gedg::parse_config(config_path);
  const gedg::Kernel kernel = gedg::build_kernel(cfg.kernel);
  gedg::ValidateOptions opt;
  opt.check_derivatives = derivatives;
  const auto report = gedg::validate_class(kernel, samples, cfg.seed, opt);
  print_report(report, "kernel class bounds");
  return report.pass() ? 0 : 3;
}

int cmd_check_bounds(const std::string& config_path) {
  const gedg::RunConfig cfg = gedg::parse_config(config_path);
  const gedg::Kernel kernel = gedg::build_kernel(cfg.kernel);
  const gedg::SizeGrid grid = gedg::make_uniform_grid(cfg.n, cfg.cells);
  const gedg::ConvexWeight sigma = gedg::default_sigma();
  const auto ic = gedg::build_ic(cfg.ic);
  const gedg::Density d0 = gedg::project_initial(ic, grid);
  const gedg::BoundInputs b =
      gedg::compute_bound_inputs(kernel, ic, grid, sigma, d0);
  const double s1 = sigma.sigma(1.0);

  std::filesystem::create_directories(cfg.output_dir);
  gedg::PreparedRun stub{kernel, grid, {}, d0, sigma, b, {}, {}};
  gedg::write_file(cfg.output_dir + "/bounds.json",
                   gedg::format_bounds_json(stub, cfg.t_end));

  std::printf("Gamma   = %.9g\n", b.gamma);
  std::printf("Gamma1  = %.9g\n", b.gamma1);
  std::printf("Gamma2  = %.9g\n", b.gamma2);
  std::printf("Gamma3  = %.9g\n", b.gamma3);
  std::printf("Gamma4  = %.9g\n", b.gamma4);
  std::printf("phi_L1  = %.9g (weighted %.9g)\n", b.phi_l1, b.phi_l1_01);
  std::printf("C0      = %.9g\n", gedg::equicontinuity_constant(b));
  std::printf("Xi(T)   = %.9g at T=%g\n",
              gedg::gronwall_bound_sum(b, s1, cfg.t_end), cfg.t_end);
  std::printf("Lambda(T)= %.9g at T=%g\n",
              gedg::gronwall_bound_product(b, s1, cfg.t_end), cfg.t_end);

  const auto kernel_report = gedg::validate_class(kernel, 20000, cfg.seed);
  print_report(kernel_report, "kernel class bounds");
  const auto convex_report =
      gedg::check_convex_inequalities(sigma, 100000, cfg.seed);
  print_report(convex_report, "convex inequalities");
  return kernel_report.pass() && convex_report.pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation and verification engine for continuous generalized "
      "exchange-driven growth"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 0;
  std::size_t samples = 10000;
  bool derivatives = false;

  auto* run_cmd =
      app.add_subcommand("run", "execute the run mode set in the config");
  run_cmd->add_option("config", config_path, "path to config file")
      ->required();
  run_cmd->add_option("--jobs", jobs,
                      "worker pool size for replicas/sweep points");

  auto* val_cmd = app.add_subcommand(
      "validate-kernel", "sample-check the kernel's claimed class bounds");
  val_cmd->add_option("config", config_path, "path to config file")
      ->required();
  val_cmd->add_option("--samples", samples, "sample count (default 10000)");
  val_cmd->add_flag("--derivatives", derivatives,
                    "also finite-difference check the slope bounds");

  auto* bounds_cmd = app.add_subcommand(
      "check-bounds", "compute the a-priori constants and write bounds.json");
  bounds_cmd->add_option("config", config_path, "path to config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, jobs);
    if (val_cmd->parsed())
      return cmd_validate_kernel(config_path, samples, derivatives);
    if (bounds_cmd->parsed()) return cmd_check_bounds(config_path);
  } catch (const gedg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime abort: %s\n", e.what());
    return 2;
  }
  return 0;
}
