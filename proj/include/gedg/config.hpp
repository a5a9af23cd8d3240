#ifndef GEDG_CONFIG_HPP
#define GEDG_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gedg/kernel.hpp"

namespace gedg {

enum class RunMode { Pde, Ssa, Contraction, TruncationSweep };

struct KernelSpec {
  std::string type;         // separable_sum | separable_product | custom_table
  double a = 1.0;           // rate scale
  std::string phi = "exp";  // exp | table:<path>
  std::string eta;          // sqrt1p | pow:<p> | const:<c>   (product class)
  std::string table;        // table path (custom_table)
};

/// Fully validated run description, parsed from a flat `key = value`
/// file with `#` comments. Parsing reports every violation, not just
/// the first.
struct RunConfig {
  RunMode mode = RunMode::Pde;
  KernelSpec kernel;
  std::string ic = "exp";  // exp | box:<a>,<b> | table:<path>
  double n = 0.0;
  int cells = 0;
  double t_end = 0.0;
  int outputs = 10;  // number of uniform output intervals
  std::vector<double> snapshot_times;
  std::string method = "rk45";
  double dt = 1e-3;
  double rtol = 1e-6;
  double atol = 1e-12;
  double cons_tol = 1e-8;
  std::uint64_t seed = 1;
  int replicas = 1;
  int particles = 10000;
  bool void_accepts = false;
  std::string output_dir = "out";
  double contraction_delta = 1e-3;
  int contraction_bump_bin = 0;  // 0 picks cells/4
  std::vector<double> sweep_n;
  int jobs = 0;  // 0: use --jobs / GEDG_JOBS / 1
};

RunConfig parse_config(const std::string& path);

/// Builders from the validated spec. Table-driven pieces are loaded here,
/// so a stale path still fails with a ConfigError.
ScalarFn build_phi(const KernelSpec& spec);
Kernel build_kernel(const KernelSpec& spec);
std::function<double(double)> build_ic(const std::string& ic);

}  // namespace gedg

#endif  // GEDG_CONFIG_HPP
