#include "gedg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gedg/errors.hpp"
#include "gedg/io.hpp"

namespace gedg {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::vector<std::string> kKnownKeys = {
    "mode",          "kernel.type",  "kernel.a",
    "kernel.phi",    "kernel.eta",   "kernel.table",
    "ic",            "n",            "cells",
    "t_end",         "outputs",      "snapshot_times",
    "method",        "dt",           "rtol",
    "atol",          "cons_tol",     "seed",
    "replicas",      "particles",    "void_accepts",
    "output_dir",    "contraction.delta",
    "contraction.bump_bin",          "sweep.n_values",
    "jobs",
};

class Validator {
 public:
  void fail(const std::string& msg) { errors_.push_back(msg); }
  void fail_at(int line, const std::string& msg) {
    errors_.push_back("line " + std::to_string(line) + ": " + msg);
  }
  void finish(const std::string& path) const {
    if (errors_.empty()) return;
    std::string joined = path + ": invalid configuration\n";
    for (const auto& e : errors_) joined += "  - " + e + "\n";
    throw ConfigError(joined);
  }
  bool ok() const { return errors_.empty(); }

 private:
  std::vector<std::string> errors_;
};

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  Validator v;
  std::map<std::string, RawEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      v.fail_at(lineno, "expected `key = value`, got `" + line + "`");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      v.fail_at(lineno, "empty key");
      continue;
    }
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) ==
        kKnownKeys.end()) {
      v.fail_at(lineno, "unknown key `" + key + "`");
      continue;
    }
    auto [it, inserted] = entries.emplace(key, RawEntry{value, lineno});
    if (!inserted)
      v.fail_at(lineno, "duplicate key `" + key + "` (first set on line " +
                            std::to_string(it->second.line) + ")");
  }

  RunConfig cfg;
  auto has = [&](const char* key) { return entries.count(key) > 0; };
  auto raw = [&](const char* key) { return entries.at(key); };

  auto get_double = [&](const char* key, double& out) {
    if (!has(key)) return;
    const auto& e = raw(key);
    try {
      std::size_t used = 0;
      out = std::stod(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument(e.value);
    } catch (const std::exception&) {
      v.fail_at(e.line, std::string(key) + ": not a number: `" + e.value + "`");
    }
  };
  auto get_int = [&](const char* key, int& out) {
    if (!has(key)) return;
    const auto& e = raw(key);
    try {
      std::size_t used = 0;
      out = std::stoi(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument(e.value);
    } catch (const std::exception&) {
      v.fail_at(e.line,
                std::string(key) + ": not an integer: `" + e.value + "`");
    }
  };
  auto get_string = [&](const char* key, std::string& out) {
    if (has(key)) out = raw(key).value;
  };
  auto get_bool = [&](const char* key, bool& out) {
    if (!has(key)) return;
    const auto& e = raw(key);
    if (e.value == "true" || e.value == "1")
      out = true;
    else if (e.value == "false" || e.value == "0")
      out = false;
    else
      v.fail_at(e.line, std::string(key) + ": expected true/false");
  };

  // mode
  if (!has("mode")) {
    v.fail("missing required key `mode`");
  } else {
    const auto& e = raw("mode");
    if (e.value == "pde")
      cfg.mode = RunMode::Pde;
    else if (e.value == "ssa")
      cfg.mode = RunMode::Ssa;
    else if (e.value == "contraction")
      cfg.mode = RunMode::Contraction;
    else if (e.value == "truncation_sweep")
      cfg.mode = RunMode::TruncationSweep;
    else
      v.fail_at(e.line, "mode must be pde|ssa|contraction|truncation_sweep");
  }

  // kernel
  if (!has("kernel.type")) {
    v.fail("missing required key `kernel.type`");
  } else {
    get_string("kernel.type", cfg.kernel.type);
    if (cfg.kernel.type != "separable_sum" &&
        cfg.kernel.type != "separable_product" &&
        cfg.kernel.type != "custom_table")
      v.fail_at(raw("kernel.type").line,
                "kernel.type must be separable_sum|separable_product|"
                "custom_table");
    if (cfg.kernel.type == "separable_product" && !has("kernel.eta"))
      v.fail("separable_product kernel requires kernel.eta");
    if (cfg.kernel.type == "custom_table" && !has("kernel.table"))
      v.fail("custom_table kernel requires kernel.table");
  }
  get_double("kernel.a", cfg.kernel.a);
  if (has("kernel.a") && !(cfg.kernel.a >= 0.0))
    v.fail_at(raw("kernel.a").line, "kernel.a must be >= 0");
  get_string("kernel.phi", cfg.kernel.phi);
  if (cfg.kernel.phi != "exp" && cfg.kernel.phi.rfind("table:", 0) != 0)
    v.fail_at(has("kernel.phi") ? raw("kernel.phi").line : 0,
              "kernel.phi must be exp or table:<path>");
  get_string("kernel.eta", cfg.kernel.eta);
  if (!cfg.kernel.eta.empty() && cfg.kernel.eta != "sqrt1p" &&
      cfg.kernel.eta.rfind("pow:", 0) != 0 &&
      cfg.kernel.eta.rfind("const:", 0) != 0)
    v.fail_at(raw("kernel.eta").line,
              "kernel.eta must be sqrt1p, pow:<p> or const:<c>");
  get_string("kernel.table", cfg.kernel.table);

  // ic
  get_string("ic", cfg.ic);
  if (cfg.ic != "exp" && cfg.ic.rfind("box:", 0) != 0 &&
      cfg.ic.rfind("table:", 0) != 0)
    v.fail_at(has("ic") ? raw("ic").line : 0,
              "ic must be exp, box:<a>,<b> or table:<path>");
  if (cfg.ic.rfind("box:", 0) == 0) {
    const auto parts = parse_double_list(cfg.ic.substr(4));
    if (parts.size() != 2 || !(parts[0] >= 0.0) || !(parts[1] > parts[0]))
      v.fail("ic box:<a>,<b> needs 0 <= a < b");
  }

  // domain
  if (!has("n"))
    v.fail("missing required key `n`");
  else {
    get_double("n", cfg.n);
    if (!(cfg.n > 1.0))
      v.fail_at(raw("n").line,
                "n must be > 1 (the truncated system is only posed there)");
  }
  if (!has("cells"))
    v.fail("missing required key `cells`");
  else {
    get_int("cells", cfg.cells);
    if (cfg.cells < 2) v.fail_at(raw("cells").line, "cells must be >= 2");
  }
  if (!has("t_end"))
    v.fail("missing required key `t_end`");
  else {
    get_double("t_end", cfg.t_end);
    if (!(cfg.t_end >= 0.0)) v.fail_at(raw("t_end").line, "t_end must be >= 0");
  }

  get_int("outputs", cfg.outputs);
  if (cfg.outputs < 1) v.fail("outputs must be >= 1");
  if (has("snapshot_times")) {
    try {
      cfg.snapshot_times = parse_double_list(raw("snapshot_times").value);
    } catch (const std::exception&) {
      v.fail_at(raw("snapshot_times").line, "snapshot_times: bad number list");
    }
  }

  // stepping
  get_string("method", cfg.method);
  if (cfg.method != "rk4" && cfg.method != "rk45")
    v.fail_at(has("method") ? raw("method").line : 0,
              "method must be rk4 or rk45");
  get_double("dt", cfg.dt);
  if (!(cfg.dt > 0.0)) v.fail("dt must be > 0");
  get_double("rtol", cfg.rtol);
  get_double("atol", cfg.atol);
  get_double("cons_tol", cfg.cons_tol);
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0) || !(cfg.cons_tol > 0.0))
    v.fail("rtol, atol and cons_tol must be > 0");

  if (has("seed")) {
    try {
      cfg.seed = std::stoull(raw("seed").value);
    } catch (const std::exception&) {
      v.fail_at(raw("seed").line, "seed: not an unsigned integer");
    }
  }
  get_int("replicas", cfg.replicas);
  get_int("particles", cfg.particles);
  get_bool("void_accepts", cfg.void_accepts);
  get_string("output_dir", cfg.output_dir);
  get_double("contraction.delta", cfg.contraction_delta);
  get_int("contraction.bump_bin", cfg.contraction_bump_bin);
  get_int("jobs", cfg.jobs);
  if (has("sweep.n_values")) {
    try {
      cfg.sweep_n = parse_double_list(raw("sweep.n_values").value);
    } catch (const std::exception&) {
      v.fail_at(raw("sweep.n_values").line, "sweep.n_values: bad number list");
    }
  }

  // mode-specific requirements
  if (v.ok()) {
    if (cfg.mode == RunMode::Ssa) {
      if (cfg.replicas < 1) v.fail("ssa mode requires replicas >= 1");
      if (cfg.particles < 2) v.fail("ssa mode requires particles >= 2");
    }
    if (cfg.mode == RunMode::Contraction && !(cfg.contraction_delta > 0.0))
      v.fail("contraction.delta must be > 0");
    if (cfg.mode == RunMode::TruncationSweep) {
      if (cfg.sweep_n.empty())
        v.fail("truncation_sweep mode requires sweep.n_values");
      for (double nv : cfg.sweep_n) {
        if (!(nv > 1.0)) v.fail("sweep.n_values entries must be > 1");
        // cells scale with n to keep dx fixed across the sweep
        const double scaled = cfg.cells * nv / cfg.n;
        if (std::abs(scaled - std::round(scaled)) > 1e-9)
          v.fail("sweep n=" + std::to_string(nv) +
                 " does not give an integer cell count at fixed dx");
      }
    }
  }

  v.finish(path);
  return cfg;
}

ScalarFn build_phi(const KernelSpec& spec) {
  if (spec.phi == "exp") return [](double z) { return std::exp(-z); };
  return piecewise_linear(read_xy_csv(spec.phi.substr(6)));
}

namespace {

struct EtaSpec {
  ScalarFn fn;
  double at_1;
  double star;  // sup_{x>=1} eta(x)/(1+x)
};

EtaSpec build_eta(const std::string& s) {
  if (s == "sqrt1p")
    return {[](double x) { return std::sqrt(1.0 + x); }, std::sqrt(2.0),
            1.0 / std::sqrt(2.0)};
  if (s.rfind("pow:", 0) == 0) {
    const double p = std::stod(s.substr(4));
    if (!(p >= 0.0) || !(p < 1.0))
      throw ConfigError("kernel.eta pow:<p> needs 0 <= p < 1");
    return {[p](double x) { return std::pow(1.0 + x, p); }, std::pow(2.0, p),
            std::pow(2.0, p - 1.0)};
  }
  if (s.rfind("const:", 0) == 0) {
    const double c = std::stod(s.substr(6));
    if (!(c >= 1.0)) throw ConfigError("kernel.eta const:<c> needs c >= 1");
    return {[c](double) { return c; }, c, c / 2.0};
  }
  throw ConfigError("unknown kernel.eta: " + s);
}

}  // namespace

Kernel build_kernel(const KernelSpec& spec) {
  ScalarFn phi = build_phi(spec);
  if (spec.type == "separable_sum")
    return make_separable_sum_kernel(spec.a, std::move(phi));
  if (spec.type == "separable_product") {
    EtaSpec eta = build_eta(spec.eta);
    return make_separable_product_kernel(spec.a, std::move(phi),
                                         std::move(eta.fn), eta.at_1,
                                         eta.star);
  }
  if (spec.type == "custom_table")
    return load_table_kernel(spec.table, spec.a, std::move(phi));
  throw ConfigError("unknown kernel.type: " + spec.type);
}

std::function<double(double)> build_ic(const std::string& ic) {
  if (ic == "exp") return [](double x) { return std::exp(-x); };
  if (ic.rfind("box:", 0) == 0) {
    const auto parts = parse_double_list(ic.substr(4));
    const double a = parts.at(0), b = parts.at(1);
    return [a, b](double x) { return (x > a && x < b) ? 1.0 : 0.0; };
  }
  if (ic.rfind("table:", 0) == 0)
    return piecewise_linear(read_xy_csv(ic.substr(6)));
  throw ConfigError("unknown ic: " + ic);
}

}  // namespace gedg
