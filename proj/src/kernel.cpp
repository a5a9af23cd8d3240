#include "gedg/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gedg/errors.hpp"
#include "json.hpp"

namespace gedg {

Kernel::Kernel(EvalFn raw, KernelClass tag, double a_const, ScalarFn phi,
               ScalarFn eta, double eta_star)
    : raw_(std::move(raw)),
      tag_(tag),
      a_const_(a_const),
      phi_(std::move(phi)),
      eta_(std::move(eta)),
      eta_star_(eta_star) {
  if (!(a_const_ >= 0.0)) throw ConfigError("kernel constant must be >= 0");
  if (tag_ == KernelClass::Product && !eta_)
    throw ConfigError("product-class kernel needs an eta envelope");
}

double Kernel::operator()(double x, double y, double z) const {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
    throw std::domain_error("kernel evaluated at non-finite point");
  if (z > x || z <= 0.0 || x <= 0.0 || y < 0.0) return 0.0;
  return raw_(x, y, z);
}

Kernel make_separable_sum_kernel(double a, ScalarFn phi) {
  ScalarFn p = phi;
  Kernel k([a, p](double, double, double z) { return a * p(z); },
           KernelClass::Sum, a, phi);
  k.set_separable({a, [](double) { return 1.0; }, [](double) { return 1.0; }});
  return k;
}

Kernel make_separable_product_kernel(double a, ScalarFn phi, ScalarFn eta,
                                     double eta_at_1, double eta_star) {
  ScalarFn p = phi, e = eta;
  Kernel k([a, p, e](double x, double y, double z) {
             return a * e(x) * e(y) * p(z);
           },
           KernelClass::Product, a * eta_at_1 * eta_at_1, phi, eta, eta_star);
  k.set_separable({a, eta, eta});
  return k;
}

Kernel make_custom_kernel(Kernel::EvalFn eval, double a_const, ScalarFn phi) {
  return Kernel(std::move(eval), KernelClass::Custom, a_const, std::move(phi));
}

double KernelTable::interpolate(double x, double y, double z) const {
  auto locate = [](const std::vector<double>& ax, double q, double& t) {
    if (ax.size() == 1) {
      t = 0.0;
      return std::size_t{0};
    }
    auto it = std::upper_bound(ax.begin(), ax.end(), q);
    std::size_t hi = static_cast<std::size_t>(it - ax.begin());
    std::size_t lo = hi == 0 ? 0 : hi - 1;
    if (lo >= ax.size() - 1) lo = ax.size() - 2;
    t = (q - ax[lo]) / (ax[lo + 1] - ax[lo]);
    t = std::clamp(t, 0.0, 1.0);
    return lo;
  };
  double tx, ty, tz;
  const std::size_t ix = locate(xs, x, tx);
  const std::size_t iy = locate(ys, y, ty);
  const std::size_t iz = locate(zs, z, tz);
  const std::size_t ny = ys.size(), nz = zs.size();
  auto at = [&](std::size_t a, std::size_t b, std::size_t c) {
    return values[(a * ny + b) * nz + c];
  };
  const std::size_t ix1 = xs.size() == 1 ? ix : ix + 1;
  const std::size_t iy1 = ys.size() == 1 ? iy : iy + 1;
  const std::size_t iz1 = zs.size() == 1 ? iz : iz + 1;
  double c00 = at(ix, iy, iz) * (1 - tx) + at(ix1, iy, iz) * tx;
  double c10 = at(ix, iy1, iz) * (1 - tx) + at(ix1, iy1, iz) * tx;
  double c01 = at(ix, iy, iz1) * (1 - tx) + at(ix1, iy, iz1) * tx;
  double c11 = at(ix, iy1, iz1) * (1 - tx) + at(ix1, iy1, iz1) * tx;
  double c0 = c00 * (1 - ty) + c10 * ty;
  double c1 = c01 * (1 - ty) + c11 * ty;
  return c0 * (1 - tz) + c1 * tz;
}

Kernel load_table_kernel(const std::string& path, double a_const,
                         ScalarFn phi) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open kernel table: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("kernel table " + path + ": " + e.what());
  }
  auto table = std::make_shared<KernelTable>();
  auto read_axis = [&](const char* name, std::vector<double>& out) {
    if (!j.contains(name))
      throw ConfigError("kernel table " + path + ": missing axis " + name);
    out = j[name].get<std::vector<double>>();
    if (out.empty() || !std::is_sorted(out.begin(), out.end()))
      throw ConfigError(std::string("kernel table axis ") + name +
                        " must be ascending and non-empty");
  };
  read_axis("x", table->xs);
  read_axis("y", table->ys);
  read_axis("z", table->zs);
  table->values = j.at("values").get<std::vector<double>>();
  if (table->values.size() !=
      table->xs.size() * table->ys.size() * table->zs.size())
    throw ConfigError("kernel table values size does not match axes");
  const std::size_t ny = table->ys.size(), nz = table->zs.size();
  for (std::size_t a = 0; a < table->xs.size(); ++a)
    for (std::size_t b = 0; b < ny; ++b)
      for (std::size_t c = 0; c < nz; ++c) {
        const double v = table->values[(a * ny + b) * nz + c];
        if (!std::isfinite(v) || v < 0.0)
          throw ConfigError("kernel table has a negative or non-finite entry");
        if (table->zs[c] > table->xs[a] && v != 0.0)
          throw ConfigError(
              "kernel table violates the physical constraint (z > x with "
              "non-zero rate)");
      }
  return make_custom_kernel(
      [table](double x, double y, double z) {
        return table->interpolate(x, y, z);
      },
      a_const, std::move(phi));
}

TruncatedKernel::TruncatedKernel(Kernel base, double n)
    : base_(std::move(base)), n_(n) {
  if (!(n_ > 1.0)) throw ConfigError("truncation cutoff must satisfy n > 1");
}

double TruncatedKernel::operator()(double x, double y, double z) const {
  if (x > n_ || y + z > n_) return 0.0;
  return base_(x, y, z);
}

TruncatedKernel truncate_kernel(const Kernel& k, double n) {
  return TruncatedKernel(k, n);
}

namespace {

bool above(double lhs, double rhs, double rel_slack) {
  return lhs > rhs + rel_slack * std::abs(rhs) + 1e-300;
}

}  // namespace

ValidationReport validate_class(const Kernel& k, std::size_t samples,
                                std::uint64_t seed,
                                const ValidateOptions& opt) {
  ValidationReport report;
  report.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // log-uniform masses across four decades so both growth regimes get hit
  auto draw_mass = [&] { return std::pow(10.0, -2.0 + 4.0 * unit(rng)); };

  for (std::size_t s = 0; s < samples; ++s) {
    const double x = draw_mass();
    const double y = draw_mass();
    const double z = x * unit(rng);
    if (z <= 0.0) continue;
    const double v = k(x, y, z);
    const double phi_z = k.phi(z);
    const double a = k.a_const();

    if (!(v >= 0.0))
      report.record({x, y, z, v, 0.0, "nonnegative"});
    // physical constraint: any chunk strictly heavier than the donor
    const double zbig = x * (1.0 + unit(rng)) + 0.125;
    const double vbig = k(x, y, zbig);
    if (vbig != 0.0) report.record({x, y, zbig, vbig, 0.0, "physical z<=x"});

    const double universal = a * (1.0 + x) * (1.0 + y) * phi_z;
    if (above(v, universal, opt.rel_slack))
      report.record({x, y, z, v, universal, "universal (1+x)(1+y)phi"});

    if (k.class_tag() == KernelClass::Sum) {
      const double sxy = x + y;
      if (sxy != 1.0) {
        const double bound = sxy < 1.0 ? a * phi_z : a * sxy * phi_z;
        if (above(v, bound, opt.rel_slack))
          report.record({x, y, z, v, bound, "sum-class"});
      }
    } else if (k.class_tag() == KernelClass::Product) {
      const double ex = x > 1.0 ? k.eta(x) : 1.0;
      const double ey = y > 1.0 ? k.eta(y) : 1.0;
      if (x != 1.0 && y != 1.0) {
        const double bound = a * ex * ey * phi_z;
        if (above(v, bound, opt.rel_slack))
          report.record({x, y, z, v, bound, "product-class"});
      }
      if (x > 1.0) {
        if (!(k.eta(x) >= 1.0) || !std::isfinite(k.eta(x)))
          report.record({x, y, z, k.eta(x), 1.0, "eta codomain [1,inf)"});
        const double ratio = k.eta(x) / (1.0 + x);
        if (above(ratio, k.eta_star(), opt.rel_slack))
          report.record({x, y, z, ratio, k.eta_star(), "eta_star"});
      }
    }

    if (opt.check_derivatives) {
      // central differences, keeping the stencil inside the smooth region
      const double hx = 1e-5 * std::max(1.0, x);
      if (x - hx > z) {
        const double d = (k(x + hx, y, z) - k(x - hx, y, z)) / (2.0 * hx);
        const double bound = a * (1.0 + y) * phi_z;
        if (above(d, bound, 1e-5))
          report.record({x, y, z, d, bound, "dA/dx"});
      }
      const double hy = 1e-5 * std::max(1.0, y);
      if (y - hy > 0.0) {
        const double d = (k(x, y + hy, z) - k(x, y - hy, z)) / (2.0 * hy);
        const double bound = a * (1.0 + x) * phi_z;
        if (above(d, bound, 1e-5))
          report.record({x, y, z, d, bound, "dA/dy"});
      }
    }
  }
  return report;
}

double pair_rate(const Kernel& k, double u, double v, int quad_cells) {
  if (quad_cells < 16) throw std::logic_error("pair_rate needs >= 16 cells");
  if (!(u > 0.0)) return 0.0;
  if (const auto& sep = k.separable()) {
    const double amp = sep->scale * sep->fx(u) * sep->fy(v);
    if (amp == 0.0) return 0.0;
    return amp * integrate_midpoint(k.phi_fn(), 0.0, u, quad_cells);
  }
  return integrate_midpoint([&](double w) { return k(u, v, w); }, 0.0, u,
                            quad_cells);
}

ChunkSampler::ChunkSampler(const Kernel& k, double u, double v, int cells)
    : u_(u), h_(u / cells), total_(0.0), cum_(static_cast<std::size_t>(cells)) {
  double acc = 0.0;
  for (int m = 0; m < cells; ++m) {
    const double w = (m + 0.5) * h_;
    acc += k(u, v, w) * h_;
    cum_[static_cast<std::size_t>(m)] = acc;
  }
  total_ = acc;
}

double ChunkSampler::sample(double unit) const {
  const double target = unit * total_;
  auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  if (it == cum_.end()) return u_;
  const std::size_t m = static_cast<std::size_t>(it - cum_.begin());
  const double lo = m == 0 ? 0.0 : cum_[m - 1];
  const double mass = cum_[m] - lo;
  double w = m * h_ + (mass > 0.0 ? h_ * (target - lo) / mass : 0.5 * h_);
  if (w <= 0.0) w = std::nextafter(0.0, u_);
  return std::min(w, u_);
}

double sample_chunk(const Kernel& k, double u, double v, std::mt19937_64& rng,
                    int cells) {
  ChunkSampler sampler(k, u, v, cells);
  if (!(sampler.total() > 0.0))
    throw std::logic_error("sample_chunk called with zero total rate");
  return sampler(rng);
}

}  // namespace gedg
