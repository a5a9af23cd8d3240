#ifndef GEDG_KERNEL_HPP
#define GEDG_KERNEL_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gedg/quadrature.hpp"
#include "gedg/validation.hpp"

namespace gedg {

/// Which growth-bound family the kernel claims to belong to.
enum class KernelClass { Sum, Product, Custom };

/// Factored form a*fx(x)*fy(y)*phi(z) on z<=x. Kernels built from the
/// stock families carry this so that hot paths (pair rates, SSA sums)
/// can avoid per-pair quadrature.
struct SeparableForm {
  double scale = 1.0;
  ScalarFn fx;
  ScalarFn fy;
};

/// Exchange rate density A(x,y;z): donor mass x sheds a chunk of mass z
/// onto an acceptor of mass y. Rates vanish for z > x (a donor cannot
/// shed more than itself); z = x is allowed and produces a void cluster.
/// Immutable after construction and safe to share across threads.
class Kernel {
 public:
  using EvalFn = std::function<double(double, double, double)>;

  Kernel(EvalFn raw, KernelClass tag, double a_const, ScalarFn phi,
         ScalarFn eta = {}, double eta_star = 0.0);

  /// Rate at (x,y,z). Zero outside the physical domain (z > x, z <= 0,
  /// x <= 0); throws std::domain_error on non-finite input.
  double operator()(double x, double y, double z) const;

  KernelClass class_tag() const { return tag_; }
  double a_const() const { return a_const_; }
  double phi(double z) const { return phi_(z); }
  const ScalarFn& phi_fn() const { return phi_; }
  bool has_eta() const { return static_cast<bool>(eta_); }
  double eta(double x) const { return eta_(x); }
  double eta_star() const { return eta_star_; }
  const std::optional<SeparableForm>& separable() const { return separable_; }

  void set_separable(SeparableForm s) { separable_ = std::move(s); }

 private:
  EvalFn raw_;
  KernelClass tag_;
  double a_const_;
  ScalarFn phi_;
  ScalarFn eta_;
  double eta_star_;
  std::optional<SeparableForm> separable_;
};

/// a * phi(z) on z<=x; constant in (x,y), so the sum-class bound holds
/// with constant a.
Kernel make_separable_sum_kernel(double a, ScalarFn phi);

/// a * eta(x)*eta(y)*phi(z) on z<=x, with eta: (0,inf) -> [1,inf)
/// nondecreasing. The claimed product-class constant is a*eta(1)^2 (the
/// worst case sits at the corner of the unit square). `eta_star` is
/// sup_{x>=1} eta(x)/(1+x), supplied analytically by the caller.
Kernel make_separable_product_kernel(double a, ScalarFn phi, ScalarFn eta,
                                     double eta_at_1, double eta_star);

/// Arbitrary closure with Custom tag; only the universal bound
/// a_const*(1+x)(1+y)*phi(z) is claimed.
Kernel make_custom_kernel(Kernel::EvalFn eval, double a_const, ScalarFn phi);

/// Rectilinear (x,y,z) sample table, trilinearly interpolated.
struct KernelTable {
  std::vector<double> xs, ys, zs;
  std::vector<double> values;  // ((ix*ny)+iy)*nz+iz
  double interpolate(double x, double y, double z) const;
};

/// Load a table kernel from a JSON file {"x":[...],"y":[...],"z":[...],
/// "values":[...]}; rejects tables that violate the physical constraint
/// (non-zero values at z > x).
Kernel load_table_kernel(const std::string& path, double a_const, ScalarFn phi);

/// Restriction of a kernel to the truncated domain: donors up to n and
/// reaction products up to n. On the mass lattice the cutoff is kept
/// inclusive so that bin N (mass exactly n) participates.
class TruncatedKernel {
 public:
  TruncatedKernel(Kernel base, double n);
  double operator()(double x, double y, double z) const;
  const Kernel& base() const { return base_; }
  double cutoff() const { return n_; }

 private:
  Kernel base_;
  double n_;
};

/// Requires n > 1 (the truncated problem is only posed there).
TruncatedKernel truncate_kernel(const Kernel& k, double n);

struct ValidateOptions {
  bool check_derivatives = false;  // finite-difference check of the slope bounds
  double rel_slack = 1e-9;
};

/// Sampling check of every bound the kernel's class claims: physical
/// constraint, per-class growth bound, universal bound, eta codomain.
ValidationReport validate_class(const Kernel& k, std::size_t samples,
                                std::uint64_t seed,
                                const ValidateOptions& opt = {});

/// Total donor->acceptor transfer rate K(u,v) = integral of A(u,v;w)
/// over w in (0,u], composite midpoint with `quad_cells` cells.
double pair_rate(const Kernel& k, double u, double v, int quad_cells = 256);

/// Inverse-CDF sampler for the chunk mass w ~ A(u,v;.)/K(u,v) on (0,u],
/// built once on a midpoint grid and then read-only.
class ChunkSampler {
 public:
  ChunkSampler(const Kernel& k, double u, double v, int cells = 1024);

  double total() const { return total_; }

  /// Maps a uniform variate in (0,1] to a chunk mass in (0,u].
  double sample(double unit) const;

  template <class Rng>
  double operator()(Rng& rng) const {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    return sample(1.0 - dist(rng));  // (0,1] so draws stay strictly positive
  }

 private:
  double u_;
  double h_;
  double total_;
  std::vector<double> cum_;  // cumulative integral at cell right edges
};

/// One draw of the chunk mass; throws std::logic_error if the slice has
/// zero total rate (the caller must not request an event with rate 0).
double sample_chunk(const Kernel& k, double u, double v, std::mt19937_64& rng,
                    int cells = 1024);

}  // namespace gedg

#endif  // GEDG_KERNEL_HPP
