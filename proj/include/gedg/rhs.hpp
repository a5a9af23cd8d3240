#ifndef GEDG_RHS_HPP
#define GEDG_RHS_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "gedg/grid.hpp"
#include "gedg/kernel.hpp"

namespace gedg {

/// Precomputed truncated event rates R_ijk = A_n(i dx, j dx; k dx) * dx
/// over the admissible triples {1 <= k <= i <= N, j >= 1, j+k <= N}
/// (j >= 0 when void clusters may accept). One event moves a cluster
/// from bin i to bin i-k and one from bin j to bin j+k, so every entry
/// conserves bin count and total lattice mass identically.
///
/// Storage is flat in (i, j, k) order with the k-run for each (i, j)
/// contiguous, which makes the accumulation in eval_rhs sequential.
/// Zero rates inside a run are stored but skipped by the entry view.
class EventTensor {
 public:
  EventTensor() = default;

  int cells() const { return cells_; }
  double dx() const { return dx_; }
  bool void_accepts() const { return j_min_ == 0; }

  /// Number of non-zero admissible entries.
  std::size_t entry_count() const;

  /// Visits non-zero entries as f(i, j, k, rate) in (i, j, k) order.
  template <class F>
  void for_each(F&& f) const {
    std::size_t p = 0;
    for (int i = 1; i <= cells_; ++i)
      for (int j = j_min_; j <= cells_ - 1; ++j) {
        const int len = run_length(i, j);
        for (int k = 1; k <= len; ++k, ++p)
          if (rate_[p] != 0.0) f(i, j, k, rate_[p]);
      }
  }

  int run_length(int i, int j) const {
    return j == 0 ? i : (j > cells_ - 1 ? 0 : std::min(i, cells_ - j));
  }

  const std::vector<double>& raw_rates() const { return rate_; }

  friend EventTensor assemble_event_tensor(const TruncatedKernel& tk,
                                           const SizeGrid& grid,
                                           bool void_accepts);
  friend Density eval_rhs(const Density& d, const EventTensor& et,
                          const SizeGrid& grid);

 private:
  int cells_ = 0;
  int j_min_ = 1;
  double dx_ = 0.0;
  std::vector<double> rate_;
};

/// Builds the rate tensor; O(N^2 N_z) kernel evaluations. Throws
/// ConfigError when the kernel cutoff and grid cutoff differ or when the
/// tensor would not fit in memory.
EventTensor assemble_event_tensor(const TruncatedKernel& tk,
                                  const SizeGrid& grid,
                                  bool void_accepts = false);

/// dc/dt: for each entry the flux f = R_ijk c_i c_j leaves bins i and j
/// and arrives in bins i-k and j+k (i-k may be the void bin). Summation
/// order is fixed, so results are bitwise reproducible.
Density eval_rhs(const Density& d, const EventTensor& et, const SizeGrid& grid);

/// sum over entries of [w(j+k) + w(i-k) - w(i) - w(j)] R_ijk c_i c_j;
/// an independent evaluation of <w, eval_rhs(d)>. Vanishes identically
/// for w == 1 and w == mass.
double weak_form_rate(const Density& d, const EventTensor& et,
                      const SizeGrid& grid,
                      const std::function<double(int)>& omega);

/// The four classical flux groups, split per destination/source channel
/// (debug view; their sum equals eval_rhs):
///   gain_donor   -- donors landing at i-k        (B1)
///   loss_acceptor-- acceptors leaving j          (D1)
///   gain_acceptor-- acceptors landing at j+k     (B2)
///   loss_donor   -- donors leaving i             (D2)
struct RhsSplit {
  Density gain_donor, loss_acceptor, gain_acceptor, loss_donor;
};
RhsSplit eval_rhs_split(const Density& d, const EventTensor& et,
                        const SizeGrid& grid);

}  // namespace gedg

#endif  // GEDG_RHS_HPP
