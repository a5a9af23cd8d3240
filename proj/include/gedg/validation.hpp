#ifndef GEDG_VALIDATION_HPP
#define GEDG_VALIDATION_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace gedg {

/// One recorded inequality violation: the sampled point, both sides of the
/// bound, and which bound was broken.
struct Violation {
  double x = 0.0, y = 0.0, z = 0.0;
  double lhs = 0.0, rhs = 0.0;
  std::string bound;
};

/// Outcome of a sampling-based check. Violations are data, not errors:
/// an empty list means the check passed on every sampled point.
struct ValidationReport {
  std::size_t samples = 0;
  std::size_t total_violations = 0;
  std::vector<Violation> violations;  // first `max_recorded` kept for reporting

  static constexpr std::size_t max_recorded = 64;

  bool pass() const { return total_violations == 0; }
  void record(const Violation& v) {
    ++total_violations;
    if (violations.size() < max_recorded) violations.push_back(v);
  }
};

}  // namespace gedg

#endif  // GEDG_VALIDATION_HPP
