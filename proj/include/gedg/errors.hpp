#ifndef GEDG_ERRORS_HPP
#define GEDG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gedg {

/// Invalid or inconsistent configuration (bad cutoff, grid mismatch, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Ill-conditioned or non-finite data encountered at runtime.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Conservation drift beyond tolerance; signals a bug, aborts the run.
class ConservationError : public std::runtime_error {
 public:
  explicit ConservationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Too many consecutive step rejections; carries a diagnostic dump.
class StiffnessError : public std::runtime_error {
 public:
  explicit StiffnessError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gedg

#endif  // GEDG_ERRORS_HPP
