#pragma once

#include <stdexcept>
#include <string>

namespace ekfpnp {

// A point at or behind the camera plane. Carries the offending point index
// when the violation is tied to a specific point (-1 otherwise).
class CheiralityViolation : public std::runtime_error {
 public:
  explicit CheiralityViolation(int point_index = -1)
      : std::runtime_error("point at or behind the camera plane (index " +
                           std::to_string(point_index) + ")"),
        index_(point_index) {}

  int point_index() const noexcept { return index_; }

 private:
  int index_;
};

// Rank-deficient resectioning system (coplanar/collinear points).
class DegenerateConfiguration : public std::runtime_error {
 public:
  explicit DegenerateConfiguration(const std::string& what)
      : std::runtime_error(what) {}
};

// The innovation covariance could not be factorized.
class SingularInnovation : public std::runtime_error {
 public:
  explicit SingularInnovation(const std::string& what)
      : std::runtime_error(what) {}
};

// Translation estimate with zero norm; the relative error metric is undefined.
class ZeroEstimate : public std::runtime_error {
 public:
  explicit ZeroEstimate(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class InitializationFailure : public std::runtime_error {
 public:
  explicit InitializationFailure(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ekfpnp
