#ifndef TFNET_ERROR_HPP
#define TFNET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tfnet {

// Shape or dimension disagreement between tensors/operators.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed manifest, config file or checkpoint.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or contradictory configuration (e.g. both branches disabled).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Label sequence cannot be aligned to the available time steps.
// Distinct from NumericError so callers can skip infeasible entries.
class InfeasibleLabelError : public std::runtime_error {
 public:
  explicit InfeasibleLabelError(const std::string& what)
      : std::runtime_error(what) {}
};

// Non-finite value encountered where finiteness is required.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure (missing file, unwritable directory, short read).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tfnet

#endif  // TFNET_ERROR_HPP
