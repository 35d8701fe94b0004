#pragma once

#include <stdexcept>
#include <string>

namespace opalg {

/// Shapes do not fit the requested operation (non-square, mismatched sizes, empty).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The truncated space is too small to hold the construction exactly.
class TruncationError : public std::invalid_argument {
 public:
  TruncationError(const std::string& what, std::size_t required)
      : std::invalid_argument(what), required_(required) {}

  std::size_t required_dimension() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// A caller-supplied argument is out of range or inconsistent with its context.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition of a certifier does not hold.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace opalg
