#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blcs {

/// A caller broke a documented precondition (alignment, balance, sizes).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A computation would exceed a configured resource cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter set or generator spec.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed bit-string text. `offset()` is the byte offset of the bad input.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::invalid_argument(what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace blcs
