#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lbm {

// Raised on malformed formula/knowledge-base/clause text. Carries the byte
// offset into the parsed buffer and, for multi-line inputs, a 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset, int line = -1)
      : std::runtime_error(msg), offset_(offset), line_(line) {}

  std::size_t offset() const noexcept { return offset_; }
  int line() const noexcept { return line_; }

 private:
  std::size_t offset_;
  int line_;
};

// Raised when an enumeration or clause-count guard would be exceeded.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lbm
