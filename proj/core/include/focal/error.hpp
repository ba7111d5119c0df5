#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace focal {

// Malformed or truncated input data. Carries the offending file and the byte
// offset where parsing stopped so that diagnostics can point at it.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string file, std::uint64_t offset, const std::string& what);

  const std::string& file() const { return file_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::string file_;
  std::uint64_t offset_;
};

// Tensor or grid dimensions that do not agree with what an operation expects.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace focal
