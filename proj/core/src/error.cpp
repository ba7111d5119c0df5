#include "focal/error.hpp"

namespace focal {

FormatError::FormatError(std::string file, std::uint64_t offset, const std::string& what)
    : std::runtime_error(file + " @ offset " + std::to_string(offset) + ": " + what),
      file_(std::move(file)),
      offset_(offset) {}

}  // namespace focal
