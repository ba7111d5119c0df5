#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace focal {

// Incremental 64-bit FNV-1a. Used for reproducibility digests and cache keys,
// not for anything security related.
class Fnv1a {
 public:
  Fnv1a& update(std::span<const std::byte> bytes);
  Fnv1a& update(std::string_view text);
  template <typename T>
  Fnv1a& update_pod(const T& value) {
    return update(std::as_bytes(std::span<const T>(&value, 1)));
  }
  template <typename T>
  Fnv1a& update_values(std::span<const T> values) {
    return update(std::as_bytes(values));
  }

  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t digest);

}  // namespace focal
