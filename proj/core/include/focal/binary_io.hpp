#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "focal/error.hpp"

namespace focal::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

inline std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
  const std::uint32_t le = to_le(v);
  out.write(reinterpret_cast<const char*>(&le), 4);
}

inline void write_f32(std::ostream& out, std::span<const float> values) {
  for (const float f : values) write_u32(out, std::bit_cast<std::uint32_t>(f));
}

// Reads from a stream while tracking the byte offset for diagnostics.
class Reader {
 public:
  Reader(std::istream& in, std::string file) : in_(in), file_(std::move(file)) {}

  void read_bytes(void* dst, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError(file_, offset_ + static_cast<std::uint64_t>(in_.gcount()),
                        std::string("truncated while reading ") + what);
    }
    offset_ += n;
  }

  std::uint32_t u32(const char* what) {
    std::uint32_t v = 0;
    read_bytes(&v, 4, what);
    return to_le(v);
  }

  void f32(std::span<float> out, const char* what) {
    for (auto& f : out) f = std::bit_cast<float>(u32(what));
  }

  void expect_magic(const char (&magic)[5]) {
    char got[4];
    read_bytes(got, 4, "magic");
    if (std::memcmp(got, magic, 4) != 0) throw FormatError(file_, 0, std::string("bad magic, expected ") + magic);
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(file_, offset_, what); }

  std::uint64_t offset() const { return offset_; }
  const std::string& file() const { return file_; }

 private:
  std::istream& in_;
  std::string file_;
  std::uint64_t offset_ = 0;
};

}  // namespace focal::io
