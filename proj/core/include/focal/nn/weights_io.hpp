#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "focal/nn/model.hpp"

namespace focal::nn {

// Binary weights file:
//   "FOCW" | u32 version | u32 K | u32 block count |
//   per block: u32 name length, UTF-8 name, u32 rank, rank x u32 dims,
//              prod(dims) x f32 values (row-major)
// All integers and floats little-endian.
inline constexpr std::uint32_t kWeightsVersion = 1;

void write_weights(std::ostream& out, const ModelWeights& weights);
ModelWeights read_weights(std::istream& in, const std::string& source_name = "<stream>");

void save_weights(const std::filesystem::path& path, const ModelWeights& weights);
ModelWeights load_weights(const std::filesystem::path& path);

}  // namespace focal::nn
