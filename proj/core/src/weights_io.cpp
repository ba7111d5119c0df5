#include "focal/nn/weights_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "focal/binary_io.hpp"

namespace focal::nn {
namespace {

constexpr std::uint32_t kMaxRank = 8;
constexpr std::uint32_t kMaxNameLength = 1024;

}  // namespace

void write_weights(std::ostream& out, const ModelWeights& weights) {
  out.write("FOCW", 4);
  io::write_u32(out, kWeightsVersion);
  io::write_u32(out, weights.num_classes);
  io::write_u32(out, static_cast<std::uint32_t>(weights.blocks.size()));
  for (const auto& b : weights.blocks) {
    if (b.values.size() != b.element_count()) throw ShapeError("block " + b.name + ": value count does not match dims");
    io::write_u32(out, static_cast<std::uint32_t>(b.name.size()));
    out.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    io::write_u32(out, static_cast<std::uint32_t>(b.dims.size()));
    for (const auto d : b.dims) io::write_u32(out, d);
    io::write_f32(out, b.values);
  }
}

ModelWeights read_weights(std::istream& in, const std::string& source_name) {
  io::Reader r(in, source_name);
  r.expect_magic("FOCW");
  const auto version = r.u32("version");
  if (version != kWeightsVersion) r.fail("unsupported weights version " + std::to_string(version));
  ModelWeights w;
  w.num_classes = r.u32("class count");
  const auto count = r.u32("block count");
  for (std::uint32_t i = 0; i < count; ++i) {
    ParamBlock b;
    const auto name_len = r.u32("name length");
    if (name_len > kMaxNameLength) r.fail("block name too long");
    b.name.resize(name_len);
    r.read_bytes(b.name.data(), name_len, "block name");
    const auto rank = r.u32("rank");
    if (rank == 0 || rank > kMaxRank) r.fail("block " + b.name + ": unsupported rank " + std::to_string(rank));
    std::uint64_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      b.dims.push_back(r.u32("dimension"));
      n *= b.dims.back();
    }
    if (n > (std::uint64_t{1} << 32)) r.fail("block " + b.name + " is implausibly large");
    b.values.resize(static_cast<std::size_t>(n));
    r.f32(b.values, "block values");
    w.blocks.push_back(std::move(b));
  }
  return w;
}

void save_weights(const std::filesystem::path& path, const ModelWeights& weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_weights(out, weights);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ModelWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open weights file");
  auto w = read_weights(in, path.string());
  try {
    w.validate();
  } catch (const ShapeError& e) {
    throw FormatError(path.string(), 0, e.what());
  }
  return w;
}

}  // namespace focal::nn
