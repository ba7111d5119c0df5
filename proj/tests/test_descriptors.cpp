#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "focal/codec/codec.hpp"
#include "focal/codec/texture.hpp"
#include "focal/descriptor_cache.hpp"
#include "focal/descriptors.hpp"
#include "focal/error.hpp"
#include "focal/nn/model.hpp"
#include "focal/random.hpp"

using namespace focal;

namespace {

const nn::ModelWeights& codec_model() {
  static const auto m = nn::init_weights({4, 16, false}, 31);
  return m;
}

const nn::ModelWeights& quality_model() {
  static const auto m = nn::init_weights({4, 16, false}, 32);
  return m;
}

FeatureTensor random_tensor(Rng& rng, PatchGrid grid, int length) {
  FeatureTensor t(grid, length);
  for (auto& v : t.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return t;
}

float sum(std::span<const float> v) { return std::accumulate(v.begin(), v.end(), 0.0f); }

}  // namespace

TEST_CASE("patch descriptors are two distributions and pure") {
  const auto frame = codec::gen_texture(64, 64, 1, 3).frames[0];
  const auto d = patch_descriptor(frame.pixels, codec_model(), quality_model());
  CHECK(sum(d.codec) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sum(d.quality) == doctest::Approx(1.0).epsilon(1e-6));
  for (const float v : d.concatenated()) CHECK(v >= 0.0f);
  CHECK(sum(d.concatenated()) == doctest::Approx(2.0).epsilon(2e-6));
  const auto again = patch_descriptor(frame.pixels, codec_model(), quality_model());
  CHECK(again.concatenated() == d.concatenated());

  const auto two = nn::init_weights({2, 16, false}, 1);
  CHECK_THROWS_AS(patch_descriptor(frame.pixels, two, quality_model()), std::invalid_argument);
}

TEST_CASE("frame descriptor averages each block") {
  PatchDescriptor a;
  a.codec = {1, 0, 0, 0};
  a.quality = {0, 0, 0.5f, 0.5f};
  PatchDescriptor b;
  b.codec = {0, 1, 0, 0};
  b.quality = {0, 0, 0.5f, 0.5f};
  const PatchDescriptor both[] = {a, b};
  const auto f = frame_descriptor(both, 7);
  CHECK(f.frame_index == 7);
  CHECK(f.f == std::vector<float>{0.5f, 0.5f, 0, 0, 0, 0, 0.5f, 0.5f});
  const PatchDescriptor same[] = {a, a, a};
  const auto whole = a.concatenated();
  CHECK(frame_descriptor(same).f == std::vector<float>(whole.begin(), whole.end()));
  CHECK_THROWS_AS(frame_descriptor(std::span<const PatchDescriptor>{}), std::invalid_argument);
}

TEST_CASE("feature tensor layout and slicing") {
  const auto g = make_grid(704, 576, 8);
  const FeatureTensor shape(g, kPairLength);
  CHECK(shape.count_u() == 81);
  CHECK(shape.count_v() == 65);
  CHECK(shape.length() == 8);

  const codec::VideoSequence v = codec::gen_texture(128, 96, 1, 4);
  const DescriptorExtractor ex(codec_model(), quality_model());
  CHECK(ex.length() == 8);
  const auto t = ex.feature_tensor(v.frames[0], 32);
  REQUIRE(t.count_u() == 3);
  REQUIRE(t.count_v() == 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      std::vector<float> patch(64 * 64);
      copy_patch(v.frames[0], t.grid(), i, j, patch);
      const auto d = patch_descriptor(patch, codec_model(), quality_model()).concatenated();
      for (int k = 0; k < 8; ++k) CHECK(t.at(i, j, k) == doctest::Approx(d[k]).epsilon(1e-6));
      CHECK(sum(t.cell(i, j).subspan(0, 4)) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  const auto codec_part = t.slice(kCodecOffset, 4);
  const auto quality_part = t.slice(kQualityOffset, 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(codec_part.feature_map(k) == t.feature_map(k));
    CHECK(quality_part.feature_map(k) == t.feature_map(4 + k));
  }
  CHECK(t.feature_map(2).size() == 6);
  CHECK(t.feature_map(2)[t.grid().index(1, 1)] == doctest::Approx(t.at(1, 1, 2)));
  CHECK_THROWS_AS(t.slice(6, 4), std::out_of_range);
  CHECK_THROWS_AS(t.feature_map(8), std::out_of_range);

  const auto fd = frame_descriptor(t);
  CHECK(sum(std::span<const float>(fd.f).subspan(0, 4)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sum(std::span<const float>(fd.f).subspan(4, 4)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("extra registered models lengthen the descriptor") {
  DescriptorExtractor ex(codec_model(), quality_model());
  const auto third = nn::init_weights({3, 16, false}, 40);
  ex.add_model(third);
  CHECK(ex.length() == 11);
  const auto frame = codec::gen_texture(64, 64, 1, 8).frames[0];
  const auto t = ex.feature_tensor(frame, 64);
  CHECK(t.length() == 11);
  CHECK(sum(t.cell(0, 0).subspan(8, 3)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(DescriptorExtractor{}.feature_tensor(frame, 64), std::logic_error);
}

TEST_CASE("temporal average") {
  Rng rng(6);
  const PatchGrid g{8, 4, 3};
  const auto a = random_tensor(rng, g, 8);
  const auto b = random_tensor(rng, g, 8);
  const FeatureTensor one[] = {a};
  CHECK(temporal_average(one) == a);
  const FeatureTensor same[] = {a, a, a};
  const auto avg_same = temporal_average(same);
  for (std::size_t k = 0; k < a.data().size(); ++k) CHECK(avg_same.data()[k] == doctest::Approx(a.data()[k]));
  const FeatureTensor pair[] = {a, b};
  const auto avg = temporal_average(pair);
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    CHECK(avg.data()[k] == doctest::Approx((a.data()[k] + b.data()[k]) / 2));
  }
  const FeatureTensor mixed[] = {a, FeatureTensor(PatchGrid{8, 3, 3}, 8)};
  CHECK_THROWS_AS(temporal_average(mixed), std::invalid_argument);
  CHECK_THROWS_AS(temporal_average(std::span<const FeatureTensor>{}), std::invalid_argument);
}

TEST_CASE("descriptor cache round-trips bit-exactly") {
  Rng rng(9);
  const PatchGrid g{8, 5, 4};
  std::vector<FeatureTensor> frames;
  for (int n = 0; n < 3; ++n) frames.push_back(random_tensor(rng, g, 8));
  frames[1].at(2, 2, 3) = -0.0f;
  std::stringstream buf;
  write_descriptor_cache(buf, frames);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "FOCD");
  CHECK(bytes.size() == 20 + 3 * 5 * 4 * 8 * 4);
  const auto back = read_descriptor_cache(buf, 8);
  CHECK(back == frames);
  CHECK(std::signbit(back[1].at(2, 2, 3)));

  std::stringstream bad("FOCX" + bytes.substr(4));
  CHECK_THROWS_AS(read_descriptor_cache(bad, 8), FormatError);
  std::stringstream cut(bytes.substr(0, bytes.size() - 3));
  try {
    read_descriptor_cache(cut, 8, "c.focd");
    FAIL("expected a FormatError");
  } catch (const FormatError& e) {
    CHECK(e.file() == "c.focd");
    CHECK(e.offset() == bytes.size() - 3);
  }
  const FeatureTensor mismatched[] = {frames[0], FeatureTensor(PatchGrid{8, 1, 1}, 8)};
  std::stringstream sink;
  CHECK_THROWS_AS(write_descriptor_cache(sink, mismatched), ShapeError);
}

TEST_CASE("descriptor cache directory computes once then hits") {
  const auto dir = std::filesystem::temp_directory_path() / "focal_test_cache";
  std::filesystem::remove_all(dir);
  DescriptorCache cache(dir);
  const DescriptorExtractor ex(codec_model(), quality_model());
  const auto v = codec::gen_texture(64, 64, 2, 10);
  const auto first = cache.tensors(v, 64, ex);
  const auto second = cache.tensors(v, 64, ex);
  CHECK(cache.misses() == 1);
  CHECK(cache.hits() == 1);
  CHECK(first == second);
  CHECK(first == video_tensors(v, 64, ex));
  CHECK(cache.path_for(1, 2, 8) != cache.path_for(1, 2, 64));
  CHECK(cache.path_for(1, 2, 8) != cache.path_for(1, 3, 8));
  auto other = v;
  other.frames[1].pixels[0] += 1.0f;
  CHECK(video_digest(other) != video_digest(v));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a homogeneous frame has flatter maps than a spliced one") {
  const auto frame = codec::gen_texture(256, 256, 1, 14).frames[0];
  const auto host = codec::encode_frame(frame, {codec::Flavor::A, 5.0});
  const auto donor = codec::encode_frame(frame, {codec::Flavor::D, 40.0});
  auto spliced = host;
  for (int y = 64; y < 192; ++y) {
    for (int x = 64; x < 192; ++x) spliced.at(x, y) = donor.at(x, y);
  }
  const DescriptorExtractor ex(codec_model(), quality_model());
  const auto spread = [&](const codec::Frame& f) {
    const auto t = ex.feature_tensor(f, 32);
    double total = 0.0;
    for (int k = 0; k < 8; ++k) {
      const auto m = t.feature_map(k);
      const double mean = std::accumulate(m.begin(), m.end(), 0.0) / m.size();
      double var = 0.0;
      for (const double x : m) var += (x - mean) * (x - mean);
      total += var / m.size();
    }
    return total;
  };
  CHECK(spread(host) < spread(spliced));
}
