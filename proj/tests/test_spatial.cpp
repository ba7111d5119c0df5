#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "focal/error.hpp"
#include "focal/random.hpp"
#include "focal/spatial.hpp"
#include "oracles.hpp"

using namespace focal;

namespace {

ActivationMap map2x2(double a, double b, double c, double d) { return {2, 2, {a, b, c, d}, -1}; }

ActivationMap random_map(Rng& rng, int u, int v) {
  ActivationMap m{u, v, std::vector<double>(static_cast<std::size_t>(u) * v), -1};
  for (auto& x : m.values) x = rng.uniform(0.0, 1.0);
  return m;
}

// Overlap-average upsampling computed pixel by pixel from the covering cells.
std::vector<double> box_upsample(const ActivationMap& m, int width, int height, int stride) {
  const auto [lo, hi] = std::minmax_element(m.values.begin(), m.values.end());
  std::vector<double> out(static_cast<std::size_t>(width) * height, 0.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double sum = 0.0;
      int n = 0;
      for (int i = 0; i < m.count_u; ++i) {
        for (int j = 0; j < m.count_v; ++j) {
          if (x >= i * stride && x < i * stride + 64 && y >= j * stride && y < j * stride + 64) {
            sum += 255.0 * (m.at(i, j) - *lo) / (*hi - *lo);
            ++n;
          }
        }
      }
      out[static_cast<std::size_t>(y) * width + x] = n ? sum / n : 0.0;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("activation map") {
  const std::vector<double> constant(6, 0.3);
  for (const double v : activation_map(constant, 2, 3).values) CHECK(v == 0.0);
  const std::vector<double> two{0.0, 1.0};
  CHECK(activation_map(two, 1, 2).values == std::vector<double>{0.25, 0.25});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto f = oracle::uniform_values(rng, 35, 0.0, 1.0);
    double mean = 0.0;
    for (const double v : f) mean += v;
    mean /= 35.0;
    double var = 0.0;
    for (const double v : f) var += (v - mean) * (v - mean);
    var /= 35.0;
    const auto h = activation_map(f, 5, 7, 3);
    CHECK(h.source == 3);
    double hm = 0.0;
    for (const double v : h.values) {
      CHECK(v >= 0.0);
      hm += v;
    }
    CHECK(hm / 35.0 == doctest::Approx(var).epsilon(1e-12));
  }
  CHECK_THROWS_AS(activation_map(std::vector<double>{}, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(activation_map(two, 2, 2), std::invalid_argument);
}

TEST_CASE("normalized entropy and VER") {
  CHECK(normalized_entropy(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(normalized_entropy(std::vector<double>{1, 1, 1, 1}) == doctest::Approx(2.0));
  CHECK(normalized_entropy(std::vector<double>{5, 0, 0, 0}) == 0.0);
  CHECK(ver(map2x2(0.7, 0.7, 0.7, 0.7)) == 0.0);

  // Same variance: one spike versus activation over half the cells.
  ActivationMap spike{4, 4, std::vector<double>(16, 0.0), -1};
  spike.values[5] = 1.0;
  const double spike_var = 1.0 / 16 - 1.0 / 256;
  const double a = std::sqrt(spike_var) * 2.0;  // half the cells at a gives variance a^2 / 4
  ActivationMap spread{4, 4, std::vector<double>(16, 0.0), -1};
  for (int k = 0; k < 8; ++k) spread.values[static_cast<std::size_t>(k)] = a;
  CHECK(ver(spike) > ver(spread));

  Rng rng(3);
  const auto m1 = random_map(rng, 3, 3);
  const auto m2 = random_map(rng, 3, 3);
  auto s1 = m1;
  auto s2 = m2;
  for (auto& v : s1.values) v *= 7.0;
  for (auto& v : s2.values) v *= 7.0;
  CHECK(normalized_entropy(s1.values) == doctest::Approx(normalized_entropy(m1.values)).epsilon(1e-12));
  CHECK((ver(m1) < ver(m2)) == (ver(s1) < ver(s2)));
}

TEST_CASE("fusion matches a hand-computed weighted average") {
  // Map 1 (1,0,0,0): mean 1/4, var 3/16, entropy 0.
  // Map 2 (1,1,0,0): mean 1/2, var 1/4, entropy 1 bit.
  // Map 3 (1,2,3,4): mean 5/2, var 5/4, entropy of (.1,.2,.3,.4).
  const ActivationMap maps[] = {map2x2(1, 0, 0, 0), map2x2(1, 1, 0, 0), map2x2(1, 2, 3, 4)};
  const double h3 = -(0.1 * std::log2(0.1) + 0.2 * std::log2(0.2) + 0.3 * std::log2(0.3) + 0.4 * std::log2(0.4));
  const double w[] = {0.1875 / 1e-9, 0.25 / (1.0 + 1e-9), 1.25 / (h3 + 1e-9)};
  const auto fused = fuse(maps);
  REQUIRE(fused.weights.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(fused.weights[k] - w[k]) <= 1e-9 * w[k]);
  const double total = w[0] + w[1] + w[2];
  for (int c = 0; c < 4; ++c) {
    const double expected = (w[0] * maps[0].values[c] + w[1] * maps[1].values[c] + w[2] * maps[2].values[c]) / total;
    CHECK(std::abs(fused.map.values[c] - expected) < 1e-9);
  }

  // Without a zero-entropy map the weights are comparable.
  // Map (2,1,1,0): mean 1, var 1/2, entropy 1.5 bits. Map (0,3,0,1): mean 1, var 3/2, entropy of (3/4, 1/4).
  const ActivationMap soft[] = {map2x2(2, 1, 1, 0), map2x2(0, 3, 0, 1), map2x2(1, 2, 3, 4)};
  const double h2 = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  const double ws[] = {0.5 / (1.5 + 1e-9), 1.5 / (h2 + 1e-9), 1.25 / (h3 + 1e-9)};
  const auto fs = fuse(soft);
  const double ts = ws[0] + ws[1] + ws[2];
  for (int c = 0; c < 4; ++c) {
    const double expected = (ws[0] * soft[0].values[c] + ws[1] * soft[1].values[c] + ws[2] * soft[2].values[c]) / ts;
    CHECK(std::abs(fs.map.values[c] - expected) < 1e-9);
  }
}

TEST_CASE("constant maps get weight zero") {
  const ActivationMap maps[] = {map2x2(0.2, 0.2, 0.2, 0.2), map2x2(0, 1, 0, 0)};
  const auto fused = fuse(maps);
  CHECK(fused.weights[0] == 0.0);
  for (int c = 0; c < 4; ++c) CHECK(fused.map.values[c] == doctest::Approx(maps[1].values[c]).epsilon(1e-12));
  const ActivationMap flat[] = {map2x2(1, 1, 1, 1), map2x2(3, 3, 3, 3)};
  const auto mean = fuse(flat);
  for (const double v : mean.map.values) CHECK(v == 2.0);
}

TEST_CASE("fusion equal weights, ordering and scaling") {
  const ActivationMap twins[] = {map2x2(1, 0, 2, 0), map2x2(0, 2, 0, 1)};
  const auto eq = fuse(twins);
  CHECK(eq.weights[0] == doctest::Approx(eq.weights[1]));
  for (int c = 0; c < 4; ++c) CHECK(eq.map.values[c] == doctest::Approx((twins[0].values[c] + twins[1].values[c]) / 2));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<ActivationMap> maps;
    for (int k = 0; k < 8; ++k) maps.push_back(random_map(rng, 4, 5));
    const auto base = fuse(maps);
    auto shuffled = maps;
    std::reverse(shuffled.begin(), shuffled.end());
    const auto r = fuse(shuffled);
    for (std::size_t c = 0; c < base.map.values.size(); ++c) {
      CHECK(r.map.values[c] == doctest::Approx(base.map.values[c]).epsilon(1e-12));
    }
    auto scaled = maps;
    for (auto& m : scaled) {
      for (auto& v : m.values) v *= 3.0;
    }
    const auto s = fuse(scaled);
    for (std::size_t c = 0; c < base.map.values.size(); ++c) {
      CHECK(s.map.values[c] == doctest::Approx(3.0 * base.map.values[c]).epsilon(1e-9));
      CHECK(base.map.values[c] >= 0.0);
    }
  }
  CHECK_THROWS_AS(fuse(std::span<const ActivationMap>{}), std::invalid_argument);
  const ActivationMap odd[] = {map2x2(1, 0, 0, 0), ActivationMap{1, 4, {1, 0, 0, 0}, -1}};
  CHECK_THROWS_AS(fuse(odd), std::invalid_argument);
}

TEST_CASE("localize runs the chain over every feature map") {
  FeatureTensor t(PatchGrid{8, 3, 3}, 8);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 8; ++k) t.at(i, j, k) = 0.125f;
    }
  }
  t.at(1, 1, 2) = 0.9f;
  const auto f = localize(t);
  CHECK(f.weights.size() == 8);
  CHECK(f.weights[0] == 0.0);
  CHECK(f.weights[2] > 0.0);
  const auto best = std::max_element(f.map.values.begin(), f.map.values.end()) - f.map.values.begin();
  CHECK(best == static_cast<long>(t.grid().index(1, 1)));
}

TEST_CASE("classify patches") {
  const auto positive = map2x2(0.1, 0.2, 0.3, 0.4);
  const auto all = classify_patches(positive, 0.0);
  CHECK(std::all_of(all.mask.begin(), all.mask.end(), [](bool b) { return b; }));
  CHECK(all.scores == positive.values);
  const auto zero = classify_patches(map2x2(0, 0, 0, 0), 1e-12);
  CHECK(std::none_of(zero.mask.begin(), zero.mask.end(), [](bool b) { return b; }));
  CHECK(classify_patches(positive, 0.25).mask == std::vector<bool>{false, false, true, true});
  CHECK_THROWS_AS(classify_patches(positive, -1.0), std::invalid_argument);
}

TEST_CASE("heatmap rendering") {
  const auto flat = render_heatmap(map2x2(2, 2, 2, 2), 128, 128, 64);
  CHECK(std::all_of(flat.pixels.begin(), flat.pixels.end(), [](std::uint8_t p) { return p == 0; }));
  const auto img = render_heatmap(map2x2(0, 1, 2, 4), 136, 128, 64);
  CHECK(img.pixels[0] == 0);
  CHECK(img.pixels[static_cast<std::size_t>(127) * 136 + 127] == 255);
  CHECK(img.pixels[130] == 0);  // column 130 lies outside every patch

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto m = random_map(rng, 6, 4);
    const int width = 5 * 8 + 64 + 8;
    const int height = 3 * 8 + 64;
    const auto h = render_heatmap(m, width, height, 8);
    const auto oracle = box_upsample(m, width, height, 8);
    int worst = 0;
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      worst = std::max(worst, std::abs(static_cast<int>(h.pixels[k]) - static_cast<int>(std::lround(oracle[k]))));
    }
    CHECK(worst <= 1);
  }
  CHECK_THROWS_AS(render_heatmap(map2x2(0, 1, 2, 3), 100, 128, 64), std::invalid_argument);
}

TEST_CASE("PGM round trip and score CSV") {
  GrayImage img{3, 2, {0, 10, 20, 128, 200, 255}};
  std::stringstream buf;
  write_pgm(buf, img);
  CHECK(buf.str().substr(0, 2) == "P5");
  const auto back = read_pgm(buf);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == img.pixels);
  std::stringstream bad("P6\n3 2\n255\n");
  CHECK_THROWS_AS(read_pgm(bad), FormatError);
  std::stringstream cut("P5\n3 2\n255\nab");
  CHECK_THROWS_AS(read_pgm(cut), FormatError);

  std::ostringstream csv;
  write_score_csv(csv, ActivationMap{2, 1, {0.5, 0.25}, -1});
  CHECK(csv.str() == "row,col,score\n0,0,0.5\n0,1,0.25\n");
}
