#pragma once

// Independent reference implementations used by the tests. They favour
// obviously-correct loops over speed and share no code with the library.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "focal/random.hpp"

namespace oracle {

// out[o][y][x] = b[o] + sum_{c,ky,kx} w[o][c][ky][kx] * in[c][y*s - z + ky][x*s - z + kx], zero outside.
inline std::vector<double> direct_conv(const std::vector<double>& in, int channels, int height, int width,
                                       const std::vector<double>& w, const std::vector<double>& b, int out_channels,
                                       int kernel, int stride, int pad, int& out_h, int& out_w) {
  out_h = (height + 2 * pad - kernel) / stride + 1;
  out_w = (width + 2 * pad - kernel) / stride + 1;
  std::vector<double> out(static_cast<std::size_t>(out_channels) * out_h * out_w, 0.0);
  for (int o = 0; o < out_channels; ++o) {
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        double acc = b[o];
        for (int c = 0; c < channels; ++c) {
          for (int ky = 0; ky < kernel; ++ky) {
            for (int kx = 0; kx < kernel; ++kx) {
              const int iy = y * stride - pad + ky;
              const int ix = x * stride - pad + kx;
              if (iy < 0 || iy >= height || ix < 0 || ix >= width) continue;
              acc += w[((static_cast<std::size_t>(o) * channels + c) * kernel + ky) * kernel + kx] *
                     in[(static_cast<std::size_t>(c) * height + iy) * width + ix];
            }
          }
        }
        out[(static_cast<std::size_t>(o) * out_h + y) * out_w + x] = acc;
      }
    }
  }
  return out;
}

// Naive 2-D DCT-II with orthonormal scaling: O(N^4) double sum.
inline std::vector<double> naive_dct2(const std::vector<double>& x, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  const auto alpha = [n](int k) { return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n); };
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int y = 0; y < n; ++y) {
        for (int xx = 0; xx < n; ++xx) {
          acc += x[static_cast<std::size_t>(y) * n + xx] * std::cos((2 * y + 1) * u * std::numbers::pi / (2.0 * n)) *
                 std::cos((2 * xx + 1) * v * std::numbers::pi / (2.0 * n));
        }
      }
      out[static_cast<std::size_t>(u) * n + v] = alpha(u) * alpha(v) * acc;
    }
  }
  return out;
}

// Fraction of (positive, negative) pairs ordered correctly, ties counting one half.
inline double pair_auc(std::span<const double> scores, std::span<const int> labels) {
  double good = 0.0;
  double pairs = 0.0;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (labels[a] != 1) continue;
    for (std::size_t b = 0; b < scores.size(); ++b) {
      if (labels[b] != 0) continue;
      pairs += 1.0;
      if (scores[a] > scores[b]) {
        good += 1.0;
      } else if (scores[a] == scores[b]) {
        good += 0.5;
      }
    }
  }
  return good / pairs;
}

// Central finite-difference gradient of f at x.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + h;
    const double up = f(x);
    x[k] = keep - h;
    const double down = f(x);
    x[k] = keep;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

// Largest element-wise relative error, with `floor` guarding near-zero entries.
inline double max_relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max({std::abs(a[k]), std::abs(b[k]), floor});
    worst = std::max(worst, std::abs(a[k] - b[k]) / scale);
  }
  return worst;
}

inline std::vector<double> uniform_values(focal::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace oracle
