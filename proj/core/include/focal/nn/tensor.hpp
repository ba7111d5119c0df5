#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "focal/error.hpp"

namespace focal::nn {

// Dense NCHW tensor. Fully-connected activations use h = w = 1.
template <typename T>
struct Tensor {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, T{}) {}

  std::size_t size() const { return data.size(); }
  std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }
  std::size_t plane_size() const { return static_cast<std::size_t>(h) * w; }

  T& at(int i, int ch, int y, int x) {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }
  const T& at(int i, int ch, int y, int x) const {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }

  std::span<T> sample(int i) { return {data.data() + i * sample_size(), sample_size()}; }
  std::span<const T> sample(int i) const { return {data.data() + i * sample_size(), sample_size()}; }

  bool same_shape(const Tensor& other) const {
    return n == other.n && c == other.c && h == other.h && w == other.w;
  }
};

template <typename T>
void require_shape(const Tensor<T>& t, int n, int c, int h, int w, const char* what) {
  if (t.n != n || t.c != c || t.h != h || t.w != w) {
    throw ShapeError(std::string(what) + ": tensor shape mismatch");
  }
}

}  // namespace focal::nn
