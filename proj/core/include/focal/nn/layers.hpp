#pragma once

// Forward and backward kernels for the layer types of the classifier.
// Templated on the scalar so the network trains in float while gradient
// checks run in double.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "focal/error.hpp"
#include "focal/nn/tensor.hpp"

namespace focal::nn {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using ArrayMap = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>>;
template <typename T>
using ConstArrayMap = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>>;

struct ConvGeometry {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 1;
  int stride = 1;
  int padding = 0;

  int output_side(int input_side) const { return (input_side + 2 * padding - kernel) / stride + 1; }
  int patch_length() const { return in_channels * kernel * kernel; }
  std::size_t weight_count() const { return static_cast<std::size_t>(out_channels) * patch_length(); }
};

// Unfolds one sample (C x H x W) into a (C*k*k) x (oh*ow) column matrix.
template <typename T>
void im2col(std::span<const T> sample, int height, int width, const ConvGeometry& g, std::vector<T>& col) {
  const int oh = g.output_side(height);
  const int ow = g.output_side(width);
  const std::size_t cols = static_cast<std::size_t>(oh) * ow;
  col.assign(static_cast<std::size_t>(g.patch_length()) * cols, T{});
  std::size_t row = 0;
  for (int ch = 0; ch < g.in_channels; ++ch) {
    const T* plane = sample.data() + static_cast<std::size_t>(ch) * height * width;
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx, ++row) {
        T* dst = col.data() + row * cols;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * g.stride - g.padding + ky;
          if (iy < 0 || iy >= height) continue;
          const T* src = plane + static_cast<std::size_t>(iy) * width;
          T* out = dst + static_cast<std::size_t>(oy) * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * g.stride - g.padding + kx;
            if (ix >= 0 && ix < width) out[ox] = src[ix];
          }
        }
      }
    }
  }
}

// Scatter-adds a column matrix back into a sample gradient.
template <typename T>
void col2im_add(const std::vector<T>& col, int height, int width, const ConvGeometry& g, std::span<T> sample) {
  const int oh = g.output_side(height);
  const int ow = g.output_side(width);
  const std::size_t cols = static_cast<std::size_t>(oh) * ow;
  std::size_t row = 0;
  for (int ch = 0; ch < g.in_channels; ++ch) {
    T* plane = sample.data() + static_cast<std::size_t>(ch) * height * width;
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx, ++row) {
        const T* src = col.data() + row * cols;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * g.stride - g.padding + ky;
          if (iy < 0 || iy >= height) continue;
          T* dst = plane + static_cast<std::size_t>(iy) * width;
          const T* in = src + static_cast<std::size_t>(oy) * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * g.stride - g.padding + kx;
            if (ix >= 0 && ix < width) dst[ix] += in[ox];
          }
        }
      }
    }
  }
}

// weight: out_channels x (in_channels * k * k), row-major; bias: out_channels.
template <typename T>
Tensor<T> conv_forward(const Tensor<T>& in, std::span<const T> weight, std::span<const T> bias, const ConvGeometry& g) {
  if (in.c != g.in_channels || weight.size() != g.weight_count() ||
      bias.size() != static_cast<std::size_t>(g.out_channels)) {
    throw ShapeError("conv_forward: input or parameter shape does not match the layer");
  }
  const int oh = g.output_side(in.h);
  const int ow = g.output_side(in.w);
  if (oh <= 0 || ow <= 0) throw ShapeError("conv_forward: input smaller than kernel");
  Tensor<T> out(in.n, g.out_channels, oh, ow);
  const auto cols = static_cast<Eigen::Index>(oh) * ow;
  ConstMatrixMap<T> w(weight.data(), g.out_channels, g.patch_length());
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias.data(), g.out_channels);
  std::vector<T> col;
  for (int i = 0; i < in.n; ++i) {
    im2col<T>(in.sample(i), in.h, in.w, g, col);
    ConstMatrixMap<T> colm(col.data(), g.patch_length(), cols);
    MatrixMap<T> y(out.sample(i).data(), g.out_channels, cols);
    y.noalias() = w * colm;
    y.colwise() += b;
  }
  return out;
}

template <typename T>
struct ConvGradients {
  Tensor<T> input;
  std::vector<T> weight;
  std::vector<T> bias;
};

template <typename T>
ConvGradients<T> conv_backward(const Tensor<T>& upstream, const Tensor<T>& input, std::span<const T> weight,
                               const ConvGeometry& g, bool need_input_grad = true) {
  const int oh = g.output_side(input.h);
  const int ow = g.output_side(input.w);
  if (input.c != g.in_channels || weight.size() != g.weight_count()) {
    throw ShapeError("conv_backward: parameter shape does not match the layer");
  }
  require_shape(upstream, input.n, g.out_channels, oh, ow, "conv_backward");
  ConvGradients<T> grads;
  grads.weight.assign(g.weight_count(), T{});
  grads.bias.assign(static_cast<std::size_t>(g.out_channels), T{});
  if (need_input_grad) grads.input = Tensor<T>(input.n, input.c, input.h, input.w);

  const auto cols = static_cast<Eigen::Index>(oh) * ow;
  ConstMatrixMap<T> w(weight.data(), g.out_channels, g.patch_length());
  MatrixMap<T> dw(grads.weight.data(), g.out_channels, g.patch_length());
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(grads.bias.data(), g.out_channels);
  std::vector<T> col;
  std::vector<T> dcol(static_cast<std::size_t>(g.patch_length()) * cols);
  for (int i = 0; i < input.n; ++i) {
    ConstMatrixMap<T> dy(upstream.sample(i).data(), g.out_channels, cols);
    im2col<T>(input.sample(i), input.h, input.w, g, col);
    ConstMatrixMap<T> colm(col.data(), g.patch_length(), cols);
    dw.noalias() += dy * colm.transpose();
    db += dy.rowwise().sum();
    if (need_input_grad) {
      MatrixMap<T> dc(dcol.data(), g.patch_length(), cols);
      dc.noalias() = w.transpose() * dy;
      col2im_add<T>(dcol, input.h, input.w, g, grads.input.sample(i));
    }
  }
  return grads;
}

struct BatchNormConfig {
  double momentum = 0.9;
  double epsilon = 1e-5;
};

// Per-channel state kept from a train-mode forward pass for the backward pass.
template <typename T>
struct BatchNormCache {
  Tensor<T> normalized;      // x-hat
  std::vector<T> inv_std;    // 1 / sqrt(var + eps) per channel
};

template <typename T>
struct BatchNormParams {
  std::span<const T> gamma;
  std::span<const T> beta;
};

// Train mode: normalizes with batch statistics and folds them into the running
// statistics (running = momentum * running + (1 - momentum) * batch, the
// variance term unbiased). Requires at least two values per channel.
template <typename T>
Tensor<T> batchnorm_forward_train(const Tensor<T>& x, BatchNormParams<T> params, std::span<T> running_mean,
                                  std::span<T> running_var, const BatchNormConfig& cfg, BatchNormCache<T>& cache) {
  if (x.n < 2) throw std::invalid_argument("batchnorm: train mode needs a batch of at least 2");
  const auto channels = static_cast<std::size_t>(x.c);
  if (params.gamma.size() != channels || params.beta.size() != channels || running_mean.size() != channels ||
      running_var.size() != channels) {
    throw ShapeError("batchnorm: parameter count does not match channels");
  }
  const std::size_t plane = x.plane_size();
  const double count = static_cast<double>(x.n) * plane;
  Tensor<T> y(x.n, x.c, x.h, x.w);
  cache.normalized = Tensor<T>(x.n, x.c, x.h, x.w);
  cache.inv_std.assign(channels, T{});
  for (int ch = 0; ch < x.c; ++ch) {
    double sum = 0.0;
    for (int i = 0; i < x.n; ++i) sum += ConstArrayMap<T>(&x.at(i, ch, 0, 0), plane).template cast<double>().sum();
    const double mean = sum / count;
    double sq = 0.0;
    for (int i = 0; i < x.n; ++i) {
      sq += (ConstArrayMap<T>(&x.at(i, ch, 0, 0), plane).template cast<double>() - mean).square().sum();
    }
    const double var = sq / count;
    const double inv = 1.0 / std::sqrt(var + cfg.epsilon);
    cache.inv_std[ch] = static_cast<T>(inv);
    const T g = params.gamma[ch];
    const T b = params.beta[ch];
    for (int i = 0; i < x.n; ++i) {
      ArrayMap<T> xh(&cache.normalized.at(i, ch, 0, 0), plane);
      xh = ((ConstArrayMap<T>(&x.at(i, ch, 0, 0), plane).template cast<double>() - mean) * inv).template cast<T>();
      ArrayMap<T>(&y.at(i, ch, 0, 0), plane) = g * xh + b;
    }
    running_mean[ch] = static_cast<T>(cfg.momentum * running_mean[ch] + (1.0 - cfg.momentum) * mean);
    const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
    running_var[ch] = static_cast<T>(cfg.momentum * running_var[ch] + (1.0 - cfg.momentum) * unbiased);
  }
  return y;
}

template <typename T>
Tensor<T> batchnorm_forward_infer(const Tensor<T>& x, BatchNormParams<T> params, std::span<const T> running_mean,
                                  std::span<const T> running_var, const BatchNormConfig& cfg) {
  const auto channels = static_cast<std::size_t>(x.c);
  if (params.gamma.size() != channels || params.beta.size() != channels || running_mean.size() != channels ||
      running_var.size() != channels) {
    throw ShapeError("batchnorm: parameter count does not match channels");
  }
  Tensor<T> y(x.n, x.c, x.h, x.w);
  const std::size_t plane = x.plane_size();
  for (int ch = 0; ch < x.c; ++ch) {
    const T scale = static_cast<T>(params.gamma[ch] / std::sqrt(static_cast<double>(running_var[ch]) + cfg.epsilon));
    const T shift = params.beta[ch] - scale * running_mean[ch];
    for (int i = 0; i < x.n; ++i) {
      const T* p = &x.at(i, ch, 0, 0);
      T* out = &y.at(i, ch, 0, 0);
      for (std::size_t k = 0; k < plane; ++k) out[k] = scale * p[k] + shift;
    }
  }
  return y;
}

template <typename T>
struct BatchNormGradients {
  Tensor<T> input;
  std::vector<T> gamma;
  std::vector<T> beta;
};

template <typename T>
BatchNormGradients<T> batchnorm_backward(const Tensor<T>& upstream, const BatchNormCache<T>& cache,
                                         std::span<const T> gamma) {
  const Tensor<T>& xh = cache.normalized;
  if (!upstream.same_shape(xh)) throw ShapeError("batchnorm_backward: gradient shape mismatch");
  BatchNormGradients<T> grads;
  grads.input = Tensor<T>(xh.n, xh.c, xh.h, xh.w);
  grads.gamma.assign(static_cast<std::size_t>(xh.c), T{});
  grads.beta.assign(static_cast<std::size_t>(xh.c), T{});
  const std::size_t plane = xh.plane_size();
  const double count = static_cast<double>(xh.n) * plane;
  for (int ch = 0; ch < xh.c; ++ch) {
    double sum_dy = 0.0;
    double sum_dy_xh = 0.0;
    for (int i = 0; i < xh.n; ++i) {
      const auto dy = ConstArrayMap<T>(&upstream.at(i, ch, 0, 0), plane).template cast<double>();
      sum_dy += dy.sum();
      sum_dy_xh += (dy * ConstArrayMap<T>(&xh.at(i, ch, 0, 0), plane).template cast<double>()).sum();
    }
    grads.beta[ch] = static_cast<T>(sum_dy);
    grads.gamma[ch] = static_cast<T>(sum_dy_xh);
    const double scale = static_cast<double>(gamma[ch]) * cache.inv_std[ch] / count;
    for (int i = 0; i < xh.n; ++i) {
      const auto dy = ConstArrayMap<T>(&upstream.at(i, ch, 0, 0), plane).template cast<double>();
      const auto x = ConstArrayMap<T>(&xh.at(i, ch, 0, 0), plane).template cast<double>();
      ArrayMap<T>(&grads.input.at(i, ch, 0, 0), plane) =
          (scale * (count * dy - sum_dy - x * sum_dy_xh)).template cast<T>();
    }
  }
  return grads;
}

template <typename T>
void relu_inplace(Tensor<T>& x) {
  for (auto& v : x.data) v = v > T{} ? v : T{};
}

// Masks the upstream gradient where the ReLU output was zero.
template <typename T>
void relu_backward_inplace(Tensor<T>& upstream, const Tensor<T>& relu_output) {
  if (!upstream.same_shape(relu_output)) throw ShapeError("relu_backward: shape mismatch");
  for (std::size_t k = 0; k < upstream.data.size(); ++k) {
    if (relu_output.data[k] <= T{}) upstream.data[k] = T{};
  }
}

// x: N x in (any NCHW tensor is flattened per sample); weight: out x in row-major.
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias, int out_features) {
  const auto in_features = static_cast<Eigen::Index>(x.sample_size());
  if (weight.size() != static_cast<std::size_t>(out_features) * in_features ||
      bias.size() != static_cast<std::size_t>(out_features)) {
    throw ShapeError("dense_forward: parameter shape does not match input");
  }
  Tensor<T> y(x.n, out_features, 1, 1);
  ConstMatrixMap<T> xm(x.data.data(), x.n, in_features);
  ConstMatrixMap<T> w(weight.data(), out_features, in_features);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias.data(), out_features);
  MatrixMap<T> ym(y.data.data(), x.n, out_features);
  ym.noalias() = xm * w.transpose();
  ym.rowwise() += b;
  return y;
}

template <typename T>
struct DenseGradients {
  Tensor<T> input;
  std::vector<T> weight;
  std::vector<T> bias;
};

template <typename T>
DenseGradients<T> dense_backward(const Tensor<T>& upstream, const Tensor<T>& input, std::span<const T> weight,
                                 int out_features) {
  const auto in_features = static_cast<Eigen::Index>(input.sample_size());
  if (upstream.n != input.n || upstream.sample_size() != static_cast<std::size_t>(out_features) ||
      weight.size() != static_cast<std::size_t>(out_features) * in_features) {
    throw ShapeError("dense_backward: shape mismatch");
  }
  DenseGradients<T> grads;
  grads.input = Tensor<T>(input.n, input.c, input.h, input.w);
  grads.weight.assign(weight.size(), T{});
  grads.bias.assign(static_cast<std::size_t>(out_features), T{});
  ConstMatrixMap<T> dy(upstream.data.data(), input.n, out_features);
  ConstMatrixMap<T> x(input.data.data(), input.n, in_features);
  ConstMatrixMap<T> w(weight.data(), out_features, in_features);
  MatrixMap<T>(grads.input.data.data(), input.n, in_features).noalias() = dy * w;
  MatrixMap<T>(grads.weight.data(), out_features, in_features).noalias() = dy.transpose() * x;
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(grads.bias.data(), out_features) = dy.colwise().sum();
  return grads;
}

// Numerically stable softmax of one logit vector.
template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  std::vector<T> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const T peak = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (auto& v : p) {
    v = static_cast<T>(std::exp(static_cast<double>(v - peak)));
    total += v;
  }
  for (auto& v : p) v = static_cast<T>(v / total);
  return p;
}

template <typename T>
struct LossAndGradient {
  double loss = 0.0;
  std::vector<T> gradient;
};

// Categorical cross-entropy on softmax(logits): loss = -log p[label],
// gradient with respect to the logits = p - onehot(label).
template <typename T>
LossAndGradient<T> softmax_xent(std::span<const T> logits, int label) {
  if (logits.size() < 2) throw std::invalid_argument("softmax_xent: need at least two classes");
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw std::out_of_range("softmax_xent: label " + std::to_string(label) + " out of range");
  }
  const T peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (const auto v : logits) total += std::exp(static_cast<double>(v - peak));
  const double log_total = std::log(total);
  LossAndGradient<T> out;
  out.loss = -(static_cast<double>(logits[label] - peak) - log_total);
  out.gradient.resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out.gradient[k] = static_cast<T>(std::exp(static_cast<double>(logits[k] - peak) - log_total));
  }
  out.gradient[label] -= T{1};
  return out;
}

}  // namespace focal::nn
