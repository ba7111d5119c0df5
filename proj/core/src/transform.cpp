#include "focal/codec/transform.hpp"

#include <Eigen/LU>

#include <cmath>

namespace focal::codec {
namespace {

Matrix8 dct_matrix() {
  Matrix8 c;
  for (int u = 0; u < kBlock; ++u) {
    const double alpha = u == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
    for (int x = 0; x < kBlock; ++x) c(u, x) = alpha * std::cos((2 * x + 1) * u * M_PI / (2.0 * kBlock));
  }
  return c;
}

BlockTransform make_integer_dct() {
  const Matrix8 c = dct_matrix();
  Matrix8 t;
  const double scale = 2.0 * std::sqrt(static_cast<double>(kBlock));
  for (int u = 0; u < kBlock; ++u) {
    for (int x = 0; x < kBlock; ++x) t(u, x) = std::round(c(u, x) * scale);
    t.row(u).normalize();
  }
  return {t, t.inverse()};
}

BlockTransform make_hadamard() {
  // Sylvester construction, rows reordered by sign changes (sequency).
  Matrix8 h;
  for (int r = 0; r < kBlock; ++r) {
    for (int c = 0; c < kBlock; ++c) h(r, c) = (__builtin_popcount(r & c) % 2) ? -1.0 : 1.0;
  }
  Matrix8 ordered;
  for (int r = 0; r < kBlock; ++r) {
    int changes = 0;
    for (int c = 1; c < kBlock; ++c) changes += h(r, c) != h(r, c - 1);
    ordered.row(changes) = h.row(r) / std::sqrt(static_cast<double>(kBlock));
  }
  return {ordered, ordered.transpose()};
}

}  // namespace

Block8 BlockTransform::apply(const Block8& pixels) const {
  const Eigen::Map<const Matrix8> x(pixels.data());
  Block8 out;
  Eigen::Map<Matrix8>(out.data()) = forward * x * forward.transpose();
  return out;
}

Block8 BlockTransform::invert(const Block8& coefficients) const {
  const Eigen::Map<const Matrix8> y(coefficients.data());
  Block8 out;
  Eigen::Map<Matrix8>(out.data()) = inverse * y * inverse.transpose();
  return out;
}

const BlockTransform& dct_transform() {
  static const BlockTransform t = [] {
    const Matrix8 c = dct_matrix();
    return BlockTransform{c, c.transpose()};
  }();
  return t;
}

const BlockTransform& integer_dct_transform() {
  static const BlockTransform t = make_integer_dct();
  return t;
}

const BlockTransform& hadamard_transform() {
  static const BlockTransform t = make_hadamard();
  return t;
}

Block8 dct8(const Block8& block) { return dct_transform().apply(block); }
Block8 idct8(const Block8& coefficients) { return dct_transform().invert(coefficients); }

}  // namespace focal::codec
