#pragma once

#include <Eigen/Core>

#include <array>

namespace focal::codec {

inline constexpr int kBlock = 8;

using Block8 = std::array<double, kBlock * kBlock>;  // row-major
using Matrix8 = Eigen::Matrix<double, kBlock, kBlock, Eigen::RowMajor>;

// Separable 2-D block transform: coefficients = F * X * F^T, pixels = B * C * B^T.
struct BlockTransform {
  Matrix8 forward;
  Matrix8 inverse;

  Block8 apply(const Block8& pixels) const;
  Block8 invert(const Block8& coefficients) const;
};

// Orthonormal DCT-II.
const BlockTransform& dct_transform();

// Low-precision integer approximation of the DCT: basis entries rounded to
// integers at scale 2*sqrt(8), rows normalized to unit length. The rounded
// rows are not mutually orthogonal, so the inverse is the exact matrix inverse.
const BlockTransform& integer_dct_transform();

// Sequency-ordered orthonormal Walsh-Hadamard transform.
const BlockTransform& hadamard_transform();

Block8 dct8(const Block8& block);
Block8 idct8(const Block8& coefficients);

}  // namespace focal::codec
