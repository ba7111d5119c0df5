#pragma once

#include <string>
#include <string_view>

#include "focal/codec/transform.hpp"
#include "focal/codec/video.hpp"

namespace focal::codec {

// Four synthetic intra codecs with distinct transform/quantizer fingerprints
// on the 8x8 grid.
//   A: float DCT, flat quantizer
//   B: integer-approximated DCT, flat quantizer
//   C: float DCT, perceptual ramp quantizer (weight 1 + (u + v) / 4)
//   D: Walsh-Hadamard, flat quantizer
enum class Flavor { A, B, C, D };

inline constexpr Flavor kAllFlavors[] = {Flavor::A, Flavor::B, Flavor::C, Flavor::D};

char flavor_letter(Flavor f);
Flavor parse_flavor(std::string_view text);
int flavor_index(Flavor f);

struct CodecConfig {
  Flavor flavor = Flavor::A;
  double delta = 10.0;  // quantization step, luma units

  void validate() const;  // delta > 0
};

const BlockTransform& transform_for(Flavor f);

// Quantizer weight of coefficient (u, v); u indexes rows (vertical frequency).
double quant_weight(Flavor f, int u, int v);

// Reconstructed transform coefficients of one block: delta * w * round(c / (delta * w)).
Block8 quantize_block(const Block8& coefficients, const CodecConfig& config);

// Transform, quantize, inverse transform and clamp to [0, 255] every 8x8 block
// of the grid anchored at (0, 0). Frame sides must be multiples of 8.
Frame encode_frame(const Frame& frame, const CodecConfig& config);

// Encodes every frame. When gop_period > 0, frames whose index is a multiple
// of the period are encoded at delta / 2 to mimic intra refresh.
VideoSequence encode_video(const VideoSequence& video, const CodecConfig& config, int gop_period = 0);

enum class QualityFamily { H264, Mpeg };
QualityFamily parse_quality_family(std::string_view text);

// Quantization step from a codec quality parameter:
//   H264: 5/8 * 2^(q/6), 1 <= q <= 51
//   Mpeg: 8 (q <= 4), 2q (5..8), q + 8 (9..24), 2q - 16 (25..31)
// Throws std::out_of_range outside those ranges.
double delta_from_q(QualityFamily family, int q);

// Mean squared jump across vertical and horizontal 8x8 block boundaries.
double block_boundary_energy(const Frame& frame);

}  // namespace focal::codec
