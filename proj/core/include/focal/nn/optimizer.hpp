#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "focal/nn/model.hpp"
#include "focal/nn/network.hpp"

namespace focal::nn {

enum class OptimizerKind { Sgdm, Adam };

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Sgdm;
  double learning_rate = 5e-3;
  double drop_factor = 0.5;
  int drop_period = 5;  // epochs
  int batch_size = 256;
  int epochs = 50;
  double momentum = 0.9;  // SGDM
  double beta1 = 0.9;     // Adam
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument on a non-positive rate, a drop factor outside
  // (0, 1], a non-positive drop period or batch size, or a negative epoch count.
  void validate() const;

  // Defaults for the two optimizers: SGDM 5e-3 halved every 5 epochs, Adam 1e-3 constant.
  static TrainConfig sgdm_defaults();
  static TrainConfig adam_defaults();
};

// Step-decay schedule, epochs counted from 0: rate * drop^(epoch / period).
double learning_rate_at(const TrainConfig& config, int epoch);

// Per-block optimizer state (velocity for SGDM; first and second moments for Adam).
struct OptimizerState {
  std::vector<std::vector<float>> first;
  std::vector<std::vector<float>> second;
  std::int64_t steps = 0;
};

// Applies one update to every trainable block in place.
//   SGDM: v <- mu * v - lr * g;  p <- p + v
//   Adam: m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
//         p <- p - lr * m_hat / (sqrt(v_hat) + eps) with bias-corrected moments.
void optimizer_step(ModelWeights& params, const Gradients& grads, OptimizerState& state, const TrainConfig& config,
                    double learning_rate);

// Same update on a bare parameter vector (used by tests and small problems).
void optimizer_step(std::span<float> params, std::span<const float> grads, OptimizerState& state,
                    const TrainConfig& config, double learning_rate);

}  // namespace focal::nn
