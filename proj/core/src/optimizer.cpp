#include "focal/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "focal/error.hpp"

namespace focal::nn {
namespace {

void update_block(std::span<float> p, std::span<const float> g, std::vector<float>& first, std::vector<float>& second,
                  std::int64_t step, const TrainConfig& cfg, double lr) {
  if (first.size() != p.size()) first.assign(p.size(), 0.0f);
  if (cfg.optimizer == OptimizerKind::Sgdm) {
    const auto mu = static_cast<float>(cfg.momentum);
    const auto rate = static_cast<float>(lr);
    for (std::size_t k = 0; k < p.size(); ++k) {
      first[k] = mu * first[k] - rate * g[k];
      p[k] += first[k];
    }
    return;
  }
  if (second.size() != p.size()) second.assign(p.size(), 0.0f);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  const auto b1 = static_cast<float>(cfg.beta1);
  const auto b2 = static_cast<float>(cfg.beta2);
  for (std::size_t k = 0; k < p.size(); ++k) {
    first[k] = b1 * first[k] + (1.0f - b1) * g[k];
    second[k] = b2 * second[k] + (1.0f - b2) * g[k] * g[k];
    const double m_hat = first[k] / c1;
    const double v_hat = second[k] / c2;
    p[k] = static_cast<float>(p[k] - lr * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(drop_factor > 0.0 && drop_factor <= 1.0)) throw std::invalid_argument("drop factor must lie in (0, 1]");
  if (drop_period < 1) throw std::invalid_argument("drop period must be at least one epoch");
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (epochs < 0) throw std::invalid_argument("epoch count must be non-negative");
}

TrainConfig TrainConfig::sgdm_defaults() { return {}; }

TrainConfig TrainConfig::adam_defaults() {
  TrainConfig c;
  c.optimizer = OptimizerKind::Adam;
  c.learning_rate = 1e-3;
  c.drop_factor = 1.0;
  return c;
}

double learning_rate_at(const TrainConfig& config, int epoch) {
  return config.learning_rate * std::pow(config.drop_factor, epoch / config.drop_period);
}

void optimizer_step(ModelWeights& params, const Gradients& grads, OptimizerState& state, const TrainConfig& config,
                    double learning_rate) {
  if (grads.blocks.size() != params.blocks.size()) throw ShapeError("optimizer_step: gradient layout mismatch");
  state.first.resize(params.blocks.size());
  state.second.resize(params.blocks.size());
  ++state.steps;
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    auto& block = params.blocks[b];
    if (!is_trainable(block.name) || grads.blocks[b].empty()) continue;
    if (grads.blocks[b].size() != block.values.size()) {
      throw ShapeError("optimizer_step: gradient size mismatch for " + block.name);
    }
    update_block(block.values, grads.blocks[b], state.first[b], state.second[b], state.steps, config, learning_rate);
  }
}

void optimizer_step(std::span<float> params, std::span<const float> grads, OptimizerState& state,
                    const TrainConfig& config, double learning_rate) {
  if (params.size() != grads.size()) throw ShapeError("optimizer_step: gradient size mismatch");
  state.first.resize(1);
  state.second.resize(1);
  ++state.steps;
  update_block(params, grads, state.first[0], state.second[0], state.steps, config, learning_rate);
}

}  // namespace focal::nn
