#include <benchmark/benchmark.h>

#include <vector>

#include "focal/codec/codec.hpp"
#include "focal/codec/texture.hpp"
#include "focal/codec/transform.hpp"
#include "focal/nn/layers.hpp"
#include "focal/nn/network.hpp"
#include "focal/random.hpp"

namespace {

using namespace focal;

std::vector<float> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

void BM_Dct8(benchmark::State& state) {
  codec::Block8 b{};
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = static_cast<double>(k % 17);
  for (auto _ : state) benchmark::DoNotOptimize(codec::dct8(b));
}
BENCHMARK(BM_Dct8);

void BM_EncodeFrame(benchmark::State& state) {
  const auto video = codec::gen_texture(352, 288, 1, 3);
  const codec::CodecConfig cfg{static_cast<codec::Flavor>(state.range(0)), 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(codec::encode_frame(video.frames[0], cfg));
}
BENCHMARK(BM_EncodeFrame)->DenseRange(0, 3);

void BM_ConvForward(benchmark::State& state) {
  const nn::ConvGeometry g{16, 16, 4, 1, 0};
  nn::Tensor<float> x(32, 16, 30, 30);
  x.data = random_values(x.data.size(), 1);
  const auto w = random_values(static_cast<std::size_t>(g.weight_count()), 2);
  const std::vector<float> b(16, 0.0f);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv_forward<float>(x, w, b, g));
}
BENCHMARK(BM_ConvForward);

void BM_Inference(benchmark::State& state) {
  const auto model = nn::init_weights({4, static_cast<int>(state.range(0)), false}, 5);
  nn::Tensor<float> batch(128, 1, 64, 64);
  batch.data = random_values(batch.data.size(), 3);
  for (auto& v : batch.data) v = (v + 1.0f) * 127.5f;
  for (auto _ : state) benchmark::DoNotOptimize(nn::infer_logits(model, batch));
  state.SetItemsProcessed(state.iterations() * batch.n);
}
BENCHMARK(BM_Inference)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  auto model = nn::init_weights({4, static_cast<int>(state.range(0)), false}, 5);
  nn::Tensor<float> batch(64, 1, 64, 64);
  batch.data = random_values(batch.data.size(), 3);
  for (auto& v : batch.data) v = (v + 1.0f) * 127.5f;
  std::vector<int> labels(64);
  for (int i = 0; i < 64; ++i) labels[i] = i % 4;
  nn::TrainingPass pass;
  for (auto _ : state) {
    const auto logits = pass.forward(model, batch);
    const auto loss = nn::batch_xent(logits, labels);
    benchmark::DoNotOptimize(pass.backward(model, loss.gradient));
  }
  state.SetItemsProcessed(state.iterations() * batch.n);
}
BENCHMARK(BM_TrainStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  focal::nn::keep_tensor_memory();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
