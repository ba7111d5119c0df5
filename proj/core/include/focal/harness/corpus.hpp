#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "focal/codec/codec.hpp"
#include "focal/harness/config.hpp"
#include "focal/nn/trainer.hpp"

namespace focal::harness {

enum class Task { Codec, Quality };
Task parse_task(std::string_view text);
std::string task_name(Task task);

// Class names in label order. Quality labels run from the coarsest step
// (low) to the finest (high).
std::vector<std::string> class_names(Task task);

struct CorpusSpec {
  Task task = Task::Quality;
  int patches_per_class = 8000;
  int frame_side = 256;
  std::vector<codec::Flavor> flavors{codec::Flavor::A, codec::Flavor::B, codec::Flavor::C, codec::Flavor::D};
  std::vector<double> deltas{5.0, 10.0, 20.0, 40.0};
  double variance_threshold = 1e3;
  std::uint64_t seed = 7;

  // Keys prefixed "corpus." or "corpus.<task>.". The quality task defaults to
  // flavors A, B and D: the ramp quantizer of C makes its nominal step a poor
  // proxy for the effective one.
  static CorpusSpec from_config(const Config& config, Task task);
  // Four classes are required: four flavors for the codec task, four steps for quality.
  void validate() const;
};

// Labelled patches with the codec setting that produced each one.
struct Corpus {
  Task task = Task::Quality;
  nn::LabeledPatches patches;
  std::vector<codec::Flavor> flavor;
  std::vector<double> delta;
};

// Procedural source frames with per-frame randomized texture statistics are
// encoded under every (flavor, delta). A 64x64 grid position is kept only
// when the encoded patch variance exceeds the threshold in every version, so
// all classes share the same content. Each class is truncated to exactly
// `patches_per_class`.
Corpus build_corpus(const CorpusSpec& spec);

struct CorpusSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

// Per-class seeded 70/20/10 split: round(0.7 n) train, round(0.2 n) validation, rest test.
CorpusSplit split_corpus(std::span<const int> labels, int num_classes, std::uint64_t seed);

nn::TrainConfig train_config_from(const Config& config, Task task);
nn::ModelConfig model_config_from(const Config& config);

struct TaskResult {
  nn::ModelWeights model;
  nn::TrainResult training;
  nn::Evaluation test;
  CorpusSplit split;
};

TaskResult train_task(const Corpus& corpus, const nn::ModelConfig& model_config, const nn::TrainConfig& train_config,
                      const nn::EpochCallback& on_epoch = {});

}  // namespace focal::harness
