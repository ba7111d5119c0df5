#include "focal/harness/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "focal/codec/texture.hpp"
#include "focal/patching.hpp"
#include "focal/random.hpp"

namespace focal::harness {

Task parse_task(std::string_view text) {
  if (text == "codec") return Task::Codec;
  if (text == "quality") return Task::Quality;
  throw std::invalid_argument("unknown task '" + std::string(text) + "' (expected codec or quality)");
}

std::string task_name(Task task) { return task == Task::Codec ? "codec" : "quality"; }

std::vector<std::string> class_names(Task task) {
  if (task == Task::Codec) return {"A", "B", "C", "D"};
  return {"low", "medium-low", "medium-high", "high"};
}

CorpusSpec CorpusSpec::from_config(const Config& c, Task task) {
  CorpusSpec s;
  s.task = task;
  if (task == Task::Quality) s.flavors = {codec::Flavor::A, codec::Flavor::B, codec::Flavor::D};
  const std::string p = "corpus.";
  const std::string t = p + task_name(task) + ".";
  s.patches_per_class = c.get_int(p + "patches_per_class", s.patches_per_class);
  s.frame_side = c.get_int(p + "frame_side", s.frame_side);
  const std::string flavor_key = c.has(t + "flavors") ? t + "flavors" : p + "flavors";
  if (c.has(flavor_key)) {
    s.flavors.clear();
    for (const auto& f : c.get_strings(flavor_key, {})) s.flavors.push_back(codec::parse_flavor(f));
  }
  s.deltas = c.get_doubles(t + "deltas", c.get_doubles(p + "deltas", s.deltas));
  s.variance_threshold = c.get_double(p + "variance_threshold", s.variance_threshold);
  s.seed = c.get_u64(p + "seed", c.get_u64("seed", s.seed));
  return s;
}

void CorpusSpec::validate() const {
  if (patches_per_class < 1) throw std::invalid_argument("corpus: patches_per_class must be positive");
  if (frame_side < 64 || frame_side % 64 != 0) throw std::invalid_argument("corpus: frame side must be a multiple of 64");
  if (flavors.empty() || deltas.empty()) throw std::invalid_argument("corpus: empty flavor or delta set");
  if (task == Task::Codec && flavors.size() != 4) throw std::invalid_argument("corpus: codec task needs four flavors");
  if (task == Task::Quality && deltas.size() != 4) throw std::invalid_argument("corpus: quality task needs four steps");
  if (variance_threshold < 0.0) throw std::invalid_argument("corpus: negative variance threshold");
}

namespace {

codec::TextureParams random_texture(Rng& rng) {
  codec::TextureParams t;
  t.mean = rng.uniform(100.0, 156.0);
  t.amplitude = rng.uniform(25.0, 60.0);
  t.gradient = rng.uniform(0.0, 60.0);
  t.coarse_sigma = rng.uniform(2.0, 6.0);
  t.fine_sigma = rng.uniform(0.7, 1.5);
  t.fine_weight = rng.uniform(0.2, 0.6);
  t.contrast_variation = rng.uniform(0.0, 0.6);
  return t;
}

}  // namespace

Corpus build_corpus(const CorpusSpec& spec) {
  spec.validate();
  std::vector<double> deltas = spec.deltas;
  std::sort(deltas.begin(), deltas.end());
  const auto label_of = [&](codec::Flavor f, double d) {
    if (spec.task == Task::Codec) return codec::flavor_index(f);
    const auto rank = std::find(deltas.begin(), deltas.end(), d) - deltas.begin();
    return static_cast<int>(deltas.size()) - 1 - static_cast<int>(rank);
  };

  Corpus corpus;
  corpus.task = spec.task;
  const auto target = static_cast<std::size_t>(spec.patches_per_class);
  corpus.patches.reserve(target * 4);
  std::vector<std::size_t> counts(4, 0);
  Rng params_rng(derive_seed(spec.seed, 0x7465787475726573ULL));
  const PatchGrid grid = make_grid(spec.frame_side, spec.frame_side, kPatch);
  std::vector<float> buf(static_cast<std::size_t>(kPatch) * kPatch);

  for (std::uint64_t frame = 0; *std::min_element(counts.begin(), counts.end()) < target; ++frame) {
    if (frame > 100000) throw std::runtime_error("corpus: variance filter rejects nearly every patch");
    const auto params = random_texture(params_rng);
    const auto source = codec::gen_texture(spec.frame_side, spec.frame_side, 1, derive_seed(spec.seed, frame), params);
    struct Version {
      codec::Flavor flavor;
      double delta;
      codec::Frame frame;
    };
    std::vector<Version> versions;
    for (const auto f : spec.flavors) {
      for (const double d : deltas) versions.push_back({f, d, codec::encode_frame(source.frames[0], {f, d})});
    }
    for (int i = 0; i < grid.count_u; ++i) {
      for (int j = 0; j < grid.count_v; ++j) {
        bool keep = true;
        for (const auto& v : versions) {
          copy_patch(v.frame, grid, i, j, buf);
          if (!(patch_variance(buf) > spec.variance_threshold)) {
            keep = false;
            break;
          }
        }
        if (!keep) continue;
        for (const auto& v : versions) {
          const int label = label_of(v.flavor, v.delta);
          if (counts[label] >= target) continue;
          copy_patch(v.frame, grid, i, j, buf);
          corpus.patches.add(buf, label);
          corpus.flavor.push_back(v.flavor);
          corpus.delta.push_back(v.delta);
          ++counts[label];
        }
      }
    }
  }
  return corpus;
}

CorpusSplit split_corpus(std::span<const int> labels, int num_classes, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] < 0 || labels[k] >= num_classes) throw std::out_of_range("split_corpus: label out of range");
    by_class[labels[k]].push_back(k);
  }
  CorpusSplit s;
  for (int c = 0; c < num_classes; ++c) {
    auto& idx = by_class[c];
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(idx.begin(), idx.end());
    const auto n = static_cast<double>(idx.size());
    const auto n_train = static_cast<std::size_t>(std::llround(0.7 * n));
    const auto n_val = std::min(idx.size() - n_train, static_cast<std::size_t>(std::llround(0.2 * n)));
    s.train.insert(s.train.end(), idx.begin(), idx.begin() + n_train);
    s.validation.insert(s.validation.end(), idx.begin() + n_train, idx.begin() + n_train + n_val);
    s.test.insert(s.test.end(), idx.begin() + n_train + n_val, idx.end());
  }
  return s;
}

nn::TrainConfig train_config_from(const Config& c, Task task) {
  const std::string p = "train." + task_name(task) + ".";
  const auto get = [&](const std::string& key) { return c.has(p + key) ? p + key : "train." + key; };
  const std::string opt = c.get(get("optimizer"), task == Task::Codec ? "adam" : "sgdm");
  nn::TrainConfig t;
  if (opt == "adam") {
    t = nn::TrainConfig::adam_defaults();
  } else if (opt != "sgdm") {
    throw std::invalid_argument("unknown optimizer '" + opt + "' (expected sgdm or adam)");
  }
  t.learning_rate = c.get_double(get("learning_rate"), t.learning_rate);
  t.drop_factor = c.get_double(get("drop_factor"), t.drop_factor);
  t.drop_period = c.get_int(get("drop_period"), t.drop_period);
  t.batch_size = c.get_int(get("batch_size"), t.batch_size);
  t.epochs = c.get_int(get("epochs"), t.epochs);
  t.momentum = c.get_double(get("momentum"), t.momentum);
  t.seed = c.get_u64(get("seed"), c.get_u64("seed", t.seed));
  t.validate();
  return t;
}

nn::ModelConfig model_config_from(const Config& c) {
  nn::ModelConfig m;
  m.width = c.get_int("model.width", m.width);
  m.fc1_relu = c.get_bool("model.fc1_relu", m.fc1_relu);
  return m;
}

TaskResult train_task(const Corpus& corpus, const nn::ModelConfig& model_config, const nn::TrainConfig& train_config,
                      const nn::EpochCallback& on_epoch) {
  nn::ModelConfig mc = model_config;
  mc.num_classes = 4;
  TaskResult r;
  r.split = split_corpus(corpus.patches.labels(), mc.num_classes, derive_seed(train_config.seed, 0x73706c6974ULL));
  const auto train = corpus.patches.subset(r.split.train);
  const auto val = corpus.patches.subset(r.split.validation);
  r.training = nn::train_classifier(nn::init_weights(mc, derive_seed(train_config.seed, 1)), train, val,
                                    train_config, on_epoch);
  r.model = r.training.best;
  if (!r.split.test.empty()) r.test = nn::evaluate(r.model, corpus.patches.subset(r.split.test));
  return r;
}

}  // namespace focal::harness
