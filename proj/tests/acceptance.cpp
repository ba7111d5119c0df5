#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "focal/codec/codec.hpp"
#include "focal/codec/texture.hpp"
#include "focal/codec/transform.hpp"
#include "focal/codec/y4m.hpp"
#include "focal/descriptor_cache.hpp"
#include "focal/harness/config.hpp"
#include "focal/harness/corpus.hpp"
#include "focal/harness/dataset.hpp"
#include "focal/harness/evaluation.hpp"
#include "focal/harness/experiments.hpp"
#include "focal/harness/manifest.hpp"
#include "focal/nn/geometry.hpp"
#include "focal/nn/layers.hpp"
#include "focal/nn/network.hpp"
#include "focal/nn/weights_io.hpp"
#include "focal/spatial.hpp"
#include "oracles.hpp"

using namespace focal;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

nn::Tensor<double> tensor_from(const std::vector<double>& v, int n, int c, int h, int w) {
  nn::Tensor<double> t(n, c, h, w);
  t.data = v;
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Shared state across criteria.
struct Context {
  harness::Config config;
  fs::path work;
  fs::path cli;
  fs::path reuse_models;
  nn::ModelWeights codec_model;
  nn::ModelWeights quality_model;
  bool models_ready = false;
};

Outcome criterion_rf() {
  const auto start = Clock::now();
  auto chain = nn::rf_chain(nn::conv_layers(nn::focal_architecture(4)), 64);
  chain.insert(chain.begin(), nn::input_geometry(64));
  const nn::LayerGeom expected[] = {{64, 1, 1, 0.5}, {61, 1, 4, 2}, {30, 2, 6, 3},
                                    {27, 2, 12, 6},  {13, 4, 16, 8}, {7, 8, 24, 8}};
  bool ok = chain.size() == 6;
  for (std::size_t k = 0; ok && k < 6; ++k) ok = chain[k] == expected[k];
  const double t = seconds_since(start);
  return {ok && t < 1.0, "six tuples " + std::string(ok ? "exact" : "MISMATCH") + ", " + fixed(t, 6) + " s"};
}

Outcome criterion_numeric() {
  const auto start = Clock::now();
  double conv_err = 0.0;
  double bn_err = 0.0;
  double fc_err = 0.0;
  double sm_err = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(1000 + static_cast<std::uint64_t>(s));
    {
      const nn::ConvGeometry g{2, 3, 3, 1 + s % 2, s % 2};
      const auto x = oracle::uniform_values(rng, 2 * 2 * 7 * 7);
      const auto w = oracle::uniform_values(rng, static_cast<std::size_t>(g.weight_count()));
      const auto b = oracle::uniform_values(rng, 3);
      auto up = nn::conv_forward<double>(tensor_from(x, 2, 2, 7, 7), w, b, g);
      const auto r = oracle::uniform_values(rng, up.data.size());
      up.data = r;
      const auto grads = nn::conv_backward<double>(up, tensor_from(x, 2, 2, 7, 7), w, g, true);
      const auto lx = [&](const std::vector<double>& v) {
        return dot(nn::conv_forward<double>(tensor_from(v, 2, 2, 7, 7), w, b, g).data, r);
      };
      const auto lw = [&](const std::vector<double>& v) {
        return dot(nn::conv_forward<double>(tensor_from(x, 2, 2, 7, 7), v, b, g).data, r);
      };
      const auto lb = [&](const std::vector<double>& v) {
        return dot(nn::conv_forward<double>(tensor_from(x, 2, 2, 7, 7), w, v, g).data, r);
      };
      conv_err = std::max({conv_err, oracle::max_relative_error(grads.input.data, oracle::numeric_gradient(lx, x, 1e-3)),
                           oracle::max_relative_error(grads.weight, oracle::numeric_gradient(lw, w, 1e-3)),
                           oracle::max_relative_error(grads.bias, oracle::numeric_gradient(lb, b, 1e-3))});
    }
    {
      const auto x = oracle::uniform_values(rng, 3 * 2 * 3 * 3, -2.0, 2.0);
      const auto gamma = oracle::uniform_values(rng, 2, 0.5, 1.5);
      const auto beta = oracle::uniform_values(rng, 2);
      const auto r = oracle::uniform_values(rng, x.size());
      const auto forward = [&](const std::vector<double>& xv, const std::vector<double>& gv,
                               const std::vector<double>& bv, nn::BatchNormCache<double>& cache) {
        std::vector<double> rm(2, 0.0);
        std::vector<double> rv(2, 1.0);
        return nn::batchnorm_forward_train<double>(tensor_from(xv, 3, 2, 3, 3), {gv, bv}, rm, rv, {0.9, 1e-5}, cache);
      };
      nn::BatchNormCache<double> cache;
      auto up = forward(x, gamma, beta, cache);
      up.data = r;
      const auto grads = nn::batchnorm_backward<double>(up, cache, gamma);
      const auto loss = [&](const std::vector<double>& xv, const std::vector<double>& gv, const std::vector<double>& bv) {
        nn::BatchNormCache<double> c;
        return dot(forward(xv, gv, bv, c).data, r);
      };
      const auto lx = [&](const std::vector<double>& v) { return loss(v, gamma, beta); };
      const auto lg = [&](const std::vector<double>& v) { return loss(x, v, beta); };
      const auto lb = [&](const std::vector<double>& v) { return loss(x, gamma, v); };
      bn_err = std::max({bn_err, oracle::max_relative_error(grads.input.data, oracle::numeric_gradient(lx, x, 1e-5), 1e-4),
                         oracle::max_relative_error(grads.gamma, oracle::numeric_gradient(lg, gamma, 1e-5)),
                         oracle::max_relative_error(grads.beta, oracle::numeric_gradient(lb, beta, 1e-5))});
    }
    {
      const auto x = oracle::uniform_values(rng, 3 * 6);
      const auto w = oracle::uniform_values(rng, 4 * 6);
      const auto b = oracle::uniform_values(rng, 4);
      const auto r = oracle::uniform_values(rng, 3 * 4);
      const auto xt = tensor_from(x, 3, 6, 1, 1);
      auto up = nn::dense_forward<double>(xt, w, b, 4);
      up.data = r;
      const auto grads = nn::dense_backward<double>(up, xt, w, 4);
      const auto lx = [&](const std::vector<double>& v) {
        return dot(nn::dense_forward<double>(tensor_from(v, 3, 6, 1, 1), w, b, 4).data, r);
      };
      const auto lw = [&](const std::vector<double>& v) { return dot(nn::dense_forward<double>(xt, v, b, 4).data, r); };
      const auto lb = [&](const std::vector<double>& v) { return dot(nn::dense_forward<double>(xt, w, v, 4).data, r); };
      fc_err = std::max({fc_err, oracle::max_relative_error(grads.input.data, oracle::numeric_gradient(lx, x, 1e-4)),
                         oracle::max_relative_error(grads.weight, oracle::numeric_gradient(lw, w, 1e-4)),
                         oracle::max_relative_error(grads.bias, oracle::numeric_gradient(lb, b, 1e-4))});
    }
    {
      const auto logits = oracle::uniform_values(rng, 4, -5.0, 5.0);
      const int label = s % 4;
      const auto lg = nn::softmax_xent<double>(logits, label);
      const auto loss = [&](const std::vector<double>& v) { return nn::softmax_xent<double>(v, label).loss; };
      sm_err = std::max(sm_err, oracle::max_relative_error(lg.gradient, oracle::numeric_gradient(loss, logits, 1e-6)));
    }
  }
  double dct_err = 0.0;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(2000 + static_cast<std::uint64_t>(s));
    codec::Block8 x;
    for (auto& v : x) v = rng.uniform(0.0, 255.0);
    const auto c = codec::dct8(x);
    const auto o = oracle::naive_dct2(std::vector<double>(x.begin(), x.end()), 8);
    for (int k = 0; k < 64; ++k) dct_err = std::max(dct_err, std::abs(c[k] - o[k]));
  }
  double auc_err = 0.0;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(3000 + static_cast<std::uint64_t>(s));
    std::vector<double> scores;
    std::vector<int> labels;
    for (int k = 0; k < 40; ++k) {
      scores.push_back(std::round(rng.uniform(0.0, 8.0)));
      labels.push_back(k % 4 == 0 ? 1 : 0);
    }
    auc_err = std::max(auc_err, std::abs(harness::eval_curves(scores, labels).auc - oracle::pair_auc(scores, labels)));
  }
  const double t = seconds_since(start);
  const bool ok = conv_err < 1e-3 && bn_err < 1e-3 && fc_err < 1e-3 && sm_err < 1e-3 && dct_err < 1e-9 &&
                  auc_err < 1e-9 && t < 60.0;
  std::ostringstream d;
  d.precision(3);
  d << seeds << " seeds; max rel err conv " << conv_err << ", bn " << bn_err << ", fc " << fc_err << ", softmax "
    << sm_err << "; dct " << dct_err << "; auc " << auc_err << "; " << fixed(t, 2) << " s";
  return {ok, d.str()};
}

Outcome criterion_training(Context& ctx, harness::RunDirectory& run) {
  const auto start = Clock::now();
  std::ostringstream d;
  bool ok = true;
  if (!ctx.reuse_models.empty()) {
    ctx.codec_model = nn::load_weights(ctx.reuse_models / "codec.focw");
    ctx.quality_model = nn::load_weights(ctx.reuse_models / "quality.focw");
    ctx.models_ready = true;
    return {false, "models reused from " + ctx.reuse_models.string() + "; training not measured"};
  }
  for (const auto task : {harness::Task::Quality, harness::Task::Codec}) {
    const auto task_start = Clock::now();
    const auto spec = harness::CorpusSpec::from_config(ctx.config, task);
    const auto corpus = harness::build_corpus(spec);
    const auto counts = corpus.patches.class_counts(4);
    const std::size_t smallest = *std::min_element(counts.begin(), counts.end());
    const auto tc = harness::train_config_from(ctx.config, task);
    const auto result = harness::train_task(corpus, harness::model_config_from(ctx.config), tc,
                                            [&](const nn::EpochRecord& r) {
                                              std::cerr << "  " << harness::task_name(task) << " epoch " << r.epoch
                                                        << " val_acc " << r.val_accuracy << std::endl;
                                            });
    const std::string name = harness::task_name(task);
    nn::save_weights(run.path(name + ".focw"), result.model);
    run.record_file("weights", name + ".focw", {{"best_epoch", std::to_string(result.training.best_epoch)}});
    ok = ok && smallest >= 8000;
    if (task == harness::Task::Quality) {
      ctx.quality_model = result.model;
      const double acc = result.test.accuracy;
      ok = ok && acc >= 0.90;
      // Fraction of held-out flavor-A step-40 patches labelled "low".
      nn::LabeledPatches coarse;
      for (const auto k : result.split.test) {
        if (corpus.flavor[k] == codec::Flavor::A && corpus.delta[k] == 40.0) coarse.add(corpus.patches.patch(k), 0);
      }
      const double low = coarse.empty() ? 0.0 : nn::evaluate(result.model, coarse).accuracy;
      d << "quality " << fixed(100 * acc, 1) << "% held-out (" << result.split.test.size() << " patches, min class "
        << smallest << ", A/40 -> low " << fixed(100 * low, 1) << "%, " << fixed(seconds_since(task_start) / 60, 1)
        << " min); ";
    } else {
      ctx.codec_model = result.model;
      nn::LabeledPatches at20;
      for (const auto k : result.split.test) {
        if (corpus.delta[k] == 20.0) at20.add(corpus.patches.patch(k), corpus.patches.label(k));
      }
      const double acc = nn::evaluate(result.model, at20).accuracy;
      ok = ok && acc >= 0.85;
      d << "codec " << fixed(100 * acc, 1) << "% held-out at delta 20 (" << at20.size() << " patches, all steps "
        << fixed(100 * result.test.accuracy, 1) << "%, min class " << smallest << ", "
        << fixed(seconds_since(task_start) / 60, 1) << " min); ";
    }
  }
  ctx.models_ready = true;
  const double minutes = seconds_since(start) / 60;
  ok = ok && minutes <= 60.0;
  d << "total " << fixed(minutes, 1) << " min";
  return {ok, d.str()};
}

Outcome criterion_temporal(Context& ctx, harness::RunDirectory& run) {
  const auto start = Clock::now();
  const auto spec = harness::DatasetSpec::from_config(ctx.config);
  const auto d = harness::build_dataset_D(spec);
  const DescriptorExtractor ex(ctx.codec_model, ctx.quality_model);
  harness::TemporalEvalOptions opts;
  opts.stride = ctx.config.get_int("temporal.stride", opts.stride);
  opts.max_clips = ctx.config.get_int("acceptance.temporal_clips", 0);
  opts.seed = ctx.config.get_u64("seed", 1);
  opts.splice.suppress = true;
  const auto ev = harness::evaluate_temporal(d, spec, ex, opts);
  for (const auto& [name, curve] : {std::pair{"concat", &ev.concat}, std::pair{"codec", &ev.codec_only},
                                    std::pair{"quality", &ev.quality_only}}) {
    std::ofstream out(run.path(std::string("temporal_roc_") + name + ".csv"));
    harness::write_curve_csv(out, *curve);
  }
  const double t = seconds_since(start);
  const double best_single = std::max(ev.codec_only.auc, ev.quality_only.auc);
  const bool ok = ev.clips >= 40 && ev.concat.auc >= 0.95 && ev.concat.auc >= best_single - 0.01 && t <= 15 * 60;
  std::ostringstream s;
  s << ev.clips << " clips; AUC concat " << fixed(ev.concat.auc) << ", codec " << fixed(ev.codec_only.auc)
    << ", quality " << fixed(ev.quality_only.auc) << "; detected " << ev.detected << "/" << ev.clips << "; "
    << fixed(t / 60, 1) << " min";
  return {ok, s.str()};
}

Outcome criterion_spatial(Context& ctx, harness::RunDirectory& run) {
  const auto start = Clock::now();
  const auto spec = harness::DatasetSpec::from_config(ctx.config);
  const auto d = harness::build_dataset_D(spec);
  const DescriptorExtractor ex(ctx.codec_model, ctx.quality_model);
  harness::SpatialEvalOptions opts;
  opts.stride = ctx.config.get_int("spatial.stride", opts.stride);
  opts.window_frames = ctx.config.get_int("spatial.frames", 32);
  opts.max_clips = ctx.config.get_int("acceptance.spatial_clips", 0);
  opts.seed = ctx.config.get_u64("seed", 1);
  const auto ev = harness::evaluate_spatial(d, spec, ex, opts);
  {
    std::ofstream single(run.path("spatial_roc_single.csv"));
    harness::write_curve_csv(single, ev.single_concat);
    std::ofstream multi(run.path("spatial_roc_multi.csv"));
    harness::write_curve_csv(multi, ev.multi_concat);
  }
  const double t = seconds_since(start);
  const bool ok = opts.window_frames == 32 && ev.single_concat.auc >= 0.85 &&
                  ev.multi_concat.auc >= ev.single_concat.auc && t <= 20 * 60;
  std::ostringstream s;
  s << ev.clips << " clips; AUC single " << fixed(ev.single_concat.auc) << ", multi (W=" << opts.window_frames << ") "
    << fixed(ev.multi_concat.auc) << "; single codec " << fixed(ev.single_codec.auc) << ", quality "
    << fixed(ev.single_quality.auc) << "; " << fixed(t / 60, 1) << " min";
  return {ok, s.str()};
}

Outcome criterion_fusion() {
  const auto map2x2 = [](double a, double b, double c, double d) { return ActivationMap{2, 2, {a, b, c, d}, -1}; };
  const ActivationMap maps[] = {map2x2(2, 1, 1, 0), map2x2(0, 3, 0, 1), map2x2(1, 2, 3, 4)};
  // Variances 1/2, 3/2, 5/4; entropies 1.5 bits, H(3/4, 1/4), H(.1, .2, .3, .4).
  const double h2 = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  const double h3 = -(0.1 * std::log2(0.1) + 0.2 * std::log2(0.2) + 0.3 * std::log2(0.3) + 0.4 * std::log2(0.4));
  const double w[] = {0.5 / (1.5 + 1e-9), 1.5 / (h2 + 1e-9), 1.25 / (h3 + 1e-9)};
  const auto fused = fuse(maps);
  double err = 0.0;
  for (int c = 0; c < 4; ++c) {
    const double manual =
        (w[0] * maps[0].values[c] + w[1] * maps[1].values[c] + w[2] * maps[2].values[c]) / (w[0] + w[1] + w[2]);
    err = std::max(err, std::abs(fused.map.values[c] - manual));
  }
  const ActivationMap with_constant[] = {map2x2(0.3, 0.3, 0.3, 0.3), map2x2(0, 3, 0, 1), map2x2(5, 5, 5, 5)};
  const auto fc = fuse(with_constant);
  const bool zero = fc.weights[0] == 0.0 && fc.weights[2] == 0.0 && fc.weights[1] > 0.0;
  std::ostringstream s;
  s.precision(3);
  s << "max deviation " << err << "; constant-map weights " << fc.weights[0] << ", " << fc.weights[2];
  return {err < 1e-9 && zero, s.str()};
}

Outcome criterion_robustness(Context& ctx) {
  const auto start = Clock::now();
  const auto spec = harness::DatasetSpec::from_config(ctx.config);
  const auto d = harness::build_dataset_D(spec);
  const DescriptorExtractor ex(ctx.codec_model, ctx.quality_model);
  harness::SpatialEvalOptions opts;
  opts.stride = ctx.config.get_int("spatial.stride", opts.stride);
  opts.window_frames = ctx.config.get_int("spatial.frames", 32);
  const auto pair_index = static_cast<std::size_t>(ctx.config.get_int("acceptance.robustness_pair", 0));
  const auto pairs = harness::version_pairs(d);
  const auto pair = pairs.at(pair_index);
  const std::vector<double> deltas{2.0, 10.0, 20.0, 40.0};
  const auto scores = harness::robustness_scores(d, spec, pair, ex, opts, deltas);
  bool ok = true;
  std::ostringstream s;
  s.precision(4);
  s << d.version(pair.source, pair.first).id() << " into " << d.version(pair.source, pair.second).id() << "; ";
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (k > 0) ok = ok && scores[k] < scores[k - 1];
    s << "delta " << deltas[k] << ": " << scores[k] << (k + 1 < deltas.size() ? ", " : "");
  }
  s << "; " << fixed(seconds_since(start), 1) << " s";
  return {ok, s.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_determinism(Context& ctx) {
  std::ostringstream s;
  bool ok = true;
  // Weights.
  for (const auto* m : {&ctx.codec_model, &ctx.quality_model}) {
    const auto path = ctx.work / "roundtrip.focw";
    nn::save_weights(path, *m);
    const auto back = nn::load_weights(path);
    Rng rng(4);
    std::vector<float> patch(64 * 64);
    for (auto& v : patch) v = static_cast<float>(rng.uniform(0.0, 255.0));
    ok = ok && back == *m && nn::forward_full(patch, back) == nn::forward_full(patch, *m);
    nn::save_weights(ctx.work / "roundtrip2.focw", back);
    ok = ok && slurp(path) == slurp(ctx.work / "roundtrip2.focw");
  }
  s << "weights " << (ok ? "bit-exact" : "DIFFER") << "; ";
  // Descriptor cache on real tensors.
  const DescriptorExtractor ex(ctx.codec_model, ctx.quality_model);
  const auto video = codec::encode_video(codec::gen_texture(128, 128, 3, 9), {codec::Flavor::B, 20.0});
  const auto tensors = video_tensors(video, 8, ex);
  save_descriptor_cache(ctx.work / "roundtrip.focd", tensors);
  const bool cache_ok = load_descriptor_cache(ctx.work / "roundtrip.focd", 8) == tensors;
  ok = ok && cache_ok;
  s << "FOCD " << (cache_ok ? "bit-exact" : "DIFFER") << "; ";
  // Y4M luma.
  auto y4m_video = codec::gen_texture(64, 48, 4, 3);
  for (auto& f : y4m_video.frames) {
    for (auto& p : f.pixels) p = std::round(p);
  }
  codec::save_y4m(ctx.work / "roundtrip.y4m", y4m_video);
  const bool y4m_ok = codec::load_y4m(ctx.work / "roundtrip.y4m") == y4m_video;
  ok = ok && y4m_ok;
  s << "Y4M luma " << (y4m_ok ? "lossless" : "LOSSY") << "; ";
  // Identical CLI reruns.
  bool manifests_ok = false;
  if (!ctx.cli.empty()) {
    std::string manifests[2];
    for (int k = 0; k < 2; ++k) {
      const auto dir = ctx.work / ("rerun" + std::to_string(k));
      fs::remove_all(dir);
      const std::string cmd = "\"" + ctx.cli.string() + "\" gen-data --run-dir \"" + dir.string() +
                              "\" --set dataset.sources=1 --set dataset.width=128 --set dataset.height=96"
                              " --set dataset.frames=8 --set dataset.flavors=A,C --set dataset.deltas=10,40"
                              " --set dataset.window_width=64 --set dataset.window_height=48 --set seed=5 > /dev/null";
      if (std::system(cmd.c_str()) != 0) break;
      manifests[k] = slurp(dir / "manifest.jsonl");
    }
    manifests_ok = !manifests[0].empty() && manifests[0] == manifests[1];
    const auto lines = std::count(manifests[0].begin(), manifests[0].end(), '\n');
    s << "rerun manifests " << (manifests_ok ? "identical" : "DIFFER") << " (" << lines << " records)";
  } else {
    s << "rerun manifests not checked (no CLI path)";
  }
  return {ok && manifests_ok, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string config_path;
  std::string work_dir = "acceptance_run";
  std::string cli_path;
  std::string reuse;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--work-dir", work_dir, "output directory");
  app.add_option("--cli", cli_path, "focal executable for the rerun check");
  app.add_option("--reuse-models", reuse, "directory holding codec.focw and quality.focw (skips training)");
  app.add_option("--set", overrides, "override a configuration key");
  CLI11_PARSE(app, argc, argv);

  nn::keep_tensor_memory();
  Context ctx;
  ctx.config = harness::Config::load(config_path);
  for (const auto& o : overrides) ctx.config.set_assignment(o);
  ctx.work = work_dir;
  ctx.cli = cli_path;
  ctx.reuse_models = reuse;
  harness::RunDirectory run(ctx.work);
  {
    std::ofstream out(run.path("config.cfg"));
    ctx.config.write(out);
  }
  run.record_file("config", "config.cfg");

  const auto guarded = [](const std::function<Outcome()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("error: ") + e.what()};
    }
  };
  const auto needs_models = [&](const std::function<Outcome()>& fn) {
    return guarded([&] { return ctx.models_ready ? fn() : Outcome{false, "no trained models"}; });
  };

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"receptive-field tuples", [&] { return guarded(criterion_rf); }},
      {"numerical core", [&] { return guarded(criterion_numeric); }},
      {"classifier trainability", [&] { return guarded([&] { return criterion_training(ctx, run); }); }},
      {"temporal localization", [&] { return needs_models([&] { return criterion_temporal(ctx, run); }); }},
      {"spatial localization", [&] { return needs_models([&] { return criterion_spatial(ctx, run); }); }},
      {"fusion oracle", [&] { return guarded(criterion_fusion); }},
      {"robustness trend", [&] { return needs_models([&] { return criterion_robustness(ctx); }); }},
      {"determinism and formats", [&] { return needs_models([&] { return criterion_determinism(ctx); }); }},
  };
  int failures = 0;
  std::ostringstream report;
  for (std::size_t k = 0; k < std::size(criteria); ++k) {
    const auto outcome = criteria[k].second();
    failures += outcome.pass ? 0 : 1;
    std::ostringstream line;
    line << "criterion " << (k + 1) << " " << (outcome.pass ? "PASS" : "FAIL") << " [" << criteria[k].first
         << "] " << outcome.detail;
    std::cout << line.str() << std::endl;
    report << line.str() << '\n';
  }
  {
    std::ofstream out(run.path("acceptance.txt"));
    out << report.str();
  }
  run.record_file("report", "acceptance.txt");
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
