#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "focal/codec/codec.hpp"
#include "focal/codec/y4m.hpp"
#include "focal/descriptor_cache.hpp"
#include "focal/digest.hpp"
#include "focal/error.hpp"
#include "focal/harness/config.hpp"
#include "focal/harness/corpus.hpp"
#include "focal/harness/dataset.hpp"
#include "focal/harness/evaluation.hpp"
#include "focal/harness/experiments.hpp"
#include "focal/harness/manifest.hpp"
#include "focal/nn/geometry.hpp"
#include "focal/nn/network.hpp"
#include "focal/nn/weights_io.hpp"
#include "focal/spatial.hpp"
#include "focal/temporal.hpp"

namespace {

using namespace focal;
using focal::harness::Config;
using focal::harness::RunDirectory;

// Exit status for malformed input data.
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string run_dir;
  std::map<std::string, std::string> flags;  // config key -> flag value, applied when given
};

void add_common(CLI::App* cmd, Common& c, const std::string& name) {
  c.run_dir = "runs/" + name;
  cmd->add_option("--config", c.config_file, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override a configuration key (key=value)");
  cmd->add_option("--run-dir", c.run_dir, "output directory")->capture_default_str();
}

// Binds a flag that overrides configuration key `key`.
void bind(CLI::App* cmd, Common& c, const std::string& flag, const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(flag, [&c, key](const std::string& v) { c.flags[key] = v; }, help);
}

Config resolve(const Common& c) {
  Config cfg;
  if (!c.config_file.empty()) cfg = Config::load(c.config_file);
  for (const auto& [k, v] : c.flags) cfg.set(k, v);
  for (const auto& o : c.overrides) cfg.set_assignment(o);
  return cfg;
}

RunDirectory open_run(const Common& c, const Config& cfg, const std::string& command) {
  RunDirectory run(c.run_dir);
  std::ofstream(run.path("config.cfg")) << [&] {
    std::ostringstream os;
    cfg.write(os);
    return os.str();
  }();
  run.record_file("config", "config.cfg", {{"command", command}, {"config_digest", to_hex(cfg.digest())}});
  return run;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

DescriptorExtractor load_extractor(const Config& cfg, nn::ModelWeights& codec_model, nn::ModelWeights& quality_model) {
  codec_model = nn::load_weights(cfg.require("model.codec"));
  quality_model = nn::load_weights(cfg.require("model.quality"));
  return DescriptorExtractor(codec_model, quality_model);
}

SpliceOptions splice_options(const Config& cfg) {
  SpliceOptions o;
  o.threshold = cfg.get_double("temporal.threshold", o.threshold);
  o.suppress = cfg.get_bool("temporal.suppress", o.suppress);
  if (cfg.has("temporal.period")) o.period_override = cfg.get_int("temporal.period", 0);
  o.relative_gate = cfg.get_double("temporal.relative_gate", o.relative_gate);
  o.search.min_period = cfg.get_int("temporal.min_period", o.search.min_period);
  o.search.max_period = cfg.get_int("temporal.max_period", o.search.max_period);
  o.search.min_score = cfg.get_double("temporal.min_score", o.search.min_score);
  o.search.prominence = cfg.get_double("temporal.prominence", o.search.prominence);
  return o;
}

harness::SpatialEvalOptions spatial_options(const Config& cfg) {
  harness::SpatialEvalOptions o;
  o.stride = cfg.get_int("spatial.stride", o.stride);
  o.window_frames = cfg.get_int("spatial.frames", o.window_frames);
  o.label_fraction = cfg.get_double("spatial.label_fraction", o.label_fraction);
  o.max_clips = cfg.get_int("eval.max_clips", o.max_clips);
  o.seed = cfg.get_u64("seed", o.seed);
  return o;
}

void write_text(RunDirectory& run, const std::string& kind, const std::string& rel, const std::string& text,
                std::map<std::string, std::string> fields = {}) {
  std::filesystem::create_directories(run.path(rel).parent_path());
  std::ofstream out(run.path(rel), std::ios::binary);
  out << text;
  out.close();
  run.record_file(kind, rel, std::move(fields));
}

void write_curve(RunDirectory& run, const std::string& rel, const harness::EvalCurve& curve) {
  std::ostringstream os;
  harness::write_curve_csv(os, curve);
  write_text(run, "curve", rel, os.str(), {{"auc", fmt(curve.auc)}});
}

std::string metrics_row(const std::string& name, const harness::EvalCurve& c) {
  return name + "," + fmt(c.auc) + "," + fmt(c.pr_auc) + "," + fmt(c.best_f1) + "," + fmt(c.best_f1_threshold) + "\n";
}

int cmd_rf_geometry(const Common& c) {
  const Config cfg = resolve(c);
  auto run = open_run(c, cfg, "rf-geometry");
  const auto layers = nn::conv_layers(nn::focal_architecture(4));
  auto chain = nn::rf_chain(layers, nn::kPatchSide);
  chain.insert(chain.begin(), nn::input_geometry(nn::kPatchSide));
  const nn::LayerGeom expected[] = {{64, 1, 1, 0.5}, {61, 1, 4, 2}, {30, 2, 6, 3},
                                    {27, 2, 12, 6},  {13, 4, 16, 8}, {7, 8, 24, 8}};
  std::ostringstream os;
  os << "layer,m,j,r,c\n";
  bool ok = chain.size() == std::size(expected);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto& g = chain[k];
    os << (k == 0 ? std::string("input") : layers[k - 1].name) << ',' << g.m << ',' << g.j << ',' << g.r << ','
       << g.c << '\n';
    if (k < std::size(expected) && !(g == expected[k])) ok = false;
  }
  std::cout << os.str();
  write_text(run, "rf_geometry", "rf_geometry.csv", os.str(), {{"match", ok ? "true" : "false"}});
  if (!ok) {
    std::cerr << "error: receptive-field chain does not match the reference table\n";
    return 1;
  }
  return 0;
}

int cmd_encode(const Common& c) {
  const Config cfg = resolve(c);
  auto run = open_run(c, cfg, "encode");
  const auto input = cfg.require("encode.input");
  codec::CodecConfig cc;
  cc.flavor = codec::parse_flavor(cfg.get("encode.flavor", "A"));
  if (cfg.has("encode.q")) {
    cc.delta = codec::delta_from_q(codec::parse_quality_family(cfg.get("encode.family", "h264")), cfg.get_int("encode.q", 0));
  } else {
    cc.delta = cfg.get_double("encode.delta", 10.0);
  }
  cc.validate();
  const auto video = codec::pad_to_multiple(codec::load_y4m(input), 8);
  const auto out = codec::encode_video(video, cc, cfg.get_int("encode.gop", 0));
  const std::string rel = cfg.get("encode.output", "encoded.y4m");
  codec::save_y4m(run.path(rel), out);
  run.record_file("video", rel,
                  {{"flavor", std::string(1, codec::flavor_letter(cc.flavor))}, {"delta", fmt(cc.delta)}, {"source", input}});
  std::cout << "encoded " << out.frames.size() << " frames (flavor " << codec::flavor_letter(cc.flavor)
            << ", delta " << cc.delta << ") -> " << run.path(rel).string() << '\n';
  return 0;
}

int cmd_gen_data(const Common& c) {
  const Config cfg = resolve(c);
  auto run = open_run(c, cfg, "gen-data");
  const auto spec = harness::DatasetSpec::from_config(cfg);
  const auto d = harness::build_dataset_D(spec);
  const std::string what = cfg.get("gen.what", "all");
  const int max_clips = cfg.get_int("eval.max_clips", 0);
  std::filesystem::create_directories(run.path("D"));
  for (const auto& v : d.videos) {
    const std::string rel = "D/" + v.id() + ".y4m";
    codec::save_y4m(run.path(rel), v.video);
    run.record_file("encoded_video", rel,
                    {{"source", std::to_string(v.source)},
                     {"flavor", std::string(1, codec::flavor_letter(v.flavor))},
                     {"delta", fmt(v.delta)},
                     {"gop_period", std::to_string(spec.gop_period)}});
  }
  const auto pairs = harness::select_pairs(harness::version_pairs(d), max_clips, cfg.get_u64("seed", 1));
  if (what == "all" || what == "temporal") {
    std::filesystem::create_directories(run.path("temporal"));
    std::ostringstream truth;
    truth << "clip,splice_index\n";
    for (const auto& p : pairs) {
      const auto t = harness::make_temporal_splice(d, p, spec);
      const std::string rel = "temporal/" + t.id + ".y4m";
      codec::save_y4m(run.path(rel), t.video);
      run.record_file("temporal_splice", rel, {{"splice_index", std::to_string(t.splice_index)}});
      truth << t.id << ',' << t.splice_index << '\n';
    }
    write_text(run, "ground_truth", "temporal/ground_truth.csv", truth.str());
  }
  if (what == "all" || what == "spatial") {
    std::filesystem::create_directories(run.path("spatial"));
    bool mask_written = false;
    for (const auto& p : pairs) {
      const auto s = harness::make_spatial_splice(d, p, spec);
      const std::string rel = "spatial/" + s.id + ".y4m";
      codec::save_y4m(run.path(rel), s.video);
      run.record_file("spatial_splice", rel,
                      {{"window", std::to_string(s.window.left) + "," + std::to_string(s.window.top) + "," +
                                      std::to_string(s.window.width) + "," + std::to_string(s.window.height)}});
      if (!mask_written) {
        GrayImage mask{s.video.width, s.video.height, {}};
        for (const auto m : s.mask) mask.pixels.push_back(m ? 255 : 0);
        std::ofstream out(run.path("spatial/mask.pgm"), std::ios::binary);
        write_pgm(out, mask);
        out.close();
        run.record_file("mask", "spatial/mask.pgm");
        mask_written = true;
      }
    }
  }
  std::cout << "generated " << d.videos.size() << " encoded videos and " << pairs.size() << " splice pairs under "
            << run.root().string() << '\n';
  return 0;
}

int cmd_train(const Common& c) {
  Config cfg = resolve(c);
  const auto task = harness::parse_task(cfg.get("train.task", "quality"));
  if (const auto e = c.flags.find("train.epochs"); e != c.flags.end()) {
    cfg.set("train." + harness::task_name(task) + ".epochs", e->second);
  }
  auto run = open_run(c, cfg, "train");
  const auto corpus = harness::build_corpus(harness::CorpusSpec::from_config(cfg, task));
  const auto tc = harness::train_config_from(cfg, task);
  std::ostringstream log;
  log << "epoch,learning_rate,train_loss,train_accuracy,val_loss,val_accuracy\n";
  const auto result = harness::train_task(corpus, harness::model_config_from(cfg), tc, [&](const nn::EpochRecord& r) {
    log << r.epoch << ',' << r.learning_rate << ',' << r.train_loss << ',' << r.train_accuracy << ',' << r.val_loss
        << ',' << r.val_accuracy << '\n';
    std::cout << "epoch " << r.epoch << " loss " << r.train_loss << " val_loss " << r.val_loss << " val_acc "
              << r.val_accuracy << std::endl;
  });
  const std::string weights = harness::task_name(task) + ".focw";
  nn::save_weights(run.path(weights), result.model);
  run.record_file("weights", weights,
                  {{"task", harness::task_name(task)}, {"best_epoch", std::to_string(result.training.best_epoch)}});
  write_text(run, "training_log", "training_log.csv", log.str());
  std::ostringstream metrics;
  metrics << "split,patches,accuracy,loss\n"
          << "train," << result.split.train.size() << ",,\n"
          << "validation," << result.split.validation.size() << ",,\n"
          << "test," << result.split.test.size() << ',' << fmt(result.test.accuracy) << ',' << fmt(result.test.loss)
          << '\n';
  write_text(run, "metrics", "metrics.csv", metrics.str());
  std::cout << "test accuracy " << result.test.accuracy << " (" << result.split.test.size() << " patches); weights "
            << run.path(weights).string() << '\n';
  return 0;
}

int cmd_detect_temporal(const Common& c) {
  const Config cfg = resolve(c);
  auto run = open_run(c, cfg, "detect-temporal");
  nn::ModelWeights cm, qm;
  const auto extractor = load_extractor(cfg, cm, qm);
  const auto input = cfg.require("detect.input");
  const auto video = codec::load_y4m(input);
  DescriptorCache cache(cfg.get("cache.dir", run.path("cache").string()));
  const auto tensors = cache.tensors(video, cfg.get_int("temporal.stride", kTemporalStride), extractor);
  std::vector<FrameDescriptor> descriptors;
  for (std::size_t n = 0; n < tensors.size(); ++n) descriptors.push_back(frame_descriptor(tensors[n], n));
  const auto series = distance_series(descriptors);
  const auto report = detect_splices(series, splice_options(cfg));
  std::ostringstream csv, plot;
  write_splice_csv(csv, series, report);
  write_series_plot(plot, series);
  write_text(run, "splices", "splices.csv", csv.str(),
             {{"input", input}, {"period", report.period ? std::to_string(*report.period) : "none"}});
  write_text(run, "series", "delta_f.txt", plot.str());
  for (const int m : report.splice_indices) std::cout << "splice at frame " << m << '\n';
  if (report.splice_indices.empty()) std::cout << "no splice detected\n";
  return 0;
}

int cmd_localize_spatial(const Common& c) {
  const Config cfg = resolve(c);
  auto run = open_run(c, cfg, "localize-spatial");
  nn::ModelWeights cm, qm;
  const auto extractor = load_extractor(cfg, cm, qm);
  const auto input = cfg.require("localize.input");
  const auto video = codec::load_y4m(input);
  const auto opts = spatial_options(cfg);
  const int w = std::min<int>(opts.window_frames, static_cast<int>(video.frames.size()));
  std::vector<FeatureTensor> tensors;
  for (int n = 0; n < w; ++n) tensors.push_back(extractor.feature_tensor(video.frames[n], opts.stride));
  const auto fused = localize(temporal_average(tensors));
  const auto heat = render_heatmap(fused.map, video.width, video.height, opts.stride);
  {
    std::ofstream out(run.path("heatmap.pgm"), std::ios::binary);
    write_pgm(out, heat);
  }
  run.record_file("heatmap", "heatmap.pgm", {{"input", input}, {"frames", std::to_string(w)}});
  std::ostringstream scores;
  write_score_csv(scores, fused.map);
  write_text(run, "scores", "scores.csv", scores.str());
  std::ostringstream weights;
  weights << "feature_map,ver\n";
  for (std::size_t k = 0; k < fused.weights.size(); ++k) weights << k << ',' << fmt(fused.weights[k]) << '\n';
  write_text(run, "ver_weights", "ver_weights.csv", weights.str());
  std::cout << "heatmap " << run.path("heatmap.pgm").string() << '\n';
  return 0;
}

int cmd_eval_temporal(const Common& c) {
  const Config cfg = resolve(c);
  auto run = open_run(c, cfg, "eval-temporal");
  nn::ModelWeights cm, qm;
  const auto extractor = load_extractor(cfg, cm, qm);
  const auto spec = harness::DatasetSpec::from_config(cfg);
  const auto d = harness::build_dataset_D(spec);
  harness::TemporalEvalOptions opts;
  opts.splice = splice_options(cfg);
  opts.stride = cfg.get_int("temporal.stride", opts.stride);
  opts.tolerance = cfg.get_int("temporal.tolerance", opts.tolerance);
  opts.max_clips = cfg.get_int("eval.max_clips", 0);
  opts.seed = cfg.get_u64("seed", opts.seed);
  const auto r = harness::evaluate_temporal(d, spec, extractor, opts);
  write_curve(run, "roc_concat.csv", r.concat);
  write_curve(run, "roc_codec.csv", r.codec_only);
  write_curve(run, "roc_quality.csv", r.quality_only);
  const std::string metrics = "descriptor,auc,pr_auc,best_f1,best_f1_threshold\n" + metrics_row("concat", r.concat) +
                              metrics_row("codec", r.codec_only) + metrics_row("quality", r.quality_only);
  write_text(run, "metrics", "metrics.csv", metrics, {{"clips", std::to_string(r.clips)}});
  // Calibrated threshold: midpoint between the best-F1 operating point and the next lower score.
  double threshold = r.concat.best_f1_threshold;
  for (std::size_t k = 0; k + 1 < r.concat.points.size(); ++k) {
    if (r.concat.points[k].threshold == threshold) threshold = (threshold + r.concat.points[k + 1].threshold) / 2.0;
  }
  Config calibration;
  calibration.set("temporal.threshold", fmt(threshold));
  calibration.set("model.codec", cfg.require("model.codec"));
  calibration.set("model.quality", cfg.require("model.quality"));
  std::ostringstream cal;
  calibration.write(cal);
  write_text(run, "calibration", "calibration.cfg", cal.str());
  std::cout << metrics << "detected " << r.detected << "/" << r.clips << " splices\n";
  return 0;
}

int cmd_eval_spatial(const Common& c) {
  const Config cfg = resolve(c);
  auto run = open_run(c, cfg, "eval-spatial");
  nn::ModelWeights cm, qm;
  const auto extractor = load_extractor(cfg, cm, qm);
  const auto spec = harness::DatasetSpec::from_config(cfg);
  const auto d = harness::build_dataset_D(spec);
  const auto r = harness::evaluate_spatial(d, spec, extractor, spatial_options(cfg));
  write_curve(run, "roc_single.csv", r.single_concat);
  write_curve(run, "roc_multi.csv", r.multi_concat);
  const std::string metrics = "descriptor,auc,pr_auc,best_f1,best_f1_threshold\n" +
                              metrics_row("single_concat", r.single_concat) +
                              metrics_row("single_codec", r.single_codec) +
                              metrics_row("single_quality", r.single_quality) +
                              metrics_row("multi_concat", r.multi_concat) + metrics_row("multi_codec", r.multi_codec) +
                              metrics_row("multi_quality", r.multi_quality);
  write_text(run, "metrics", "metrics.csv", metrics, {{"clips", std::to_string(r.clips)}});
  std::cout << metrics;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  nn::keep_tensor_memory();
  CLI::App app{"focal: codec-descriptor video forgery localization"};
  app.require_subcommand(1);
  app.fallthrough(false);

  struct Command {
    std::string name;
    std::string help;
    int (*run)(const Common&);
  };
  const std::vector<Command> commands = {
      {"gen-data", "generate the encoded dataset and its temporal and spatial splices", cmd_gen_data},
      {"encode", "encode a Y4M video with a synthetic codec", cmd_encode},
      {"train", "train the codec or quality classifier", cmd_train},
      {"rf-geometry", "print the receptive-field table of the network", cmd_rf_geometry},
      {"detect-temporal", "detect temporal splices in a Y4M video", cmd_detect_temporal},
      {"localize-spatial", "render a spatial forgery heatmap for a Y4M video", cmd_localize_spatial},
      {"eval-temporal", "frame-wise ROC evaluation of temporal splice detection", cmd_eval_temporal},
      {"eval-spatial", "patch-wise ROC evaluation of spatial localization", cmd_eval_spatial},
  };
  std::vector<Common> commons(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    auto* sub = app.add_subcommand(commands[k].name, commands[k].help);
    add_common(sub, commons[k], commands[k].name);
    subs.push_back(sub);
  }
  bind(subs[1], commons[1], "--input", "encode.input", "input Y4M");
  bind(subs[1], commons[1], "--output", "encode.output", "output Y4M, relative to the run directory");
  bind(subs[1], commons[1], "--flavor", "encode.flavor", "codec flavor A-D");
  bind(subs[1], commons[1], "--delta", "encode.delta", "quantization step");
  bind(subs[1], commons[1], "--q", "encode.q", "quality parameter (overrides --delta)");
  bind(subs[1], commons[1], "--family", "encode.family", "quality family for --q: h264 or mpeg");
  bind(subs[1], commons[1], "--gop", "encode.gop", "intra refresh period (0 disables)");
  bind(subs[2], commons[2], "--task", "train.task", "codec or quality");
  bind(subs[2], commons[2], "--epochs", "train.epochs", "epoch budget");
  bind(subs[2], commons[2], "--width", "model.width", "conv channels per layer (16..64)");
  for (const std::size_t k : {4u, 5u, 6u, 7u}) {
    bind(subs[k], commons[k], "--codec-model", "model.codec", "codec classifier weights (FOCW)");
    bind(subs[k], commons[k], "--quality-model", "model.quality", "quality classifier weights (FOCW)");
  }
  bind(subs[4], commons[4], "--input", "detect.input", "input Y4M");
  bind(subs[4], commons[4], "--threshold", "temporal.threshold", "Delta-f detection threshold");
  bind(subs[4], commons[4], "--period", "temporal.period", "GOP period override");
  bind(subs[5], commons[5], "--input", "localize.input", "input Y4M");
  bind(subs[5], commons[5], "--frames", "spatial.frames", "frames averaged (W)");
  bind(subs[5], commons[5], "--stride", "spatial.stride", "patch stride");

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto& c : commands) known = known || c.name == argv[1];
    if (!known) {
      std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
      return kUsageError;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    for (std::size_t k = 0; k < commands.size(); ++k) {
      if (subs[k]->parsed()) return commands[k].run(commons[k]);
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
