#include "ppocr/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppocr/cli/config_file.hpp"
#include "ppocr/cli/gradcheck.hpp"
#include "ppocr/cli/run_dir.hpp"
#include "ppocr/datakit/copy_paste.hpp"
#include "ppocr/datakit/dataset_io.hpp"
#include "ppocr/distill/batching.hpp"
#include "ppocr/distill/det_training.hpp"
#include "ppocr/evalkit/decode.hpp"
#include "ppocr/losses/ctc.hpp"
#include "ppocr/losses/divergence.hpp"
#include "ppocr/nn/checkpoint.hpp"
#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct CommonFlags {
  std::string config;
  long long seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out;
  bool overwrite = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_out) {
  cmd->add_option("--config", f.config, "key=value config file")->check(CLI::ExistingFile);
  f.seed_opt = cmd->add_option("--seed", f.seed, "run seed")->check(CLI::NonNegativeNumber);
  auto* out = cmd->add_option("--out", f.out, "output directory");
  if (needs_out) out->required();
  cmd->add_flag("--overwrite", f.overwrite, "replace an existing output directory");
  cmd->add_option("--set", f.sets, "override a config key (key=value), repeatable");
}

// File values, then --set overrides, then dedicated flags.
ConfigMap merged_config(const CommonFlags& f) {
  ConfigMap cfg = f.config.empty() ? ConfigMap{} : load_config(f.config);
  for (const auto& s : f.sets) apply_override(cfg, s);
  if (f.seed_opt && f.seed_opt->count()) cfg.set("seed", std::to_string(f.seed), "--seed");
  return cfg;
}

void set_path(ConfigMap& cfg, const char* key, const std::string& value, const char* flag) {
  if (!value.empty()) cfg.set(key, fs::absolute(value).lexically_normal().string(), flag);
}

std::string require_path(const ConfigMap& cfg, const char* key, const char* flag) {
  auto v = cfg.get(key);
  if (!v || v->empty()) throw UsageError(std::string(flag) + " is required");
  return *v;
}

std::uint64_t seed_of(const ConfigMap& cfg) {
  return train_config_from(cfg, TrainConfig{}).seed;
}

// Runs `body` inside a freshly prepared run directory, leaving a FAILED
// marker behind if it throws.
void in_run_dir(const fs::path& dir, bool overwrite, const std::function<void()>& body) {
  prepare_output_dir(dir, overwrite);
  try {
    body();
  } catch (const std::exception& e) {
    mark_failed(dir, e.what());
    throw;
  }
}

EpochCallback progress(const fs::path& dir, std::ostream& err, int epochs) {
  return [dir, &err, epochs](const MetricsLog& log) {
    log.write(dir / kMetricsFile);
    const auto& row = log.rows().back();
    err << "epoch " << row[0] << "/" << epochs;
    for (std::size_t i = 2; i < row.size(); ++i) {
      err << " " << log.columns()[i] << "=" << format_number(row[i]);
    }
    err << '\n';
  };
}

void write_snapshot(const fs::path& dir, const ConfigMap& cfg, const std::string& command) {
  write_text(dir / kConfigSnapshot, "# ppocr " + command + "\n" + cfg.to_text());
}

RecognizerConfig rec_config_for(const ConfigMap& cfg, const Charset& charset) {
  RecognizerConfig rc = recognizer_config_from(cfg);
  rc.num_classes = charset.num_classes();
  return rc;
}

void check_rec_geometry(const std::vector<RecSample>& samples, const RecognizerConfig& rc) {
  for (const auto& s : samples) {
    if (s.image.height != rc.input_height || s.image.width != rc.input_width || s.image.channels != 1) {
      throw UsageError("dataset image is " + std::to_string(s.image.height) + "x" +
                       std::to_string(s.image.width) + ", recognizer expects " +
                       std::to_string(rc.input_height) + "x" + std::to_string(rc.input_width) +
                       " gray (set rec.input_height / rec.input_width)");
    }
  }
}

std::vector<RecSample> load_rec(const std::string& dir, Charset* charset) {
  if (dataset_kind(dir) != DatasetKind::rec) throw UsageError(dir + " is not a recognition dataset");
  return read_rec_dataset(dir, charset);
}

std::vector<DetSample> load_det(const std::string& dir) {
  if (dataset_kind(dir) != DatasetKind::det) throw UsageError(dir + " is not a detection dataset");
  return read_det_dataset(dir);
}

// ---------------------------------------------------------------- gen-data

struct GenFlags {
  CommonFlags common;
  std::string kind;
  int count = 0;
  std::string charset = "0-9";
  int min_len = 3, max_len = 5;
  double noise = 0.0;
  int height = 0, width = 0;
  int min_instances = 1, max_instances = 3;
};

void cmd_gen_data(const GenFlags& f, std::ostream& out) {
  if (f.kind != "rec" && f.kind != "det") throw UsageError("--kind must be rec or det");
  if (f.count < 1) throw UsageError("--count must be >= 1");
  const ConfigMap cfg = merged_config(f.common);
  const std::uint64_t seed = seed_of(cfg);
  in_run_dir(f.common.out, f.common.overwrite, [&] {
    if (f.kind == "rec") {
      const Charset charset = Charset::from_spec(f.charset);
      RecImageSize size;
      if (f.height) size.height = f.height;
      if (f.width) size.width = f.width;
      write_rec_dataset(f.common.out,
                        gen_rec_dataset(charset, f.count, {f.min_len, f.max_len}, seed, f.noise, size),
                        charset);
    } else {
      DetImageSize size;
      if (f.height) size.height = f.height;
      if (f.width) size.width = f.width;
      write_det_dataset(f.common.out,
                        gen_det_dataset(f.count, {f.min_instances, f.max_instances}, seed, size));
    }
  });
  out << ojson{{"kind", f.kind}, {"count", f.count}, {"out", f.common.out}}.dump() << '\n';
}

// ---------------------------------------------------------------- training

struct TrainFlags {
  CommonFlags common;
  std::string data, val, teacher_ckpt, preset;
  bool no_feat = false, no_dml = false;
};

ConfigMap training_config(const TrainFlags& f) {
  ConfigMap cfg = merged_config(f.common);
  set_path(cfg, "data", f.data, "--data");
  set_path(cfg, "val", f.val, "--val");
  set_path(cfg, "teacher_ckpt", f.teacher_ckpt, "--teacher-ckpt");
  if (!f.preset.empty()) cfg.set("det.preset", f.preset, "--preset");
  if (f.no_feat) cfg.set("feat_weight", "0", "--no-feat-loss");
  if (f.no_dml) cfg.set("dml_weight", "0", "--no-dml-loss");
  return cfg;
}

ojson summary(const fs::path& dir, const MetricsLog& log) {
  ojson j{{"run", dir.string()}, {"epochs", log.size()}};
  for (std::size_t i = 1; i < log.columns().size(); ++i) j[log.columns()[i]] = log.rows().back()[i];
  return j;
}

void cmd_train_rec(const TrainFlags& f, bool udml, std::ostream& out, std::ostream& err) {
  ConfigMap cfg = training_config(f);
  const std::string data = require_path(cfg, "data", "--data");
  const TrainConfig tc = train_config_from(cfg);
  Charset charset;
  const auto train = load_rec(data, &charset);
  const RecognizerConfig rc = rec_config_for(cfg, charset);
  validate(rc);
  check_rec_geometry(train, rc);
  std::vector<RecSample> val;
  if (auto v = cfg.get("val")) {
    Charset vc;
    val = load_rec(*v, &vc);
    if (!(vc == charset)) throw UsageError("validation charset differs from the training charset");
    check_rec_geometry(val, rc);
  }
  store_train_config(cfg, tc);
  store_recognizer_config(cfg, rc);
  const fs::path dir = f.common.out;
  in_run_dir(dir, f.common.overwrite, [&] {
    write_snapshot(dir, cfg, udml ? "distill-udml" : "train-rec");
    const auto cb = progress(dir, err, tc.epochs);
    const auto* vp = val.empty() ? nullptr : &val;
    if (udml) {
      auto r = train_udml(rc, tc, train, vp, cb);
      save_checkpoint(r.student.params(), dir / "student.ckpt");
      save_checkpoint(r.teacher.params(), dir / "teacher.ckpt");
      r.log.write(dir / kMetricsFile);
      out << summary(dir, r.log).dump() << '\n';
    } else {
      auto r = train_recognizer(rc, tc, train, vp, cb);
      save_checkpoint(r.net.params(), dir / "model.ckpt");
      r.log.write(dir / kMetricsFile);
      out << summary(dir, r.log).dump() << '\n';
    }
  });
}

void check_det_geometry(const std::vector<DetSample>& samples, const Detector<float>& net) {
  const int m = net.size_multiple();
  for (const auto& s : samples) {
    if (s.image.channels != net.config().in_channels || s.image.height % m || s.image.width % m) {
      throw UsageError("detection images must have " + std::to_string(net.config().in_channels) +
                       " channel(s) and sides divisible by " + std::to_string(m));
    }
  }
}

void cmd_train_det(const TrainFlags& f, bool cml, std::ostream& out, std::ostream& err) {
  ConfigMap cfg = training_config(f);
  const std::string data = require_path(cfg, "data", "--data");
  const TrainConfig tc = train_config_from(cfg);
  DetectorConfig dc = detector_config_from(cfg);
  std::string teacher_ckpt;
  if (cml) {
    teacher_ckpt = require_path(cfg, "teacher_ckpt", "--teacher-ckpt");
    if (!fs::exists(teacher_ckpt)) throw UsageError("teacher checkpoint not found: " + teacher_ckpt);
    if (dc.preset != DetectorPreset::student) throw UsageError("CML trains the student preset");
  }
  const auto train = load_det(data);
  check_det_geometry(train, Detector<float>(dc, 0));
  std::vector<DetSample> val;
  if (auto v = cfg.get("val")) {
    val = load_det(*v);
    check_det_geometry(val, Detector<float>(dc, 0));
  }
  store_train_config(cfg, tc);
  store_detector_config(cfg, dc);
  const fs::path dir = f.common.out;
  in_run_dir(dir, f.common.overwrite, [&] {
    write_snapshot(dir, cfg, cml ? "distill-cml" : "train-det");
    const auto cb = progress(dir, err, tc.epochs);
    const auto* vp = val.empty() ? nullptr : &val;
    if (cml) {
      auto r = train_cml(dc, tc, train, fs::path(teacher_ckpt), vp, cb);
      save_checkpoint(r.student1.params(), dir / "student1.ckpt");
      save_checkpoint(r.student2.params(), dir / "student2.ckpt");
      r.log.write(dir / kMetricsFile);
      auto j = summary(dir, r.log);
      j["teacher_checksum"] = r.teacher_checksum;
      out << j.dump() << '\n';
    } else {
      auto r = train_detector(dc, tc, train, vp, cb);
      save_checkpoint(r.net.params(), dir / "model.ckpt");
      r.log.write(dir / kMetricsFile);
      out << summary(dir, r.log).dump() << '\n';
    }
  });
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
  CommonFlags common;
  std::string ckpt, data, preset;
  double iou_thresh = 0, bin_thresh = 0, unclip_ratio = -1;
  int min_area = -1;
};

void cmd_eval_rec(const EvalFlags& f, std::ostream& out) {
  ConfigMap cfg = merged_config(f.common);
  Charset charset;
  const auto samples = load_rec(f.data, &charset);
  const RecognizerConfig rc = rec_config_for(cfg, charset);
  check_rec_geometry(samples, rc);
  Recognizer<float> net(rc, 0);
  load_checkpoint_into(net.params(), f.ckpt);
  const auto preds = predict_labels(net, samples);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) hits += preds[i] == samples[i].label;
  std::vector<SeqLabel> gts;
  for (const auto& s : samples) gts.push_back(s.label);
  out << recognition_report(sentence_accuracy(preds, gts), hits, samples.size()).to_json() << '\n';
}

void cmd_eval_det(const EvalFlags& f, std::ostream& out) {
  ConfigMap cfg = merged_config(f.common);
  if (!f.preset.empty()) cfg.set("det.preset", f.preset, "--preset");
  DetEvalOptions opts = det_eval_options_from(cfg);
  if (f.iou_thresh > 0) opts.iou_thresh = f.iou_thresh;
  if (f.bin_thresh > 0) opts.boxes.bin_thresh = f.bin_thresh;
  if (f.unclip_ratio >= 0) opts.boxes.unclip_ratio = f.unclip_ratio;
  if (f.min_area >= 0) opts.boxes.min_area = f.min_area;
  if (!(opts.iou_thresh > 0 && opts.iou_thresh <= 1)) throw UsageError("--iou-thresh must be in (0, 1]");
  if (!(opts.boxes.bin_thresh > 0 && opts.boxes.bin_thresh < 1)) {
    throw UsageError("--bin-thresh must be in (0, 1)");
  }
  const auto samples = load_det(f.data);
  Detector<float> net(detector_config_from(cfg), 0);
  check_det_geometry(samples, net);
  load_checkpoint_into(net.params(), f.ckpt);
  out << evaluate_detector(net, samples, opts).to_json() << '\n';
}

// ---------------------------------------------------------------- augment

struct AugmentFlags {
  CommonFlags common;
  std::string data;
  int donors = 2;
  int max_attempts = CopyPasteOptions{}.max_attempts;
  double max_rotation = kMaxPasteRotationDeg;
};

void cmd_augment(const AugmentFlags& f, std::ostream& out) {
  if (f.donors < 0) throw UsageError("--donors must be >= 0");
  if (f.max_attempts < 1) throw UsageError("--max-attempts must be >= 1");
  if (f.max_rotation < 0 || f.max_rotation > 45) throw UsageError("--max-rotation must be in [0, 45]");
  const ConfigMap cfg = merged_config(f.common);
  if (fs::absolute(f.data).lexically_normal() == fs::absolute(f.common.out).lexically_normal()) {
    throw UsageError("--out must differ from --data");
  }
  if (dataset_kind(f.data) != DatasetKind::det) {
    throw UsageError("augment works on detection datasets only; " + f.data + " is a recognition dataset");
  }
  const auto records = read_annotations(fs::path(f.data) / kLabelsFile);
  const auto samples = read_det_dataset(f.data);
  const auto pool = harvest_instances(samples);
  std::mt19937_64 rng(seed_of(cfg));
  CopyPasteOptions opts{f.max_attempts, f.max_rotation};
  CopyPasteStats total;
  in_run_dir(f.common.out, f.common.overwrite, [&] {
    fs::create_directories(fs::path(f.common.out) / kImagesDir);
    std::vector<AnnotationRecord> out_records;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      CopyPasteStats stats;
      const auto donors = sample_donors(pool, static_cast<std::size_t>(f.donors), rng);
      const DetSample aug = copy_paste(samples[i], donors, rng, opts, &stats);
      total += stats;
      const fs::path dst = fs::path(f.common.out) / records[i].image;
      fs::create_directories(dst.parent_path());
      if (stats.accepted == 0) {
        fs::copy_file(fs::path(f.data) / records[i].image, dst, fs::copy_options::overwrite_existing);
        out_records.push_back(records[i]);
        continue;
      }
      write_pnm(aug.image, dst);
      AnnotationRecord rec{records[i].image, std::nullopt, {}};
      for (const auto& inst : aug.instances) rec.instances.push_back({inst.polygon, inst.transcription});
      out_records.push_back(std::move(rec));
    }
    write_annotations(fs::path(f.common.out) / kLabelsFile, out_records);
  });
  out << ojson{{"images", samples.size()},
               {"offered", total.offered},
               {"accepted", total.accepted},
               {"skipped", total.skipped}}
             .dump()
      << '\n';
}

// ---------------------------------------------------------------- gradcheck

struct GradFlags {
  std::string losses;
  int instances = 100;
  long long seed = 0;
  bool inject_fault = false;
};

int cmd_gradcheck(const GradFlags& f, std::ostream& out) {
  std::vector<std::string> names;
  if (f.losses.empty()) {
    names = gradcheck_loss_names();
  } else {
    std::stringstream ss(f.losses);
    for (std::string name; std::getline(ss, name, ',');) {
      const auto& known = gradcheck_loss_names();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw UsageError("unknown loss '" + name + "'");
      }
      names.push_back(name);
    }
  }
  if (f.instances < 1) throw UsageError("--instances must be >= 1");
  const auto rows = run_gradcheck(names, f.instances, static_cast<std::uint64_t>(f.seed), f.inject_fault);
  out << gradcheck_csv(rows);
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass(); }) ? 0 : 1;
}

// ---------------------------------------------------------------- bench

Tensor<float> random_tensor(Shape shape, std::mt19937_64& rng) {
  std::normal_distribution<float> d(0.0f, 1.0f);
  std::vector<float> v(numel(shape));
  for (auto& x : v) x = d(rng);
  return Tensor<float>(std::move(shape), std::move(v));
}

void cmd_bench(int reps, long long seed, std::ostream& out) {
  if (reps < 1) throw UsageError("--reps must be >= 1");
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  const auto x = random_tensor({8, 16, 16, 64}, rng);
  const auto k3 = random_tensor({32, 16, 3, 3}, rng);
  const auto dw = random_tensor({16, 1, 5, 5}, rng);
  const auto a = random_tensor({256, 256}, rng), b = random_tensor({256, 256}, rng);
  const auto logits = random_tensor({16, 16, 11}, rng);
  const auto logits2 = random_tensor({16, 16, 11}, rng);
  std::vector<SeqLabel> labels(16, SeqLabel{{1, 2, 3, 4}});
  RecognizerConfig rc;
  const Recognizer<float> rec(rc, 1);
  const auto rec_in = random_tensor({16, 1, 16, 64}, rng);
  const Detector<float> det(DetectorConfig{}, 1);
  const auto det_in = random_tensor({16, 1, 32, 32}, rng);
  const std::vector<std::pair<std::string, std::function<void()>>> ops{
      {"conv2d_3x3", [&] { conv2d(x, k3, IntPair(1), IntPair(1)); }},
      {"conv2d_depthwise_5x5", [&] { conv2d(x, dw, IntPair(1), IntPair(2), 16); }},
      {"matmul_256", [&] { matmul(a, b); }},
      {"ctc_loss_batch", [&] { ctc_loss_batch(log_softmax(logits, 2), labels); }},
      {"dml_loss", [&] { dml_loss(logits, logits2); }},
      {"recognizer_forward", [&] { rec.forward(rec_in); }},
      {"detector_forward", [&] { det.forward(det_in); }},
  };
  NoGradGuard guard;
  out << "name,median_ms\n";
  for (const auto& [name, fn] : ops) {
    std::vector<double> ms;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      fn();
      ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    std::nth_element(ms.begin(), ms.begin() + static_cast<std::ptrdiff_t>(ms.size() / 2), ms.end());
    out << name << "," << format_number(ms[ms.size() / 2]) << '\n';
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Desk-scale OCR distillation toolkit", "ppocr"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic dataset");
  add_common(gen_cmd, gen.common, true);
  gen_cmd->add_option("--kind", gen.kind, "rec or det")->required();
  gen_cmd->add_option("--count", gen.count, "number of images")->required();
  gen_cmd->add_option("--charset", gen.charset, "recognition symbols, e.g. 0-9A-Z");
  gen_cmd->add_option("--min-len", gen.min_len, "shortest recognition label");
  gen_cmd->add_option("--max-len", gen.max_len, "longest recognition label");
  gen_cmd->add_option("--noise", gen.noise, "noise standard deviation as a fraction of 255");
  gen_cmd->add_option("--height", gen.height, "image height");
  gen_cmd->add_option("--width", gen.width, "image width");
  gen_cmd->add_option("--min-instances", gen.min_instances, "fewest text blocks per image");
  gen_cmd->add_option("--max-instances", gen.max_instances, "most text blocks per image");

  TrainFlags train_rec, udml, train_det, cml;
  struct TrainCmd {
    const char* name;
    const char* help;
    TrainFlags* flags;
  };
  std::vector<std::pair<CLI::App*, TrainFlags*>> train_cmds;
  for (const auto& tcmd : {TrainCmd{"train-rec", "train a standalone recognizer", &train_rec},
                           TrainCmd{"distill-udml", "mutual distillation of two recognizers", &udml},
                           TrainCmd{"train-det", "train a DB detector", &train_det},
                           TrainCmd{"distill-cml", "two students with a frozen teacher", &cml}}) {
    auto* cmd = app.add_subcommand(tcmd.name, tcmd.help);
    add_common(cmd, tcmd.flags->common, true);
    cmd->add_option("--data", tcmd.flags->data, "training dataset directory");
    cmd->add_option("--val", tcmd.flags->val, "validation dataset directory");
    train_cmds.push_back({cmd, tcmd.flags});
  }
  train_cmds[1].first->add_flag("--no-feat-loss", udml.no_feat, "drop the feature term");
  train_cmds[1].first->add_flag("--no-dml-loss", udml.no_dml, "drop the mutual term");
  train_cmds[2].first->add_option("--preset", train_det.preset, "student or teacher");
  train_cmds[3].first->add_option("--teacher-ckpt", cml.teacher_ckpt, "frozen teacher checkpoint");
  train_cmds[3].first->add_flag("--no-dml-loss", cml.no_dml, "drop the mutual term");

  EvalFlags eval_rec, eval_det;
  auto* eval_rec_cmd = app.add_subcommand("eval-rec", "sentence accuracy of a recognizer");
  auto* eval_det_cmd = app.add_subcommand("eval-det", "precision, recall and Hmean of a detector");
  for (auto [cmd, flags] : {std::pair{eval_rec_cmd, &eval_rec}, std::pair{eval_det_cmd, &eval_det}}) {
    add_common(cmd, flags->common, false);
    cmd->add_option("--ckpt", flags->ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
    cmd->add_option("--data", flags->data, "dataset directory")->required()->check(CLI::ExistingDirectory);
  }
  eval_det_cmd->add_option("--preset", eval_det.preset, "student or teacher");
  eval_det_cmd->add_option("--iou-thresh", eval_det.iou_thresh, "IoU needed for a match");
  eval_det_cmd->add_option("--bin-thresh", eval_det.bin_thresh, "probability binarization threshold");
  eval_det_cmd->add_option("--unclip-ratio", eval_det.unclip_ratio, "box expansion ratio");
  eval_det_cmd->add_option("--min-area", eval_det.min_area, "smallest component in pixels");

  AugmentFlags aug;
  auto* aug_cmd = app.add_subcommand("augment", "CopyPaste augmentation of a detection dataset");
  add_common(aug_cmd, aug.common, true);
  aug_cmd->add_option("--data", aug.data, "source detection dataset")->required()->check(CLI::ExistingDirectory);
  aug_cmd->add_option("--donors", aug.donors, "donor instances offered per image");
  aug_cmd->add_option("--max-attempts", aug.max_attempts, "placements tried per donor");
  aug_cmd->add_option("--max-rotation", aug.max_rotation, "largest donor rotation in degrees");

  GradFlags grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of every loss");
  grad_cmd->add_option("--losses", grad.losses, "comma-separated subset");
  grad_cmd->add_option("--instances", grad.instances, "random instances per loss");
  grad_cmd->add_option("--seed", grad.seed, "instance seed")->check(CLI::NonNegativeNumber);
  grad_cmd->add_flag("--inject-fault", grad.inject_fault)->group("");

  int reps = 100;
  long long bench_seed = 0;
  auto* bench_cmd = app.add_subcommand("bench", "median wall time of core operators");
  bench_cmd->add_option("--reps", reps, "repetitions per operator");
  bench_cmd->add_option("--seed", bench_seed, "input seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) {
      cmd_gen_data(gen, out);
    } else if (train_cmds[0].first->parsed()) {
      cmd_train_rec(train_rec, false, out, err);
    } else if (train_cmds[1].first->parsed()) {
      cmd_train_rec(udml, true, out, err);
    } else if (train_cmds[2].first->parsed()) {
      cmd_train_det(train_det, false, out, err);
    } else if (train_cmds[3].first->parsed()) {
      cmd_train_det(cml, true, out, err);
    } else if (eval_rec_cmd->parsed()) {
      cmd_eval_rec(eval_rec, out);
    } else if (eval_det_cmd->parsed()) {
      cmd_eval_det(eval_det, out);
    } else if (aug_cmd->parsed()) {
      cmd_augment(aug, out);
    } else if (grad_cmd->parsed()) {
      return cmd_gradcheck(grad, out);
    } else if (bench_cmd->parsed()) {
      cmd_bench(reps, bench_seed, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ppocr
