#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>

#include "doctest.h"
#include "ppocr/datakit/det_data.hpp"
#include "ppocr/datakit/rec_data.hpp"
#include "ppocr/distill/adam.hpp"
#include "ppocr/distill/batching.hpp"
#include "ppocr/distill/det_training.hpp"
#include "ppocr/distill/metrics_log.hpp"
#include "ppocr/distill/rec_training.hpp"
#include "ppocr/distill/schedule.hpp"
#include "ppocr/nn/checkpoint.hpp"
#include "ppocr/tensor/autograd.hpp"
#include "ppocr/tensor/ops.hpp"

using namespace ppocr;
namespace fs = std::filesystem;

namespace {

RecognizerConfig small_rec() {
  RecognizerConfig c;
  c.scale = 0.25;
  c.head_hidden = 16;
  return c;
}

TrainConfig quick(int epochs, std::uint64_t seed = 0) {
  TrainConfig t;
  t.epochs = epochs;
  t.warmup_epochs = 0;
  t.batch_size = 8;
  t.seed = seed;
  return t;
}

bool same_log(const MetricsLog& a, const MetricsLog& b) {
  return a.columns() == b.columns() && a.rows() == b.rows();
}

}  // namespace

TEST_CASE("lr schedule") {
  TrainConfig c;
  c.base_lr = 0.001;
  c.epochs = 10;
  c.warmup_epochs = 2;
  c.schedule = LrSchedule::cosine;
  CHECK(lr_at(c, 0, 5) == 0.0);
  CHECK(lr_at(c, 5, 5) == doctest::Approx(0.0005));
  // Half of the post-warm-up range: step 10 + 40 / 2.
  CHECK(lr_at(c, 30, 5) == doctest::Approx(0.0005));
  CHECK(lr_at(c, 10, 5) == doctest::Approx(0.001));
  // Continuity at the warm-up boundary.
  CHECK(std::abs(lr_at(c, 10, 1000) - lr_at(c, 9, 1000)) < 1e-6);
  CHECK(std::abs(lr_at(c, 10, 1000) - lr_at(c, 11, 1000)) < 1e-6);
  for (std::int64_t s = 10; s < 60; ++s) CHECK(lr_at(c, s + 1, 5) <= lr_at(c, s, 5));

  c.schedule = LrSchedule::piecewise;
  const int boundary = piecewise_boundary_epoch(c);
  CHECK(boundary == 8);
  CHECK(lr_at(c, boundary * 5 - 1, 5) == 0.001);
  CHECK(lr_at(c, boundary * 5, 5) == doctest::Approx(0.0001));
  CHECK_THROWS_AS(lr_at(c, -1, 5), std::invalid_argument);

  CHECK(parse_schedule("cosine") == LrSchedule::cosine);
  CHECK(schedule_name(LrSchedule::piecewise) == "piecewise");
  CHECK_THROWS_AS(parse_schedule("step"), std::invalid_argument);
}

TEST_CASE("train config validation and defaults") {
  TrainConfig c;
  CHECK(c.base_lr == 0.001);
  CHECK(c.alpha == 5.0);
  CHECK(c.beta == 10.0);
  CHECK(c.gamma == 5.0);
  CHECK(c.lambda == 0.05);
  c.validate();
  auto bad = c;
  bad.base_lr = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.warmup_epochs = bad.epochs;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("adam follows the bias-corrected update") {
  ParamStore<double> store;
  store.add("w", Tensor<double>({2}, std::vector<double>{1.0, -2.0}));
  store.set_requires_grad(true);
  Adam<double> opt(store);
  // Reference implementation for f(w) = sum(w^2), gradient 2w.
  std::vector<double> w{1.0, -2.0}, m(2, 0.0), v(2, 0.0);
  for (int t = 1; t <= 5; ++t) {
    store.zero_grad();
    auto& x = store.at("w");
    backward(sum(mul(x, x)));
    opt.step(0.1);
    for (std::size_t i = 0; i < 2; ++i) {
      const double g = 2 * w[i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, t)), vh = v[i] / (1 - std::pow(0.999, t));
      w[i] -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(store.at("w").data()[0] == doctest::Approx(w[0]).epsilon(1e-12));
    CHECK(store.at("w").data()[1] == doctest::Approx(w[1]).epsilon(1e-12));
  }
  CHECK(opt.steps() == 5);
}

TEST_CASE("batching") {
  std::mt19937_64 rng(1);
  const auto batches = make_batches(10, 4, rng);
  REQUIRE(batches.size() == 3);
  CHECK(batches[2].size() == 2);
  std::set<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  CHECK(seen.size() == 10);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  DivergenceError e(3, 17, "loss");
  CHECK(e.epoch() == 3);
  CHECK(e.step() == 17);
}

TEST_CASE("metrics log") {
  MetricsLog log({"epoch", "loss"});
  log.append({1, 0.1});
  log.append({2, 1.0 / 3});
  CHECK_THROWS(log.append({3}));
  CHECK(log.value(1, "loss") == 1.0 / 3);
  CHECK(log.column("epoch") == std::vector<double>{1, 2});
  CHECK_THROWS(log.column_index("nope"));
  const auto parsed = MetricsLog::parse_csv(log.to_csv());
  CHECK(same_log(parsed, log));
  CHECK(log.to_csv().substr(0, 11) == "epoch,loss\n");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("u-dml is bitwise reproducible and logs every component") {
  const auto data = gen_rec_dataset(Charset::digits(), 8, {2, 4}, 3, 0.05);
  const auto a = train_udml(small_rec(), quick(1), data);
  const auto b = train_udml(small_rec(), quick(1), data);
  CHECK(same_log(a.log, b.log));
  CHECK(a.student.params().bitwise_equal(b.student.params()));
  CHECK(a.teacher.params().bitwise_equal(b.teacher.params()));
  CHECK(a.log.columns() == std::vector<std::string>{"epoch", "lr", "ctc", "center", "dml", "feat", "total"});
  CHECK(a.log.size() == 1);
  CHECK(a.log.value(0, "dml") > 0);
  CHECK(a.log.value(0, "feat") > 0);

  auto no_feat = quick(1);
  no_feat.feat_weight = 0;
  CHECK(train_udml(small_rec(), no_feat, data).log.value(0, "feat") == 0.0);

  // The two networks start from different seeds.
  CHECK_FALSE(a.student.params().bitwise_equal(a.teacher.params()));
}

TEST_CASE("standalone recognizer shares the student initialisation") {
  const auto data = gen_rec_dataset(Charset::digits(), 8, {2, 4}, 4, 0.0);
  auto cfg = quick(1);
  const auto a = train_recognizer(small_rec(), cfg, data);
  const auto b = train_recognizer(small_rec(), cfg, data);
  CHECK(same_log(a.log, b.log));
  CHECK(a.log.columns() == std::vector<std::string>{"epoch", "lr", "ctc", "center", "total"});
  CHECK(a.log.value(0, "center") == 0.0);
  cfg.center_loss = true;
  CHECK(train_recognizer(small_rec(), cfg, data).log.value(0, "center") > 0.0);
  const Recognizer<float> fresh(small_rec(), derive_seed(0, kStudentStream));
  const auto acc = evaluate_recognizer(fresh, data);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK(predict_labels(fresh, data).size() == data.size());
}

TEST_CASE("divergence guard records the step") {
  const auto data = gen_rec_dataset(Charset::digits(), 16, {2, 4}, 4, 0.0);
  auto cfg = quick(3);
  cfg.base_lr = 1e300;
  try {
    train_recognizer(small_rec(), cfg, data);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 1);
    CHECK(e.epoch() >= 1);
  }
}

TEST_CASE("cml keeps the teacher frozen and logs its components") {
  const auto data = gen_det_dataset(8, {1, 2}, 7);
  const Detector<float> teacher({DetectorPreset::teacher, 1}, 99);
  const auto before = teacher.params().checksum();
  const auto r = train_cml({DetectorPreset::student, 1}, quick(2), data, teacher);
  CHECK(teacher.params().checksum() == before);
  CHECK(r.teacher_checksum == before);
  CHECK(r.log.size() == 2);
  for (const char* col : {"gt_s1", "gt_s2", "dml", "distill_s1", "distill_s2", "total"}) {
    CHECK(r.log.value(0, col) > 0);
  }
  const auto again = train_cml({DetectorPreset::student, 1}, quick(2), data, teacher);
  CHECK(same_log(r.log, again.log));
  CHECK(r.student1.params().bitwise_equal(again.student1.params()));
}

TEST_CASE("cml without distill and dml reduces to two plain trainings") {
  const auto data = gen_det_dataset(8, {1, 2}, 8);
  const Detector<float> teacher({DetectorPreset::teacher, 1}, 5);
  auto cfg = quick(1, 4);
  cfg.distill_weight = 0;
  cfg.dml_weight = 0;
  const auto cml = train_cml({DetectorPreset::student, 1}, cfg, data, teacher);
  const auto plain1 = train_detector({DetectorPreset::student, 1}, cfg, data, nullptr, {}, kStudentStream);
  const auto plain2 = train_detector({DetectorPreset::student, 1}, cfg, data, nullptr, {}, kPeerStream);
  CHECK(std::abs(cml.log.value(0, "gt_s1") - plain1.log.value(0, "gt")) < 1e-6);
  CHECK(std::abs(cml.log.value(0, "gt_s2") - plain2.log.value(0, "gt")) < 1e-6);
  CHECK(cml.log.value(0, "dml") == 0.0);
  CHECK(cml.log.value(0, "distill_s1") == 0.0);
}

TEST_CASE("cml rejects a missing or mismatched teacher checkpoint") {
  const auto data = gen_det_dataset(4, {1, 1}, 9);
  const fs::path dir = fs::temp_directory_path() / "ppocr_test_cml";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK_THROWS(train_cml({DetectorPreset::student, 1}, quick(1), data, dir / "absent.ckpt"));
  const Detector<float> student({DetectorPreset::student, 1}, 1);
  save_checkpoint(student.params(), dir / "student.ckpt");
  try {
    train_cml({DetectorPreset::student, 1}, quick(1), data, dir / "student.ckpt");
    FAIL("expected a shape mismatch");
  } catch (const CheckpointError& e) {
    CHECK(e.kind() != CheckpointErrorKind::io);
  }
  const Detector<float> teacher({DetectorPreset::teacher, 1}, 2);
  save_checkpoint(teacher.params(), dir / "teacher.ckpt");
  const auto r = train_cml({DetectorPreset::student, 1}, quick(1), data, dir / "teacher.ckpt");
  CHECK(r.teacher_checksum == teacher.params().checksum());
  fs::remove_all(dir);
}

TEST_CASE("detector evaluation on ground truth boxes") {
  const auto data = gen_det_dataset(5, {1, 3}, 10);
  for (const auto& s : data) {
    const auto gt = ground_truth_boxes(s);
    CHECK(gt.size() == s.instances.size());
  }
  const Detector<float> net({DetectorPreset::student, 1}, 3);
  const auto report = evaluate_detector(net, data);
  CHECK(report.gt > 0);
  CHECK(report.hmean >= 0.0);
  CHECK(report.hmean <= 1.0);
  CHECK(predict_boxes(net, data, {}).size() == data.size());
}
