#include "ppocr/distill/det_training.hpp"

#include <cmath>

#include "ppocr/distill/adam.hpp"
#include "ppocr/distill/batching.hpp"
#include "ppocr/losses/divergence.hpp"
#include "ppocr/losses/totals.hpp"
#include "ppocr/nn/checkpoint.hpp"
#include "ppocr/tensor/autograd.hpp"
#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace {

void require_finite(double value, int epoch, std::int64_t step, const char* what) {
  if (!std::isfinite(value)) throw DivergenceError(epoch, step, std::string(what) + " is not finite");
}

void check_inputs(const TrainConfig& config, const std::vector<DetSample>& train) {
  config.validate();
  if (train.empty()) throw std::invalid_argument("training set is empty");
}

// Slice [i] of an [N, H, W] map as [H, W].
Tensor<float> plane(const Tensor<float>& maps, std::size_t i) {
  return reshape(narrow(maps, 0, i, 1), Shape{maps.dim(1), maps.dim(2)});
}

}  // namespace

std::vector<DetBox> ground_truth_boxes(const DetSample& sample) {
  std::vector<DetBox> boxes;
  for (const auto& inst : sample.instances) boxes.push_back({bounding_box(inst.polygon), 1.0});
  return boxes;
}

std::vector<std::vector<DetBox>> predict_boxes(const Detector<float>& net,
                                               const std::vector<DetSample>& samples,
                                               const BoxOptions& options, std::size_t batch_size) {
  NoGradGuard guard;
  std::vector<std::vector<DetBox>> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); i += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t j = i; j < std::min(samples.size(), i + batch_size); ++j) idx.push_back(j);
    const auto prob = net.forward(det_batch_images<float>(samples, idx)).maps.prob;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.push_back(boxes_from_probmap(plane(prob, k), options));
    }
  }
  return out;
}

EvalReport evaluate_detector(const Detector<float>& net, const std::vector<DetSample>& samples,
                             const DetEvalOptions& options) {
  std::vector<std::vector<DetBox>> gts;
  for (const auto& s : samples) gts.push_back(ground_truth_boxes(s));
  return det_hmean_dataset(predict_boxes(net, samples, options.boxes), gts, options.iou_thresh);
}

DetTrainResult train_detector(const DetectorConfig& det_config, const TrainConfig& config,
                              const std::vector<DetSample>& train,
                              const std::vector<DetSample>* val, const EpochCallback& on_epoch,
                              std::uint64_t init_stream) {
  check_inputs(config, train);
  Detector<float> net(det_config, derive_seed(config.seed, init_stream));
  net.params().set_requires_grad(true);
  Adam<float> opt(net.params());
  std::mt19937_64 shuffle(derive_seed(config.seed, kShuffleStream));
  const auto bs = static_cast<std::size_t>(config.batch_size);
  const auto spe = static_cast<std::int64_t>((train.size() + bs - 1) / bs);

  std::vector<std::string> columns{"epoch", "lr", "l_p", "l_b", "l_t", "gt"};
  if (val) columns.push_back("val_hmean");
  MetricsLog log(columns);
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(train.size(), bs, shuffle);
    double lp = 0, lb = 0, lt = 0, lr = 0;
    for (const auto& b : batches) {
      lr = lr_at(config, step, spe);
      net.params().zero_grad();
      const auto out = net.forward(det_batch_images<float>(train, b));
      const auto terms = db_gt_loss(out.maps, det_batch_targets<float>(train, b), config.alpha,
                                    config.beta);
      require_finite(terms.total.item(), epoch, step, "loss");
      lp += terms.l_p.item();
      lb += terms.l_b.item();
      lt += terms.l_t.item();
      backward(terms.total);
      opt.step(lr);
      ++step;
    }
    const double nb = static_cast<double>(batches.size());
    lp /= nb;
    lb /= nb;
    lt /= nb;
    std::vector<double> row{double(epoch), lr, lp, lb, lt,
                            combine_db_gt(lp, lb, lt, config.alpha, config.beta)};
    if (val) row.push_back(evaluate_detector(net, *val).hmean);
    log.append(std::move(row));
    if (on_epoch) on_epoch(log);
  }
  return {std::move(net), std::move(log)};
}

CmlResult train_cml(const DetectorConfig& student_config, const TrainConfig& config,
                    const std::vector<DetSample>& train, const Detector<float>& teacher,
                    const std::vector<DetSample>* val, const EpochCallback& on_epoch) {
  check_inputs(config, train);
  Detector<float> s1(student_config, derive_seed(config.seed, kStudentStream));
  Detector<float> s2(student_config, derive_seed(config.seed, kPeerStream));
  s1.params().set_requires_grad(true);
  s2.params().set_requires_grad(true);
  Adam<float> opt1(s1.params()), opt2(s2.params());
  const std::uint64_t teacher_sum = teacher.params().checksum();
  std::mt19937_64 shuffle(derive_seed(config.seed, kShuffleStream));
  const auto bs = static_cast<std::size_t>(config.batch_size);
  const auto spe = static_cast<std::int64_t>((train.size() + bs - 1) / bs);
  const bool use_distill = config.distill_weight > 0, use_dml = config.dml_weight > 0;

  std::vector<std::string> columns{"epoch", "lr", "gt_s1", "gt_s2", "dml",
                                   "distill_s1", "distill_s2", "total"};
  if (val) {
    columns.push_back("val_hmean_s1");
    columns.push_back("val_hmean_s2");
  }
  MetricsLog log(columns);
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(train.size(), bs, shuffle);
    double gt1 = 0, gt2 = 0, dml = 0, d1 = 0, d2 = 0, lr = 0;
    for (const auto& b : batches) {
      lr = lr_at(config, step, spe);
      s1.params().zero_grad();
      s2.params().zero_grad();
      const auto images = det_batch_images<float>(train, b);
      const auto targets = det_batch_targets<float>(train, b);
      const auto o1 = s1.forward(images);
      const auto o2 = s2.forward(images);

      auto g1 = db_gt_loss(o1.maps, targets, config.alpha, config.beta).total;
      auto g2 = db_gt_loss(o2.maps, targets, config.alpha, config.beta).total;
      gt1 += g1.item();
      gt2 += g2.item();
      auto part1 = g1, part2 = g2;
      if (use_distill) {
        Tensor<float> teacher_prob;
        {
          NoGradGuard guard;
          teacher_prob = teacher.forward(images).maps.prob;
        }
        const auto w = static_cast<float>(config.distill_weight);
        auto t1 = scale(distill_loss(o1.maps, teacher_prob, config.gamma).total, w);
        auto t2 = scale(distill_loss(o2.maps, teacher_prob, config.gamma).total, w);
        d1 += t1.item();
        d2 += t2.item();
        part1 = add(part1, t1);
        part2 = add(part2, t2);
      }
      auto total = add(part1, part2);
      if (use_dml) {
        auto m = scale(dml_loss(bernoulli_logits(o1.prob_logits), bernoulli_logits(o2.prob_logits)),
                       static_cast<float>(config.dml_weight));
        dml += m.item();
        total = add(total, m);
      }
      require_finite(total.item(), epoch, step, "loss");
      backward(total);
      opt1.step(lr);
      opt2.step(lr);
      ++step;
    }
    if (teacher.params().checksum() != teacher_sum) {
      throw std::logic_error("teacher parameters changed during training");
    }
    const double nb = static_cast<double>(batches.size());
    gt1 /= nb;
    gt2 /= nb;
    dml /= nb;
    d1 /= nb;
    d2 /= nb;
    std::vector<double> row{double(epoch), lr, gt1, gt2, dml, d1, d2,
                            cml_total({gt1, gt2}, dml, {d1, d2})};
    if (val) {
      row.push_back(evaluate_detector(s1, *val).hmean);
      row.push_back(evaluate_detector(s2, *val).hmean);
    }
    log.append(std::move(row));
    if (on_epoch) on_epoch(log);
  }
  return {std::move(s1), std::move(s2), std::move(log), teacher_sum};
}

CmlResult train_cml(const DetectorConfig& student_config, const TrainConfig& config,
                    const std::vector<DetSample>& train, const std::filesystem::path& teacher_ckpt,
                    const std::vector<DetSample>* val, const EpochCallback& on_epoch) {
  if (teacher_ckpt.empty() || !std::filesystem::exists(teacher_ckpt)) {
    throw std::invalid_argument("teacher checkpoint not found: '" + teacher_ckpt.string() + "'");
  }
  DetectorConfig teacher_config = student_config;
  teacher_config.preset = DetectorPreset::teacher;
  Detector<float> teacher(teacher_config, 0);
  load_checkpoint_into(teacher.params(), teacher_ckpt);
  return train_cml(student_config, config, train, teacher, val, on_epoch);
}

}  // namespace ppocr
