#include "ppocr/distill/rec_training.hpp"

#include <cmath>
#include <optional>

#include "ppocr/distill/adam.hpp"
#include "ppocr/distill/batching.hpp"
#include "ppocr/evalkit/decode.hpp"
#include "ppocr/losses/center.hpp"
#include "ppocr/losses/ctc.hpp"
#include "ppocr/losses/divergence.hpp"
#include "ppocr/losses/totals.hpp"
#include "ppocr/tensor/autograd.hpp"
#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace {

void require_finite(double value, int epoch, std::int64_t step, const char* what) {
  if (!std::isfinite(value)) throw DivergenceError(epoch, step, std::string(what) + " is not finite");
}

std::int64_t steps_per_epoch(std::size_t n, int batch_size) {
  return static_cast<std::int64_t>((n + static_cast<std::size_t>(batch_size) - 1) /
                                   static_cast<std::size_t>(batch_size));
}

Tensor<float> flatten_rows(const Tensor<float>& x) {
  return reshape(x, Shape{x.dim(0) * x.dim(1), x.dim(2)});
}

// Center term of one network output plus its bank, when enabled.
struct CenterTerm {
  std::optional<CenterBank<float>> bank;

  CenterTerm(const TrainConfig& config, const Recognizer<float>& net) {
    if (config.center_loss) {
      bank.emplace(static_cast<std::size_t>(net.config().num_classes),
                   static_cast<std::size_t>(net.feature_dim()));
    }
  }

  // Weighted loss, or an undefined tensor when disabled.
  Tensor<float> loss(const RecognizerOutput<float>& out, double lambda) const {
    if (!bank) return {};
    return scale(center_loss(flatten_rows(out.features), flatten_rows(out.logits), *bank),
                 static_cast<float>(lambda));
  }

  void update(const RecognizerOutput<float>& out) {
    if (!bank) return;
    NoGradGuard guard;
    const auto logits = flatten_rows(out.logits);
    update_centers(*bank, flatten_rows(out.features), greedy_assignments(logits));
  }
};

Tensor<float> batch_ctc(const RecognizerOutput<float>& out, const std::vector<SeqLabel>& labels) {
  return ctc_loss_batch(log_softmax(out.logits, 2), labels);
}

void check_inputs(const RecognizerConfig& rec_config, const TrainConfig& config,
                  const std::vector<RecSample>& train) {
  config.validate();
  validate(rec_config);
  if (train.empty()) throw std::invalid_argument("training set is empty");
}

}  // namespace

std::vector<SeqLabel> predict_labels(const Recognizer<float>& net,
                                     const std::vector<RecSample>& samples,
                                     std::size_t batch_size) {
  NoGradGuard guard;
  std::vector<SeqLabel> preds;
  preds.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); i += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t j = i; j < std::min(samples.size(), i + batch_size); ++j) idx.push_back(j);
    auto decoded = greedy_decode_batch(net.forward(rec_batch_images<float>(samples, idx)).logits);
    preds.insert(preds.end(), decoded.begin(), decoded.end());
  }
  return preds;
}

double evaluate_recognizer(const Recognizer<float>& net, const std::vector<RecSample>& samples,
                           std::size_t batch_size) {
  std::vector<SeqLabel> gts;
  for (const auto& s : samples) gts.push_back(s.label);
  return sentence_accuracy(predict_labels(net, samples, batch_size), gts);
}

RecTrainResult train_recognizer(const RecognizerConfig& rec_config, const TrainConfig& config,
                                const std::vector<RecSample>& train,
                                const std::vector<RecSample>* val, const EpochCallback& on_epoch) {
  check_inputs(rec_config, config, train);
  Recognizer<float> net(rec_config, derive_seed(config.seed, kStudentStream));
  net.params().set_requires_grad(true);
  Adam<float> opt(net.params());
  CenterTerm center(config, net);
  std::mt19937_64 shuffle(derive_seed(config.seed, kShuffleStream));
  const auto spe = steps_per_epoch(train.size(), config.batch_size);

  std::vector<std::string> columns{"epoch", "lr", "ctc", "center", "total"};
  if (val) columns.push_back("val_acc");
  MetricsLog log(columns);
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(train.size(), static_cast<std::size_t>(config.batch_size), shuffle);
    double ctc_sum = 0, center_sum = 0, lr = 0;
    for (const auto& b : batches) {
      lr = lr_at(config, step, spe);
      net.params().zero_grad();
      const auto out = net.forward(rec_batch_images<float>(train, b));
      auto total = batch_ctc(out, rec_batch_labels(train, b));
      ctc_sum += total.item();
      if (auto c = center.loss(out, config.lambda); c.defined()) {
        center_sum += c.item();
        total = add(total, c);
      }
      require_finite(total.item(), epoch, step, "loss");
      backward(total);
      opt.step(lr);
      center.update(out);
      ++step;
    }
    const double nb = static_cast<double>(batches.size());
    const double ctc = ctc_sum / nb, cen = center_sum / nb;
    std::vector<double> row{double(epoch), lr, ctc, cen, ctc + cen};
    if (val) row.push_back(evaluate_recognizer(net, *val));
    log.append(std::move(row));
    if (on_epoch) on_epoch(log);
  }
  return {std::move(net), std::move(log)};
}

UdmlResult train_udml(const RecognizerConfig& rec_config, const TrainConfig& config,
                      const std::vector<RecSample>& train, const std::vector<RecSample>* val,
                      const EpochCallback& on_epoch) {
  check_inputs(rec_config, config, train);
  Recognizer<float> student(rec_config, derive_seed(config.seed, kStudentStream));
  Recognizer<float> teacher(rec_config, derive_seed(config.seed, kPeerStream));
  student.params().set_requires_grad(true);
  teacher.params().set_requires_grad(true);
  Adam<float> opt_s(student.params()), opt_t(teacher.params());
  CenterTerm center_s(config, student), center_t(config, teacher);
  std::mt19937_64 shuffle(derive_seed(config.seed, kShuffleStream));
  const auto spe = steps_per_epoch(train.size(), config.batch_size);

  std::vector<std::string> columns{"epoch", "lr", "ctc", "center", "dml", "feat", "total"};
  if (val) {
    columns.push_back("val_acc");
    columns.push_back("val_acc_teacher");
  }
  MetricsLog log(columns);
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(train.size(), static_cast<std::size_t>(config.batch_size), shuffle);
    double ctc_sum = 0, center_sum = 0, dml_sum = 0, feat_sum = 0, lr = 0;
    for (const auto& b : batches) {
      lr = lr_at(config, step, spe);
      student.params().zero_grad();
      teacher.params().zero_grad();
      const auto images = rec_batch_images<float>(train, b);
      const auto labels = rec_batch_labels(train, b);
      const auto pair = forward_pair(student, teacher, images);
      const RecognizerOutput<float> s{pair.s_hout, pair.s_bout}, t{pair.t_hout, pair.t_bout};

      auto total = add(batch_ctc(s, labels), batch_ctc(t, labels));
      ctc_sum += total.item();
      for (auto* term : {&center_s, &center_t}) {
        const auto& out = term == &center_s ? s : t;
        if (auto c = term->loss(out, config.lambda); c.defined()) {
          center_sum += c.item();
          total = add(total, c);
        }
      }
      if (config.dml_weight > 0) {
        auto dml = scale(dml_loss(s.logits, t.logits), static_cast<float>(config.dml_weight));
        dml_sum += dml.item();
        total = add(total, dml);
      }
      if (config.feat_weight > 0) {
        auto feat = scale(feature_loss(s.features, t.features), static_cast<float>(config.feat_weight));
        feat_sum += feat.item();
        total = add(total, feat);
      }
      require_finite(total.item(), epoch, step, "loss");
      backward(total);
      opt_s.step(lr);
      opt_t.step(lr);
      center_s.update(s);
      center_t.update(t);
      ++step;
    }
    const double nb = static_cast<double>(batches.size());
    const double ctc = ctc_sum / nb, cen = center_sum / nb, dml = dml_sum / nb, feat = feat_sum / nb;
    std::vector<double> row{double(epoch), lr, ctc, cen, dml, feat, udml_total(ctc + cen, dml, feat)};
    if (val) {
      row.push_back(evaluate_recognizer(student, *val));
      row.push_back(evaluate_recognizer(teacher, *val));
    }
    log.append(std::move(row));
    if (on_epoch) on_epoch(log);
  }
  return {std::move(student), std::move(teacher), std::move(log)};
}

}  // namespace ppocr
