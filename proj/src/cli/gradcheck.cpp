#include "ppocr/cli/gradcheck.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <stdexcept>

#include "ppocr/distill/metrics_log.hpp"
#include "ppocr/losses/center.hpp"
#include "ppocr/losses/ctc.hpp"
#include "ppocr/losses/db.hpp"
#include "ppocr/losses/divergence.hpp"
#include "ppocr/nn/recognizer.hpp"
#include "ppocr/tensor/grad_check.hpp"
#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace {

using T = Tensor<double>;
using Rng = std::mt19937_64;

T normal(Shape shape, Rng& rng, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = d(rng);
  return T(std::move(shape), std::move(v));
}

T uniform(Shape shape, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = d(rng);
  return T(std::move(shape), std::move(v));
}

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

SeqLabel random_label(Rng& rng, std::size_t frames, int classes, int max_len) {
  for (;;) {
    SeqLabel label;
    const int len = pick(rng, 1, max_len);
    for (int i = 0; i < len; ++i) label.symbols.push_back(pick(rng, 1, classes - 1));
    if (ctc_feasible(frames, label)) return label;
  }
}

// Identity whose backward is off by 1%: a deliberately wrong gradient.
T faulty(const T& x) {
  return record_op<double>("faulty_identity", x.shape(), std::vector<double>(x.data().begin(), x.data().end()), {x},
                           [x](std::span<const double> g) {
                             auto gx = x.grad_buffer();
                             for (std::size_t i = 0; i < g.size(); ++i) gx[i] += 1.01 * g[i];
                           });
}

// Threshold-map entries kept away from the L1 kink at the target.
T away_from(const T& target, Rng& rng) {
  T out = uniform(target.shape(), rng, 0.05, 0.95);
  auto v = out.data();
  auto t = target.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    while (std::abs(v[i] - t[i]) < 1e-3) v[i] = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  }
  return out;
}

DetGroundTruth<double> random_gt(Shape shape, Rng& rng) {
  T prob = uniform(shape, rng, 0, 1), mask = uniform(shape, rng, 0, 1);
  for (auto& p : prob.data()) p = p > 0.6 ? 1.0 : 0.0;
  for (auto& m : mask.data()) m = m > 0.5 ? 1.0 : 0.0;
  mask.data()[0] = 1.0;  // never an empty mask
  return {prob, uniform(shape, rng, 0, 1), mask};
}

struct Instance {
  std::vector<T> inputs;
  MultiScalarFn f;
};

using Maker = std::function<Instance(Rng&)>;

Instance make_ctc(Rng& rng) {
  const std::size_t frames = static_cast<std::size_t>(pick(rng, 2, 6));
  const int classes = pick(rng, 2, 4);
  const SeqLabel label = random_label(rng, frames, classes, 3);
  return {{normal({frames, std::size_t(classes)}, rng)},
          [label](const std::vector<T>& x) { return ctc_loss(log_softmax(x[0], 1), label); }};
}

Instance make_dml(Rng& rng) {
  const Shape s{std::size_t(pick(rng, 1, 4)), std::size_t(pick(rng, 2, 5))};
  return {{normal(s, rng), normal(s, rng)},
          [](const std::vector<T>& x) { return dml_loss(x[0], x[1]); }};
}

Instance make_feature(Rng& rng) {
  const Shape s{std::size_t(pick(rng, 1, 3)), std::size_t(pick(rng, 1, 4)), std::size_t(pick(rng, 1, 6))};
  return {{normal(s, rng), normal(s, rng)},
          [](const std::vector<T>& x) { return feature_loss(x[0], x[1]); }};
}

CenterBank<double> random_bank(std::size_t classes, std::size_t dim, Rng& rng) {
  CenterBank<double> bank(classes, dim);
  bank.centers = normal({classes, dim}, rng);
  return bank;
}

Instance make_center(Rng& rng) {
  const std::size_t rows = std::size_t(pick(rng, 1, 6)), dim = std::size_t(pick(rng, 1, 5));
  const std::size_t classes = std::size_t(pick(rng, 2, 5));
  const T logits = normal({rows, classes}, rng);
  const auto bank = random_bank(classes, dim, rng);
  return {{normal({rows, dim}, rng)},
          [logits, bank](const std::vector<T>& x) { return center_loss(x[0], logits, bank); }};
}

Instance make_enhanced_ctc(Rng& rng) {
  const std::size_t frames = std::size_t(pick(rng, 2, 6)), dim = std::size_t(pick(rng, 1, 4));
  const int classes = pick(rng, 2, 4);
  const SeqLabel label = random_label(rng, frames, classes, 3);
  const T head = normal({frames, std::size_t(classes)}, rng);
  const auto bank = random_bank(std::size_t(classes), dim, rng);
  return {{normal({frames, std::size_t(classes)}, rng), normal({frames, dim}, rng)},
          [label, head, bank](const std::vector<T>& x) {
            return enhanced_ctc(log_softmax(x[0], 1), label, x[1], head, bank, 0.05);
          }};
}

Instance make_db_gt(Rng& rng) {
  const Shape s{std::size_t(pick(rng, 1, 2)), std::size_t(pick(rng, 2, 4)), std::size_t(pick(rng, 2, 4))};
  const auto gt = random_gt(s, rng);
  return {{uniform(s, rng, 0.05, 0.95), away_from(gt.thresh_gt, rng), uniform(s, rng, 0.05, 0.95)},
          [gt](const std::vector<T>& x) {
            return db_gt_loss(ProbMapTriple<double>{x[0], x[1], x[2]}, gt).total;
          }};
}

Instance make_distill(Rng& rng) {
  const Shape s{std::size_t(pick(rng, 1, 2)), std::size_t(pick(rng, 2, 4)), std::size_t(pick(rng, 2, 4))};
  const T teacher = uniform(s, rng, 0, 1);
  const T thresh = uniform(s, rng, 0.05, 0.95);
  return {{uniform(s, rng, 0.05, 0.95), uniform(s, rng, 0.05, 0.95)},
          [teacher, thresh](const std::vector<T>& x) {
            return distill_loss(ProbMapTriple<double>{x[0], thresh, x[1]}, teacher).total;
          }};
}

// Tiny recognizer; the check runs over every parameter tensor.
Instance make_recognizer(Rng& rng) {
  RecognizerConfig cfg;
  cfg.input_height = 8;
  cfg.input_width = 32;
  cfg.seq_len = 4;
  cfg.num_classes = 5;
  cfg.scale = 0.25;
  cfg.head_hidden = 4;
  auto net = std::make_shared<Recognizer<double>>(cfg, rng());
  const T images = uniform({1, 1, 8, 32}, rng, 0, 1);
  std::vector<SeqLabel> labels{random_label(rng, 4, cfg.num_classes, 3)};
  std::vector<T> params;
  for (const auto& [name, tensor] : net->params()) params.push_back(tensor.detach());
  return {params, [net, images, labels](const std::vector<T>& x) {
            std::size_t i = 0;
            for (auto& entry : net->params()) entry.second = x[i++];
            return ctc_loss_batch(log_softmax(net->forward(images).logits, 2), labels);
          }};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

const std::vector<std::pair<std::string, Maker>>& makers() {
  static const std::vector<std::pair<std::string, Maker>> m{
      {"ctc", make_ctc},       {"dml", make_dml},
      {"feature", make_feature}, {"center", make_center},
      {"enhanced_ctc", make_enhanced_ctc}, {"db_gt", make_db_gt},
      {"distill", make_distill}, {"recognizer", make_recognizer}};
  return m;
}

}  // namespace

const std::vector<std::string>& gradcheck_loss_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, maker] : makers()) n.push_back(name);
    return n;
  }();
  return names;
}

std::vector<GradCheckRow> run_gradcheck(const std::vector<std::string>& losses, int instances,
                                        std::uint64_t seed, bool inject_fault) {
  if (instances < 1) throw std::invalid_argument("gradcheck needs at least one instance");
  std::vector<GradCheckRow> rows;
  for (const auto& wanted : losses) {
    auto it = std::find_if(makers().begin(), makers().end(),
                           [&](const auto& m) { return m.first == wanted; });
    if (it == makers().end()) throw std::invalid_argument("unknown loss '" + wanted + "'");
    Rng rng(seed ^ fnv1a(wanted));
    GradCheckRow row{wanted, instances};
    for (int n = 0; n < instances; ++n) {
      Instance inst = it->second(rng);
      MultiScalarFn f = inst.f;
      if (inject_fault) f = [g = inst.f](const std::vector<T>& x) { return faulty(g(x)); };
      const auto r = grad_check_report(f, inst.inputs, kGradCheckEps, kGradCheckTolerance);
      row.max_rel_err = std::max(row.max_rel_err, r.max_rel_err_resolved);
      row.strict_max_rel_err = std::max(row.strict_max_rel_err, r.max_rel_err);
      row.elements += r.elements;
      row.kink_skips += r.kink_skips;
      row.noise_skips += r.noise_skips;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string gradcheck_csv(const std::vector<GradCheckRow>& rows) {
  std::string out = "loss,instances,max_rel_err,strict_max_rel_err,elements,kink_skips,noise_skips,status\n";
  for (const auto& r : rows) {
    out += r.loss + "," + std::to_string(r.instances) + "," + format_number(r.max_rel_err) + "," +
           format_number(r.strict_max_rel_err) + "," + std::to_string(r.elements) + "," +
           std::to_string(r.kink_skips) + "," + std::to_string(r.noise_skips) + "," +
           (r.pass() ? "pass" : "fail") + "\n";
  }
  return out;
}

}  // namespace ppocr
