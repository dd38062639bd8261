#include "ppocr/evalkit/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace ppocr {

double hmean(double precision, double recall) {
  return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  if (sentence_accuracy) {
    j["sentence_accuracy"] = *sentence_accuracy;
  } else {
    j["precision"] = precision;
    j["recall"] = recall;
    j["hmean"] = hmean;
  }
  j["matched"] = matched;
  j["pred"] = pred;
  j["gt"] = gt;
  return j.dump();
}

std::vector<std::pair<std::size_t, std::size_t>> match_boxes(const std::vector<DetBox>& pred,
                                                             const std::vector<DetBox>& gt,
                                                             double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0)) {
    throw std::invalid_argument("iou_thresh must be in (0, 1]");
  }
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pred[a].score > pred[b].score; });
  std::vector<bool> taken(gt.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (std::size_t pi : order) {
    double best_iou = -1.0;
    std::size_t best = gt.size();
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (taken[g]) continue;
      const double iou = box_iou(pred[pi].box, gt[g].box);
      if (iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best < gt.size() && best_iou >= iou_thresh) {
      taken[best] = true;
      matches.push_back({pi, best});
    }
  }
  return matches;
}

namespace {

EvalReport from_counts(std::size_t matched, std::size_t pred, std::size_t gt) {
  EvalReport r;
  r.matched = matched;
  r.pred = pred;
  r.gt = gt;
  if (pred == 0 && gt == 0) {
    r.precision = r.recall = r.hmean = 1.0;
    return r;
  }
  r.precision = pred ? static_cast<double>(matched) / static_cast<double>(pred) : 0.0;
  r.recall = gt ? static_cast<double>(matched) / static_cast<double>(gt) : 0.0;
  r.hmean = hmean(r.precision, r.recall);
  return r;
}

}  // namespace

EvalReport det_hmean(const std::vector<DetBox>& pred, const std::vector<DetBox>& gt,
                     double iou_thresh) {
  return from_counts(match_boxes(pred, gt, iou_thresh).size(), pred.size(), gt.size());
}

EvalReport det_hmean_dataset(const std::vector<std::vector<DetBox>>& preds,
                             const std::vector<std::vector<DetBox>>& gts, double iou_thresh) {
  if (preds.size() != gts.size()) {
    throw std::invalid_argument("det_hmean_dataset: image counts differ");
  }
  std::size_t matched = 0, npred = 0, ngt = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    matched += match_boxes(preds[i], gts[i], iou_thresh).size();
    npred += preds[i].size();
    ngt += gts[i].size();
  }
  return from_counts(matched, npred, ngt);
}

EvalReport recognition_report(double accuracy, std::size_t matched, std::size_t total) {
  EvalReport r;
  r.sentence_accuracy = accuracy;
  r.matched = matched;
  r.pred = total;
  r.gt = total;
  return r;
}

}  // namespace ppocr
