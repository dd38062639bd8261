#ifndef PPOCR_EVALKIT_METRICS_HPP_
#define PPOCR_EVALKIT_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppocr/evalkit/boxes.hpp"

namespace ppocr {

inline constexpr double kDefaultIouThresh = 0.5;

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double hmean = 0.0;
  std::optional<double> sentence_accuracy;  // set for recognition reports
  std::size_t matched = 0;
  std::size_t pred = 0;
  std::size_t gt = 0;

  // Single-line JSON object.
  std::string to_json() const;
};

double hmean(double precision, double recall);

// Greedy one-to-one matching, predictions in descending score order (stable
// on ties). Each prediction takes the unmatched ground truth of highest IoU
// if that IoU reaches iou_thresh.
EvalReport det_hmean(const std::vector<DetBox>& pred, const std::vector<DetBox>& gt,
                     double iou_thresh = kDefaultIouThresh);

// Matched index pairs (pred, gt) of the same protocol.
std::vector<std::pair<std::size_t, std::size_t>> match_boxes(const std::vector<DetBox>& pred,
                                                             const std::vector<DetBox>& gt,
                                                             double iou_thresh);

// Pools counts over images: P = sum matched / sum pred, R likewise.
EvalReport det_hmean_dataset(const std::vector<std::vector<DetBox>>& preds,
                             const std::vector<std::vector<DetBox>>& gts,
                             double iou_thresh = kDefaultIouThresh);

EvalReport recognition_report(double accuracy, std::size_t matched, std::size_t total);

}  // namespace ppocr

#endif  // PPOCR_EVALKIT_METRICS_HPP_
