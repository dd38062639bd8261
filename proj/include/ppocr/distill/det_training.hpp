#ifndef PPOCR_DISTILL_DET_TRAINING_HPP_
#define PPOCR_DISTILL_DET_TRAINING_HPP_

#include <filesystem>
#include <vector>

#include "ppocr/datakit/det_data.hpp"
#include "ppocr/distill/rec_training.hpp"
#include "ppocr/evalkit/metrics.hpp"
#include "ppocr/nn/detector.hpp"

namespace ppocr {

struct DetTrainResult {
  Detector<float> net;
  MetricsLog log;
};

struct CmlResult {
  Detector<float> student1;
  Detector<float> student2;
  MetricsLog log;
  std::uint64_t teacher_checksum = 0;
};

// Plain DB training. The network is initialised from stream `init_stream`
// of the run seed, so stream 0 and 1 reproduce the two CML students.
// Log columns: epoch, lr, l_p, l_b, l_t, gt[, val_hmean].
DetTrainResult train_detector(const DetectorConfig& det_config, const TrainConfig& config,
                              const std::vector<DetSample>& train,
                              const std::vector<DetSample>* val = nullptr,
                              const EpochCallback& on_epoch = {}, std::uint64_t init_stream = 0);

// Two students and a frozen teacher. Per batch the joint loss
//   (gt_1 + w_distill * distill_1) + (gt_2 + w_distill * distill_2) + w_dml * dml
// updates both students once; terms with weight 0 are not computed. The
// teacher runs without gradient recording and its checksum is verified
// after every epoch.
// Log columns: epoch, lr, gt_s1, gt_s2, dml, distill_s1, distill_s2, total
// [, val_hmean_s1, val_hmean_s2].
CmlResult train_cml(const DetectorConfig& student_config, const TrainConfig& config,
                    const std::vector<DetSample>& train, const Detector<float>& teacher,
                    const std::vector<DetSample>* val = nullptr,
                    const EpochCallback& on_epoch = {});

// Loads the teacher preset from `teacher_ckpt` first; a missing file is
// rejected.
CmlResult train_cml(const DetectorConfig& student_config, const TrainConfig& config,
                    const std::vector<DetSample>& train,
                    const std::filesystem::path& teacher_ckpt,
                    const std::vector<DetSample>* val = nullptr,
                    const EpochCallback& on_epoch = {});

struct DetEvalOptions {
  BoxOptions boxes{kDefaultBinThresh, kDefaultMinArea, kDefaultUnclipRatio};
  double iou_thresh = kDefaultIouThresh;
};

std::vector<std::vector<DetBox>> predict_boxes(const Detector<float>& net,
                                               const std::vector<DetSample>& samples,
                                               const BoxOptions& options,
                                               std::size_t batch_size = 32);
std::vector<DetBox> ground_truth_boxes(const DetSample& sample);

EvalReport evaluate_detector(const Detector<float>& net, const std::vector<DetSample>& samples,
                             const DetEvalOptions& options = {});

}  // namespace ppocr

#endif  // PPOCR_DISTILL_DET_TRAINING_HPP_
