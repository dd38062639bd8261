#ifndef PPOCR_DISTILL_REC_TRAINING_HPP_
#define PPOCR_DISTILL_REC_TRAINING_HPP_

#include <functional>
#include <vector>

#include "ppocr/datakit/rec_data.hpp"
#include "ppocr/distill/metrics_log.hpp"
#include "ppocr/distill/schedule.hpp"
#include "ppocr/nn/recognizer.hpp"

namespace ppocr {

// Called after every completed epoch with the log so far.
using EpochCallback = std::function<void(const MetricsLog&)>;

// Network init streams; the standalone recognizer shares the U-DML
// student's initialisation.
inline constexpr std::uint64_t kStudentStream = 0;
inline constexpr std::uint64_t kPeerStream = 1;

struct RecTrainResult {
  Recognizer<float> net;
  MetricsLog log;
};

struct UdmlResult {
  Recognizer<float> student;
  Recognizer<float> teacher;
  MetricsLog log;
};

// Plain CTC training (plus the center term when enabled).
// Log columns: epoch, lr, ctc, center, total[, val_acc].
RecTrainResult train_recognizer(const RecognizerConfig& rec_config, const TrainConfig& config,
                                const std::vector<RecSample>& train,
                                const std::vector<RecSample>* val = nullptr,
                                const EpochCallback& on_epoch = {});

// Two identically configured recognizers from different seeds, both updated
// once per batch from the single joint loss
// ctc_s + ctc_t + dml_weight * dml + feat_weight * feat.
// Log columns: epoch, lr, ctc, dml, feat, total[, val_acc, val_acc_teacher].
UdmlResult train_udml(const RecognizerConfig& rec_config, const TrainConfig& config,
                      const std::vector<RecSample>& train,
                      const std::vector<RecSample>* val = nullptr,
                      const EpochCallback& on_epoch = {});

// Greedy-decoded sentence accuracy, no gradient recording.
double evaluate_recognizer(const Recognizer<float>& net, const std::vector<RecSample>& samples,
                           std::size_t batch_size = 64);

std::vector<SeqLabel> predict_labels(const Recognizer<float>& net,
                                     const std::vector<RecSample>& samples,
                                     std::size_t batch_size = 64);

}  // namespace ppocr

#endif  // PPOCR_DISTILL_REC_TRAINING_HPP_
