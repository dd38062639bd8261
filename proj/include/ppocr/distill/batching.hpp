#ifndef PPOCR_DISTILL_BATCHING_HPP_
#define PPOCR_DISTILL_BATCHING_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ppocr/datakit/det_data.hpp"
#include "ppocr/datakit/rec_data.hpp"

namespace ppocr {

// Independent stream seeds from one run seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::uint64_t kShuffleStream = 100;

// Shuffled index batches covering 0..n-1; the last batch may be short.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                   std::mt19937_64& rng);

template <typename T>
Tensor<T> rec_batch_images(const std::vector<RecSample>& samples,
                           const std::vector<std::size_t>& indices);
std::vector<SeqLabel> rec_batch_labels(const std::vector<RecSample>& samples,
                                       const std::vector<std::size_t>& indices);

template <typename T>
Tensor<T> det_batch_images(const std::vector<DetSample>& samples,
                           const std::vector<std::size_t>& indices);
// Stacks the [H, W] target maps into [N, H, W].
template <typename T>
DetGroundTruth<T> det_batch_targets(const std::vector<DetSample>& samples,
                                    const std::vector<std::size_t>& indices);

// Not-a-number or infinite training loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int epoch, std::int64_t step, const std::string& what);
  int epoch() const { return epoch_; }
  std::int64_t step() const { return step_; }

 private:
  int epoch_;
  std::int64_t step_;
};

}  // namespace ppocr

#endif  // PPOCR_DISTILL_BATCHING_HPP_
