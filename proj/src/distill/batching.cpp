#include "ppocr/distill/batching.hpp"

#include <algorithm>
#include <numeric>

namespace ppocr {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ stream);
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                   std::mt19937_64& rng) {
  if (batch_size == 0) throw std::invalid_argument("make_batches: batch_size must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with explicit draws keeps the order independent of the
  // standard library's shuffle implementation.
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n; i += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + batch_size)));
  }
  return batches;
}

template <typename T>
Tensor<T> rec_batch_images(const std::vector<RecSample>& samples,
                           const std::vector<std::size_t>& indices) {
  std::vector<const Image*> images;
  for (auto i : indices) images.push_back(&samples.at(i).image);
  return images_to_tensor<T>(images);
}

std::vector<SeqLabel> rec_batch_labels(const std::vector<RecSample>& samples,
                                       const std::vector<std::size_t>& indices) {
  std::vector<SeqLabel> labels;
  for (auto i : indices) labels.push_back(samples.at(i).label);
  return labels;
}

template <typename T>
Tensor<T> det_batch_images(const std::vector<DetSample>& samples,
                           const std::vector<std::size_t>& indices) {
  std::vector<const Image*> images;
  for (auto i : indices) images.push_back(&samples.at(i).image);
  return images_to_tensor<T>(images);
}

template <typename T>
DetGroundTruth<T> det_batch_targets(const std::vector<DetSample>& samples,
                                    const std::vector<std::size_t>& indices) {
  const auto& first = samples.at(indices.at(0)).targets.prob_gt;
  const std::size_t h = first.dim(0), w = first.dim(1), plane = h * w;
  std::vector<T> prob(indices.size() * plane), thresh(prob.size()), mask(prob.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& t = samples.at(indices[k]).targets;
    if (t.prob_gt.shape() != first.shape()) {
      throw ShapeError("det_batch_targets: target maps differ in size");
    }
    std::copy(t.prob_gt.data().begin(), t.prob_gt.data().end(), prob.begin() + k * plane);
    std::copy(t.thresh_gt.data().begin(), t.thresh_gt.data().end(), thresh.begin() + k * plane);
    std::copy(t.thresh_mask.data().begin(), t.thresh_mask.data().end(), mask.begin() + k * plane);
  }
  const Shape shape{indices.size(), h, w};
  return {Tensor<T>(shape, std::move(prob)), Tensor<T>(shape, std::move(thresh)),
          Tensor<T>(shape, std::move(mask))};
}

DivergenceError::DivergenceError(int epoch, std::int64_t step, const std::string& what)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ", step " +
                         std::to_string(step) + ": " + what),
      epoch_(epoch),
      step_(step) {}

template Tensor<float> rec_batch_images(const std::vector<RecSample>&, const std::vector<std::size_t>&);
template Tensor<double> rec_batch_images(const std::vector<RecSample>&,
                                         const std::vector<std::size_t>&);
template Tensor<float> det_batch_images(const std::vector<DetSample>&, const std::vector<std::size_t>&);
template Tensor<double> det_batch_images(const std::vector<DetSample>&,
                                         const std::vector<std::size_t>&);
template DetGroundTruth<float> det_batch_targets(const std::vector<DetSample>&,
                                                 const std::vector<std::size_t>&);
template DetGroundTruth<double> det_batch_targets(const std::vector<DetSample>&,
                                                  const std::vector<std::size_t>&);

}  // namespace ppocr
