#ifndef PPOCR_NN_PARAM_STORE_HPP_
#define PPOCR_NN_PARAM_STORE_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

// Named trainable tensors in insertion order. Names are unique.
template <typename T>
class ParamStore {
 public:
  using Entry = std::pair<std::string, Tensor<T>>;

  Tensor<T>& add(std::string name, Tensor<T> value);
  bool contains(std::string_view name) const;
  Tensor<T>& at(std::string_view name);
  const Tensor<T>& at(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  // Sum of element counts over all tensors.
  std::size_t parameter_count() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  void zero_grad();
  void set_requires_grad(bool flag);

  // FNV-1a over names, shapes and raw bytes.
  std::uint64_t checksum() const;
  bool bitwise_equal(const ParamStore& other) const;

  // Copies values from `other` (same names and shapes, any order).
  template <typename U>
  void copy_values_from(const ParamStore<U>& other);

  template <typename U>
  ParamStore<U> cast() const;

 private:
  std::vector<Entry> entries_;
};

// Deterministic weight source. Values are drawn in float so that float and
// double builds from the same seed hold identical numbers.
class ParamInit {
 public:
  explicit ParamInit(std::uint64_t seed) : rng_(seed) {}

  // Uniform in +-sqrt(6 / fan_in).
  template <typename T>
  Tensor<T> kaiming(Shape shape, std::size_t fan_in);
  template <typename T>
  Tensor<T> zeros(Shape shape) { return Tensor<T>(std::move(shape), T{0}); }

 private:
  std::mt19937_64 rng_;
};

template <typename T>
template <typename U>
void ParamStore<T>::copy_values_from(const ParamStore<U>& other) {
  for (auto& [name, tensor] : entries_) {
    const auto& src = other.at(name);
    if (src.shape() != tensor.shape()) {
      throw ShapeError("parameter '" + name + "' has shape " + to_string(tensor.shape()) +
                       ", source has " + to_string(src.shape()));
    }
    auto dst = tensor.data();
    auto sv = src.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(sv[i]);
  }
}

template <typename T>
template <typename U>
ParamStore<U> ParamStore<T>::cast() const {
  ParamStore<U> out;
  for (const auto& [name, tensor] : entries_) out.add(name, tensor.template cast<U>());
  return out;
}

extern template class ParamStore<float>;
extern template class ParamStore<double>;

}  // namespace ppocr

#endif  // PPOCR_NN_PARAM_STORE_HPP_
