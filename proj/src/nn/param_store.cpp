#include "ppocr/nn/param_store.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ppocr {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_mix(std::uint64_t& h, const void* bytes, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

template <typename T>
Tensor<T>& ParamStore<T>::add(std::string name, Tensor<T> value) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter name '" + name + "'");
  entries_.emplace_back(std::move(name), std::move(value));
  return entries_.back().second;
}

template <typename T>
bool ParamStore<T>::contains(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.first == name) return true;
  return false;
}

template <typename T>
Tensor<T>& ParamStore<T>::at(std::string_view name) {
  for (auto& e : entries_)
    if (e.first == name) return e.second;
  throw std::out_of_range("no parameter named '" + std::string(name) + "'");
}

template <typename T>
const Tensor<T>& ParamStore<T>::at(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.first == name) return e.second;
  throw std::out_of_range("no parameter named '" + std::string(name) + "'");
}

template <typename T>
std::size_t ParamStore<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.numel();
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& e : entries_) e.second.zero_grad();
}

template <typename T>
void ParamStore<T>::set_requires_grad(bool flag) {
  for (auto& e : entries_) e.second.set_requires_grad(flag);
}

template <typename T>
std::uint64_t ParamStore<T>::checksum() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& [name, tensor] : entries_) {
    fnv_mix(h, name.data(), name.size());
    for (auto d : tensor.shape()) fnv_mix(h, &d, sizeof d);
    fnv_mix(h, tensor.data().data(), tensor.numel() * sizeof(T));
  }
  return h;
}

template <typename T>
bool ParamStore<T>::bitwise_equal(const ParamStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.first != b.first || a.second.shape() != b.second.shape()) return false;
    if (std::memcmp(a.second.data().data(), b.second.data().data(), a.second.numel() * sizeof(T)))
      return false;
  }
  return true;
}

template <typename T>
Tensor<T> ParamInit::kaiming(Shape shape, std::size_t fan_in) {
  const float bound = std::sqrt(6.0f / static_cast<float>(fan_in));
  std::uniform_real_distribution<float> dist(-bound, bound);
  std::vector<T> values(numel(shape));
  for (auto& v : values) v = static_cast<T>(dist(rng_));
  return Tensor<T>(std::move(shape), std::move(values));
}

template class ParamStore<float>;
template class ParamStore<double>;
template Tensor<float> ParamInit::kaiming<float>(Shape, std::size_t);
template Tensor<double> ParamInit::kaiming<double>(Shape, std::size_t);

}  // namespace ppocr
