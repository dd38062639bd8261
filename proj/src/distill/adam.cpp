#include "ppocr/distill/adam.hpp"

#include <cmath>

namespace ppocr {

template <typename T>
Adam<T>::Adam(ParamStore<T>& params, AdamOptions options) : params_(&params), options_(options) {
  for (const auto& [name, tensor] : params) {
    m_.emplace_back(tensor.numel(), T{0});
    v_.emplace_back(tensor.numel(), T{0});
  }
}

template <typename T>
void Adam<T>::step(double lr) {
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  std::size_t k = 0;
  for (auto& [name, tensor] : *params_) {
    auto& m = m_[k];
    auto& v = v_[k];
    ++k;
    if (!tensor.has_grad()) continue;
    auto g = tensor.grad();
    auto w = tensor.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = static_cast<double>(g[i]);
      m[i] = static_cast<T>(b1 * m[i] + (1.0 - b1) * gi);
      v[i] = static_cast<T>(b2 * v[i] + (1.0 - b2) * gi * gi);
      const double mhat = m[i] / c1, vhat = v[i] / c2;
      w[i] = static_cast<T>(w[i] - lr * mhat / (std::sqrt(vhat) + options_.eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace ppocr
