#ifndef PPOCR_DISTILL_ADAM_HPP_
#define PPOCR_DISTILL_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "ppocr/nn/param_store.hpp"

namespace ppocr {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over every tensor of a ParamStore. Tensors without an
// accumulated gradient are left untouched for that step.
template <typename T>
class Adam {
 public:
  explicit Adam(ParamStore<T>& params, AdamOptions options = {});

  void step(double lr);
  std::int64_t steps() const { return t_; }

 private:
  ParamStore<T>* params_;
  AdamOptions options_;
  std::vector<std::vector<T>> m_, v_;
  std::int64_t t_ = 0;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace ppocr

#endif  // PPOCR_DISTILL_ADAM_HPP_
