#ifndef PPOCR_TENSOR_GRAD_CHECK_HPP_
#define PPOCR_TENSOR_GRAD_CHECK_HPP_

#include <functional>
#include <vector>

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

using ScalarFn = std::function<Tensor<double>(const Tensor<double>&)>;
using MultiScalarFn = std::function<Tensor<double>(const std::vector<Tensor<double>>&)>;

// Largest |analytic - central difference| / max(|analytic|, |cd|, 1e-8)
// over every element of x. Runs in double precision.
double grad_check(const ScalarFn& f, const Tensor<double>& x, double eps = 1e-5);

// Same, over every element of every input.
double grad_check(const MultiScalarFn& f, const std::vector<Tensor<double>>& inputs,
                  double eps = 1e-5);

// Strict metric plus a version restricted to elements finite differences
// can resolve. An element is set aside when
//  - its gradient is so small that the double roundoff of the function
//    values, divided by eps, exceeds `tolerance` times the gradient, or
//  - the step straddles a kink: the one-sided quotients disagree and the
//    analytic value sits on one of them (a valid one-sided derivative)
//    instead of between them.
// A wrong gradient scale cannot hide behind either rule.
struct GradCheckReport {
  double max_rel_err = 0.0;           // over every element
  double max_rel_err_resolved = 0.0;  // over the elements not set aside
  std::size_t elements = 0;
  std::size_t kink_skips = 0;
  std::size_t noise_skips = 0;
};

GradCheckReport grad_check_report(const MultiScalarFn& f, const std::vector<Tensor<double>>& inputs,
                                  double eps = 1e-5, double tolerance = 1e-4);

}  // namespace ppocr

#endif  // PPOCR_TENSOR_GRAD_CHECK_HPP_
