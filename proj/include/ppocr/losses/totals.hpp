#ifndef PPOCR_LOSSES_TOTALS_HPP_
#define PPOCR_LOSSES_TOTALS_HPP_

#include <utility>

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

// Two-student detection objective: both students' ground-truth and
// teacher-distillation terms plus the single shared mutual term.
double cml_total(std::pair<double, double> gt, double dml, std::pair<double, double> distill);
template <typename T>
Tensor<T> cml_total(const std::pair<Tensor<T>, Tensor<T>>& gt, const Tensor<T>& dml,
                    const std::pair<Tensor<T>, Tensor<T>>& distill);

// Recognition objective. `ctc` is already the sum over both networks.
double udml_total(double ctc, double dml, double feat);
template <typename T>
Tensor<T> udml_total(const Tensor<T>& ctc, const Tensor<T>& dml, const Tensor<T>& feat);

}  // namespace ppocr

#endif  // PPOCR_LOSSES_TOTALS_HPP_
