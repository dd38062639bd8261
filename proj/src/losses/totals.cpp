#include "ppocr/losses/totals.hpp"

#include "ppocr/tensor/ops.hpp"

namespace ppocr {

double cml_total(std::pair<double, double> gt, double dml, std::pair<double, double> distill) {
  return (gt.first + distill.first) + (gt.second + distill.second) + dml;
}

template <typename T>
Tensor<T> cml_total(const std::pair<Tensor<T>, Tensor<T>>& gt, const Tensor<T>& dml,
                    const std::pair<Tensor<T>, Tensor<T>>& distill) {
  return add(add(add(gt.first, distill.first), add(gt.second, distill.second)), dml);
}

double udml_total(double ctc, double dml, double feat) { return ctc + dml + feat; }

template <typename T>
Tensor<T> udml_total(const Tensor<T>& ctc, const Tensor<T>& dml, const Tensor<T>& feat) {
  return add(add(ctc, dml), feat);
}

template Tensor<float> cml_total(const std::pair<Tensor<float>, Tensor<float>>&,
                                 const Tensor<float>&,
                                 const std::pair<Tensor<float>, Tensor<float>>&);
template Tensor<double> cml_total(const std::pair<Tensor<double>, Tensor<double>>&,
                                  const Tensor<double>&,
                                  const std::pair<Tensor<double>, Tensor<double>>&);
template Tensor<float> udml_total(const Tensor<float>&, const Tensor<float>&,
                                  const Tensor<float>&);
template Tensor<double> udml_total(const Tensor<double>&, const Tensor<double>&,
                                   const Tensor<double>&);

}  // namespace ppocr
