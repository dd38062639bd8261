#include "ppocr/tensor/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppocr/tensor/autograd.hpp"

namespace ppocr {

GradCheckReport grad_check_report(const MultiScalarFn& f, const std::vector<Tensor<double>>& inputs,
                                  double eps, double tolerance) {
  if (!(eps > 0.0)) throw std::invalid_argument("grad_check: eps must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("grad_check: tolerance must be positive");

  std::vector<Tensor<double>> leaves;
  leaves.reserve(inputs.size());
  for (const auto& in : inputs) leaves.push_back(in.detach().set_requires_grad(true));
  backward(f(leaves));

  std::vector<Tensor<double>> probe;
  probe.reserve(inputs.size());
  for (const auto& in : inputs) probe.push_back(in.detach());

  GradCheckReport report;
  NoGradGuard no_grad;
  const double center = f(probe).item();
  constexpr double kRoundoffUlps = 16.0;
  for (std::size_t t = 0; t < probe.size(); ++t) {
    auto values = probe[t].data();
    auto analytic = leaves[t].grad();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = f(probe).item();
      values[i] = saved - eps;
      const double down = f(probe).item();
      values[i] = saved;
      const double cd = (up - down) / (2.0 * eps);
      const double a = analytic.empty() ? 0.0 : analytic[i];
      const double err = std::abs(a - cd);
      const double rel = err / std::max({std::abs(a), std::abs(cd), 1e-8});
      ++report.elements;
      report.max_rel_err = std::max(report.max_rel_err, rel);

      const double magnitude = std::max({std::abs(up), std::abs(down), std::abs(center), 1.0});
      const double noise = kRoundoffUlps * std::numeric_limits<double>::epsilon() * magnitude / eps;
      if (err > 0.0 && std::max(std::abs(a), std::abs(cd)) * tolerance < noise) {
        ++report.noise_skips;
        continue;
      }
      const double fwd = (up - center) / eps, bwd = (center - down) / eps;
      const double spread = std::abs(fwd - bwd);
      // A smooth function puts the analytic value halfway between the two
      // one-sided quotients, far from this band.
      const bool sides_disagree = spread > 8.0 * noise;
      const bool hugs_one_side = std::min(std::abs(a - fwd), std::abs(a - bwd)) <= 0.05 * spread;
      if (sides_disagree && hugs_one_side) {
        ++report.kink_skips;
        continue;
      }
      report.max_rel_err_resolved = std::max(report.max_rel_err_resolved, rel);
    }
  }
  return report;
}

double grad_check(const MultiScalarFn& f, const std::vector<Tensor<double>>& inputs, double eps) {
  return grad_check_report(f, inputs, eps).max_rel_err;
}

double grad_check(const ScalarFn& f, const Tensor<double>& x, double eps) {
  return grad_check(
      [&f](const std::vector<Tensor<double>>& xs) { return f(xs.front()); },
      std::vector<Tensor<double>>{x}, eps);
}

}  // namespace ppocr
