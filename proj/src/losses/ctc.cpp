#include "ppocr/losses/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ppocr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::vector<int> extend_with_blanks(const SeqLabel& label) {
  std::vector<int> ext(2 * label.size() + 1, kBlankIndex);
  for (std::size_t i = 0; i < label.size(); ++i) ext[2 * i + 1] = label.symbols[i];
  return ext;
}

}  // namespace

std::size_t ctc_min_frames(const SeqLabel& label) {
  std::size_t repeats = 0;
  for (std::size_t i = 1; i < label.size(); ++i) {
    if (label.symbols[i] == label.symbols[i - 1]) ++repeats;
  }
  return label.size() + repeats;
}

bool ctc_feasible(std::size_t frames, const SeqLabel& label) {
  return frames >= ctc_min_frames(label);
}

void validate_label(const SeqLabel& label, std::size_t num_classes) {
  for (int s : label.symbols) {
    if (s == kBlankIndex) throw std::invalid_argument("label contains the blank index");
    if (s < 0 || static_cast<std::size_t>(s) >= num_classes) {
      throw std::invalid_argument("label symbol " + std::to_string(s) + " outside [1, " +
                                  std::to_string(num_classes) + ")");
    }
  }
}

CtcResult ctc_forward_backward(const double* lp, std::size_t frames, std::size_t num_classes,
                               const SeqLabel& label) {
  validate_label(label, num_classes);
  CtcResult result;
  result.grad.assign(frames * num_classes, 0.0);
  if (frames == 0 || !ctc_feasible(frames, label)) {
    result.nll = std::numeric_limits<double>::infinity();
    result.feasible = false;
    return result;
  }

  const auto ext = extend_with_blanks(label);
  const std::size_t states = ext.size();
  const std::size_t t_max = frames;
  auto emit = [&](std::size_t t, std::size_t s) { return lp[t * num_classes + ext[s]]; };
  // A skip from s-2 is allowed onto a symbol that differs from the previous one.
  auto can_skip = [&](std::size_t s) {
    return s >= 2 && ext[s] != kBlankIndex && ext[s] != ext[s - 2];
  };

  // alpha includes the emission at t; beta includes it as well.
  std::vector<double> alpha(t_max * states, kNegInf), beta(t_max * states, kNegInf);
  alpha[0] = emit(0, 0);
  if (states > 1) alpha[1] = emit(0, 1);
  for (std::size_t t = 1; t < t_max; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = alpha[(t - 1) * states + s];
      if (s >= 1) acc = log_add(acc, alpha[(t - 1) * states + s - 1]);
      if (can_skip(s)) acc = log_add(acc, alpha[(t - 1) * states + s - 2]);
      alpha[t * states + s] = acc == kNegInf ? kNegInf : acc + emit(t, s);
    }
  }
  const std::size_t last = t_max - 1;
  beta[last * states + states - 1] = emit(last, states - 1);
  if (states > 1) beta[last * states + states - 2] = emit(last, states - 2);
  for (std::size_t t = last; t-- > 0;) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = beta[(t + 1) * states + s];
      if (s + 1 < states) acc = log_add(acc, beta[(t + 1) * states + s + 1]);
      if (s + 2 < states && can_skip(s + 2)) acc = log_add(acc, beta[(t + 1) * states + s + 2]);
      beta[t * states + s] = acc == kNegInf ? kNegInf : acc + emit(t, s);
    }
  }

  double log_likelihood = alpha[last * states + states - 1];
  if (states > 1) log_likelihood = log_add(log_likelihood, alpha[last * states + states - 2]);
  if (log_likelihood == kNegInf) {
    result.nll = std::numeric_limits<double>::infinity();
    result.feasible = false;
    return result;
  }
  result.nll = -log_likelihood;

  // d(-log P)/d lp[t][c] = -sum_{s: ext[s]=c} alpha_t(s) beta_t(s) / (y_t(c) P)
  std::vector<double> occupancy(num_classes);
  for (std::size_t t = 0; t < t_max; ++t) {
    std::fill(occupancy.begin(), occupancy.end(), kNegInf);
    for (std::size_t s = 0; s < states; ++s) {
      const double a = alpha[t * states + s], b = beta[t * states + s];
      if (a == kNegInf || b == kNegInf) continue;
      auto& o = occupancy[static_cast<std::size_t>(ext[s])];
      o = log_add(o, a + b - emit(t, s));
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (occupancy[c] == kNegInf) continue;
      result.grad[t * num_classes + c] = -std::exp(occupancy[c] - log_likelihood);
    }
  }
  return result;
}

template <typename T>
Tensor<T> ctc_loss(const Tensor<T>& log_probs, const SeqLabel& label) {
  if (log_probs.ndim() != 2) {
    throw ShapeError("ctc_loss: expected [T, C] log-probabilities, got " +
                     to_string(log_probs.shape()));
  }
  const std::size_t frames = log_probs.dim(0), classes = log_probs.dim(1);
  std::vector<double> lp(log_probs.data().begin(), log_probs.data().end());
  auto res = ctc_forward_backward(lp.data(), frames, classes, label);
  return record_op<T>("ctc_loss", Shape{}, {static_cast<T>(res.nll)}, {log_probs},
                      [log_probs, grad = std::move(res.grad)](std::span<const T> g) mutable {
                        auto d = log_probs.grad_buffer();
                        for (std::size_t i = 0; i < d.size(); ++i)
                          d[i] += g[0] * static_cast<T>(grad[i]);
                      });
}

template <typename T>
Tensor<T> ctc_loss_batch(const Tensor<T>& log_probs, const std::vector<SeqLabel>& labels,
                         std::size_t* infeasible) {
  if (log_probs.ndim() != 3 || log_probs.dim(0) != labels.size()) {
    throw ShapeError("ctc_loss_batch: expected [N, T, C] log-probabilities for " +
                     std::to_string(labels.size()) + " labels, got " +
                     to_string(log_probs.shape()));
  }
  const std::size_t n = log_probs.dim(0), frames = log_probs.dim(1), classes = log_probs.dim(2);
  const std::size_t per = frames * classes;
  std::vector<double> grad(n * per, 0.0);
  std::vector<double> lp(per);
  double total = 0.0;
  std::size_t used = 0, skipped = 0;
  auto src = log_probs.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(i * per), per, lp.begin());
    auto res = ctc_forward_backward(lp.data(), frames, classes, labels[i]);
    if (!res.feasible) {
      ++skipped;
      continue;
    }
    total += res.nll;
    std::copy(res.grad.begin(), res.grad.end(), grad.begin() + static_cast<std::ptrdiff_t>(i * per));
    ++used;
  }
  if (infeasible) *infeasible = skipped;
  const double denom = used ? static_cast<double>(used) : 1.0;
  for (auto& v : grad) v /= denom;
  return record_op<T>("ctc_loss_batch", Shape{}, {static_cast<T>(total / denom)}, {log_probs},
                      [log_probs, grad = std::move(grad)](std::span<const T> g) mutable {
                        auto d = log_probs.grad_buffer();
                        for (std::size_t i = 0; i < d.size(); ++i)
                          d[i] += g[0] * static_cast<T>(grad[i]);
                      });
}

SeqLabel ctc_collapse(const std::vector<int>& path) {
  SeqLabel out;
  int prev = -1;
  for (int c : path) {
    if (c != prev && c != kBlankIndex) out.symbols.push_back(c);
    prev = c;
  }
  return out;
}

double ctc_brute_force(const Tensor<double>& probs, const SeqLabel& label) {
  if (probs.ndim() != 2) {
    throw ShapeError("ctc_brute_force: expected [T, C] probabilities, got " +
                     to_string(probs.shape()));
  }
  const std::size_t frames = probs.dim(0), classes = probs.dim(1);
  validate_label(label, classes);
  double paths = 1.0;
  for (std::size_t t = 0; t < frames; ++t) paths *= static_cast<double>(classes);
  if (paths > 1e7) {
    throw std::invalid_argument("ctc_brute_force: " + std::to_string(classes) + "^" +
                                std::to_string(frames) + " paths exceeds the 1e7 limit");
  }
  auto p = probs.data();
  std::vector<int> path(frames, 0);
  double mass = 0.0;
  const auto count = static_cast<std::size_t>(paths);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k;
    double prob = 1.0;
    for (std::size_t t = frames; t-- > 0;) {
      path[t] = static_cast<int>(rem % classes);
      rem /= classes;
      prob *= p[t * classes + static_cast<std::size_t>(path[t])];
    }
    if (ctc_collapse(path) == label) mass += prob;
  }
  return mass > 0.0 ? -std::log(mass) : std::numeric_limits<double>::infinity();
}

template Tensor<float> ctc_loss(const Tensor<float>&, const SeqLabel&);
template Tensor<double> ctc_loss(const Tensor<double>&, const SeqLabel&);
template Tensor<float> ctc_loss_batch(const Tensor<float>&, const std::vector<SeqLabel>&,
                                      std::size_t*);
template Tensor<double> ctc_loss_batch(const Tensor<double>&, const std::vector<SeqLabel>&,
                                       std::size_t*);

}  // namespace ppocr
