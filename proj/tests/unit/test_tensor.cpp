#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ppocr/tensor/autograd.hpp"
#include "ppocr/tensor/grad_check.hpp"
#include "ppocr/tensor/ops.hpp"

using namespace ppocr;

namespace {

template <typename T>
Tensor<T> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<T> v(numel(shape));
  for (auto& x : v) x = static_cast<T>(d(rng));
  return Tensor<T>(std::move(shape), std::move(v));
}

// Six nested loops (plus groups), straight from the definition.
template <typename T>
std::vector<double> naive_conv(const Tensor<T>& in, const Tensor<T>& k, IntPair stride, IntPair pad,
                               int groups) {
  const auto n = in.dim(0), c = in.dim(1), h = in.dim(2), w = in.dim(3);
  const auto o = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  const std::size_t oh = (h + 2 * pad.h - kh) / stride.h + 1, ow = (w + 2 * pad.w - kw) / stride.w + 1;
  const std::size_t cg = c / groups, og = o / groups;
  std::vector<double> out(n * o * oh * ow, 0.0);
  auto x = in.data();
  auto kv = k.data();
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t oc = 0; oc < o; ++oc)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t xx = 0; xx < ow; ++xx) {
          double acc = 0;
          const std::size_t g = oc / og;
          for (std::size_t ic = 0; ic < cg; ++ic)
            for (std::size_t i = 0; i < kh; ++i)
              for (std::size_t j = 0; j < kw; ++j) {
                const long iy = long(y * stride.h + i) - pad.h, ix = long(xx * stride.w + j) - pad.w;
                if (iy < 0 || ix < 0 || iy >= long(h) || ix >= long(w)) continue;
                acc += double(x[((b * c + g * cg + ic) * h + iy) * w + ix]) *
                       double(kv[((oc * cg + ic) * kh + i) * kw + j]);
              }
          out[((b * o + oc) * oh + y) * ow + xx] = acc;
        }
  return out;
}

}  // namespace

TEST_CASE("conv2d: pointwise kernel scales") {
  Tensor<float> x({1, 1, 3, 3}, 1.0f);
  Tensor<float> k({1, 1, 1, 1}, 2.0f);
  auto y = conv2d(x, k, IntPair(1), IntPair(0));
  CHECK(y.shape() == Shape{1, 1, 3, 3});
  for (float v : y.data()) CHECK(v == 2.0f);
}

TEST_CASE("conv2d: identity depthwise kernel returns input") {
  std::mt19937_64 rng(1);
  auto x = random_tensor<float>({1, 2, 4, 4}, rng);
  Tensor<float> k({2, 1, 3, 3}, 0.0f);
  k.data()[4] = 1.0f;
  k.data()[9 + 4] = 1.0f;
  auto y = conv2d(x, k, IntPair(1), IntPair(1), 2);
  CHECK(y.shape() == x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.data()[i] == x.data()[i]);
}

TEST_CASE("conv2d matches the nested-loop reference") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = rng() % 2 + 1, c = rng() % 4 + 1, h = rng() % 6 + 3, w = rng() % 6 + 3;
    const std::size_t k = (rng() % 2) ? 3 : 1;
    const IntPair stride(int(rng() % 2 + 1), int(rng() % 2 + 1));
    const IntPair pad(int(rng() % 2), int(rng() % 2));
    const int groups = (trial % 3 == 0) ? int(c) : 1;
    const std::size_t o = groups == 1 ? rng() % 3 + 1 : c;
    auto x = random_tensor<float>({n, c, h, w}, rng);
    auto kern = random_tensor<float>({o, c / groups, k, k}, rng);
    auto y = conv2d(x, kern, stride, pad, groups);
    auto ref = naive_conv(x, kern, stride, pad, groups);
    REQUIRE(y.numel() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(y.data()[i] == doctest::Approx(ref[i]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("conv2d rejects mismatched shapes with both shapes named") {
  Tensor<float> x({1, 3, 4, 4});
  Tensor<float> k({2, 2, 3, 3});
  try {
    conv2d(x, k, IntPair(1), IntPair(1));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[1x3x4x4]") != std::string::npos);
    CHECK(msg.find("[2x2x3x3]") != std::string::npos);
  }
  CHECK_THROWS_AS(conv2d(Tensor<float>({1, 3, 4, 4}), Tensor<float>({3, 1, 3, 3}), IntPair(1), IntPair(0), 2),
                  ShapeError);
  CHECK_THROWS_AS(conv2d(Tensor<float>({1, 1, 2, 2}), Tensor<float>({1, 1, 3, 3}), IntPair(1), IntPair(0)),
                  ShapeError);
}

TEST_CASE("conv2d gradients match finite differences") {
  std::mt19937_64 rng(3);
  for (int groups : {1, 2}) {
    auto x = random_tensor<double>({2, 2, 5, 5}, rng);
    auto k = random_tensor<double>({2, std::size_t(2 / groups), 3, 3}, rng);
    MultiScalarFn f = [groups](const std::vector<Tensor<double>>& in) {
      return sum(mul(conv2d(in[0], in[1], IntPair(2, 1), IntPair(1), groups),
                     conv2d(in[0], in[1], IntPair(2, 1), IntPair(1), groups)));
    };
    CHECK(grad_check(f, {x, k}) < 1e-4);
  }
}

TEST_CASE("activations: hand values") {
  CHECK(activate(Activation::hswish, 0.0) == 0.0);
  CHECK(activate(Activation::hswish, -3.0) == 0.0);
  CHECK(activate(Activation::hswish, -4.0) == 0.0);
  CHECK(activate(Activation::hswish, 3.0) == 3.0);
  CHECK(activate(Activation::hsigmoid, 0.0) == doctest::Approx(0.5));
  CHECK(activate(Activation::relu6, 7.0) == 6.0);
  CHECK(activate(Activation::sigmoid, 0.0) == 0.5);
  CHECK(activate_derivative(Activation::hsigmoid, 3.0) == 0.0);
  CHECK(activate_derivative(Activation::hsigmoid, -3.0) == 0.0);
  CHECK_THROWS_AS(parse_activation("gelu"), std::invalid_argument);
  CHECK(parse_activation("hswish") == Activation::hswish);
}

TEST_CASE("activations are monotone where expected") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-8, 8);
  std::vector<double> xs(500);
  for (auto& x : xs) x = d(rng);
  std::sort(xs.begin(), xs.end());
  for (auto kind : {Activation::relu, Activation::relu6, Activation::sigmoid, Activation::hsigmoid}) {
    for (std::size_t i = 1; i < xs.size(); ++i) {
      CHECK(activate(kind, xs[i]) >= activate(kind, xs[i - 1]));
    }
  }
}

TEST_CASE("activation gradients away from kinks") {
  std::mt19937_64 rng(5);
  for (auto kind : {Activation::relu, Activation::relu6, Activation::sigmoid, Activation::hswish,
                    Activation::hsigmoid}) {
    auto x = random_tensor<double>({40}, rng, -5, 5);
    for (auto& v : x.data()) {
      for (double kink : {-3.0, 0.0, 3.0, 6.0}) {
        if (std::abs(v - kink) < 1e-3) v += 0.01;
      }
    }
    CHECK(grad_check([kind](const Tensor<double>& t) { return sum(mul(activation(t, kind), t)); }, x) < 1e-4);
  }
}

TEST_CASE("softmax: hand values and invariants") {
  Tensor<double> u({4}, 1.5);
  const auto su = softmax(u, 0);
  for (double v : su.data()) CHECK(v == doctest::Approx(0.25));
  Tensor<double> l({2}, std::vector<double>{0.0, std::log(3.0)});
  auto p = softmax(l, 0);
  CHECK(p.data()[0] == doctest::Approx(0.25));
  CHECK(p.data()[1] == doctest::Approx(0.75));

  std::mt19937_64 rng(6);
  auto x = random_tensor<float>({5, 7}, rng, -30, 30);
  auto shifted = add_scalar(x, 12.5f);
  auto a = softmax(x, 1), b = softmax(shifted, 1);
  for (std::size_t i = 0; i < a.numel(); ++i) {
    CHECK(a.data()[i] > 0.0f);
    CHECK(a.data()[i] == doctest::Approx(b.data()[i]).epsilon(1e-5));
  }
  for (std::size_t r = 0; r < 5; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < 7; ++c) s += a.data()[r * 7 + c];
    CHECK(std::abs(s - 1.0) <= 1e-6);
  }
  // Large logits stay finite through max subtraction.
  Tensor<double> big({2}, std::vector<double>{1000.0, 1000.0});
  CHECK(softmax(big, 0).data()[0] == doctest::Approx(0.5));
}

TEST_CASE("softmax cross-entropy gradient") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    auto x = random_tensor<double>({3, 5}, rng, -3, 3);
    auto onehot = Tensor<double>({3, 5}, 0.0);
    for (std::size_t r = 0; r < 3; ++r) onehot.data()[r * 5 + rng() % 5] = 1.0;
    CHECK(grad_check([onehot](const Tensor<double>& v) { return scale(sum(mul(log_softmax(v, 1), onehot)), -1.0); },
                     x) < 1e-4);
  }
}

TEST_CASE("global average pool") {
  Tensor<float> c({1, 2, 3, 3}, 4.0f);
  const auto gc = global_avg_pool(c);
  for (float v : gc.data()) CHECK(v == 4.0f);
  Tensor<double> x({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  auto g = global_avg_pool(x);
  CHECK(g.shape() == Shape{1, 1, 1, 1});
  CHECK(g.item() == 2.5);
  x.set_requires_grad(true);
  backward(sum(global_avg_pool(x)));
  for (double v : x.grad()) CHECK(v == doctest::Approx(0.25));
  std::mt19937_64 rng(8);
  CHECK(grad_check([](const Tensor<double>& t) { return sum(global_avg_pool(t)); },
                   random_tensor<double>({2, 3, 3, 4}, rng)) < 1e-6);
}

TEST_CASE("backward: linear, quadratic and fan-out") {
  Tensor<double> x({3}, std::vector<double>{1, -2, 3});
  x.set_requires_grad(true);
  backward(sum(x));
  for (double g : x.grad()) CHECK(g == 1.0);

  x.zero_grad();
  backward(sum(mul(x, x)));
  CHECK(x.grad()[0] == 2.0);
  CHECK(x.grad()[1] == -4.0);
  CHECK(x.grad()[2] == 6.0);

  // y feeds two consumers; gradients from both paths add up.
  x.zero_grad();
  auto y = scale(x, 3.0);
  backward(add(sum(y), sum(mul(y, y))));
  for (std::size_t i = 0; i < 3; ++i) CHECK(x.grad()[i] == doctest::Approx(3.0 + 18.0 * x.data()[i]));

  CHECK_THROWS_AS(backward(x), ShapeError);
}

TEST_CASE("graph records in topological order and runs each rule once") {
  Tensor<double> a({2}, 1.0), b({2}, 2.0);
  a.set_requires_grad(true);
  b.set_requires_grad(true);
  auto c = mul(a, b);
  auto d = add(c, a);
  auto loss = sum(mul(d, c));
  auto graph = Graph<double>::trace(loss);
  const auto& ops = graph.operations();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (const auto& in : ops[i]->inputs) {
      if (in->backward) {
        auto it = std::find(ops.begin(), ops.end(), in.get());
        CHECK(it - ops.begin() < static_cast<long>(i));
      }
    }
  }
  graph.backward(loss);
  // loss = sum((ab + a) * ab); dl/da = 2ab^2 + 2ab = 8 + 4 at a=1, b=2.
  CHECK(a.grad()[0] == doctest::Approx(12.0));
  // Gradients accumulate across calls.
  graph.backward(loss);
  CHECK(a.grad()[0] == doctest::Approx(24.0));
}

TEST_CASE("no-grad guard suppresses recording") {
  Tensor<float> x({2}, 1.0f);
  x.set_requires_grad(true);
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_mode_enabled());
    auto y = sum(x);
    CHECK_FALSE(y.requires_grad());
  }
  CHECK(grad_mode_enabled());
  CHECK(sum(x).requires_grad());
}

TEST_CASE("grad_check of sum is exact") {
  std::mt19937_64 rng(9);
  CHECK(grad_check([](const Tensor<double>& t) { return sum(t); }, random_tensor<double>({4, 5}, rng)) < 1e-10);
}

TEST_CASE("shape bookkeeping") {
  Tensor<float> t({2, 3, 4});
  CHECK(t.numel() == 24);
  CHECK(t.data().size() == 24);
  CHECK_THROWS_AS(Tensor<float>(Shape{2, 2}, std::vector<float>{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(add(Tensor<float>({2}), Tensor<float>({3})), ShapeError);
  CHECK_THROWS_AS(matmul(Tensor<float>({2, 3}), Tensor<float>({2, 3})), ShapeError);
  auto r = reshape(t, {6, 4});
  CHECK(r.shape() == Shape{6, 4});
  CHECK_THROWS_AS(reshape(t, {5, 5}), ShapeError);
  t.set_requires_grad(true);
  backward(sum(mul(t, t)));
  CHECK(t.grad().size() == t.numel());
}

TEST_CASE("matmul, permute, narrow and upsample gradients") {
  std::mt19937_64 rng(10);
  auto a = random_tensor<double>({3, 4}, rng), b = random_tensor<double>({4, 2}, rng);
  auto m = matmul(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < 4; ++k) s += a.data()[i * 4 + k] * b.data()[k * 2 + j];
      CHECK(m.data()[i * 2 + j] == doctest::Approx(s));
    }
  auto w = random_tensor<double>({3, 2, 4}, rng);
  CHECK(grad_check(MultiScalarFn([](const std::vector<Tensor<double>>& in) {
                     return sum(mul(matmul(in[0], in[1]), matmul(in[0], in[1])));
                   }),
                   {a, b}) < 1e-4);
  CHECK(grad_check([](const Tensor<double>& t) {
          auto p = permute(t, {2, 0, 1});
          return sum(mul(p, narrow(add_scalar(p, 1.0), 0, 0, 4)));
        }, w) < 1e-4);
  auto img = random_tensor<double>({1, 2, 2, 3}, rng);
  auto up = upsample_nearest(img, 2);
  CHECK(up.shape() == Shape{1, 2, 4, 6});
  CHECK(up.data()[1 * 24 + 3 * 6 + 5] == img.data()[1 * 6 + 1 * 3 + 2]);
  CHECK(grad_check([](const Tensor<double>& t) {
          auto u = upsample_nearest(t, 2);
          return sum(mul(u, u));
        }, img) < 1e-4);
}

TEST_CASE("cast keeps values and float/double agree") {
  std::mt19937_64 rng(11);
  auto x = random_tensor<float>({3, 3}, rng);
  auto d = x.cast<double>();
  for (std::size_t i = 0; i < 9; ++i) CHECK(d.data()[i] == double(x.data()[i]));
}

TEST_CASE("grad_check_report sets aside kink crossings but not wrong gradients") {
  // relu evaluated 1e-6 from its kink: the +-eps step straddles it.
  Tensor<double> x({3}, std::vector<double>{1e-6, 0.7, -0.4});
  MultiScalarFn relu_sum = [](const std::vector<Tensor<double>>& in) {
    return sum(activation(in[0], Activation::relu));
  };
  const auto r = grad_check_report(relu_sum, {x});
  CHECK(r.max_rel_err > 0.1);
  CHECK(r.kink_skips == 1);
  CHECK(r.max_rel_err_resolved < 1e-10);

  // A gradient that is 1% too large is never excused, kink or not.
  MultiScalarFn wrong = [](const std::vector<Tensor<double>>& in) {
    const auto& v = in[0];
    return record_op<double>("scaled_square", {1}, {v.data()[0] * v.data()[0]}, {v},
                             [v](std::span<const double> g) { v.grad_buffer()[0] += 1.01 * 2.0 * v.data()[0] * g[0]; });
  };
  const auto w = grad_check_report(wrong, {Tensor<double>({1}, 0.8)});
  CHECK(w.kink_skips == 0);
  CHECK(w.max_rel_err_resolved == doctest::Approx(0.01 / 1.01).epsilon(1e-3));
}

TEST_CASE("grad_check_report leaves exact zero gradients in place") {
  MultiScalarFn f = [](const std::vector<Tensor<double>>& in) { return sum(mul(in[0], Tensor<double>({2}, std::vector<double>{0.0, 2.0}))); };
  const auto r = grad_check_report(f, {Tensor<double>({2}, 1.0)});
  CHECK(r.noise_skips == 0);
  CHECK(r.max_rel_err == r.max_rel_err_resolved);
}
