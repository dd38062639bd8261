#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "ppocr/losses/center.hpp"
#include "ppocr/losses/ctc.hpp"
#include "ppocr/losses/db.hpp"
#include "ppocr/losses/divergence.hpp"
#include "ppocr/losses/totals.hpp"
#include "ppocr/tensor/autograd.hpp"
#include "ppocr/tensor/grad_check.hpp"
#include "ppocr/tensor/ops.hpp"

using namespace ppocr;

namespace {

Tensor<double> uniform(Shape shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = d(rng);
  return Tensor<double>(std::move(shape), std::move(v));
}

Tensor<double> log_of(const Tensor<double>& p) {
  std::vector<double> v(p.data().begin(), p.data().end());
  for (auto& x : v) x = std::log(x);
  return Tensor<double>(p.shape(), v);
}

Tensor<double> random_probs(std::size_t t, std::size_t c, std::mt19937_64& rng) {
  auto logits = uniform({t, c}, rng, -2, 2);
  return softmax(logits, 1).detach();
}

SeqLabel random_label(std::mt19937_64& rng, int classes, int max_len) {
  SeqLabel l;
  const int len = int(rng() % std::uint64_t(max_len)) + 1;
  for (int i = 0; i < len; ++i) l.symbols.push_back(int(rng() % std::uint64_t(classes - 1)) + 1);
  return l;
}

// KL summed by hand, independent of kl_div.
double hand_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("ctc: two uniform frames, one symbol") {
  Tensor<double> lp({2, 2}, std::log(0.5));
  const SeqLabel a{{1}};
  CHECK(ctc_loss(lp, a).item() == doctest::Approx(-std::log(0.75)).epsilon(1e-12));
  CHECK(ctc_loss(lp, a).item() == doctest::Approx(0.287682).epsilon(1e-6));
  Tensor<double> probs({2, 2}, 0.5);
  CHECK(ctc_brute_force(probs, a) == doctest::Approx(-std::log(0.75)).epsilon(1e-12));
}

TEST_CASE("ctc: certain path gives zero, single frame gives -ln p") {
  // Path (a, -, b) with probability one.
  Tensor<double> probs({3, 3}, std::vector<double>{0, 1, 0, 1, 0, 0, 0, 0, 1});
  const SeqLabel ab{{1, 2}};
  CHECK(ctc_brute_force(probs, ab) == doctest::Approx(0.0));
  Tensor<double> lp({3, 3}, std::vector<double>{-50, 0, -50, 0, -50, -50, -50, -50, 0});
  CHECK(std::abs(ctc_loss(lp, ab).item()) < 1e-12);

  Tensor<double> one({1, 3}, std::vector<double>{0.2, 0.3, 0.5});
  CHECK(ctc_brute_force(one, SeqLabel{{2}}) == doctest::Approx(-std::log(0.5)));
  CHECK(ctc_loss(log_of(one), SeqLabel{{2}}).item() == doctest::Approx(-std::log(0.5)));
}

TEST_CASE("ctc: infeasible labels are a distinct condition") {
  Tensor<double> lp({2, 3}, std::log(1.0 / 3));
  const SeqLabel rep{{1, 1}};  // needs a blank between the repeats
  CHECK(ctc_min_frames(rep) == 3);
  CHECK_FALSE(ctc_feasible(2, rep));
  auto r = ctc_forward_backward(lp.data().data(), 2, 3, rep);
  CHECK_FALSE(r.feasible);
  CHECK(std::isinf(r.nll));
  for (double g : r.grad) CHECK(g == 0.0);
  CHECK(std::isinf(ctc_loss(lp, rep).item()));
  Tensor<double> probs({2, 3}, 1.0 / 3);
  CHECK(std::isinf(ctc_brute_force(probs, rep)));
  // A batch skips infeasible samples and reports them.
  Tensor<double> batch({2, 2, 3}, std::log(1.0 / 3));
  std::size_t infeasible = 0;
  auto loss = ctc_loss_batch(batch, {rep, SeqLabel{{2}}}, &infeasible);
  CHECK(infeasible == 1);
  CHECK(std::isfinite(loss.item()));
  CHECK_THROWS_AS(validate_label(SeqLabel{{0}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate_label(SeqLabel{{3}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(ctc_brute_force(Tensor<double>({12, 4}, 0.25), SeqLabel{{1}}), std::invalid_argument);
}

TEST_CASE("ctc agrees with exhaustive path enumeration") {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 300; ++n) {
    const std::size_t t = rng() % 6 + 1, c = rng() % 3 + 2;
    const auto probs = random_probs(t, c, rng);
    const auto label = random_label(rng, int(c), 3);
    const double bf = ctc_brute_force(probs, label);
    const double fb = ctc_loss(log_of(probs), label).item();
    if (std::isinf(bf)) {
      CHECK(std::isinf(fb));
    } else {
      CHECK(std::abs(fb - bf) < 1e-6);
    }
  }
}

TEST_CASE("ctc collapse") {
  CHECK(ctc_collapse({0, 1, 1, 0, 2}) == SeqLabel{{1, 2}});
  CHECK(ctc_collapse({1, 0, 1}) == SeqLabel{{1, 1}});
  CHECK(ctc_collapse({0, 0}).empty());
}

TEST_CASE("kl divergence") {
  Tensor<double> p({2}, std::vector<double>{1, 0}), q({2}, std::vector<double>{0.5, 0.5});
  CHECK(kl_div(p, q).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(kl_div(q, q).item() == 0.0);
  CHECK_THROWS_AS(kl_div(Tensor<double>({2}, 0.7), q), std::invalid_argument);
  std::mt19937_64 rng(2);
  for (int n = 0; n < 1000; ++n) {
    auto a = random_probs(1, 4, rng), b = random_probs(1, 4, rng);
    CHECK(kl_div(a, b).item() >= 0.0);
  }
}

TEST_CASE("dml loss") {
  Tensor<double> a({2}, std::vector<double>{0, 0}), b({2}, std::vector<double>{0, std::log(3.0)});
  const double expected = (hand_kl({0.5, 0.5}, {0.25, 0.75}) + hand_kl({0.25, 0.75}, {0.5, 0.5})) / 2;
  CHECK(expected == doctest::Approx(0.137327).epsilon(1e-5));
  CHECK(dml_loss(a, b).item() == doctest::Approx(expected).epsilon(1e-12));
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    auto x = uniform({3, 5}, rng, -4, 4), y = uniform({3, 5}, rng, -4, 4);
    CHECK(dml_loss(x, x).item() == 0.0);
    CHECK(dml_loss(x, y).item() == dml_loss(y, x).item());
  }
  CHECK_THROWS_AS(dml_loss(Tensor<double>({2, 3}), Tensor<double>({3, 2})), ShapeError);
  // Gradient reaches both inputs.
  auto x = uniform({2, 3}, rng, -1, 1).set_requires_grad(true);
  auto y = uniform({2, 3}, rng, -1, 1).set_requires_grad(true);
  backward(dml_loss(x, y));
  CHECK(x.has_grad());
  CHECK(y.has_grad());
}

TEST_CASE("bernoulli logits turn sigmoid maps into two-way distributions") {
  Tensor<double> z({2}, std::vector<double>{0.0, 2.0});
  auto two = bernoulli_logits(z);
  CHECK(two.shape() == Shape{2, 2});
  auto p = softmax(two, 1);
  CHECK(p.data()[0] == doctest::Approx(0.5));
  CHECK(p.data()[2] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
}

TEST_CASE("feature loss") {
  std::mt19937_64 rng(4);
  auto s = uniform({2, 3, 4}, rng, -1, 1);
  CHECK(feature_loss(s, s).item() == 0.0);
  CHECK(feature_loss(add_scalar(s, 1.0), s).item() == doctest::Approx(1.0));
  auto t = uniform({2, 3, 4}, rng, -1, 1);
  double hand = 0;
  for (std::size_t i = 0; i < s.numel(); ++i) hand += (s.data()[i] - t.data()[i]) * (s.data()[i] - t.data()[i]);
  CHECK(std::abs(feature_loss(s, t).item() - hand / double(s.numel())) < 1e-7);
  CHECK_THROWS_AS(feature_loss(Tensor<double>({2, 3}), Tensor<double>({3, 2})), ShapeError);
}

TEST_CASE("center loss") {
  CenterBank<double> bank(3, 2);
  Tensor<double> x({1, 2}, std::vector<double>{1, 0});
  Tensor<double> logits({1, 3}, std::vector<double>{0.1, 2.0, 0.3});
  CHECK(center_loss(x, logits, bank).item() == doctest::Approx(1.0));
  bank.centers.data()[2] = 1.0;  // center of class 1 = (1, 0)
  CHECK(center_loss(x, logits, bank).item() == 0.0);

  std::mt19937_64 rng(5);
  CenterBank<double> rb(4, 3);
  rb.centers = uniform({4, 3}, rng, -1, 1);
  auto f = uniform({6, 3}, rng, -1, 1), h = uniform({6, 4}, rng, -1, 1);
  CHECK(center_loss(f, scale(h, 2.0), rb).item() == center_loss(f, h, rb).item());
  CHECK(greedy_assignments(Tensor<double>({1, 3}, std::vector<double>{1, 1, 0})) == std::vector<int>{0});
}

TEST_CASE("center updates") {
  CenterBank<double> bank(3, 2, 0.0);
  Tensor<double> f({2, 2}, std::vector<double>{1, 2, 3, 4});
  update_centers(bank, f, {1, 1});
  for (double c : bank.centers.data()) CHECK(c == 0.0);
  bank.momentum = 1.0;
  update_centers(bank, f, {1, 1});
  CHECK(bank.centers.data()[2] == 2.0);
  CHECK(bank.centers.data()[3] == 3.0);
  CHECK(bank.centers.data()[0] == 0.0);  // class 0 unassigned

  // Fixed-point iteration: c <- c - 0.1 (c - m) converges to m geometrically.
  CenterBank<double> slow(2, 2, 0.1);
  for (int i = 0; i < 200; ++i) update_centers(slow, f, {1, 1});
  const double gap = 0.9;
  CHECK(std::abs(slow.centers.data()[2] - 2.0) < 1e-4);
  CHECK(std::abs(slow.centers.data()[3] - 3.0) < 1e-4);
  CHECK(std::abs(slow.centers.data()[2] - 2.0) == doctest::Approx(2.0 * std::pow(gap, 200)).epsilon(1e-6));
}

TEST_CASE("enhanced ctc") {
  std::mt19937_64 rng(6);
  const auto lp = log_softmax(uniform({5, 4}, rng, -1, 1), 1);
  const SeqLabel label{{1, 2}};
  const auto feats = uniform({5, 3}, rng, -1, 1), head = uniform({5, 4}, rng, -1, 1);
  CenterBank<double> bank(4, 3);
  bank.centers = uniform({4, 3}, rng, -1, 1);
  const double c = ctc_loss(lp, label).item();
  CHECK(enhanced_ctc(lp, label, feats, head, bank, 0.0).item() == c);
  const double center = center_loss(feats, head, bank).item();
  CHECK(enhanced_ctc(lp, label, feats, head, bank, 0.05).item() == doctest::Approx(c + 0.05 * center));
  CHECK(0.5 + 0.05 * 2.0 == doctest::Approx(0.6));
}

TEST_CASE("db ground-truth loss") {
  CHECK(combine_db_gt(0.1, 0.1, 0.1, 5, 10) == doctest::Approx(1.6));
  Tensor<double> gt({1, 3, 3}, std::vector<double>{0, 1, 1, 0, 1, 1, 0, 0, 0});
  Tensor<double> thresh({1, 3, 3}, 0.3), mask({1, 3, 3}, 1.0);
  DetGroundTruth<double> g{gt, thresh, mask};
  auto perfect = db_gt_loss(ProbMapTriple<double>{gt, thresh, gt}, g);
  CHECK(perfect.total.item() < 1e-5);

  Tensor<double> ones({1, 2, 2}, 1.0), zeros({1, 2, 2}, 0.0);
  CHECK(dice_loss(ones, zeros).item() == doctest::Approx(1.0));

  auto empty = db_gt_loss(ProbMapTriple<double>{gt, thresh, gt},
                          DetGroundTruth<double>{gt, thresh, Tensor<double>({1, 3, 3}, 0.0)});
  CHECK(empty.empty_mask);
  CHECK(empty.l_t.item() == 0.0);

  // Identical pixel permutation of every map leaves the loss unchanged.
  std::mt19937_64 rng(7);
  auto p = uniform({1, 3, 3}, rng, 0.05, 0.95), t = uniform({1, 3, 3}, rng, 0.05, 0.95),
       b = uniform({1, 3, 3}, rng, 0.05, 0.95);
  const std::vector<std::size_t> perm{8, 3, 5, 0, 1, 7, 2, 6, 4};
  auto permute_pixels = [&perm](const Tensor<double>& m) {
    std::vector<double> v(9);
    for (std::size_t i = 0; i < 9; ++i) v[i] = m.data()[perm[i]];
    return Tensor<double>({1, 3, 3}, v);
  };
  DetGroundTruth<double> g2{permute_pixels(gt), permute_pixels(thresh), permute_pixels(mask)};
  const double base = db_gt_loss(ProbMapTriple<double>{p, t, b}, g).total.item();
  const double moved =
      db_gt_loss(ProbMapTriple<double>{permute_pixels(p), permute_pixels(t), permute_pixels(b)}, g2).total.item();
  CHECK(moved == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("dilation with the 2x2 ones kernel") {
  Tensor<double> m({2, 2}, std::vector<double>{0, 0, 0, 1});
  const auto d = dilate2x2(m);
  for (double v : d.data()) CHECK(v == 1.0);
  const auto z = dilate2x2(Tensor<double>({3, 4}, 0.0));
  for (double v : z.data()) CHECK(v == 0.0);
  std::mt19937_64 rng(8);
  for (int n = 0; n < 100; ++n) {
    auto a = uniform({4, 5}, rng, 0, 1);
    auto bump = uniform({4, 5}, rng, 0, 0.5);
    auto b = add(a, bump);
    const auto da = dilate2x2(a), db = dilate2x2(b);
    for (std::size_t i = 0; i < a.numel(); ++i) {
      CHECK(da.data()[i] >= a.data()[i]);
      CHECK(db.data()[i] >= da.data()[i]);
    }
  }
}

TEST_CASE("distill loss") {
  CHECK(combine_distill(0.1, 0.2, 5) == doctest::Approx(0.7));
  Tensor<double> teacher({1, 2, 2}, std::vector<double>{0, 0, 0, 1});
  const auto target = dilate2x2(teacher);
  auto perfect = distill_loss(ProbMapTriple<double>{target, Tensor<double>({1, 2, 2}, 0.5), target}, teacher);
  CHECK(perfect.total.item() < 1e-5);

  std::mt19937_64 rng(9);
  auto sp = uniform({1, 3, 3}, rng, 0.1, 0.9).set_requires_grad(true);
  auto sb = uniform({1, 3, 3}, rng, 0.1, 0.9).set_requires_grad(true);
  auto tp = uniform({1, 3, 3}, rng, 0, 1).set_requires_grad(true);
  backward(distill_loss(ProbMapTriple<double>{sp, Tensor<double>({1, 3, 3}, 0.5), sb}, tp).total);
  CHECK(sp.has_grad());
  CHECK(sb.has_grad());
  CHECK_FALSE(tp.has_grad());
  CHECK_THROWS_AS(distill_loss(ProbMapTriple<double>{sp, sp, sb}, Tensor<double>({1, 2, 2})), ShapeError);
}

TEST_CASE("totals") {
  CHECK(cml_total({0, 0}, 0, {0, 0}) == 0.0);
  CHECK(cml_total({1, 2}, 3, {4, 5}) == 15.0);
  CHECK(cml_total({1, 2}, 3.5, {4, 5}) > cml_total({1, 2}, 3, {4, 5}));
  CHECK(udml_total(0, 0, 0) == 0.0);
  CHECK(udml_total(1.0, 0.5, 0.25) == 1.75);
  CHECK(udml_total(1.0, 0.5, 0.25) - udml_total(1.0, 0.5, 0.0) == 0.25);
  using TD = Tensor<double>;
  auto t = cml_total<double>({TD::scalar(1), TD::scalar(2)}, TD::scalar(3), {TD::scalar(4), TD::scalar(5)});
  CHECK(t.item() == 15.0);
  CHECK(udml_total<double>(TD::scalar(1.0), TD::scalar(0.5), TD::scalar(0.25)).item() == 1.75);
}

TEST_CASE("loss gradients against finite differences") {
  std::mt19937_64 rng(10);
  for (int n = 0; n < 20; ++n) {
    const auto label = random_label(rng, 4, 2);
    CHECK(grad_check([label](const Tensor<double>& x) { return ctc_loss(log_softmax(x, 1), label); },
                     uniform({5, 4}, rng, -2, 2)) < 1e-4);
    MultiScalarFn dml = [](const std::vector<Tensor<double>>& in) { return dml_loss(in[0], in[1]); };
    CHECK(grad_check(dml, {uniform({2, 4}, rng, -2, 2), uniform({2, 4}, rng, -2, 2)}) < 1e-4);
    MultiScalarFn bern = [](const std::vector<Tensor<double>>& in) {
      return dml_loss(bernoulli_logits(in[0]), bernoulli_logits(in[1]));
    };
    CHECK(grad_check(bern, {uniform({1, 2, 3}, rng, -2, 2), uniform({1, 2, 3}, rng, -2, 2)}) < 1e-4);
  }
}
