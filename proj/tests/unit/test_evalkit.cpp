#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "ppocr/evalkit/boxes.hpp"
#include "ppocr/evalkit/decode.hpp"
#include "ppocr/evalkit/metrics.hpp"
#include "json.hpp"

using namespace ppocr;

namespace {

// One-hot logits of magnitude `scale` along `path`.
Tensor<double> one_hot(const std::vector<int>& path, std::size_t classes, double scale = 1.0) {
  Tensor<double> t({path.size(), classes}, 0.0);
  for (std::size_t i = 0; i < path.size(); ++i) t.data()[i * classes + std::size_t(path[i])] = scale;
  return t;
}

Tensor<double> map_with(std::size_t h, std::size_t w, const std::vector<Box>& rects, double value = 1.0) {
  Tensor<double> t({h, w}, 0.0);
  for (const auto& r : rects) {
    for (int y = int(r.y0); y < int(r.y1); ++y) {
      for (int x = int(r.x0); x < int(r.x1); ++x) t.data()[std::size_t(y) * w + std::size_t(x)] = value;
    }
  }
  return t;
}

DetBox db(double x0, double y0, double x1, double y1, double score = 1.0) { return {{x0, y0, x1, y1}, score}; }

}  // namespace

TEST_CASE("greedy decode collapses repeats and drops blanks") {
  CHECK(greedy_decode(one_hot({0, 1, 1, 0, 2}, 3)) == SeqLabel{{1, 2}});
  CHECK(greedy_decode(one_hot({0, 0, 0}, 3)).empty());
  CHECK(greedy_decode(one_hot({1, 0, 1}, 3)) == SeqLabel{{1, 1}});
  CHECK(collapse_path({2, 2, 2}) == SeqLabel{{2}});
  // Ties go to the lowest index.
  CHECK(greedy_decode(Tensor<double>({2, 3}, 0.5)).empty());
}

TEST_CASE("greedy decode depends only on the argmax path") {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 200; ++n) {
    std::vector<int> path(rng() % 8 + 1);
    for (auto& p : path) p = int(rng() % 4);
    const double scale = 0.1 + double(rng() % 1000) / 10.0;
    CHECK(greedy_decode(one_hot(path, 4, scale)) == collapse_path(path));
  }
  Tensor<double> batch({2, 3, 3}, 0.0);
  const auto a = one_hot({1, 0, 2}, 3), b = one_hot({0, 0, 0}, 3);
  std::copy(a.data().begin(), a.data().end(), batch.data().begin());
  std::copy(b.data().begin(), b.data().end(), batch.data().begin() + 9);
  const auto decoded = greedy_decode_batch(batch);
  REQUIRE(decoded.size() == 2);
  CHECK(decoded[0] == SeqLabel{{1, 2}});
  CHECK(decoded[1].empty());
}

TEST_CASE("sentence accuracy") {
  const std::vector<SeqLabel> gts{{{1}}, {{2, 3}}, {{4}}, {{5, 5}}};
  CHECK(sentence_accuracy(gts, gts) == 1.0);
  const std::vector<SeqLabel> wrong{{{2}}, {{3, 2}}, {{}}, {{5}}};
  CHECK(sentence_accuracy(wrong, gts) == 0.0);
  const std::vector<SeqLabel> three{{{1}}, {{2, 3}}, {{4}}, {{5}}};
  CHECK(sentence_accuracy(three, gts) == 0.75);
  CHECK_THROWS_AS(sentence_accuracy(three, {gts[0]}), std::invalid_argument);
}

TEST_CASE("boxes from probability maps") {
  CHECK(boxes_from_probmap(Tensor<double>({8, 8}, 0.0)).empty());

  const auto one = boxes_from_probmap(map_with(10, 12, {{2, 3, 7, 6}}));
  REQUIRE(one.size() == 1);
  CHECK(one[0].box == Box{2, 3, 7, 6});
  CHECK(one[0].score == 1.0);

  // A zero column at x = 5 separates the two rectangles.
  const auto two = boxes_from_probmap(map_with(10, 12, {{1, 1, 5, 4}, {6, 1, 10, 4}}));
  REQUIRE(two.size() == 2);
  CHECK(two[0].box == Box{1, 1, 5, 4});
  CHECK(two[1].box == Box{6, 1, 10, 4});

  // Diagonal neighbours are not 4-connected.
  Tensor<double> diag({4, 4}, 0.0);
  diag.data()[0] = diag.data()[5] = 1.0;
  CHECK(boxes_from_probmap(diag, {0.3, 1, 0.0}).size() == 2);
  CHECK(boxes_from_probmap(diag, {0.3, 2, 0.0}).empty());  // min_area filter

  // Unclip grows each side by A * ratio / L = 6 * 1.5 / 10 = 0.9, clipped to the map.
  const auto grown = boxes_from_probmap(map_with(10, 10, {{0, 4, 3, 6}}), {0.3, 4, 1.5});
  REQUIRE(grown.size() == 1);
  CHECK(grown[0].box.x0 == 0.0);
  CHECK(grown[0].box.x1 == doctest::Approx(3.9));
  CHECK(grown[0].box.y0 == doctest::Approx(3.1));
}

TEST_CASE("thresholding depends only on the comparison with bin_thresh") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 50; ++n) {
    Tensor<double> p({12, 12}, 0.0);
    for (auto& v : p.data()) v = u(rng) < 0.4 ? 0.5 + 0.5 * u(rng) : 0.2 * u(rng);
    Tensor<double> q({12, 12}, 0.0);
    // Every value keeps its side of 0.3.
    for (std::size_t i = 0; i < p.numel(); ++i) q.data()[i] = p.data()[i] > 0.3 ? 0.31 + 0.5 * p.data()[i] : 0.5 * p.data()[i];
    const auto a = boxes_from_probmap(p), b = boxes_from_probmap(q);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].box == b[i].box);
  }
}

TEST_CASE("det hmean conventions") {
  const std::vector<DetBox> gt{db(0, 0, 4, 4), db(10, 10, 14, 14)};
  auto same = det_hmean(gt, gt);
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);
  CHECK(same.hmean == 1.0);

  auto empty = det_hmean({}, {});
  CHECK(empty.precision == 1.0);
  CHECK(empty.recall == 1.0);
  CHECK(empty.hmean == 1.0);

  auto none = det_hmean({}, gt);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.hmean == 0.0);

  // Two 4x4 boxes sharing a 4x3 strip: IoU = 12 / (16 + 16 - 12) = 0.6.
  const Box a{0, 0, 4, 4}, b{0, 1, 4, 5};
  CHECK(box_iou(a, b) == doctest::Approx(0.6));
  auto single = det_hmean({{b, 0.9}}, {{a, 1.0}}, 0.5);
  CHECK(single.matched == 1);
  CHECK(single.hmean == 1.0);
  CHECK(det_hmean({{b, 0.9}}, {{a, 1.0}}, 0.7).hmean == 0.0);

  CHECK(hmean(0, 0) == 0.0);
  CHECK(hmean(0.5, 1.0) == doctest::Approx(2.0 / 3));
}

TEST_CASE("det hmean: swap symmetry and injective matching") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 20);
  for (int n = 0; n < 200; ++n) {
    auto random_boxes = [&](std::size_t k) {
      std::vector<DetBox> out;
      for (std::size_t i = 0; i < k; ++i) {
        const double x = u(rng), y = u(rng);
        out.push_back(db(x, y, x + 2 + u(rng) / 4, y + 2 + u(rng) / 4, u(rng) / 20));
      }
      return out;
    };
    const auto p = random_boxes(rng() % 5), g = random_boxes(rng() % 5);
    const auto pg = det_hmean(p, g, 0.3), gp = det_hmean(g, p, 0.3);
    CHECK(pg.precision == doctest::Approx(gp.recall));
    CHECK(pg.recall == doctest::Approx(gp.precision));
    CHECK(pg.hmean == doctest::Approx(gp.hmean));
    const auto pairs = match_boxes(p, g, 0.3);
    std::set<std::size_t> ps, gs;
    for (const auto& [i, j] : pairs) {
      CHECK(ps.insert(i).second);
      CHECK(gs.insert(j).second);
      CHECK(box_iou(p[i].box, g[j].box) >= 0.3);
    }
    CHECK(pairs.size() == pg.matched);
  }
}

TEST_CASE("greedy matching follows descending score") {
  // The higher-scored prediction claims the shared ground truth first.
  const std::vector<DetBox> gt{db(0, 0, 4, 4)};
  const std::vector<DetBox> pred{db(0, 0, 4, 3.5, 0.2), db(0, 0, 4, 4, 0.9)};
  const auto pairs = match_boxes(pred, gt, 0.5);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].first == 1);
}

TEST_CASE("dataset hmean pools counts and reports serialize") {
  const std::vector<std::vector<DetBox>> gts{{db(0, 0, 4, 4)}, {db(0, 0, 4, 4), db(8, 8, 12, 12)}};
  const std::vector<std::vector<DetBox>> preds{{db(0, 0, 4, 4)}, {db(20, 20, 24, 24)}};
  const auto r = det_hmean_dataset(preds, gts);
  CHECK(r.matched == 1);
  CHECK(r.pred == 2);
  CHECK(r.gt == 3);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == doctest::Approx(1.0 / 3));
  CHECK(r.hmean == doctest::Approx(0.4));

  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["precision"].get<double>() == 0.5);
  CHECK(j["matched"].get<int>() == 1);
  CHECK(r.to_json().find('\n') == std::string::npos);
  const auto rec = nlohmann::json::parse(recognition_report(0.75, 3, 4).to_json());
  CHECK(rec["sentence_accuracy"].get<double>() == 0.75);
}
