#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "ppocr/datakit/copy_paste.hpp"
#include "ppocr/datakit/dataset_io.hpp"
#include "ppocr/datakit/db_targets.hpp"
#include "ppocr/datakit/det_data.hpp"
#include "ppocr/datakit/font.hpp"
#include "ppocr/datakit/geometry.hpp"
#include "ppocr/datakit/rec_data.hpp"

using namespace ppocr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ppocr_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool same(const Tensor<float>& a, const Tensor<float>& b) {
  return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

TextInstance solid_instance(const Image& source, const Polygon& poly, std::string text) {
  return TextInstance{poly, std::move(text), crop_patch(source, poly)};
}

}  // namespace

TEST_CASE("charset encodes and decodes") {
  const auto digits = Charset::from_spec("0-9");
  CHECK(digits == Charset::digits());
  CHECK(digits.size() == 10);
  CHECK(digits.num_classes() == 11);
  CHECK(digits.index_of('0') == 1);
  CHECK(digits.encode("907") == SeqLabel{{10, 1, 8}});
  CHECK(digits.decode(SeqLabel{{10, 1, 8}}) == "907");
  CHECK_THROWS_AS(digits.index_of('A'), std::invalid_argument);
  CHECK_THROWS_AS(Charset::from_spec("9-0"), std::invalid_argument);
  CHECK_THROWS_AS(Charset(std::vector<char>{'1', '1'}), std::invalid_argument);
  CHECK(Charset::from_spec("A-C7").symbols() == std::vector<char>{'A', 'B', 'C', '7'});
  CHECK(Charset::alphanumeric().size() == 36);
}

TEST_CASE("glyph rendering") {
  CHECK(text_width("") == 0);
  CHECK(text_width("1") == kGlyphWidth);
  CHECK(text_width("123") == 2 * kGlyphPitch + kGlyphWidth);
  Image img(9, 8, 1, 0);
  draw_text(img, 1, 1, "8", 200);
  const auto rows = *glyph_rows('8');
  for (int y = 0; y < kGlyphHeight; ++y) {
    for (int x = 0; x < kGlyphWidth; ++x) {
      const bool ink = (rows[std::size_t(y)] >> (kGlyphWidth - 1 - x)) & 1;
      CHECK(img.at(y + 1, x + 1) == (ink ? 200 : 0));
    }
  }
  // Drawing off the edge drops pixels instead of failing.
  Image small(3, 3, 1, 0);
  draw_text(small, -2, -2, "0", 255);
  CHECK_FALSE(has_glyph('#'));
}

TEST_CASE("recognition generator contract") {
  const auto cs = Charset::digits();
  const auto a = gen_rec_dataset(cs, 50, {3, 5}, 7, 0.0);
  const auto b = gen_rec_dataset(cs, 50, {3, 5}, 7, 0.0);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].image == b[i].image);
    CHECK(a[i].label.size() >= 3);
    CHECK(a[i].label.size() <= 5);
    CHECK(cs.decode(a[i].label) == a[i].text);
    CHECK(cs.encode(a[i].text) == a[i].label);
    CHECK(a[i].image.height == 16);
    CHECK(a[i].image.width == 64);
    CHECK(a[i].image.channels == 1);
  }
  const auto noisy = gen_rec_dataset(cs, 5, {3, 5}, 7, 0.1);
  const auto noisy2 = gen_rec_dataset(cs, 5, {3, 5}, 7, 0.1);
  CHECK(noisy[0].image == noisy2[0].image);
  CHECK(gen_rec_dataset(cs, 5, {3, 5}, 8, 0.0)[0].image != a[0].image);
  CHECK_THROWS_AS(gen_rec_dataset(Charset{}, 5, {1, 2}, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_rec_dataset(cs, 0, {1, 2}, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_rec_dataset(cs, 1, {1, 40}, 0, 0.0), std::invalid_argument);
}

TEST_CASE("recognition class histogram is close to uniform") {
  const auto cs = Charset::digits();
  const auto data = gen_rec_dataset(cs, 2000, {3, 5}, 3, 0.0);
  std::map<int, double> counts;
  double total = 0;
  for (const auto& s : data) {
    for (int c : s.label.symbols) {
      counts[c] += 1;
      total += 1;
    }
  }
  REQUIRE(counts.size() == 10);
  const double expected = total / 10;
  double chi2 = 0;
  for (const auto& [c, n] : counts) {
    CHECK(std::abs(n - expected) <= 0.2 * expected);
    chi2 += (n - expected) * (n - expected) / expected;
  }
  // 9 degrees of freedom; 27.9 is the 0.001 upper quantile.
  CHECK(chi2 < 27.9);
}

TEST_CASE("geometry helpers") {
  const auto r = rectangle(1, 2, 5, 4);
  CHECK(polygon_area(r) == 8.0);
  CHECK(polygon_perimeter(r) == 12.0);
  CHECK(bounding_box(r) == Box{1, 2, 5, 4});
  CHECK(is_simple(r));
  CHECK_FALSE(is_simple(Polygon{{0, 0}, {2, 2}, {2, 0}, {0, 2}}));
  CHECK_FALSE(boxes_intersect(Box{0, 0, 1, 1}, Box{1, 0, 2, 1}));
  CHECK(boxes_intersect(Box{0, 0, 1.5, 1}, Box{1, 0, 2, 1}));
  // IoU of two 2x2 squares offset by one: 2 / 6.
  CHECK(box_iou(Box{0, 0, 2, 2}, Box{1, 0, 3, 2}) == doctest::Approx(1.0 / 3));
  CHECK(point_in_polygon(r, {2, 3}));
  CHECK_FALSE(point_in_polygon(r, {0, 3}));
  CHECK(distance_to_boundary(r, {3, 3}) == doctest::Approx(1.0));
  CHECK(convex_polygons_overlap(r, rectangle(4, 3, 6, 6)));
  CHECK_FALSE(convex_polygons_overlap(r, rectangle(5, 2, 6, 4)));
  const auto turned = rotate(r, {3, 3}, 90);
  CHECK(polygon_area(turned) == doctest::Approx(8.0));
  CHECK(bounding_box(turned).width() == doctest::Approx(2.0));
  CHECK(translate(r, 1, 1)[0] == Point{2, 3});
}

TEST_CASE("db targets: empty and degenerate") {
  DbTargetStats stats;
  const auto none = make_db_targets({}, 8, 8, &stats);
  for (auto* m : {&none.prob_gt, &none.thresh_gt, &none.thresh_mask}) {
    for (float v : m->data()) CHECK(v == 0.0f);
  }
  make_db_targets({rectangle(2, 2, 2, 6)}, 8, 8, &stats);
  CHECK(stats.degenerate == 1);
}

TEST_CASE("db targets: shrink is strict and text sits inside the band") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coord(0, 28);
  for (int n = 0; n < 100; ++n) {
    const int x0 = coord(rng), y0 = coord(rng);
    const int x1 = std::min(32, x0 + 4 + int(rng() % 12)), y1 = std::min(32, y0 + 4 + int(rng() % 12));
    const auto rect = rectangle(x0, y0, x1, y1);
    const auto t = make_db_targets({rect}, 32, 32);
    const double dist = shrink_distance(rect);
    double prob_area = 0;
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const std::size_t i = std::size_t(y) * 32 + std::size_t(x);
        const double p = t.prob_gt.data()[i], m = t.thresh_mask.data()[i];
        prob_area += p;
        if (p == 1.0) {
          CHECK(m == 0.0);
          // Independent containment: the pixel center is at least D inside.
          const double cx = x + 0.5, cy = y + 0.5;
          CHECK(std::min({cx - x0, x1 - cx, cy - y0, y1 - cy}) >= dist - 1e-12);
        }
        if (m == 1.0) CHECK(t.thresh_gt.data()[i] > 0.0f);
        if (m == 0.0) CHECK(t.thresh_gt.data()[i] == 0.0f);
      }
    }
    CHECK(prob_area < polygon_area(rect));
  }
  // Rectangle 10x4: A = 40, L = 28, D = 40 * 0.84 / 28 = 1.2.
  CHECK(shrink_distance(rectangle(0, 0, 10, 4)) == doctest::Approx(1.2));
}

TEST_CASE("db targets are permutation-invariant in polygon order") {
  const std::vector<Polygon> polys{rectangle(1, 1, 9, 6), rectangle(12, 3, 20, 10), rectangle(3, 14, 15, 20)};
  const auto a = make_db_targets(polys, 24, 24);
  const auto b = make_db_targets({polys[2], polys[0], polys[1]}, 24, 24);
  CHECK(same(a.prob_gt, b.prob_gt));
  CHECK(same(a.thresh_gt, b.thresh_gt));
  CHECK(same(a.thresh_mask, b.thresh_mask));
}

TEST_CASE("detection generator contract") {
  const auto empty = gen_det_dataset(3, {0, 0}, 5);
  for (const auto& s : empty) {
    CHECK(s.instances.empty());
    for (auto p : s.image.pixels) CHECK(p == s.image.pixels[0]);  // flat background, no ink
    for (float v : s.targets.prob_gt.data()) CHECK(v == 0.0f);
  }
  const auto a = gen_det_dataset(40, {1, 3}, 9);
  const auto b = gen_det_dataset(40, {1, 3}, 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].image == b[i].image);
    REQUIRE(a[i].instances.size() == b[i].instances.size());
    CHECK(a[i].instances.size() <= 3);
    CHECK_FALSE(has_overlapping_instances(a[i]));
    for (std::size_t k = 0; k < a[i].instances.size(); ++k) {
      const auto& inst = a[i].instances[k];
      CHECK(inst.polygon == b[i].instances[k].polygon);
      CHECK(inst.transcription == b[i].instances[k].transcription);
      CHECK(is_simple(inst.polygon));
      CHECK(inst.polygon.size() >= 4);
      const Box bb = bounding_box(inst.polygon);
      CHECK(bb.x0 >= 0);
      CHECK(bb.y0 >= 0);
      CHECK(bb.x1 <= 32);
      CHECK(bb.y1 <= 32);
      CHECK(inst.patch.width == int(std::ceil(bb.x1) - std::floor(bb.x0)));
      CHECK(inst.patch.height == int(std::ceil(bb.y1) - std::floor(bb.y0)));
    }
    // Targets are a pure function of the instances.
    DetSample again = a[i];
    refresh_targets(again);
    CHECK(same(again.targets.prob_gt, a[i].targets.prob_gt));
    CHECK(same(again.targets.thresh_gt, a[i].targets.thresh_gt));
  }
  CHECK_THROWS_AS(gen_det_dataset(0, {1, 2}, 0), std::invalid_argument);
}

TEST_CASE("copy-paste: empty donor list is the identity") {
  const auto base = gen_det_dataset(1, {1, 2}, 4)[0];
  std::mt19937_64 rng(1);
  CopyPasteStats stats;
  const auto out = copy_paste(base, {}, rng, {}, &stats);
  CHECK(out.image == base.image);
  CHECK(out.instances.size() == base.instances.size());
  CHECK(same(out.targets.prob_gt, base.targets.prob_gt));
  CHECK(stats.offered == 0);
}

TEST_CASE("copy-paste: one donor on a blank base only touches its polygon") {
  Image source(32, 32, 1, 0);
  draw_text(source, 2, 2, "42", 230);
  const auto donor = solid_instance(source, rectangle(1, 1, 14, 10), "42");
  for (double rotation : {0.0, 10.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Image gray(32, 32, 1, 17);
      DetSample base;
      base.image = gray;
      refresh_targets(base);
      std::mt19937_64 rng(seed);
      CopyPasteStats stats;
      const auto out = copy_paste(base, {donor}, rng, {20, rotation}, &stats);
      REQUIRE(out.instances.size() == 1);
      CHECK(stats.accepted == 1);
      const auto& poly = out.instances[0].polygon;
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
          if (!point_in_polygon(poly, {x + 0.5, y + 0.5})) CHECK(out.image.at(y, x) == 17);
        }
      }
      if (rotation == 0.0) CHECK(polygon_area(poly) == doctest::Approx(polygon_area(donor.polygon)));
    }
  }
}

TEST_CASE("copy-paste: a fully covered base rejects every donor") {
  DetSample base;
  base.image = Image(32, 32, 1, 0);
  base.instances.push_back(solid_instance(base.image, rectangle(0, 0, 32, 32), "0"));
  refresh_targets(base);
  Image source(32, 32, 1, 0);
  const auto donor = solid_instance(source, rectangle(0, 0, 6, 8), "1");
  std::mt19937_64 rng(2);
  CopyPasteStats stats;
  const auto out = copy_paste(base, {donor, donor}, rng, {}, &stats);
  CHECK(out.instances.size() == 1);
  CHECK(stats.skipped == 2);
  CHECK(stats.accepted == 0);
  CHECK(out.image == base.image);
}

TEST_CASE("copy-paste never overlaps and keeps the counts") {
  const auto data = gen_det_dataset(60, {0, 3}, 21);
  const auto pool = harvest_instances(data);
  REQUIRE_FALSE(pool.empty());
  std::mt19937_64 rng(22);
  CopyPasteStats total;
  for (int n = 0; n < 500; ++n) {
    const auto& base = data[std::size_t(n) % data.size()];
    const auto donors = sample_donors(pool, 3, rng);
    CopyPasteStats stats;
    const auto out = copy_paste(base, donors, rng, {}, &stats);
    CHECK_FALSE(has_overlapping_instances(out));
    for (std::size_t i = 0; i < out.instances.size(); ++i) {
      for (std::size_t j = i + 1; j < out.instances.size(); ++j) {
        CHECK_FALSE(boxes_intersect(bounding_box(out.instances[i].polygon),
                                    bounding_box(out.instances[j].polygon)));
      }
    }
    CHECK(out.instances.size() == base.instances.size() + stats.accepted);
    CHECK(stats.accepted + stats.skipped == stats.offered);
    CHECK(stats.offered == 3);
    total += stats;
  }
  CHECK(total.accepted > 0);
}

TEST_CASE("annotation records round-trip") {
  AnnotationRecord rec{"images/000001.pgm", std::string("123"), {}};
  CHECK(parse_record(serialize_record(rec), 1) == rec);
  AnnotationRecord det{"images/x.pgm", std::nullopt, {{rectangle(1, 2.5, 3, 4), "7A"}}};
  CHECK(parse_record(serialize_record(det), 1) == det);
  try {
    parse_record("{\"image\": 3}", 17);
    FAIL("expected a parse error");
  } catch (const DatasetError& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_record("not json", 2), DatasetError);
}

TEST_CASE("datasets round-trip through disk") {
  TempDir dir("datakit_io");
  const auto cs = Charset::from_spec("0-9A-C");
  const auto rec = gen_rec_dataset(cs, 12, {1, 4}, 5, 0.05);
  write_rec_dataset(dir.path / "rec", rec, cs);
  Charset loaded_cs;
  const auto rec2 = read_rec_dataset(dir.path / "rec", &loaded_cs);
  CHECK(loaded_cs == cs);
  REQUIRE(rec2.size() == rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec2[i].image == rec[i].image);
    CHECK(rec2[i].label == rec[i].label);
    CHECK(rec2[i].text == rec[i].text);
  }
  CHECK(dataset_kind(dir.path / "rec") == DatasetKind::rec);

  const auto det = gen_det_dataset(6, {1, 3}, 6);
  write_det_dataset(dir.path / "det", det);
  const auto det2 = read_det_dataset(dir.path / "det");
  CHECK(dataset_kind(dir.path / "det") == DatasetKind::det);
  REQUIRE(det2.size() == det.size());
  for (std::size_t i = 0; i < det.size(); ++i) {
    CHECK(det2[i].image == det[i].image);
    REQUIRE(det2[i].instances.size() == det[i].instances.size());
    for (std::size_t k = 0; k < det[i].instances.size(); ++k) {
      CHECK(det2[i].instances[k].polygon == det[i].instances[k].polygon);
      CHECK(det2[i].instances[k].patch == det[i].instances[k].patch);
    }
    CHECK(same(det2[i].targets.prob_gt, det[i].targets.prob_gt));
  }
  CHECK_THROWS_AS(read_rec_dataset(dir.path / "det"), DatasetError);
  CHECK_THROWS_AS(read_det_dataset(dir.path / "rec"), DatasetError);
  CHECK_THROWS_AS(read_det_dataset(dir.path / "missing"), DatasetError);
}

TEST_CASE("pnm round trip and charset file") {
  TempDir dir("datakit_pnm");
  Image rgb(3, 4, 3, 0);
  for (std::size_t i = 0; i < rgb.pixels.size(); ++i) rgb.pixels[i] = std::uint8_t(i * 7);
  write_pnm(rgb, dir.path / "a.ppm");
  CHECK(read_pnm(dir.path / "a.ppm") == rgb);
  {
    std::ofstream bad(dir.path / "b.pgm", std::ios::binary);
    bad << "P5\n4 4\n255\nxy";
  }
  CHECK_THROWS(read_pnm(dir.path / "b.pgm"));
  const auto cs = Charset::from_spec("A-E");
  write_charset(dir.path / "charset.txt", cs);
  CHECK(read_charset(dir.path / "charset.txt") == cs);
  const auto t = images_to_tensor<float>({&rgb});
  CHECK(t.shape() == Shape{1, 3, 3, 4});
  CHECK(t.data()[1] == doctest::Approx(rgb.pixels[3] / 255.0));
}
