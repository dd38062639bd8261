#include "ppocr/datakit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ppocr {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool segments_cross(Point a, Point b, Point c, Point d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Projection interval of `poly` on axis (ax, ay).
std::pair<double, double> project(const Polygon& poly, double ax, double ay) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : poly) {
    const double v = p.x * ax + p.y * ay;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

bool separated_by_edges_of(const Polygon& a, const Polygon& b) {
  constexpr double kEps = 1e-9;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point p = a[i], q = a[(i + 1) % a.size()];
    const double ax = -(q.y - p.y), ay = q.x - p.x;
    const double norm = std::hypot(ax, ay);
    if (norm == 0) continue;
    const auto [alo, ahi] = project(a, ax / norm, ay / norm);
    const auto [blo, bhi] = project(b, ax / norm, ay / norm);
    if (ahi <= blo + kEps || bhi <= alo + kEps) return true;
  }
  return false;
}

}  // namespace

Polygon rectangle(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

double signed_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return s / 2.0;
}

double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

double polygon_perimeter(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    s += std::hypot(b.x - a.x, b.y - a.y);
  }
  return s;
}

Box bounding_box(const Polygon& poly) {
  if (poly.empty()) return {};
  Box box{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
  for (const auto& p : poly) {
    box.x0 = std::min(box.x0, p.x);
    box.y0 = std::min(box.y0, p.y);
    box.x1 = std::max(box.x1, p.x);
    box.y1 = std::max(box.y1, p.y);
  }
  return box;
}

bool boxes_intersect(const Box& a, const Box& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

double box_iou(const Box& a, const Box& b) {
  const Box inter{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                  std::min(a.y1, b.y1)};
  const double i = inter.area();
  const double u = a.area() + b.area() - i;
  return u > 0 ? i / u : 0.0;
}

bool point_in_polygon(const Polygon& poly, Point p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

double distance_to_boundary(const Polygon& poly, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

bool convex_polygons_overlap(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return false;
  return !separated_by_edges_of(a, b) && !separated_by_edges_of(b, a);
}

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

Polygon rotate(const Polygon& poly, Point center, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  Polygon out;
  out.reserve(poly.size());
  for (const auto& p : poly) {
    const double dx = p.x - center.x, dy = p.y - center.y;
    out.push_back({center.x + c * dx - s * dy, center.y + s * dx + c * dy});
  }
  return out;
}

Polygon translate(const Polygon& poly, double dx, double dy) {
  Polygon out = poly;
  for (auto& p : out) {
    p.x += dx;
    p.y += dy;
  }
  return out;
}

}  // namespace ppocr
