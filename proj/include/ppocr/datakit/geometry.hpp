#ifndef PPOCR_DATAKIT_GEOMETRY_HPP_
#define PPOCR_DATAKIT_GEOMETRY_HPP_

#include <vector>

namespace ppocr {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Vertices in order; coordinates are pixel-edge positions, so the pixel
// (x, y) has its center at (x + 0.5, y + 0.5).
using Polygon = std::vector<Point>;

struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() > 0 && height() > 0 ? width() * height() : 0.0; }
  friend bool operator==(const Box&, const Box&) = default;
};

Polygon rectangle(double x0, double y0, double x1, double y1);
double signed_area(const Polygon& poly);
double polygon_area(const Polygon& poly);
double polygon_perimeter(const Polygon& poly);
Box bounding_box(const Polygon& poly);

// Boxes sharing only an edge do not intersect.
bool boxes_intersect(const Box& a, const Box& b);
double box_iou(const Box& a, const Box& b);

bool point_in_polygon(const Polygon& poly, Point p);
double distance_to_boundary(const Polygon& poly, Point p);

// Proper (positive-area) intersection of two convex polygons via the
// separating axis test.
bool convex_polygons_overlap(const Polygon& a, const Polygon& b);

// Rejects polygons with fewer than 3 vertices or crossing edges.
bool is_simple(const Polygon& poly);

// Rotates about `center` by `degrees` (counter-clockwise in image axes).
Polygon rotate(const Polygon& poly, Point center, double degrees);
Polygon translate(const Polygon& poly, double dx, double dy);

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_GEOMETRY_HPP_
