#pragma once

#include <algorithm>
#include <cmath>

namespace grouptrack {

/// 2D pixel coordinate or displacement.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double chebyshev(Point2 a, Point2 b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

/// Closed axis-aligned box [min, max].
struct BoundingBox {
  Point2 min;
  Point2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  Point2 half_size() const { return {width() / 2.0, height() / 2.0}; }

  bool contains(Point2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }

  BoundingBox expanded(Point2 p) const {
    return {{std::min(min.x, p.x), std::min(min.y, p.y)}, {std::max(max.x, p.x), std::max(max.y, p.y)}};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

}  // namespace grouptrack
