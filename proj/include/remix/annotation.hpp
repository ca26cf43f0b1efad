#pragma once

#include <vector>

namespace remix {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Freehand strokes over a reference screenshot, in normalized [0,1]^2
/// image coordinates.
struct Annotation {
  std::vector<std::vector<Point>> strokes;

  /// Tight bound of all stroke points.
  BoundingBox bbox() const;

  /// Throws INVALID_ANNOTATION unless there is at least one point and every
  /// coordinate lies in [0,1].
  void validate() const;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

}  // namespace remix
