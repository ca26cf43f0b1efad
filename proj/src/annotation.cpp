#include "remix/annotation.hpp"

#include <algorithm>
#include <string>

#include "remix/error.hpp"

namespace remix {

BoundingBox Annotation::bbox() const {
  validate();
  BoundingBox box{1.0, 1.0, 0.0, 0.0};
  for (const auto& stroke : strokes) {
    for (const auto& p : stroke) {
      box.x_min = std::min(box.x_min, p.x);
      box.y_min = std::min(box.y_min, p.y);
      box.x_max = std::max(box.x_max, p.x);
      box.y_max = std::max(box.y_max, p.y);
    }
  }
  return box;
}

void Annotation::validate() const {
  bool any = false;
  for (const auto& stroke : strokes) {
    for (const auto& p : stroke) {
      any = true;
      if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
        throw Error(ErrorCode::InvalidAnnotation, "annotation point (" + std::to_string(p.x) + ", " +
                                                      std::to_string(p.y) + ") lies outside [0,1]^2");
      }
    }
  }
  if (!any) throw Error(ErrorCode::InvalidAnnotation, "annotation has no points");
}

}  // namespace remix
