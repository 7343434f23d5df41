#pragma once

#include <cstdint>

namespace lanewatch {

using FrameIndex = std::int64_t;
using TrackId = std::int64_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Axis-aligned box in pixels, (x, y) is the top-left corner.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  Point2 center() const { return {x + w / 2.0, y + h / 2.0}; }
  double area() const { return w * h; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct CentroidSample {
  FrameIndex frame = 0;
  double cx = 0.0;
  double cy = 0.0;

  friend bool operator==(const CentroidSample&, const CentroidSample&) = default;
};

}  // namespace lanewatch
