#include "lanewatch/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanewatch/error.hpp"

namespace lanewatch {
namespace {

void check_shape(std::size_t width, std::size_t height, int channels) {
  if (width == 0 || height == 0) {
    throw Error(ErrorKind::kInvalidInput, "imaging",
                "raster dimensions must be at least 1x1");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::kInvalidInput, "imaging",
                "raster must have 1 or 3 channels, got " +
                    std::to_string(channels));
  }
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1,
                        const Point2& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

}  // namespace

Raster::Raster(std::size_t width, std::size_t height, int channels,
               std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(width * height * static_cast<std::size_t>(channels), fill);
}

Raster::Raster(std::size_t width, std::size_t height, int channels,
               std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != width * height * static_cast<std::size_t>(channels)) {
    throw Error(ErrorKind::kInvalidInput, "imaging",
                "raster data length " + std::to_string(data_.size()) +
                    " does not match " + std::to_string(width) + "x" +
                    std::to_string(height) + "x" + std::to_string(channels));
  }
}

RoiPolygon::RoiPolygon(std::vector<Point2> vertices)
    : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) {
    throw Error(ErrorKind::kInvalidConfig, "imaging",
                "ROI polygon needs at least 3 vertices");
  }
  for (const auto& v : vertices_) {
    if (!(v.x >= 0.0 && v.x <= 1.0 && v.y >= 0.0 && v.y <= 1.0)) {
      throw Error(ErrorKind::kInvalidConfig, "imaging",
                  "ROI vertices must lie in normalized [0,1] coordinates");
    }
  }
  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % n];
    twice_area += a.x * b.y - b.x * a.y;
  }
  if (std::abs(twice_area) < 1e-12) {
    throw Error(ErrorKind::kInvalidConfig, "imaging",
                "ROI polygon is degenerate (zero area)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(vertices_[i], vertices_[(i + 1) % n],
                             vertices_[j], vertices_[(j + 1) % n])) {
        throw Error(ErrorKind::kInvalidConfig, "imaging",
                    "ROI polygon is self-intersecting");
      }
    }
  }
}

RoiPolygon RoiPolygon::default_trapezoid() {
  return RoiPolygon({{0.0, 1.0}, {0.275, 0.6}, {0.725, 0.6}, {1.0, 1.0}});
}

RoiPolygon RoiPolygon::full_frame() {
  return RoiPolygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

std::vector<std::uint8_t> RoiPolygon::mask(std::size_t width,
                                           std::size_t height) const {
  std::vector<std::uint8_t> out(width * height, 0);
  const auto w = static_cast<double>(width);
  const auto h = static_cast<double>(height);
  std::vector<Point2> scaled;
  scaled.reserve(vertices_.size());
  for (const auto& v : vertices_) scaled.push_back({v.x * w, v.y * h});

  std::vector<double> crossings;
  const std::size_t n = scaled.size();
  for (std::size_t row = 0; row < height; ++row) {
    const double yc = static_cast<double>(row) + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = scaled[i];
      const auto& b = scaled[(i + 1) % n];
      if ((a.y > yc) != (b.y > yc)) {
        crossings.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    if (crossings.empty()) continue;
    std::sort(crossings.begin(), crossings.end());
    // A pixel center is inside when an odd number of crossings lie to its
    // right.
    std::size_t right = 0;  // first crossing with x > xc
    for (std::size_t col = 0; col < width; ++col) {
      const double xc = static_cast<double>(col) + 0.5;
      while (right < crossings.size() && crossings[right] <= xc) ++right;
      if ((crossings.size() - right) % 2 == 1) out[row * width + col] = 1;
    }
  }
  return out;
}

}  // namespace lanewatch
