#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lanewatch/types.hpp"

namespace lanewatch {

// Row-major 8-bit image with 1 (gray) or 3 (RGB, interleaved) channels.
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t width, std::size_t height, int channels,
         std::uint8_t fill = 0);
  Raster(std::size_t width, std::size_t height, int channels,
         std::vector<std::uint8_t> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t at(std::size_t x, std::size_t y, int c = 0) const {
    return data_[(y * width_ + x) * static_cast<std::size_t>(channels_) +
                 static_cast<std::size_t>(c)];
  }
  std::uint8_t& at(std::size_t x, std::size_t y, int c = 0) {
    return data_[(y * width_ + x) * static_cast<std::size_t>(channels_) +
                 static_cast<std::size_t>(c)];
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }
  std::span<const std::uint8_t> row(std::size_t y) const noexcept {
    return std::span<const std::uint8_t>(data_).subspan(
        y * width_ * static_cast<std::size_t>(channels_),
        width_ * static_cast<std::size_t>(channels_));
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

// Simple polygon in normalized frame coordinates (x, y in [0, 1]).
// Construction rejects fewer than 3 vertices, out-of-range coordinates,
// self-intersections and zero area.
class RoiPolygon {
 public:
  explicit RoiPolygon(std::vector<Point2> vertices);

  // Forward-road trapezoid: full width at the bottom row, 45% width centered
  // at 60% of the frame height.
  static RoiPolygon default_trapezoid();
  static RoiPolygon full_frame();

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }

  // Per-pixel inside test (even-odd rule on pixel centers) for a raster of the
  // given size. Returns a width*height mask of 0/1.
  std::vector<std::uint8_t> mask(std::size_t width, std::size_t height) const;

  friend bool operator==(const RoiPolygon&, const RoiPolygon&) = default;

 private:
  std::vector<Point2> vertices_;
};

}  // namespace lanewatch
