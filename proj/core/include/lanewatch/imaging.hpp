#pragma once

#include "lanewatch/raster.hpp"

namespace lanewatch::imaging {

// Maximum L1 Sobel magnitude on 8-bit input: (1+2+1) * 255 per axis.
inline constexpr int kMaxGradient = 255 * 4;

struct ImagingConfig {
  int blur_kernel = 5;
  double blur_sigma = 1.4;
  int threshold_block = 15;
  // Negative offset: a pixel must exceed its neighborhood mean by 15 counts.
  int threshold_c = -15;
  int canny_low = 50;
  int canny_high = 150;
  RoiPolygon roi = RoiPolygon::default_trapezoid();
};

// Throws Error(kInvalidConfig) when a parameter violates a stage precondition.
void validate(const ImagingConfig& cfg);

// ITU-R 601 luma, rounded half up in exact integer arithmetic.
Raster to_grayscale(const Raster& frame);

// Separable normalized Gaussian, edge-replicated borders.
Raster gaussian_blur(const Raster& img, int kernel_size, double sigma);

// 255 where value > (block x block mean - c), else 0. Edge-replicated borders.
Raster adaptive_threshold(const Raster& img, int block, int c);

// Sobel 3x3, L1 magnitude, 4-sector non-maximum suppression and 8-connected
// hysteresis between [low, high].
Raster canny(const Raster& img, int low, int high);

// Zeroes every pixel whose center lies outside the polygon.
Raster apply_roi(const Raster& img, const RoiPolygon& roi);

// gray -> blur -> adaptive threshold -> canny -> ROI.
Raster edge_map(const Raster& frame, const ImagingConfig& cfg);

}  // namespace lanewatch::imaging
