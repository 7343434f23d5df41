#include "lanewatch/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "lanewatch/error.hpp"

namespace lanewatch::imaging {
namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::kInvalidConfig, "imaging", msg);
}

void require_gray(const Raster& img, const char* stage) {
  if (img.channels() != 1) {
    throw Error(ErrorKind::kInvalidInput, "imaging",
                std::string(stage) + " expects a single-channel raster");
  }
}

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

void check_blur(int kernel_size, double sigma) {
  if (kernel_size < 3 || kernel_size % 2 == 0) {
    config_error("blur kernel_size must be odd and >= 3, got " +
                 std::to_string(kernel_size));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    config_error("blur sigma must be > 0");
  }
}

void check_block(int block) {
  if (block < 3 || block % 2 == 0) {
    config_error("threshold block must be odd and >= 3, got " +
                 std::to_string(block));
  }
}

void check_canny(int low, int high) {
  if (low < 0 || high > kMaxGradient) {
    config_error("canny thresholds must lie in [0, " +
                 std::to_string(kMaxGradient) + "]");
  }
  if (low >= high) {
    config_error("canny low threshold must be below high (" +
                 std::to_string(low) + " >= " + std::to_string(high) + ")");
  }
}

}  // namespace

void validate(const ImagingConfig& cfg) {
  check_blur(cfg.blur_kernel, cfg.blur_sigma);
  check_block(cfg.threshold_block);
  check_canny(cfg.canny_low, cfg.canny_high);
}

Raster to_grayscale(const Raster& frame) {
  if (frame.channels() != 3) {
    throw Error(ErrorKind::kInvalidInput, "imaging",
                "to_grayscale expects a 3-channel raster, got " +
                    std::to_string(frame.channels()));
  }
  Raster out(frame.width(), frame.height(), 1);
  const auto src = frame.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::uint32_t r = src[3 * i];
    const std::uint32_t g = src[3 * i + 1];
    const std::uint32_t b = src[3 * i + 2];
    const std::uint32_t v = (299 * r + 587 * g + 114 * b + 500) / 1000;
    dst[i] = static_cast<std::uint8_t>(std::min<std::uint32_t>(v, 255));
  }
  return out;
}

Raster gaussian_blur(const Raster& img, int kernel_size, double sigma) {
  require_gray(img, "gaussian_blur");
  check_blur(kernel_size, sigma);

  const int radius = kernel_size / 2;
  std::vector<double> weights(static_cast<std::size_t>(kernel_size));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    weights[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (auto& w : weights) w /= sum;

  const std::size_t width = img.width();
  const std::size_t height = img.height();
  const auto src = img.data();

  // Horizontal pass keeps full precision; rounding happens once at the end.
  std::vector<double> tmp(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t* row = src.data() + y * width;
    double* trow = tmp.data() + y * width;
    for (std::size_t x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const auto xi =
            clamp_index(static_cast<std::ptrdiff_t>(x) + k, width);
        acc += weights[static_cast<std::size_t>(k + radius)] * row[xi];
      }
      trow[x] = acc;
    }
  }

  Raster out(width, height, 1);
  auto dst = out.data();
  std::vector<double> acc(width);
  for (std::size_t y = 0; y < height; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = -radius; k <= radius; ++k) {
      const auto yi = clamp_index(static_cast<std::ptrdiff_t>(y) + k, height);
      const double w = weights[static_cast<std::size_t>(k + radius)];
      const double* trow = tmp.data() + yi * width;
      for (std::size_t x = 0; x < width; ++x) acc[x] += w * trow[x];
    }
    for (std::size_t x = 0; x < width; ++x) {
      const double v = std::clamp(std::round(acc[x]), 0.0, 255.0);
      dst[y * width + x] = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

Raster adaptive_threshold(const Raster& img, int block, int c) {
  require_gray(img, "adaptive_threshold");
  check_block(block);

  const std::size_t width = img.width();
  const std::size_t height = img.height();
  const auto r = static_cast<std::ptrdiff_t>(block / 2);
  const auto src = img.data();

  // Integral image over the edge-replicated padded raster.
  const std::size_t pw = width + 2 * static_cast<std::size_t>(r);
  const std::size_t ph = height + 2 * static_cast<std::size_t>(r);
  std::vector<std::int64_t> integral((pw + 1) * (ph + 1), 0);
  for (std::size_t py = 0; py < ph; ++py) {
    const auto sy = clamp_index(static_cast<std::ptrdiff_t>(py) - r, height);
    std::int64_t row_sum = 0;
    for (std::size_t px = 0; px < pw; ++px) {
      const auto sx = clamp_index(static_cast<std::ptrdiff_t>(px) - r, width);
      row_sum += src[sy * width + sx];
      integral[(py + 1) * (pw + 1) + px + 1] =
          integral[py * (pw + 1) + px + 1] + row_sum;
    }
  }

  const std::int64_t area = static_cast<std::int64_t>(block) * block;
  const auto b = static_cast<std::size_t>(block);
  Raster out(width, height, 1);
  auto dst = out.data();
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      // Window in padded coordinates is [x, x+block) x [y, y+block).
      const std::int64_t sum = integral[(y + b) * (pw + 1) + x + b] -
                               integral[y * (pw + 1) + x + b] -
                               integral[(y + b) * (pw + 1) + x] +
                               integral[y * (pw + 1) + x];
      // value > sum/area - c, compared exactly in integers.
      const std::int64_t v = src[y * width + x];
      dst[y * width + x] = (v * area > sum - c * area) ? 255 : 0;
    }
  }
  return out;
}

Raster canny(const Raster& img, int low, int high) {
  require_gray(img, "canny");
  check_canny(low, high);

  const std::size_t width = img.width();
  const std::size_t height = img.height();
  const auto src = img.data();
  const auto px = [&](std::ptrdiff_t x, std::ptrdiff_t y) -> int {
    return src[clamp_index(y, height) * width + clamp_index(x, width)];
  };

  std::vector<int> gx(width * height);
  std::vector<int> gy(width * height);
  std::vector<int> mag(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    const auto sy = static_cast<std::ptrdiff_t>(y);
    for (std::size_t x = 0; x < width; ++x) {
      const auto sx = static_cast<std::ptrdiff_t>(x);
      const int tl = px(sx - 1, sy - 1), tc = px(sx, sy - 1),
                tr = px(sx + 1, sy - 1);
      const int ml = px(sx - 1, sy), mr = px(sx + 1, sy);
      const int bl = px(sx - 1, sy + 1), bc = px(sx, sy + 1),
                br = px(sx + 1, sy + 1);
      const int dx = (tr + 2 * mr + br) - (tl + 2 * ml + bl);
      const int dy = (bl + 2 * bc + br) - (tl + 2 * tc + tr);
      const std::size_t i = y * width + x;
      gx[i] = dx;
      gy[i] = dy;
      mag[i] = std::abs(dx) + std::abs(dy);
    }
  }

  // Magnitude outside the frame counts as zero for suppression.
  const auto mag_at = [&](std::ptrdiff_t x, std::ptrdiff_t y) -> int {
    if (x < 0 || y < 0 || x >= static_cast<std::ptrdiff_t>(width) ||
        y >= static_cast<std::ptrdiff_t>(height)) {
      return 0;
    }
    return mag[static_cast<std::size_t>(y) * width +
               static_cast<std::size_t>(x)];
  };

  // tan(22.5 deg) and tan(67.5 deg) in 15-bit fixed point.
  constexpr std::int64_t kTan22 = 13573;
  constexpr std::int64_t kTan67 = 79109;
  constexpr int kShift = 15;

  enum : std::uint8_t { kNone = 0, kWeak = 1, kStrong = 2 };
  std::vector<std::uint8_t> state(width * height, kNone);
  std::vector<std::size_t> stack;
  for (std::size_t y = 0; y < height; ++y) {
    const auto sy = static_cast<std::ptrdiff_t>(y);
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      const int m = mag[i];
      if (m < low || m == 0) continue;
      const auto sx = static_cast<std::ptrdiff_t>(x);
      const std::int64_t ax = std::abs(gx[i]);
      const std::int64_t ay = static_cast<std::int64_t>(std::abs(gy[i]))
                              << kShift;
      bool keep = false;
      if (ay < ax * kTan22) {
        keep = m > mag_at(sx - 1, sy) && m >= mag_at(sx + 1, sy);
      } else if (ay > ax * kTan67) {
        keep = m > mag_at(sx, sy - 1) && m >= mag_at(sx, sy + 1);
      } else {
        const int s = ((gx[i] < 0) != (gy[i] < 0)) ? -1 : 1;
        keep = m > mag_at(sx - s, sy - 1) && m > mag_at(sx + s, sy + 1);
      }
      if (!keep) continue;
      if (m >= high) {
        state[i] = kStrong;
        stack.push_back(i);
      } else {
        state[i] = kWeak;
      }
    }
  }

  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const auto x = static_cast<std::ptrdiff_t>(i % width);
    const auto y = static_cast<std::ptrdiff_t>(i / width);
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const auto nx = x + dx;
        const auto ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(width) ||
            ny >= static_cast<std::ptrdiff_t>(height)) {
          continue;
        }
        const std::size_t j = static_cast<std::size_t>(ny) * width +
                              static_cast<std::size_t>(nx);
        if (state[j] == kWeak) {
          state[j] = kStrong;
          stack.push_back(j);
        }
      }
    }
  }

  Raster out(width, height, 1);
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = state[i] == kStrong ? 255 : 0;
  }
  return out;
}

Raster apply_roi(const Raster& img, const RoiPolygon& roi) {
  require_gray(img, "apply_roi");
  const auto inside = roi.mask(img.width(), img.height());
  Raster out = img;
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (!inside[i]) dst[i] = 0;
  }
  return out;
}

Raster edge_map(const Raster& frame, const ImagingConfig& cfg) {
  const Raster gray = frame.channels() == 3 ? to_grayscale(frame) : frame;
  const Raster blurred = gaussian_blur(gray, cfg.blur_kernel, cfg.blur_sigma);
  const Raster binary =
      adaptive_threshold(blurred, cfg.threshold_block, cfg.threshold_c);
  const Raster edges = canny(binary, cfg.canny_low, cfg.canny_high);
  return apply_roi(edges, cfg.roi);
}

}  // namespace lanewatch::imaging
