#include "lanewatch/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "lanewatch/error.hpp"

namespace lanewatch::scenario {
namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::kInvalidConfig, "scenario_sim", msg);
}

void require_kind(const ScenarioSpec& spec, ScenarioKind kind) {
  if (spec.kind != kind) {
    config_error("generator for '" + std::string(to_string(kind)) +
                 "' called with kind '" + std::string(to_string(spec.kind)) +
                 "'");
  }
}

lane::LanePolynomial vertical_line(double x, int height) {
  lane::LanePolynomial p;
  p.coeffs = {0.0, 0.0, x};
  p.y_min = 0.0;
  p.y_max = static_cast<double>(height - 1);
  return p;
}

ScenarioData emit(const ScenarioSpec& spec) {
  validate(spec);
  ScenarioData data;
  data.left = vertical_line(spec.lane_center_x - spec.lane_width / 2.0,
                            spec.height);
  data.right = vertical_line(spec.lane_center_x + spec.lane_width / 2.0,
                             spec.height);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const double cy = spec.vehicle_cy_frac * spec.height;
  data.detections.reserve(static_cast<std::size_t>(spec.frames));
  for (FrameIndex f = 0; f < spec.frames; ++f) {
    double cx = nominal_cx(spec, f);
    if (spec.noise_px > 0.0) cx += spec.noise_px * jitter(rng);
    tracking::Detection d;
    d.frame = f;
    d.class_label = spec.class_label;
    d.confidence = 0.9;
    d.bbox = tracking::clamp_to_frame(
        {cx - spec.vehicle_width / 2.0, cy - spec.vehicle_height / 2.0,
         spec.vehicle_width, spec.vehicle_height},
        spec.width, spec.height);
    data.detections.push_back(std::move(d));
  }
  return data;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kNominal:
      return "nominal";
    case ScenarioKind::kDistracted:
      return "distracted";
    case ScenarioKind::kImpaired:
      return "impaired";
  }
  return "nominal";
}

std::optional<ScenarioKind> parse_kind(std::string_view s) {
  if (s == "nominal") return ScenarioKind::kNominal;
  if (s == "distracted") return ScenarioKind::kDistracted;
  if (s == "impaired") return ScenarioKind::kImpaired;
  return std::nullopt;
}

void validate(const ScenarioSpec& spec) {
  if (spec.frames < 1) config_error("frames must be >= 1");
  if (!(spec.fps > 0.0)) config_error("fps must be > 0");
  if (spec.width < 1 || spec.height < 1) config_error("frame size must be >= 1");
  if (!(spec.amplitude >= 0.0)) config_error("amplitude must be >= 0");
  if (!(spec.noise_px >= 0.0)) config_error("noise must be >= 0");
  if (!(spec.lane_width > 0.0)) config_error("lane width must be > 0");
  if (spec.kind != ScenarioKind::kNominal && spec.period < 2) {
    config_error("period must be >= 2");
  }
  if (!(spec.vehicle_width > 0.0) || !(spec.vehicle_height > 0.0)) {
    config_error("vehicle size must be positive");
  }
  if (spec.line_width < 1) config_error("line width must be >= 1");
}

double nominal_cx(const ScenarioSpec& spec, FrameIndex frame) {
  const double c = spec.lane_center_x;
  const double a = spec.amplitude;
  const double period = spec.period;
  switch (spec.kind) {
    case ScenarioKind::kNominal:
      return c;
    case ScenarioKind::kImpaired:
      return c + a * std::sin(2.0 * std::numbers::pi *
                              static_cast<double>(frame) / period);
    case ScenarioKind::kDistracted: {
      const double slope = 2.0 * a / period;
      const double half = period / 2.0;
      const double phase = std::fmod(static_cast<double>(frame), 2.0 * period);
      if (phase < half) return c + slope * phase;
      if (phase < period) return c + a;
      if (phase < period + half) return c + a - slope * (phase - period);
      return c;
    }
  }
  return c;
}

ScenarioData gen_nominal(const ScenarioSpec& spec) {
  require_kind(spec, ScenarioKind::kNominal);
  return emit(spec);
}

ScenarioData gen_distracted(const ScenarioSpec& spec) {
  require_kind(spec, ScenarioKind::kDistracted);
  return emit(spec);
}

ScenarioData gen_impaired(const ScenarioSpec& spec) {
  require_kind(spec, ScenarioKind::kImpaired);
  return emit(spec);
}

ScenarioData generate(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::kNominal:
      return gen_nominal(spec);
    case ScenarioKind::kDistracted:
      return gen_distracted(spec);
    case ScenarioKind::kImpaired:
      return gen_impaired(spec);
  }
  return gen_nominal(spec);
}

Raster render_frame(const ScenarioSpec& spec, FrameIndex /*frame*/) {
  validate(spec);
  const auto width = static_cast<std::size_t>(spec.width);
  const auto height = static_cast<std::size_t>(spec.height);
  Raster img(width, height, 1, 0);
  const int half = (spec.line_width - 1) / 2;
  const double boundaries[] = {spec.lane_center_x - spec.lane_width / 2.0,
                               spec.lane_center_x + spec.lane_width / 2.0};
  for (std::size_t y = 0; y < height; ++y) {
    for (double bx : boundaries) {
      const auto x0 = static_cast<long>(std::lround(bx)) - half;
      for (long x = x0; x < x0 + spec.line_width; ++x) {
        if (x >= 0 && x < spec.width) img.at(static_cast<std::size_t>(x), y) = 255;
      }
    }
  }
  return img;
}

}  // namespace lanewatch::scenario
