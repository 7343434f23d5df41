#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanewatch/lane.hpp"
#include "lanewatch/raster.hpp"
#include "lanewatch/tracking.hpp"

namespace lanewatch::scenario {

enum class ScenarioKind { kNominal, kDistracted, kImpaired };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_kind(std::string_view s);

// Defaults follow a 1440p / 30 FPS dashcam with the target vehicle centered in
// a straight lane.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kNominal;
  int frames = 400;
  double fps = 30.0;
  int width = 2560;
  int height = 1440;
  double lane_center_x = 1280.0;
  double lane_width = 700.0;
  double amplitude = 0.0;  // px
  int period = 120;        // frames
  std::uint64_t seed = 0;
  double noise_px = 0.0;   // sigma of Gaussian jitter on cx
  double vehicle_width = 160.0;
  double vehicle_height = 120.0;
  double vehicle_cy_frac = 0.8;  // centroid row as a fraction of height
  int line_width = 1;            // raster mode lane stroke, px
  std::string class_label = "car";
};

void validate(const ScenarioSpec& spec);

struct ScenarioData {
  std::vector<tracking::Detection> detections;
  lane::LanePolynomial left;
  lane::LanePolynomial right;
};

// Noise-free lateral trajectory for the scenario kind.
//   nominal:    lane center
//   distracted: cycle of 2*period frames: ramp out to +amplitude over
//               period/2, hold period/2, ramp back over period/2, hold
//               period/2 at center; slope 2*amplitude/period
//   impaired:   center + amplitude * sin(2*pi*frame/period)
double nominal_cx(const ScenarioSpec& spec, FrameIndex frame);

ScenarioData gen_nominal(const ScenarioSpec& spec);
ScenarioData gen_distracted(const ScenarioSpec& spec);
ScenarioData gen_impaired(const ScenarioSpec& spec);
ScenarioData generate(const ScenarioSpec& spec);

// Black frame with the two lane boundaries drawn in white. The camera is
// static, so every frame of a scenario renders identically.
Raster render_frame(const ScenarioSpec& spec, FrameIndex frame);

}  // namespace lanewatch::scenario
