#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lanewatch/types.hpp"

namespace lanewatch::behavior {

inline constexpr std::string_view kDistractedAlarm = "DISTRACTED DRIVER AHEAD";
inline constexpr std::string_view kImpairedAlarm = "IMPAIRED DRIVER AHEAD";

struct BehaviorConfig {
  int lateral_window = 30;           // frames averaged for "Avg. Lateral"
  double lateral_threshold = 0.3;    // px/frame
  double offcenter_threshold = 40.0; // px
  int sign_change_limit = 3;
  double direction_deadband = 0.25;  // px/frame
  int persistence = 5;               // frames the distracted condition must hold
  int oscillation_window = 300;      // frames
  // Frames a Left/Right classification must persist before it can flip the
  // tracked polarity. 1 reproduces raw per-frame flipping.
  int direction_hold = 5;
  // Once fired, keep the impaired alarm on for the rest of the track.
  bool impaired_latch = false;
};

void validate(const BehaviorConfig& cfg);

enum class Direction { kLeft, kRight, kSteady };
enum class Polarity { kNone, kLeft, kRight };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

struct OscillationState {
  Polarity last_polarity = Polarity::kNone;
  std::vector<FrameIndex> sign_change_events;
  Direction current_direction = Direction::kSteady;
  std::optional<FrameIndex> last_frame;
};

struct AlarmSet {
  bool distracted = false;
  bool impaired = false;

  bool any() const { return distracted || impaired; }
  // "", one alarm string, or both joined by "; ".
  std::string to_string() const;

  friend bool operator==(const AlarmSet&, const AlarmSet&) = default;
};

enum class Severity { kNormal, kCaution, kAlert };

std::string_view color_name(Severity s);  // blue / yellow / red
std::optional<Severity> parse_color(std::string_view s);

// cx[i+1] - cx[i] over consecutive history entries.
std::vector<double> lateral_deltas(std::span<const CentroidSample> history);

// Mean of the last min(window, size) deltas; 0 when empty.
double windowed_lateral_mean(std::span<const double> deltas,
                             std::size_t window);

Direction classify_direction(double mean, double deadband);

// Appends an event when a Left/Right direction opposes the current polarity.
// Returns the number of events with frame > frame - window. Throws
// Error(kInvalidInput) if frame does not advance.
std::size_t register_sign_change(OscillationState& state, Direction direction,
                                 FrameIndex frame, std::size_t window);

bool distracted_condition(double mean, double offcenter_magnitude,
                          const BehaviorConfig& cfg);

// consecutive_distracted_frames counts the current frame.
AlarmSet evaluate_alarms(double mean, double offcenter_magnitude,
                         std::size_t count_in_window,
                         std::size_t consecutive_distracted_frames,
                         const BehaviorConfig& cfg);

Severity severity_state(std::size_t count_in_window);

// Suppresses Left/Right classifications until they have held for `hold`
// consecutive frames.
class DirectionDebouncer {
 public:
  explicit DirectionDebouncer(int hold = 1) : hold_(hold) {}
  Direction update(Direction raw);

 private:
  int hold_;
  Direction run_direction_ = Direction::kSteady;
  int run_length_ = 0;
};

// Mutable per-track evaluation state, owned by the track.
struct TrackState {
  OscillationState oscillation;
  DirectionDebouncer debouncer;
  std::size_t consecutive_distracted = 0;
  bool impaired_latched = false;
};

TrackState make_track_state(const BehaviorConfig& cfg);

struct FrameMetrics {
  double mean = 0.0;  // signed windowed mean, px/frame
  Direction direction = Direction::kSteady;
  std::size_t sign_changes = 0;
  AlarmSet alarms;
  Severity severity = Severity::kNormal;
};

// One evaluation step for a track whose history already contains `frame`.
// `offcenter_magnitude` is nullopt when no lane reference exists; alarms are
// suspended for that frame.
FrameMetrics evaluate_frame(TrackState& state,
                            std::span<const CentroidSample> history,
                            std::optional<double> offcenter_magnitude,
                            FrameIndex frame, const BehaviorConfig& cfg);

}  // namespace lanewatch::behavior
