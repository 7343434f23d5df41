#include "lanewatch/behavior.hpp"

#include <algorithm>
#include <cmath>

#include "lanewatch/error.hpp"

namespace lanewatch::behavior {

void validate(const BehaviorConfig& cfg) {
  const auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::kInvalidConfig, "behavior", msg);
  };
  if (cfg.lateral_window < 1) fail("lateral_window must be >= 1");
  if (cfg.oscillation_window < 1) fail("oscillation_window must be >= 1");
  if (!(cfg.lateral_threshold > 0.0)) fail("lateral_threshold must be > 0");
  if (!(cfg.offcenter_threshold > 0.0)) fail("offcenter_threshold must be > 0");
  if (cfg.sign_change_limit < 1) fail("sign_change_limit must be >= 1");
  if (!(cfg.direction_deadband > 0.0)) fail("direction_deadband must be > 0");
  if (cfg.persistence < 1) fail("persistence must be >= 1");
  if (cfg.direction_hold < 1) fail("direction_hold must be >= 1");
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kLeft:
      return "Left";
    case Direction::kRight:
      return "Right";
    case Direction::kSteady:
      return "Steady";
  }
  return "Steady";
}

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "Left") return Direction::kLeft;
  if (s == "Right") return Direction::kRight;
  if (s == "Steady") return Direction::kSteady;
  return std::nullopt;
}

std::string AlarmSet::to_string() const {
  std::string out;
  if (distracted) out += kDistractedAlarm;
  if (impaired) {
    if (!out.empty()) out += "; ";
    out += kImpairedAlarm;
  }
  return out;
}

std::string_view color_name(Severity s) {
  switch (s) {
    case Severity::kNormal:
      return "blue";
    case Severity::kCaution:
      return "yellow";
    case Severity::kAlert:
      return "red";
  }
  return "blue";
}

std::optional<Severity> parse_color(std::string_view s) {
  if (s == "blue") return Severity::kNormal;
  if (s == "yellow") return Severity::kCaution;
  if (s == "red") return Severity::kAlert;
  return std::nullopt;
}

std::vector<double> lateral_deltas(std::span<const CentroidSample> history) {
  std::vector<double> out;
  if (history.size() < 2) return out;
  out.reserve(history.size() - 1);
  for (std::size_t i = 0; i + 1 < history.size(); ++i) {
    out.push_back(history[i + 1].cx - history[i].cx);
  }
  return out;
}

double windowed_lateral_mean(std::span<const double> deltas,
                             std::size_t window) {
  const std::size_t n = std::min(window, deltas.size());
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = deltas.size() - n; i < deltas.size(); ++i) {
    sum += deltas[i];
  }
  return sum / static_cast<double>(n);
}

Direction classify_direction(double mean, double deadband) {
  if (std::abs(mean) <= deadband) return Direction::kSteady;
  return mean > deadband ? Direction::kRight : Direction::kLeft;
}

std::size_t register_sign_change(OscillationState& state, Direction direction,
                                  FrameIndex frame, std::size_t window) {
  if (state.last_frame && frame <= *state.last_frame) {
    throw Error(ErrorKind::kInvalidInput, "behavior",
                "sign-change frame " + std::to_string(frame) +
                    " does not advance past " +
                    std::to_string(*state.last_frame));
  }
  state.last_frame = frame;
  state.current_direction = direction;

  if (direction != Direction::kSteady) {
    const Polarity p = direction == Direction::kLeft ? Polarity::kLeft
                                                     : Polarity::kRight;
    if (state.last_polarity == Polarity::kNone) {
      state.last_polarity = p;
    } else if (state.last_polarity != p) {
      state.sign_change_events.push_back(frame);
      state.last_polarity = p;
    }
  }

  const FrameIndex horizon = frame - static_cast<FrameIndex>(window);
  const auto& ev = state.sign_change_events;
  // Events are sorted, so the in-window ones form a suffix.
  const auto first = std::upper_bound(ev.begin(), ev.end(), horizon);
  return static_cast<std::size_t>(ev.end() - first);
}

bool distracted_condition(double mean, double offcenter_magnitude,
                          const BehaviorConfig& cfg) {
  return std::abs(mean) > cfg.lateral_threshold &&
         offcenter_magnitude > cfg.offcenter_threshold;
}

AlarmSet evaluate_alarms(double mean, double offcenter_magnitude,
                         std::size_t count_in_window,
                         std::size_t consecutive_distracted_frames,
                         const BehaviorConfig& cfg) {
  AlarmSet out;
  out.distracted =
      distracted_condition(mean, offcenter_magnitude, cfg) &&
      consecutive_distracted_frames >=
          static_cast<std::size_t>(cfg.persistence);
  out.impaired =
      count_in_window >= static_cast<std::size_t>(cfg.sign_change_limit);
  return out;
}

Severity severity_state(std::size_t count_in_window) {
  if (count_in_window >= 3) return Severity::kAlert;
  if (count_in_window == 2) return Severity::kCaution;
  return Severity::kNormal;
}

Direction DirectionDebouncer::update(Direction raw) {
  if (raw == Direction::kSteady) {
    run_direction_ = Direction::kSteady;
    run_length_ = 0;
    return Direction::kSteady;
  }
  if (raw == run_direction_) {
    ++run_length_;
  } else {
    run_direction_ = raw;
    run_length_ = 1;
  }
  return run_length_ >= hold_ ? raw : Direction::kSteady;
}

TrackState make_track_state(const BehaviorConfig& cfg) {
  TrackState state;
  state.debouncer = DirectionDebouncer(cfg.direction_hold);
  return state;
}

FrameMetrics evaluate_frame(TrackState& state,
                            std::span<const CentroidSample> history,
                            std::optional<double> offcenter_magnitude,
                            FrameIndex frame, const BehaviorConfig& cfg) {
  const auto window = static_cast<std::size_t>(cfg.lateral_window);
  // Only the last window+1 samples contribute to the mean.
  const std::size_t keep = std::min(history.size(), window + 1);
  const auto deltas = lateral_deltas(history.last(keep));

  FrameMetrics m;
  m.mean = windowed_lateral_mean(deltas, window);
  // Direction is only classified once a full window of motion is available.
  m.direction = deltas.size() >= window
                    ? classify_direction(m.mean, cfg.direction_deadband)
                    : Direction::kSteady;
  const Direction confirmed = state.debouncer.update(m.direction);
  m.sign_changes = register_sign_change(
      state.oscillation, confirmed, frame,
      static_cast<std::size_t>(cfg.oscillation_window));
  m.severity = severity_state(m.sign_changes);

  if (!offcenter_magnitude) {
    state.consecutive_distracted = 0;
    return m;
  }
  if (distracted_condition(m.mean, *offcenter_magnitude, cfg)) {
    ++state.consecutive_distracted;
  } else {
    state.consecutive_distracted = 0;
  }
  m.alarms = evaluate_alarms(m.mean, *offcenter_magnitude, m.sign_changes,
                             state.consecutive_distracted, cfg);
  if (cfg.impaired_latch) {
    state.impaired_latched = state.impaired_latched || m.alarms.impaired;
    m.alarms.impaired = state.impaired_latched;
  }
  return m;
}

}  // namespace lanewatch::behavior
