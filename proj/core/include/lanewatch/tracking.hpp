#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lanewatch/behavior.hpp"
#include "lanewatch/types.hpp"

namespace lanewatch::tracking {

struct Detection {
  FrameIndex frame = 0;
  std::string class_label;
  BBox bbox;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Throws Error(kInvalidInput) for non-positive size, confidence outside
// [0, 1], negative frame, or non-finite values.
void validate(const Detection& d);

// Clips the box to [0, width) x [0, height). Throws if nothing remains.
BBox clamp_to_frame(const BBox& box, double width, double height);

struct Track {
  TrackId id = 0;
  std::string class_label;
  BBox last_bbox;
  std::vector<CentroidSample> centroid_history;
  FrameIndex last_seen = 0;
  behavior::TrackState behavior;
};

struct TrackingConfig {
  double iou_min = 0.3;
  int max_age = 15;
};

void validate(const TrackingConfig& cfg);

double iou(const BBox& a, const BBox& b);

struct Association {
  std::vector<std::pair<TrackId, std::size_t>> matches;  // detection indices
  std::vector<std::size_t> new_detections;
  std::vector<TrackId> expired;
};

// Greedy matching on descending IoU between each live track's last box and
// the detections. Tracks unseen for more than max_age frames are reported as
// expired and take no part in matching.
Association associate(std::span<const Detection> detections,
                      std::span<const Track> tracks, double iou_min,
                      int max_age, FrameIndex frame);

// Appends the detection centroid. Throws if frame does not advance.
Track update_track(Track track, const Detection& detection, FrameIndex frame);

// Single-writer track store with run-unique sequential ids.
class Tracker {
 public:
  Tracker(TrackingConfig cfg, behavior::BehaviorConfig behavior_cfg);

  // Returns the ids of tracks observed in this frame, ascending.
  std::vector<TrackId> step(FrameIndex frame,
                            std::span<const Detection> detections);

  const std::vector<Track>& tracks() const noexcept { return tracks_; }
  Track& track(TrackId id);
  std::size_t tracks_created() const noexcept {
    return static_cast<std::size_t>(next_id_);
  }

 private:
  TrackingConfig cfg_;
  behavior::BehaviorConfig behavior_cfg_;
  std::vector<Track> tracks_;
  TrackId next_id_ = 0;
};

}  // namespace lanewatch::tracking
