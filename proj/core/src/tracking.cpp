#include "lanewatch/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "lanewatch/error.hpp"

namespace lanewatch::tracking {
namespace {

[[noreturn]] void input_error(const std::string& msg) {
  throw Error(ErrorKind::kInvalidInput, "tracking", msg);
}

}  // namespace

void validate(const Detection& d) {
  const auto& b = d.bbox;
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
      !std::isfinite(b.h) || !std::isfinite(d.confidence)) {
    input_error("detection has non-finite values");
  }
  if (d.frame < 0) input_error("detection frame must be >= 0");
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    input_error("detection bbox must have positive width and height");
  }
  if (d.confidence < 0.0 || d.confidence > 1.0) {
    input_error("detection confidence must lie in [0, 1]");
  }
}

BBox clamp_to_frame(const BBox& box, double width, double height) {
  const double x0 = std::clamp(box.x, 0.0, width);
  const double y0 = std::clamp(box.y, 0.0, height);
  const double x1 = std::clamp(box.x + box.w, 0.0, width);
  const double y1 = std::clamp(box.y + box.h, 0.0, height);
  if (!(x1 > x0) || !(y1 > y0)) {
    input_error("detection bbox lies entirely outside the frame");
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

void validate(const TrackingConfig& cfg) {
  if (!(cfg.iou_min > 0.0 && cfg.iou_min <= 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "tracking",
                "iou_min must lie in (0, 1]");
  }
  if (cfg.max_age < 0) {
    throw Error(ErrorKind::kInvalidConfig, "tracking", "max_age must be >= 0");
  }
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) -
                                      std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) -
                                      std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  // Areas from the same corner differences so iou(a, a) is exactly 1.
  const double area_a = ((a.x + a.w) - a.x) * ((a.y + a.h) - a.y);
  const double area_b = ((b.x + b.w) - b.x) * ((b.y + b.h) - b.y);
  return std::min(1.0, inter / (area_a + area_b - inter));
}

Association associate(std::span<const Detection> detections,
                      std::span<const Track> tracks, double iou_min,
                      int max_age, FrameIndex frame) {
  for (const auto& d : detections) {
    if (d.frame != frame) {
      input_error("detections from frame " + std::to_string(d.frame) +
                  " mixed into frame " + std::to_string(frame));
    }
  }

  Association out;
  std::vector<std::size_t> live;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    if (frame - tracks[t].last_seen > max_age) {
      out.expired.push_back(tracks[t].id);
    } else {
      live.push_back(t);
    }
  }

  struct Candidate {
    double score;
    std::size_t track;
    std::size_t det;
  };
  std::vector<Candidate> candidates;
  for (auto t : live) {
    for (std::size_t d = 0; d < detections.size(); ++d) {
      const double s = iou(tracks[t].last_bbox, detections[d].bbox);
      if (s >= iou_min) candidates.push_back({s, t, d});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return std::tie(tracks[a.track].id, a.det) <
                     std::tie(tracks[b.track].id, b.det);
            });

  std::vector<bool> track_used(tracks.size(), false);
  std::vector<bool> det_used(detections.size(), false);
  for (const auto& c : candidates) {
    if (track_used[c.track] || det_used[c.det]) continue;
    track_used[c.track] = true;
    det_used[c.det] = true;
    out.matches.emplace_back(tracks[c.track].id, c.det);
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (!det_used[d]) out.new_detections.push_back(d);
  }
  return out;
}

Track update_track(Track track, const Detection& detection, FrameIndex frame) {
  if (!track.centroid_history.empty() &&
      frame <= track.centroid_history.back().frame) {
    input_error("track " + std::to_string(track.id) + " update at frame " +
                std::to_string(frame) + " does not advance past " +
                std::to_string(track.centroid_history.back().frame));
  }
  const Point2 c = detection.bbox.center();
  track.centroid_history.push_back({frame, c.x, c.y});
  track.last_bbox = detection.bbox;
  track.last_seen = frame;
  return track;
}

Tracker::Tracker(TrackingConfig cfg, behavior::BehaviorConfig behavior_cfg)
    : cfg_(cfg), behavior_cfg_(behavior_cfg) {
  validate(cfg_);
}

Track& Tracker::track(TrackId id) {
  const auto it = std::find_if(tracks_.begin(), tracks_.end(),
                               [&](const Track& t) { return t.id == id; });
  if (it == tracks_.end()) {
    input_error("unknown track id " + std::to_string(id));
  }
  return *it;
}

std::vector<TrackId> Tracker::step(FrameIndex frame,
                                   std::span<const Detection> detections) {
  const auto assoc =
      associate(detections, tracks_, cfg_.iou_min, cfg_.max_age, frame);

  std::erase_if(tracks_, [&](const Track& t) {
    return std::find(assoc.expired.begin(), assoc.expired.end(), t.id) !=
           assoc.expired.end();
  });

  std::vector<TrackId> observed;
  for (const auto& [id, d] : assoc.matches) {
    Track& t = track(id);
    t = update_track(std::move(t), detections[d], frame);
    observed.push_back(id);
  }
  for (auto d : assoc.new_detections) {
    Track t;
    t.id = next_id_++;
    t.class_label = detections[d].class_label;
    t.behavior = behavior::make_track_state(behavior_cfg_);
    tracks_.push_back(update_track(std::move(t), detections[d], frame));
    observed.push_back(tracks_.back().id);
  }
  std::sort(observed.begin(), observed.end());
  return observed;
}

}  // namespace lanewatch::tracking
