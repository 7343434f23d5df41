#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanewatch/behavior.hpp"
#include "lanewatch/imaging.hpp"
#include "lanewatch/io.hpp"
#include "lanewatch/lane.hpp"
#include "lanewatch/raster.hpp"
#include "lanewatch/tracking.hpp"

namespace lanewatch::pipeline {

struct PipelineConfig {
  imaging::ImagingConfig imaging;
  lane::LaneConfig lane;
  tracking::TrackingConfig tracking;
  behavior::BehaviorConfig behavior;
  int frame_width = 2560;
  int frame_height = 1440;
  std::size_t annotation_history = 10;  // Avg. Lateral values kept per object
};

void validate(const PipelineConfig& cfg);

struct FrameResult {
  std::vector<io::BehaviorRecord> records;  // ascending object id
  io::AnnotationRecord annotation;
};

struct RunSummary {
  std::size_t frames = 0;
  std::size_t skipped_frames = 0;
  std::size_t tracks_created = 0;
  std::size_t distracted_fired = 0;  // per-track alarm onsets
  std::size_t impaired_fired = 0;
  std::size_t distracted_rows = 0;   // rows carrying the alarm
  std::size_t impaired_rows = 0;

  std::string to_string() const;
};

// Single-owner frame driver: tracking, lane reference, behavior metrics and
// alarms. Frames must be fed in increasing order.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  // Lane reference supplied directly (ground truth or nullopt).
  FrameResult process(FrameIndex frame,
                      std::span<const tracking::Detection> detections,
                      const std::optional<lane::LaneModel>& lane);

  // Lane estimated from the frame image; nullptr when no image exists for
  // the frame, in which case the last model is carried forward.
  FrameResult process_raster(FrameIndex frame,
                             std::span<const tracking::Detection> detections,
                             const Raster* raster);

  const RunSummary& summary() const noexcept { return summary_; }
  const tracking::Tracker& tracker() const noexcept { return tracker_; }

 private:
  FrameResult evaluate(FrameIndex frame,
                       std::span<const tracking::Detection> detections,
                       const std::optional<lane::LaneModel>& lane);

  PipelineConfig cfg_;
  tracking::Tracker tracker_;
  lane::LaneSmoother smoother_;
  std::optional<FrameIndex> last_frame_;
  std::map<TrackId, behavior::AlarmSet> previous_alarms_;
  std::map<TrackId, std::deque<double>> lateral_history_;
  RunSummary summary_;
};

struct RunOptions {
  // Detections mode uses detections + lane_truth; frames mode uses
  // frames_dir (+ optional detections).
  std::filesystem::path frames_dir;
  std::filesystem::path detections;
  std::filesystem::path lane_truth;
  std::filesystem::path csv;
  std::filesystem::path annotations;  // optional
  std::filesystem::path overlay_dir;  // optional PGM overlays
  io::CsvNumberMode csv_mode = io::CsvNumberMode::kFixed;
  bool lenient = false;
  PipelineConfig pipeline;
};

// Validates everything up front, then streams all frames. Throws Error on
// the first failure unless lenient, in which case failing frames are skipped
// and reported through `warnings`.
RunSummary run(const RunOptions& options,
               std::vector<std::string>* warnings = nullptr);

// Grayscale overlay: background (or black), lane curves, boxes, centroids and
// closest centerline points.
Raster render_overlay(const io::AnnotationRecord& record, std::size_t width,
                      std::size_t height, const Raster* background);

}  // namespace lanewatch::pipeline
