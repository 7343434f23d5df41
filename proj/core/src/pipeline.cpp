#include "lanewatch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lanewatch/error.hpp"
#include "lanewatch/netpbm.hpp"

namespace lanewatch::pipeline {
namespace {

std::string fixed2(double v) {
  return io::format_avg_lateral(v, io::CsvNumberMode::kFixed);
}

void draw_point(Raster& img, double x, double y, int radius,
                std::uint8_t value) {
  const long cx = std::lround(x);
  const long cy = std::lround(y);
  for (long dy = -radius; dy <= radius; ++dy) {
    for (long dx = -radius; dx <= radius; ++dx) {
      const long px = cx + dx;
      const long py = cy + dy;
      if (px < 0 || py < 0 || px >= static_cast<long>(img.width()) ||
          py >= static_cast<long>(img.height())) {
        continue;
      }
      img.at(static_cast<std::size_t>(px), static_cast<std::size_t>(py)) =
          value;
    }
  }
}

void draw_curve(Raster& img, const lane::LanePolynomial& p,
                std::uint8_t value) {
  const double first = std::max(0.0, std::ceil(p.y_min));
  const double last =
      std::min(static_cast<double>(img.height() - 1), std::floor(p.y_max));
  for (double y = first; y <= last; y += 1.0) {
    draw_point(img, p.at(y), y, 1, value);
  }
}

void draw_box(Raster& img, const BBox& b, std::uint8_t value) {
  for (double x = b.x; x <= b.x + b.w; x += 1.0) {
    draw_point(img, x, b.y, 0, value);
    draw_point(img, x, b.y + b.h, 0, value);
  }
  for (double y = b.y; y <= b.y + b.h; y += 1.0) {
    draw_point(img, b.x, y, 0, value);
    draw_point(img, b.x + b.w, y, 0, value);
  }
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  imaging::validate(cfg.imaging);
  lane::validate(cfg.lane);
  tracking::validate(cfg.tracking);
  behavior::validate(cfg.behavior);
  if (cfg.frame_width < 1 || cfg.frame_height < 1) {
    throw Error(ErrorKind::kInvalidConfig, "cli",
                "frame size must be at least 1x1");
  }
}

std::string RunSummary::to_string() const {
  std::ostringstream out;
  out << "processed " << frames << " frames";
  if (skipped_frames > 0) out << " (" << skipped_frames << " skipped)";
  out << ", created " << tracks_created << " tracks"
      << ", alarms fired: distracted=" << distracted_fired
      << " impaired=" << impaired_fired
      << " (alarm rows: distracted=" << distracted_rows
      << " impaired=" << impaired_rows << ")";
  return out.str();
}

Pipeline::Pipeline(PipelineConfig cfg)
    : cfg_(std::move(cfg)),
      tracker_(cfg_.tracking, cfg_.behavior),
      smoother_(cfg_.lane.smoothing_alpha, cfg_.lane.max_carry) {
  validate(cfg_);
}

FrameResult Pipeline::process(FrameIndex frame,
                              std::span<const tracking::Detection> detections,
                              const std::optional<lane::LaneModel>& lane) {
  return evaluate(frame, detections, lane);
}

FrameResult Pipeline::process_raster(
    FrameIndex frame, std::span<const tracking::Detection> detections,
    const Raster* raster) {
  std::optional<lane::LaneModel> estimate;
  if (raster != nullptr) {
    cfg_.frame_width = static_cast<int>(raster->width());
    cfg_.frame_height = static_cast<int>(raster->height());
    const Raster edges = imaging::edge_map(*raster, cfg_.imaging);
    estimate = lane::estimate_lane(edges, cfg_.imaging.roi, cfg_.lane, frame);
  }
  const auto smoothed = smoother_.update(estimate, frame);
  return evaluate(frame, detections, smoothed);
}

FrameResult Pipeline::evaluate(FrameIndex frame,
                               std::span<const tracking::Detection> detections,
                               const std::optional<lane::LaneModel>& lane) {
  if (last_frame_ && frame <= *last_frame_) {
    throw Error(ErrorKind::kInvalidInput, "cli",
                "frame " + std::to_string(frame) +
                    " processed out of order after " +
                    std::to_string(*last_frame_));
  }
  last_frame_ = frame;

  std::vector<tracking::Detection> clamped(detections.begin(),
                                           detections.end());
  for (auto& d : clamped) {
    tracking::validate(d);
    d.bbox = tracking::clamp_to_frame(d.bbox, cfg_.frame_width,
                                      cfg_.frame_height);
  }
  const auto observed = tracker_.step(frame, clamped);

  FrameResult result;
  result.annotation.frame = frame;
  if (lane) {
    result.annotation.lane =
        io::LaneOverlay{lane->left, lane->right, lane->center};
  }

  for (TrackId id : observed) {
    auto& track = tracker_.track(id);
    const auto& last = track.centroid_history.back();
    const Point2 centroid{last.cx, last.cy};

    std::optional<lane::OffCenter> off;
    if (lane) {
      off = lane::off_center_distance(*lane, centroid, cfg_.lane.offcenter_mode);
    }
    const auto metrics = behavior::evaluate_frame(
        track.behavior, track.centroid_history,
        off ? std::optional<double>(std::abs(off->distance)) : std::nullopt,
        frame, cfg_.behavior);

    io::BehaviorRecord rec;
    rec.frame = frame;
    rec.object_id = id;
    rec.class_label = track.class_label;
    rec.cx = std::lround(centroid.x);
    rec.cy = std::lround(centroid.y);
    rec.avg_lateral = std::abs(metrics.mean);
    if (off) rec.off_center = std::lround(std::abs(off->distance));
    rec.direction = metrics.direction;
    rec.sign_change = metrics.sign_changes;
    rec.alarms = metrics.alarms.to_string();

    auto& history = lateral_history_[id];
    history.push_back(rec.avg_lateral);
    while (history.size() > cfg_.annotation_history) history.pop_front();

    io::AnnotatedObject obj;
    obj.id = id;
    obj.class_label = track.class_label;
    obj.bbox = track.last_bbox;
    obj.centroid = centroid;
    if (off) obj.closest_center_point = off->closest;
    obj.severity = metrics.severity;
    obj.labels = {
        track.class_label,
        "Avg Lateral: " + fixed2(rec.avg_lateral) + " px",
        "Off-Center: " +
            (rec.off_center ? std::to_string(*rec.off_center) + " px"
                            : std::string("n/a")),
        "Direction: " + std::string(behavior::to_string(rec.direction)),
    };
    obj.lateral_history.assign(history.begin(), history.end());
    obj.alarms = rec.alarms;

    auto& prev = previous_alarms_[id];
    if (metrics.alarms.distracted) {
      ++summary_.distracted_rows;
      if (!prev.distracted) ++summary_.distracted_fired;
    }
    if (metrics.alarms.impaired) {
      ++summary_.impaired_rows;
      if (!prev.impaired) ++summary_.impaired_fired;
    }
    prev = metrics.alarms;

    result.records.push_back(std::move(rec));
    result.annotation.objects.push_back(std::move(obj));
  }

  ++summary_.frames;
  summary_.tracks_created = tracker_.tracks_created();
  return result;
}

RunSummary run(const RunOptions& options, std::vector<std::string>* warnings) {
  const bool frames_mode = !options.frames_dir.empty();
  if (!frames_mode &&
      (options.detections.empty() || options.lane_truth.empty())) {
    throw Error(ErrorKind::kInvalidConfig, "cli",
                "detections mode needs both --detections and --lane-truth "
                "(or use --frames-dir)");
  }
  if (options.csv.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "cli", "an output --csv is required");
  }
  validate(options.pipeline);

  Pipeline pipeline(options.pipeline);
  std::optional<io::DetectionLogReader> reader;
  if (!options.detections.empty()) {
    reader.emplace(options.detections, options.lenient);
  }
  std::optional<io::LaneTruth> truth;
  if (!frames_mode) {
    truth = io::LaneTruth::load(options.lane_truth,
                                options.pipeline.frame_height,
                                options.pipeline.lane.max_carry);
  }
  std::vector<netpbm::FrameFile> frame_files;
  if (frames_mode) frame_files = netpbm::list_frames(options.frames_dir);
  if (!options.overlay_dir.empty()) {
    std::filesystem::create_directories(options.overlay_dir);
  }

  io::CsvWriter csv(options.csv, options.csv_mode);
  std::optional<io::AnnotationWriter> annotations;
  if (!options.annotations.empty()) annotations.emplace(options.annotations);

  auto pending = reader ? reader->next_frame() : std::nullopt;
  std::size_t next_file = 0;
  std::size_t skipped = 0;
  const std::vector<tracking::Detection> no_detections;

  while (true) {
    const bool have_file = next_file < frame_files.size();
    const bool have_dets = pending.has_value();
    if (!have_file && !have_dets) break;

    FrameIndex frame = 0;
    if (have_file && have_dets) {
      frame = std::min(frame_files[next_file].frame, pending->front().frame);
    } else {
      frame = have_file ? frame_files[next_file].frame : pending->front().frame;
    }
    std::vector<tracking::Detection> dets;
    if (have_dets && pending->front().frame == frame) {
      dets = std::move(*pending);
      pending = reader->next_frame();
    }
    std::optional<Raster> image;
    try {
      if (have_file && frame_files[next_file].frame == frame) {
        image = netpbm::read(frame_files[next_file].path);
        ++next_file;
      }
      FrameResult result;
      if (frames_mode) {
        result = pipeline.process_raster(frame, dets,
                                         image ? &*image : nullptr);
      } else {
        result = pipeline.process(frame, dets, truth->model_for(frame));
      }
      for (const auto& rec : result.records) csv.write(rec);
      if (annotations) annotations->write(result.annotation);
      if (!options.overlay_dir.empty()) {
        const auto overlay = render_overlay(
            result.annotation,
            image ? image->width()
                  : static_cast<std::size_t>(options.pipeline.frame_width),
            image ? image->height()
                  : static_cast<std::size_t>(options.pipeline.frame_height),
            image ? &*image : nullptr);
        netpbm::write(overlay, options.overlay_dir /
                                   netpbm::frame_filename(frame, 1));
      }
    } catch (const Error& e) {
      if (!options.lenient || e.kind() == ErrorKind::kIo) throw;
      ++skipped;
      if (warnings) {
        warnings->push_back("frame " + std::to_string(frame) +
                            " skipped: " + e.what());
      }
    }
  }
  csv.close();
  if (annotations) annotations->close();
  if (reader && warnings) {
    for (const auto& w : reader->warnings()) warnings->push_back(w);
  }

  RunSummary summary = pipeline.summary();
  summary.skipped_frames = skipped;
  return summary;
}

Raster render_overlay(const io::AnnotationRecord& record, std::size_t width,
                      std::size_t height, const Raster* background) {
  Raster img(width, height, 1, 0);
  if (background != nullptr && background->width() == width &&
      background->height() == height) {
    img = background->channels() == 3 ? imaging::to_grayscale(*background)
                                      : *background;
  }
  if (record.lane) {
    draw_curve(img, record.lane->left, 96);
    draw_curve(img, record.lane->right, 160);
    draw_curve(img, record.lane->center, 255);
  }
  for (const auto& obj : record.objects) {
    // Box intensity encodes severity: blue < yellow < red.
    const std::uint8_t box_value =
        obj.severity == behavior::Severity::kAlert     ? 255
        : obj.severity == behavior::Severity::kCaution ? 192
                                                       : 128;
    draw_box(img, obj.bbox, box_value);
    draw_point(img, obj.centroid.x, obj.centroid.y, 3, 255);
    if (obj.closest_center_point) {
      draw_point(img, obj.closest_center_point->x,
                 obj.closest_center_point->y, 2, 200);
    }
  }
  return img;
}

}  // namespace lanewatch::pipeline
