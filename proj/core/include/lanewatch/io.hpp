#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lanewatch/behavior.hpp"
#include "lanewatch/lane.hpp"
#include "lanewatch/tracking.hpp"

namespace lanewatch::io {

// ---------------------------------------------------------------------------
// Detection log: JSON lines {"frame":int,"class":str,"bbox":[x,y,w,h],
// "conf":num}, frames non-decreasing.

tracking::Detection parse_detection_line(std::string_view line,
                                         std::size_t line_number);
std::string format_detection_line(const tracking::Detection& d);

// Streams detections grouped by frame. In lenient mode malformed lines are
// reported to the warning sink and skipped; frame regressions still throw.
class DetectionLogReader {
 public:
  explicit DetectionLogReader(const std::filesystem::path& path,
                              bool lenient = false);

  // Next frame's detections, or nullopt at end of file.
  std::optional<std::vector<tracking::Detection>> next_frame();
  const std::vector<std::string>& warnings() const noexcept {
    return warnings_;
  }

 private:
  std::optional<tracking::Detection> next_detection();

  std::ifstream in_;
  std::filesystem::path path_;
  bool lenient_;
  std::size_t line_number_ = 0;
  std::optional<FrameIndex> last_frame_;
  std::optional<tracking::Detection> pending_;
  std::vector<std::string> warnings_;
};

std::vector<tracking::Detection> read_detection_log(
    const std::filesystem::path& path);
void write_detection_log(std::span<const tracking::Detection> detections,
                         const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Lane truth: {"constant": {"left":[a,b,c], "right":[a,b,c], "domain":[y0,y1]}}
// and/or {"frames": {"<n>": {...}}}. "domain" is optional and defaults to
// every row of the frame.

class LaneTruth {
 public:
  static LaneTruth parse(std::string_view json_text, int frame_height,
                         int max_carry);
  static LaneTruth load(const std::filesystem::path& path, int frame_height,
                        int max_carry);

  // Per-frame entry if present; otherwise the latest earlier entry within
  // max_carry frames; otherwise the constant entry; otherwise nullopt.
  std::optional<lane::LaneModel> model_for(FrameIndex frame) const;

 private:
  std::optional<lane::LaneModel> constant_;
  std::map<FrameIndex, lane::LaneModel> frames_;
  int max_carry_ = 0;
};

void write_lane_truth(const lane::LanePolynomial& left,
                      const lane::LanePolynomial& right,
                      const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Behavior CSV.

inline constexpr std::string_view kCsvHeader =
    "Frame,Object ID,Class,Cx,Cy,Avg. Lateral,Off-Center,Direction,"
    "Sign Change,Alarms";

enum class CsvNumberMode { kFixed, kTrimZeros };

struct BehaviorRecord {
  FrameIndex frame = 0;
  TrackId object_id = 0;
  std::string class_label;
  long cx = 0;
  long cy = 0;
  double avg_lateral = 0.0;       // magnitude of the windowed mean
  std::optional<long> off_center; // empty when no lane reference
  behavior::Direction direction = behavior::Direction::kSteady;
  std::size_t sign_change = 0;
  std::string alarms;

  friend bool operator==(const BehaviorRecord&,
                         const BehaviorRecord&) = default;
};

// Two decimals ("0.20"); trim mode drops trailing zeros ("0.2", "1").
std::string format_avg_lateral(double value, CsvNumberMode mode);
std::string format_csv_row(const BehaviorRecord& r, CsvNumberMode mode);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, CsvNumberMode mode);
  void write(const BehaviorRecord& r);
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  CsvNumberMode mode_;
};

void write_csv(std::span<const BehaviorRecord> records,
               const std::filesystem::path& path, CsvNumberMode mode);

// Reads back a file produced by CsvWriter.
std::vector<BehaviorRecord> read_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Annotations: one JSON object per processed frame.

struct LaneOverlay {
  lane::LanePolynomial left;
  lane::LanePolynomial right;
  lane::LanePolynomial center;

  friend bool operator==(const LaneOverlay&, const LaneOverlay&) = default;
};

struct AnnotatedObject {
  TrackId id = 0;
  std::string class_label;
  BBox bbox;
  Point2 centroid;
  std::optional<Point2> closest_center_point;
  behavior::Severity severity = behavior::Severity::kNormal;
  std::vector<std::string> labels;
  std::vector<double> lateral_history;  // recent Avg. Lateral values
  std::string alarms;

  friend bool operator==(const AnnotatedObject&,
                         const AnnotatedObject&) = default;
};

struct AnnotationRecord {
  FrameIndex frame = 0;
  std::optional<LaneOverlay> lane;
  std::vector<AnnotatedObject> objects;

  friend bool operator==(const AnnotationRecord&,
                         const AnnotationRecord&) = default;
};

std::string serialize_annotation(const AnnotationRecord& record);
AnnotationRecord parse_annotation(std::string_view line);

class AnnotationWriter {
 public:
  explicit AnnotationWriter(const std::filesystem::path& path);
  void write(const AnnotationRecord& record);
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

std::vector<AnnotationRecord> read_annotations(
    const std::filesystem::path& path);

}  // namespace lanewatch::io
