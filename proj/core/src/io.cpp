#include "lanewatch/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lanewatch/error.hpp"

namespace lanewatch::io {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kModule = "io_pipeline";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

std::string line_prefix(const std::filesystem::path& path, std::size_t line) {
  return path.string() + " line " + std::to_string(line) + ": ";
}

// -- JSON helpers -----------------------------------------------------------

std::array<double, 3> read_coeffs(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    fail(ErrorKind::kSchema,
         std::string(what) + " must be an array of 3 numbers");
  }
  std::array<double, 3> c{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      fail(ErrorKind::kSchema, std::string(what) + " must contain numbers");
    }
    c[i] = j[i].get<double>();
  }
  return c;
}

lane::LaneModel read_lane_entry(const json& j, int frame_height,
                                FrameIndex frame) {
  if (!j.is_object()) fail(ErrorKind::kSchema, "lane entry must be an object");
  if (!j.contains("left") || !j.contains("right")) {
    fail(ErrorKind::kSchema, "lane entry needs 'left' and 'right'");
  }
  lane::LanePolynomial left;
  lane::LanePolynomial right;
  left.coeffs = read_coeffs(j["left"], "left");
  right.coeffs = read_coeffs(j["right"], "right");
  double y0 = 0.0;
  double y1 = static_cast<double>(frame_height - 1);
  if (j.contains("domain")) {
    const auto& d = j["domain"];
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() ||
        !d[1].is_number()) {
      fail(ErrorKind::kSchema, "domain must be [y_min, y_max]");
    }
    y0 = d[0].get<double>();
    y1 = d[1].get<double>();
  }
  if (!(y0 < y1)) fail(ErrorKind::kSchema, "lane domain must satisfy y_min < y_max");
  left.y_min = right.y_min = y0;
  left.y_max = right.y_max = y1;
  return lane::build_lane_model(left, right, frame);
}

ordered_json poly_to_json(const lane::LanePolynomial& p) {
  ordered_json j;
  j["coeffs"] = {p.coeffs[0], p.coeffs[1], p.coeffs[2]};
  j["domain"] = {p.y_min, p.y_max};
  j["inliers"] = p.inlier_count;
  return j;
}

lane::LanePolynomial poly_from_json(const json& j) {
  lane::LanePolynomial p;
  p.coeffs = read_coeffs(j.at("coeffs"), "coeffs");
  p.y_min = j.at("domain").at(0).get<double>();
  p.y_max = j.at("domain").at(1).get<double>();
  p.inlier_count = j.at("inliers").get<std::size_t>();
  return p;
}

ordered_json point_to_json(const Point2& p) { return {p.x, p.y}; }

Point2 point_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

// -- CSV helpers ------------------------------------------------------------

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    fail(ErrorKind::kParse, "bad " + what + " value '" + s + "'");
  }
  return value;
}

}  // namespace

// -- Detection log ----------------------------------------------------------

tracking::Detection parse_detection_line(std::string_view line,
                                         std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) fail(ErrorKind::kSchema, where + "expected an object");
  for (const char* field : {"frame", "class", "bbox", "conf"}) {
    if (!j.contains(field)) {
      fail(ErrorKind::kSchema,
           where + "missing field '" + std::string(field) + "'");
    }
  }
  if (!j["frame"].is_number_integer()) {
    fail(ErrorKind::kSchema, where + "'frame' must be an integer");
  }
  if (!j["class"].is_string()) {
    fail(ErrorKind::kSchema, where + "'class' must be a string");
  }
  const auto& bbox = j["bbox"];
  if (!bbox.is_array() || bbox.size() != 4) {
    fail(ErrorKind::kSchema, where + "'bbox' must be [x, y, w, h]");
  }
  for (const auto& v : bbox) {
    if (!v.is_number()) {
      fail(ErrorKind::kSchema, where + "'bbox' entries must be numbers");
    }
  }
  if (!j["conf"].is_number()) {
    fail(ErrorKind::kSchema, where + "'conf' must be a number");
  }

  tracking::Detection d;
  d.frame = j["frame"].get<FrameIndex>();
  d.class_label = j["class"].get<std::string>();
  d.bbox = {bbox[0].get<double>(), bbox[1].get<double>(),
            bbox[2].get<double>(), bbox[3].get<double>()};
  d.confidence = j["conf"].get<double>();
  try {
    tracking::validate(d);
  } catch (const Error& e) {
    fail(ErrorKind::kSchema, where + e.detail());
  }
  return d;
}

std::string format_detection_line(const tracking::Detection& d) {
  ordered_json j;
  j["frame"] = d.frame;
  j["class"] = d.class_label;
  j["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
  j["conf"] = d.confidence;
  return j.dump();
}

DetectionLogReader::DetectionLogReader(const std::filesystem::path& path,
                                       bool lenient)
    : in_(path), path_(path), lenient_(lenient) {
  if (!in_) {
    fail(ErrorKind::kIo, "cannot open detection log " + path.string());
  }
}

std::optional<tracking::Detection> DetectionLogReader::next_detection() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    tracking::Detection d;
    try {
      d = parse_detection_line(line, line_number_);
    } catch (const Error& e) {
      if (!lenient_) {
        throw Error(e.kind(), kModule, path_.string() + " " + e.detail());
      }
      warnings_.push_back(path_.string() + " " + e.detail());
      continue;
    }
    if (last_frame_ && d.frame < *last_frame_) {
      fail(ErrorKind::kFormat,
           line_prefix(path_, line_number_) + "frame " +
               std::to_string(d.frame) + " goes back from frame " +
               std::to_string(*last_frame_));
    }
    last_frame_ = d.frame;
    return d;
  }
  return std::nullopt;
}

std::optional<std::vector<tracking::Detection>>
DetectionLogReader::next_frame() {
  if (!pending_) pending_ = next_detection();
  if (!pending_) return std::nullopt;
  std::vector<tracking::Detection> group;
  group.push_back(std::move(*pending_));
  pending_.reset();
  while (auto d = next_detection()) {
    if (d->frame != group.front().frame) {
      pending_ = std::move(d);
      break;
    }
    group.push_back(std::move(*d));
  }
  return group;
}

std::vector<tracking::Detection> read_detection_log(
    const std::filesystem::path& path) {
  DetectionLogReader reader(path);
  std::vector<tracking::Detection> out;
  while (auto frame = reader.next_frame()) {
    for (auto& d : *frame) out.push_back(std::move(d));
  }
  return out;
}

void write_detection_log(std::span<const tracking::Detection> detections,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& d : detections) out << format_detection_line(d) << '\n';
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

// -- Lane truth -------------------------------------------------------------

LaneTruth LaneTruth::parse(std::string_view json_text, int frame_height,
                           int max_carry) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kSchema, std::string("malformed lane truth JSON (") +
                                 e.what() + ")");
  }
  if (!j.is_object() || (!j.contains("constant") && !j.contains("frames"))) {
    fail(ErrorKind::kSchema,
         "lane truth needs a 'constant' entry or a 'frames' map");
  }
  LaneTruth truth;
  truth.max_carry_ = max_carry;
  if (j.contains("constant")) {
    truth.constant_ = read_lane_entry(j["constant"], frame_height, 0);
  }
  if (j.contains("frames")) {
    const auto& frames = j["frames"];
    if (!frames.is_object()) {
      fail(ErrorKind::kSchema, "'frames' must map frame numbers to entries");
    }
    for (const auto& [key, entry] : frames.items()) {
      FrameIndex idx = 0;
      const auto [ptr, ec] =
          std::from_chars(key.data(), key.data() + key.size(), idx);
      if (key.empty() || ec != std::errc() || ptr != key.data() + key.size() ||
          idx < 0) {
        fail(ErrorKind::kSchema, "bad frame key '" + key + "'");
      }
      truth.frames_[idx] = read_lane_entry(entry, frame_height, idx);
    }
  }
  return truth;
}

LaneTruth LaneTruth::load(const std::filesystem::path& path, int frame_height,
                          int max_carry) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open lane truth " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str(), frame_height, max_carry);
  } catch (const Error& e) {
    throw Error(e.kind(), kModule, path.string() + ": " + e.detail());
  }
}

std::optional<lane::LaneModel> LaneTruth::model_for(FrameIndex frame) const {
  if (!frames_.empty()) {
    auto it = frames_.upper_bound(frame);
    if (it != frames_.begin()) {
      --it;
      if (frame - it->first <= max_carry_) {
        auto model = it->second;
        model.frame = frame;
        return model;
      }
    }
  }
  if (constant_) {
    auto model = *constant_;
    model.frame = frame;
    return model;
  }
  return std::nullopt;
}

void write_lane_truth(const lane::LanePolynomial& left,
                      const lane::LanePolynomial& right,
                      const std::filesystem::path& path) {
  ordered_json entry;
  entry["left"] = {left.coeffs[0], left.coeffs[1], left.coeffs[2]};
  entry["right"] = {right.coeffs[0], right.coeffs[1], right.coeffs[2]};
  entry["domain"] = {std::max(left.y_min, right.y_min),
                     std::min(left.y_max, right.y_max)};
  ordered_json doc;
  doc["constant"] = entry;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

// -- CSV --------------------------------------------------------------------

std::string format_avg_lateral(double value, CsvNumberMode mode) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::fixed, 2);
  std::string s(buf, res.ptr);
  if (mode == CsvNumberMode::kTrimZeros && s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::string format_csv_row(const BehaviorRecord& r, CsvNumberMode mode) {
  std::string row;
  row += std::to_string(r.frame);
  row += ',';
  row += std::to_string(r.object_id);
  row += ',';
  row += csv_escape(r.class_label);
  row += ',';
  row += std::to_string(r.cx);
  row += ',';
  row += std::to_string(r.cy);
  row += ',';
  row += format_avg_lateral(r.avg_lateral, mode);
  row += ',';
  if (r.off_center) row += std::to_string(*r.off_center);
  row += ',';
  row += behavior::to_string(r.direction);
  row += ',';
  row += std::to_string(r.sign_change);
  row += ',';
  row += csv_escape(r.alarms);
  return row;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, CsvNumberMode mode)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), mode_(mode) {
  if (!out_) fail(ErrorKind::kIo, "cannot write CSV " + path.string());
  out_ << kCsvHeader << '\n';
}

void CsvWriter::write(const BehaviorRecord& r) {
  out_ << format_csv_row(r, mode_) << '\n';
  if (!out_) fail(ErrorKind::kIo, "failed writing CSV " + path_.string());
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) fail(ErrorKind::kIo, "failed closing " + path_.string());
}

void write_csv(std::span<const BehaviorRecord> records,
               const std::filesystem::path& path, CsvNumberMode mode) {
  CsvWriter writer(path, mode);
  for (const auto& r : records) writer.write(r);
  writer.close();
}

std::vector<BehaviorRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open CSV " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    fail(ErrorKind::kFormat, path.string() + ": missing or wrong CSV header");
  }
  std::vector<BehaviorRecord> out;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 10) {
      fail(ErrorKind::kFormat, line_prefix(path, line_number) +
                                   "expected 10 fields, got " +
                                   std::to_string(f.size()));
    }
    BehaviorRecord r;
    r.frame = parse_number<FrameIndex>(f[0], "Frame");
    r.object_id = parse_number<TrackId>(f[1], "Object ID");
    r.class_label = f[2];
    r.cx = parse_number<long>(f[3], "Cx");
    r.cy = parse_number<long>(f[4], "Cy");
    r.avg_lateral = parse_number<double>(f[5], "Avg. Lateral");
    if (!f[6].empty()) r.off_center = parse_number<long>(f[6], "Off-Center");
    const auto dir = behavior::parse_direction(f[7]);
    if (!dir) fail(ErrorKind::kParse, "bad Direction '" + f[7] + "'");
    r.direction = *dir;
    r.sign_change = parse_number<std::size_t>(f[8], "Sign Change");
    r.alarms = f[9];
    out.push_back(std::move(r));
  }
  return out;
}

// -- Annotations ------------------------------------------------------------

std::string serialize_annotation(const AnnotationRecord& record) {
  ordered_json j;
  j["frame"] = record.frame;
  if (record.lane) {
    ordered_json lane;
    lane["left"] = poly_to_json(record.lane->left);
    lane["right"] = poly_to_json(record.lane->right);
    lane["center"] = poly_to_json(record.lane->center);
    j["lane"] = lane;
  } else {
    j["lane"] = nullptr;
  }
  j["objects"] = ordered_json::array();
  for (const auto& o : record.objects) {
    ordered_json obj;
    obj["id"] = o.id;
    obj["class"] = o.class_label;
    obj["bbox"] = {o.bbox.x, o.bbox.y, o.bbox.w, o.bbox.h};
    obj["centroid"] = point_to_json(o.centroid);
    obj["closest_center_point"] = o.closest_center_point
                                      ? point_to_json(*o.closest_center_point)
                                      : ordered_json(nullptr);
    obj["severity"] = std::string(behavior::color_name(o.severity));
    obj["labels"] = o.labels;
    obj["lateral_history"] = o.lateral_history;
    obj["alarms"] = o.alarms;
    j["objects"].push_back(std::move(obj));
  }
  return j.dump();
}

AnnotationRecord parse_annotation(std::string_view line) {
  try {
    const json j = json::parse(line);
    AnnotationRecord r;
    r.frame = j.at("frame").get<FrameIndex>();
    if (!j.at("lane").is_null()) {
      const auto& l = j["lane"];
      r.lane = LaneOverlay{poly_from_json(l.at("left")),
                           poly_from_json(l.at("right")),
                           poly_from_json(l.at("center"))};
    }
    for (const auto& obj : j.at("objects")) {
      AnnotatedObject o;
      o.id = obj.at("id").get<TrackId>();
      o.class_label = obj.at("class").get<std::string>();
      const auto& b = obj.at("bbox");
      o.bbox = {b.at(0).get<double>(), b.at(1).get<double>(),
                b.at(2).get<double>(), b.at(3).get<double>()};
      o.centroid = point_from_json(obj.at("centroid"));
      if (!obj.at("closest_center_point").is_null()) {
        o.closest_center_point = point_from_json(obj["closest_center_point"]);
      }
      const auto sev =
          behavior::parse_color(obj.at("severity").get<std::string>());
      if (!sev) fail(ErrorKind::kSchema, "unknown severity color");
      o.severity = *sev;
      o.labels = obj.at("labels").get<std::vector<std::string>>();
      o.lateral_history = obj.at("lateral_history").get<std::vector<double>>();
      o.alarms = obj.at("alarms").get<std::string>();
      r.objects.push_back(std::move(o));
    }
    return r;
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("bad annotation JSON: ") + e.what());
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("bad annotation record: ") + e.what());
  }
}

AnnotationWriter::AnnotationWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) fail(ErrorKind::kIo, "cannot write annotations " + path.string());
}

void AnnotationWriter::write(const AnnotationRecord& record) {
  out_ << serialize_annotation(record) << '\n';
  if (!out_) fail(ErrorKind::kIo, "failed writing " + path_.string());
}

void AnnotationWriter::close() {
  out_.close();
  if (out_.fail()) fail(ErrorKind::kIo, "failed closing " + path_.string());
}

std::vector<AnnotationRecord> read_annotations(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open annotations " + path.string());
  std::vector<AnnotationRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_annotation(line));
  }
  return out;
}

}  // namespace lanewatch::io
