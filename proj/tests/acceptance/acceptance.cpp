// Acceptance runner: one PASS/FAIL line per criterion with its runtime limit.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lanewatch/behavior.hpp"
#include "lanewatch/imaging.hpp"
#include "lanewatch/io.hpp"
#include "lanewatch/lane.hpp"
#include "lanewatch/cli.hpp"
#include "read_file.hpp"
#include "temp_dir.hpp"

namespace {

using namespace lanewatch;
using behavior::Direction;
using behavior::Severity;
using lanewatch::testing::read_file;
using lanewatch::testing::TempDir;
namespace fs = std::filesystem;

const fs::path kTable2 = fs::path(LANEWATCH_TEST_DATA_DIR) / "table2";

// Collects failure messages; the first few are reported.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  std::string report() const {
    std::string s;
    for (std::size_t i = 0; i < failures_.size() && i < 3; ++i) {
      s += (i ? "; " : "") + failures_[i];
    }
    if (failures_.size() > 3) {
      s += "; +" + std::to_string(failures_.size() - 3) + " more";
    }
    return s;
  }

 private:
  std::vector<std::string> failures_;
};

std::string fmt(double v, const char* spec = "%.3f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void cli(Checker& c, const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  c.expect(code == cli::kExitOk, "lanewatch " + args.front() + " exited " +
                                     std::to_string(code) + ": " + err.str());
}

// --- scenario plumbing -------------------------------------------------------

struct Scenario {
  std::string kind;
  int amplitude = 0;
  int period = 120;
  int frames = 400;
  double noise = 0.0;
  int seed = 0;
};

// Reduced frame so raster runs stay fast; lane center 320, width 176.
constexpr int kWidth = 640;
constexpr int kHeight = 360;
constexpr double kLaneCenter = 320.0;
constexpr double kLaneWidth = 176.0;

std::vector<std::string> simulate_args(const Scenario& s, const fs::path& dir,
                                       bool raster) {
  std::vector<std::string> a = {
      "simulate", "--kind", s.kind, "--frames", std::to_string(s.frames),
      "--amplitude", std::to_string(s.amplitude), "--period",
      std::to_string(s.period), "--noise", fmt(s.noise, "%g"), "--seed",
      std::to_string(s.seed), "--scenario.width", std::to_string(kWidth),
      "--scenario.height", std::to_string(kHeight), "--scenario.lane_center_x",
      fmt(kLaneCenter, "%g"), "--scenario.lane_width", fmt(kLaneWidth, "%g"),
      "--scenario.vehicle_width", "40", "--scenario.vehicle_height", "30",
      "--out-dir", dir.string()};
  if (raster) a.push_back("--raster");
  return a;
}

struct RunOutput {
  std::vector<io::BehaviorRecord> rows;
  std::vector<io::AnnotationRecord> annotations;
  std::vector<double> cx;  // detection-log centroids, one per frame
};

// simulate + run through the CLI; raster mode estimates the lane from frames.
RunOutput run_scenario(Checker& c, const Scenario& s, const TempDir& dir,
                       bool raster) {
  const fs::path sim = dir / (s.kind + (raster ? "_raster" : "_truth"));
  cli(c, simulate_args(s, sim, raster));
  std::vector<std::string> run = {
      "run", "--detections", (sim / "detections.jsonl").string(),
      "--csv", (sim / "out.csv").string(), "--annotations",
      (sim / "ann.jsonl").string(), "--run.frame_width",
      std::to_string(kWidth), "--run.frame_height", std::to_string(kHeight)};
  if (raster) {
    run.insert(run.end(), {"--frames-dir", (sim / "frames").string()});
  } else {
    run.insert(run.end(),
               {"--lane-truth", (sim / "lane_truth.json").string()});
  }
  cli(c, run);
  RunOutput out;
  if (!c.ok()) return out;
  out.rows = io::read_csv(sim / "out.csv");
  out.annotations = io::read_annotations(sim / "ann.jsonl");
  for (const auto& d : io::read_detection_log(sim / "detections.jsonl")) {
    out.cx.push_back(d.bbox.x + d.bbox.w / 2.0);
  }
  return out;
}

// --- independent behavior oracle ----------------------------------------------

struct Oracle {
  std::vector<Direction> raw;            // per frame, warm-up gated
  std::vector<double> mean;              // signed windowed mean
  std::vector<int> events;               // sign-change frames
  std::vector<std::size_t> count;        // events in the oscillation window
};

// Recomputes the behavior columns straight from the centroid sequence: the
// windowed mean telescopes to (cx[f] - cx[f-W]) / W, a direction is confirmed
// once it fills the last `hold` frames, and every confirmed polarity flip is
// an event.
Oracle brute_force(const std::vector<double>& cx) {
  const behavior::BehaviorConfig cfg;
  const int w = cfg.lateral_window;
  const int n = static_cast<int>(cx.size());
  Oracle o;
  for (int f = 0; f < n; ++f) {
    const int k = std::min(f, w);
    const double m = k ? (cx[static_cast<std::size_t>(f)] -
                          cx[static_cast<std::size_t>(f - k)]) / k
                       : 0.0;
    o.mean.push_back(m);
    Direction d = Direction::kSteady;
    if (f >= w && m > cfg.direction_deadband) d = Direction::kRight;
    if (f >= w && m < -cfg.direction_deadband) d = Direction::kLeft;
    o.raw.push_back(d);
  }
  int polarity = 0;
  for (int f = 0; f < n; ++f) {
    const Direction d = o.raw[static_cast<std::size_t>(f)];
    bool held = d != Direction::kSteady && f + 1 >= cfg.direction_hold;
    for (int j = f - cfg.direction_hold + 1; held && j <= f; ++j) {
      held = o.raw[static_cast<std::size_t>(j)] == d;
    }
    if (held) {
      const int p = d == Direction::kRight ? 1 : -1;
      if (polarity != 0 && p != polarity) o.events.push_back(f);
      polarity = p;
    }
    std::size_t in_window = 0;
    for (int e : o.events) {
      if (e > f - cfg.oscillation_window) ++in_window;
    }
    o.count.push_back(in_window);
  }
  return o;
}

Severity expected_severity(std::size_t count) {
  return count >= 3 ? Severity::kAlert
         : count == 2 ? Severity::kCaution
                      : Severity::kNormal;
}

bool has(const std::string& alarms, std::string_view alarm) {
  return alarms.find(alarm) != std::string::npos;
}

void check_rows_match_oracle(Checker& c, const RunOutput& r, const Oracle& o) {
  c.expect(r.rows.size() == o.count.size(),
           "row count " + std::to_string(r.rows.size()) + " vs " +
               std::to_string(o.count.size()));
  for (std::size_t f = 0; f < r.rows.size() && f < o.count.size(); ++f) {
    c.expect(r.rows[f].sign_change == o.count[f],
             "frame " + std::to_string(f) + ": sign change " +
                 std::to_string(r.rows[f].sign_change) + " vs recount " +
                 std::to_string(o.count[f]));
    c.expect(r.rows[f].direction == o.raw[f],
             "frame " + std::to_string(f) + ": direction mismatch");
  }
}

// --- criteria outcome checks, shared by lane-truth and raster runs ------------

void check_impaired(Checker& c, const RunOutput& r) {
  const auto o = brute_force(r.cx);
  check_rows_match_oracle(c, r, o);
  c.expect(o.events.size() >= 3, "fewer than 3 sign changes in the recount");
  if (o.events.size() < 3) return;
  const auto first = std::find_if(r.rows.begin(), r.rows.end(), [](auto& row) {
    return has(row.alarms, behavior::kImpairedAlarm);
  });
  c.expect(first != r.rows.end(), "impaired alarm never fired");
  if (first != r.rows.end()) {
    c.expect(first->frame <= o.events[2],
             "impaired alarm at frame " + std::to_string(first->frame) +
                 " after 3rd sign change at " + std::to_string(o.events[2]));
  }
  for (const auto& row : r.rows) {
    c.expect(!has(row.alarms, behavior::kDistractedAlarm),
             "distracted alarm at frame " + std::to_string(row.frame));
  }
}

// lane_tol: how far the lane reference may sit from the analytic center.
void check_distracted(Checker& c, const RunOutput& r, int period,
                      double lane_tol) {
  const auto o = brute_force(r.cx);
  const behavior::BehaviorConfig cfg;
  const int cycle = 2 * period;
  const int excursion = 3 * period / 2;  // ramp out, hold, ramp back
  const int frames = static_cast<int>(r.rows.size());
  for (int start = 0; start < frames; start += cycle) {
    bool fired = false;
    for (int f = start; f < std::min(start + cycle, frames); ++f) {
      const bool alarm =
          has(r.rows[static_cast<std::size_t>(f)].alarms,
              behavior::kDistractedAlarm);
      if (f < start + excursion) {
        fired = fired || alarm;
      } else {
        c.expect(!alarm, "distracted alarm in center hold at frame " +
                             std::to_string(f));
      }
      if (!alarm) continue;
      // Every alarm row must satisfy the thresholds for `persistence` frames.
      for (int j = f - cfg.persistence + 1; j <= f; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        const double off = std::abs(r.cx[idx] - kLaneCenter);
        c.expect(j >= 0 && std::abs(o.mean[idx]) > cfg.lateral_threshold &&
                     off > cfg.offcenter_threshold - lane_tol,
                 "alarm at frame " + std::to_string(f) +
                     " without sustained thresholds");
      }
    }
    if (start + 1 < frames) {
      c.expect(fired, "no distracted alarm in excursion block starting at " +
                          std::to_string(start));
    }
  }
}

void check_nominal(Checker& c, const RunOutput& r) {
  c.expect(r.rows.size() == 1000, "expected 1000 rows");
  for (const auto& row : r.rows) {
    c.expect(row.alarms.empty(),
             "alarm '" + row.alarms + "' at frame " + std::to_string(row.frame));
    c.expect(row.sign_change == 0,
             "sign change at frame " + std::to_string(row.frame));
  }
  check_rows_match_oracle(c, r, brute_force(r.cx));
}

const Scenario kImpaired{"impaired", 30, 120, 400};
const Scenario kDistracted{"distracted", 60, 100, 400};
const Scenario kNominal{"nominal", 0, 120, 1000, 2.0};

// --- criteria ---------------------------------------------------------------

void table2_run(Checker& c, const TempDir& dir, const std::string& tag) {
  cli(c, {"run", "--detections", (kTable2 / "detections.jsonl").string(),
          "--lane-truth", (kTable2 / "lane.json").string(), "--csv",
          (dir / (tag + ".csv")).string(), "--annotations",
          (dir / (tag + ".jsonl")).string()});
}

std::vector<double> table2_cx() {
  std::vector<double> cx;
  for (const auto& d : io::read_detection_log(kTable2 / "detections.jsonl")) {
    cx.push_back(d.bbox.x + d.bbox.w / 2.0);
  }
  return cx;
}

void criterion1(Checker& c) {
  TempDir dir;
  table2_run(c, dir, "t2");
  if (!c.ok()) return;
  const auto rows = io::read_csv(dir / "t2.csv");
  const auto cx = table2_cx();
  const std::array<std::array<long, 2>, 5> expected{
      {{910, 573}, {911, 572}, {912, 573}, {912, 573}, {915, 579}}};
  // Lane truth: constant boundaries at 866 and 966, centerline x = 916.
  const double center = (866.0 + 966.0) / 2.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const std::size_t f = 481 + i;
    const std::string at = "frame " + std::to_string(f) + ": ";
    if (f >= rows.size()) {
      c.expect(false, at + "missing row");
      continue;
    }
    const auto& r = rows[f];
    c.expect(r.frame == static_cast<FrameIndex>(f) && r.object_id == 0 &&
                 r.class_label == "car",
             at + "frame/id/class");
    c.expect(r.cx == expected[i][0] && r.cy == expected[i][1],
             at + "centroid (" + std::to_string(r.cx) + "," +
                 std::to_string(r.cy) + ")");
    c.expect(r.sign_change == 3, at + "sign change " +
                                     std::to_string(r.sign_change));
    c.expect(r.alarms == behavior::kImpairedAlarm, at + "alarms '" + r.alarms + "'");
    double sum = 0.0;
    for (std::size_t k = f - 29; k <= f; ++k) sum += cx[k] - cx[k - 1];
    const std::string avg = fmt(std::abs(sum / 30.0), "%.2f");
    c.expect(io::format_avg_lateral(r.avg_lateral, io::CsvNumberMode::kFixed) ==
                 avg,
             at + "avg lateral vs " + avg);
    const long off = std::lround(std::abs(cx[f] - center));
    c.expect(r.off_center && *r.off_center == off,
             at + "off-center vs " + std::to_string(off));
  }
}

void check_severity(Checker& c, const std::vector<io::AnnotationRecord>& ann,
                    const Oracle& o) {
  c.expect(o.events.size() >= 3, "fewer than 3 events in the recount");
  c.expect(ann.size() == o.count.size(), "annotation count mismatch");
  if (!c.ok()) return;
  std::optional<FrameIndex> caution, alert;
  for (std::size_t f = 0; f < ann.size(); ++f) {
    c.expect(ann[f].objects.size() == 1, "expected one object per frame");
    if (ann[f].objects.size() != 1) return;
    const auto s = ann[f].objects[0].severity;
    c.expect(s == expected_severity(o.count[f]),
             "frame " + std::to_string(f) + ": severity " +
                 std::string(behavior::color_name(s)));
    if (s == Severity::kCaution && !caution) caution = ann[f].frame;
    if (s == Severity::kAlert && !alert) alert = ann[f].frame;
  }
  c.expect(caution == o.events[1], "caution not at 2nd event " +
                                       std::to_string(o.events[1]));
  c.expect(alert == o.events[2], "alert not at 3rd event " +
                                     std::to_string(o.events[2]));
}

void criterion2(Checker& c) {
  TempDir dir;
  table2_run(c, dir, "t2");
  if (!c.ok()) return;
  check_severity(c, io::read_annotations(dir / "t2.jsonl"),
                 brute_force(table2_cx()));
}

void criterion3(Checker& c) {
  TempDir dir;
  const auto r = run_scenario(c, kImpaired, dir, false);
  if (c.ok()) check_impaired(c, r);
}

void criterion4(Checker& c) {
  TempDir dir;
  const auto r = run_scenario(c, kDistracted, dir, false);
  if (c.ok()) check_distracted(c, r, kDistracted.period, 0.0);
}

void criterion5(Checker& c) {
  TempDir dir;
  const auto r = run_scenario(c, kNominal, dir, false);
  if (c.ok()) check_nominal(c, r);
}

void criterion6(Checker& c) {
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(1000 + trial));
    std::uniform_real_distribution<double> ux(0.0, 2559.0), uy(0.0, 1439.0);
    std::uniform_real_distribution<double> anchor(300.0, 2260.0);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    // Quadratic through three anchors at the top, middle and bottom rows.
    const double x0 = anchor(rng), x1 = anchor(rng), x2 = anchor(rng);
    const auto planted = [&](double y) {
      const double t = y / 1439.0;
      return x0 * (1 - t) * (1 - 2 * t) + x1 * 4 * t * (1 - t) +
             x2 * t * (2 * t - 1);
    };
    lane::EdgePointSet pts;
    for (int i = 0; i < 60; ++i) {
      const double y = std::round(uy(rng));
      pts.points.push_back({planted(y) + jitter(rng), y});
    }
    for (int i = 0; i < 40; ++i) pts.points.push_back({ux(rng), uy(rng)});
    std::shuffle(pts.points.begin(), pts.points.end(), rng);
    lane::RansacParams p;
    p.inlier_tol = 2.0;
    p.seed = static_cast<std::uint64_t>(trial);
    const auto fit = lane::ransac_polyfit(pts, p);
    bool within = fit.has_value();
    for (double y = within ? std::ceil(fit->y_min) : 1.0;
         within && y <= fit->y_max; y += 1.0) {
      within = std::abs(fit->at(y) - planted(y)) <= 2.0;
    }
    good += within ? 1 : 0;
  }
  c.expect(good >= 99, std::to_string(good) + "/100 trials within 2 px");
}

Raster random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Raster img(w, h, 1, 0);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

bool binary(const Raster& img) {
  return std::all_of(img.data().begin(), img.data().end(),
                     [](std::uint8_t v) { return v == 0 || v == 255; });
}

void criterion7(Checker& c) {
  for (int value : {0, 37, 128, 255}) {
    const Raster flat(97, 61, 1, static_cast<std::uint8_t>(value));
    for (auto [k, sigma] : {std::pair{3, 0.8}, {5, 1.4}, {9, 3.0}}) {
      c.expect(imaging::gaussian_blur(flat, k, sigma) == flat,
               "blur changed constant " + std::to_string(value) + " k=" +
                   std::to_string(k));
    }
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto img = random_image(128, 96, seed);
    for (int cval : {-15, 0, 10}) {
      c.expect(binary(imaging::adaptive_threshold(img, 15, cval)),
               "threshold output not binary");
    }
    c.expect(binary(imaging::canny(img, 50, 150)), "canny output not binary");
  }
  // Step edges: exactly one edge pixel per row (or column), at a fixed place.
  for (std::size_t step : {20u, 41u, 77u}) {
    Raster v(100, 60, 1, 0), h(60, 100, 1, 0);
    for (std::size_t y = 0; y < 60; ++y) {
      for (std::size_t x = step; x < 100; ++x) {
        v.at(x, y) = 200;
        h.at(y, x) = 200;
      }
    }
    const auto ev = imaging::canny(v, 50, 150);
    const auto eh = imaging::canny(h, 50, 150);
    for (std::size_t i = 0; i < 60; ++i) {
      std::vector<std::size_t> cols, rows;
      for (std::size_t j = 0; j < 100; ++j) {
        if (ev.at(j, i)) cols.push_back(j);
        if (eh.at(i, j)) rows.push_back(j);
      }
      c.expect(cols.size() == 1 && cols[0] + 1 >= step && cols[0] <= step,
               "vertical step " + std::to_string(step) + " row " +
                   std::to_string(i) + " has " + std::to_string(cols.size()) +
                   " edge pixels");
      c.expect(rows.size() == 1 && rows == cols,
               "horizontal step " + std::to_string(step) + " column " +
                   std::to_string(i) + " response differs");
    }
  }
  const auto img = random_image(160, 90, 11);
  for (const auto& roi :
       {RoiPolygon::default_trapezoid(), RoiPolygon::full_frame(),
        RoiPolygon({{0.1, 0.2}, {0.9, 0.1}, {0.6, 0.95}})}) {
    const auto once = imaging::apply_roi(img, roi);
    c.expect(imaging::apply_roi(once, roi) == once, "ROI not idempotent");
  }
}

void criterion8(Checker& c) {
  TempDir dir;
  table2_run(c, dir, "a");
  table2_run(c, dir, "b");
  if (!c.ok()) return;
  c.expect(read_file(dir / "a.csv") == read_file(dir / "b.csv"),
           "Table II CSV differs between runs");
  c.expect(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"),
           "Table II annotations differ between runs");
  // Raster path, including RANSAC, on a short impaired scenario.
  Scenario s = kImpaired;
  s.frames = 60;
  TempDir one, two;
  run_scenario(c, s, one, true);
  run_scenario(c, s, two, true);
  if (!c.ok()) return;
  for (const char* f : {"out.csv", "ann.jsonl"}) {
    c.expect(read_file(one / "impaired_raster" / f) ==
                 read_file(two / "impaired_raster" / f),
             std::string("raster ") + f + " differs between runs");
  }
}

void check_lane_recovery(Checker& c, const RunOutput& r,
                         const std::string& tag) {
  const double left = kLaneCenter - kLaneWidth / 2.0;
  const double right = kLaneCenter + kLaneWidth / 2.0;
  double worst = 0.0;
  std::size_t missing = 0;
  for (const auto& a : r.annotations) {
    if (!a.lane) {
      ++missing;
      continue;
    }
    for (const auto& [poly, truth] :
         {std::pair{a.lane->left, left}, {a.lane->right, right}}) {
      for (double y = std::ceil(poly.y_min); y <= poly.y_max; y += 1.0) {
        worst = std::max(worst, std::abs(poly.at(y) - truth));
      }
    }
  }
  c.expect(missing == 0, tag + ": " + std::to_string(missing) +
                             " frames without a lane estimate");
  c.expect(worst <= 3.0, tag + ": boundary error " + fmt(worst) + " px");
}

void criterion9(Checker& c) {
  TempDir dir;
  const auto impaired = run_scenario(c, kImpaired, dir, true);
  if (c.ok()) {
    check_lane_recovery(c, impaired, "impaired");
    check_impaired(c, impaired);
  }
  const auto distracted = run_scenario(c, kDistracted, dir, true);
  if (c.ok()) {
    check_lane_recovery(c, distracted, "distracted");
    check_distracted(c, distracted, kDistracted.period, 3.0);
  }
  const auto nominal = run_scenario(c, kNominal, dir, true);
  if (c.ok()) {
    check_lane_recovery(c, nominal, "nominal");
    check_nominal(c, nominal);
  }
}

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // 0 means no limit
  std::function<void(Checker&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Table II rows 481-485", 1.0, criterion1},
      {2, "severity escalation at 2nd and 3rd sign change", 1.0, criterion2},
      {3, "impaired scenario alarm and sign-change recount", 5.0, criterion3},
      {4, "distracted scenario excursion blocks", 5.0, criterion4},
      {5, "nominal jitter negative control", 5.0, criterion5},
      {6, "RANSAC planted curve 100 trials", 10.0, criterion6},
      {7, "imaging oracles", 5.0, criterion7},
      {8, "determinism", 0.0, criterion8},
      {9, "raster end-to-end lane recovery and alarms", 60.0, criterion9},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checker c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    const bool in_time = cr.limit_s <= 0.0 || secs < cr.limit_s;
    if (!in_time) c.expect(false, "runtime limit exceeded");
    const std::string limit =
        cr.limit_s > 0.0 ? "limit " + fmt(cr.limit_s, "%g") + " s" : "no limit";
    std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << cr.id << ": "
              << cr.name << " (" << fmt(secs) << " s, " << limit << ")";
    if (!c.ok()) std::cout << " - " << c.report();
    std::cout << '\n' << std::flush;
    failed += c.ok() ? 0 : 1;
  }
  std::cout << (failed ? "FAILED " : "PASSED ") << criteria.size() - failed
            << "/" << criteria.size() << " criteria\n";
  return failed ? 1 : 0;
}
