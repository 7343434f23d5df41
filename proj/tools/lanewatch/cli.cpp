#include "lanewatch/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "lanewatch/error.hpp"
#include "lanewatch/io.hpp"
#include "lanewatch/netpbm.hpp"

namespace lanewatch::cli {
namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view text,
                            std::string_view expected) {
  throw Error(ErrorKind::kInvalidConfig, "cli",
              std::string(key) + ": invalid value '" + std::string(text) +
                  "' (expected " + std::string(expected) + ")");
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    bad_value(key, text, "a number");
  }
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  return parse_number<int>(key, text);
}

double parse_double(std::string_view key, std::string_view text) {
  return parse_number<double>(key, text);
}

bool parse_bool(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(key, text, "true or false");
}

std::string show_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string show_bool(bool v) { return v ? "true" : "false"; }

std::string_view to_string(lane::OffCenterMode m) {
  return m == lane::OffCenterMode::kEuclidean ? "euclidean" : "horizontal";
}

using Apply = std::function<void(CliConfig&, std::string_view)>;
using Show = std::function<std::string(const CliConfig&)>;

std::vector<Setting> build_settings() {
  std::vector<Setting> s;
  auto add = [&s](std::string key, std::string alias, std::string help,
                  Scope scope, Apply apply, Show show, bool is_flag = false) {
    s.push_back(Setting{std::move(key), std::move(alias), std::move(help),
                        scope, is_flag, std::move(apply), std::move(show)});
  };
  const Scope R = Scope::kRun;
  const Scope S = Scope::kSimulate;

#define LW_PATH(KEY, ALIAS, HELP, FIELD)                                     \
  add(KEY, ALIAS, HELP, R,                                                   \
      [](CliConfig& c, std::string_view v) { c.run.FIELD = std::string(v); }, \
      [](const CliConfig& c) { return c.run.FIELD.string(); })
  LW_PATH("run.frames_dir", "--frames-dir",
          "Directory of frame_NNNNNN.pgm/ppm images (frames mode)", frames_dir);
  LW_PATH("run.detections", "--detections", "Detection log (JSON lines)",
          detections);
  LW_PATH("run.lane_truth", "--lane-truth",
          "Lane truth JSON (detections mode)", lane_truth);
  LW_PATH("run.csv", "--csv", "Output behavior CSV", csv);
  LW_PATH("run.annotations", "--annotations",
          "Output annotation JSON lines (optional)", annotations);
  LW_PATH("run.overlay_dir", "--overlay-dir",
          "Write a PGM overlay per frame into this directory (optional)",
          overlay_dir);
#undef LW_PATH
  add("run.csv_trim_zeros", "--csv-trim-zeros",
      "Render Avg. Lateral without trailing zeros", R,
      [](CliConfig& c, std::string_view v) {
        c.run.csv_mode = parse_bool("run.csv_trim_zeros", v)
                             ? io::CsvNumberMode::kTrimZeros
                             : io::CsvNumberMode::kFixed;
      },
      [](const CliConfig& c) {
        return show_bool(c.run.csv_mode == io::CsvNumberMode::kTrimZeros);
      },
      true);
  add("run.lenient", "--lenient", "Skip failing frames instead of aborting", R,
      [](CliConfig& c, std::string_view v) {
        c.run.lenient = parse_bool("run.lenient", v);
      },
      [](const CliConfig& c) { return show_bool(c.run.lenient); }, true);

#define LW_INT(KEY, HELP, FIELD)                                  \
  add(KEY, "", HELP, R,                                           \
      [](CliConfig& c, std::string_view v) {                      \
        c.run.pipeline.FIELD = parse_int(KEY, v);                 \
      },                                                          \
      [](const CliConfig& c) {                                    \
        return std::to_string(c.run.pipeline.FIELD);              \
      })
#define LW_DOUBLE(KEY, HELP, FIELD)                               \
  add(KEY, "", HELP, R,                                           \
      [](CliConfig& c, std::string_view v) {                      \
        c.run.pipeline.FIELD = parse_double(KEY, v);              \
      },                                                          \
      [](const CliConfig& c) {                                    \
        return show_double(c.run.pipeline.FIELD);                 \
      })
  LW_INT("run.frame_width", "Frame width for detections mode (px)",
         frame_width);
  LW_INT("run.frame_height", "Frame height for detections mode (px)",
         frame_height);

  LW_INT("imaging.blur_kernel", "Gaussian kernel size (odd)",
         imaging.blur_kernel);
  LW_DOUBLE("imaging.blur_sigma", "Gaussian sigma", imaging.blur_sigma);
  LW_INT("imaging.threshold_block", "Adaptive threshold block (odd)",
         imaging.threshold_block);
  LW_INT("imaging.threshold_c", "Adaptive threshold offset c",
         imaging.threshold_c);
  LW_INT("imaging.canny_low", "Canny low threshold (L1 magnitude)",
         imaging.canny_low);
  LW_INT("imaging.canny_high", "Canny high threshold (L1 magnitude)",
         imaging.canny_high);
  add("imaging.roi", "",
      "ROI polygon as x,y;x,y;... in normalized coordinates", R,
      [](CliConfig& c, std::string_view v) {
        c.run.pipeline.imaging.roi = parse_roi(v);
      },
      [](const CliConfig& c) {
        return format_roi(c.run.pipeline.imaging.roi);
      });

  LW_INT("lane.degree", "Lane polynomial degree (1 or 2)", lane.degree);
  LW_INT("lane.ransac_iterations", "RANSAC iterations",
         lane.ransac_iterations);
  LW_DOUBLE("lane.inlier_tol", "RANSAC inlier tolerance (px)",
            lane.inlier_tol);
  LW_DOUBLE("lane.min_inlier_frac", "Minimum RANSAC inlier fraction",
            lane.min_inlier_frac);
  add("lane.ransac_seed", "", "RANSAC seed (LANEWATCH_SEED overrides)", R,
      [](CliConfig& c, std::string_view v) {
        c.run.pipeline.lane.ransac_seed =
            parse_number<std::uint64_t>("lane.ransac_seed", v);
      },
      [](const CliConfig& c) {
        return std::to_string(c.run.pipeline.lane.ransac_seed);
      });
  LW_DOUBLE("lane.smoothing_alpha", "Lane EMA smoothing factor",
            lane.smoothing_alpha);
  LW_INT("lane.max_carry", "Frames a lane model is carried when missing",
         lane.max_carry);
  add("lane.offcenter_mode", "", "Off-center distance: euclidean|horizontal",
      R,
      [](CliConfig& c, std::string_view v) {
        const auto t = trim(v);
        if (t == "euclidean") {
          c.run.pipeline.lane.offcenter_mode = lane::OffCenterMode::kEuclidean;
        } else if (t == "horizontal") {
          c.run.pipeline.lane.offcenter_mode = lane::OffCenterMode::kHorizontal;
        } else {
          bad_value("lane.offcenter_mode", v, "euclidean or horizontal");
        }
      },
      [](const CliConfig& c) {
        return std::string(to_string(c.run.pipeline.lane.offcenter_mode));
      });

  LW_DOUBLE("tracking.iou_min", "Minimum IoU for association",
            tracking.iou_min);
  LW_INT("tracking.max_age", "Frames a lost track survives", tracking.max_age);

  LW_INT("behavior.lateral_window", "Frames averaged for Avg. Lateral",
         behavior.lateral_window);
  LW_DOUBLE("behavior.lateral_threshold",
            "Distracted lateral threshold (px/frame)",
            behavior.lateral_threshold);
  LW_DOUBLE("behavior.offcenter_threshold", "Distracted off-center threshold (px)",
            behavior.offcenter_threshold);
  LW_INT("behavior.sign_change_limit", "Sign changes that fire the impaired alarm",
         behavior.sign_change_limit);
  LW_DOUBLE("behavior.direction_deadband", "Direction dead-band (px/frame)",
            behavior.direction_deadband);
  LW_INT("behavior.persistence", "Frames the distracted condition must hold",
         behavior.persistence);
  LW_INT("behavior.oscillation_window", "Sign-change counting window (frames)",
         behavior.oscillation_window);
  LW_INT("behavior.direction_hold",
         "Frames a direction must persist before it counts",
         behavior.direction_hold);
  add("behavior.impaired_latch", "", "Keep the impaired alarm on once fired", R,
      [](CliConfig& c, std::string_view v) {
        c.run.pipeline.behavior.impaired_latch =
            parse_bool("behavior.impaired_latch", v);
      },
      [](const CliConfig& c) {
        return show_bool(c.run.pipeline.behavior.impaired_latch);
      },
      true);
#undef LW_INT
#undef LW_DOUBLE

#define LW_SINT(KEY, ALIAS, HELP, FIELD)                               \
  add(KEY, ALIAS, HELP, S,                                             \
      [](CliConfig& c, std::string_view v) {                           \
        c.scenario.FIELD = parse_int(KEY, v);                          \
      },                                                               \
      [](const CliConfig& c) { return std::to_string(c.scenario.FIELD); })
#define LW_SDOUBLE(KEY, ALIAS, HELP, FIELD)                            \
  add(KEY, ALIAS, HELP, S,                                             \
      [](CliConfig& c, std::string_view v) {                           \
        c.scenario.FIELD = parse_double(KEY, v);                       \
      },                                                               \
      [](const CliConfig& c) { return show_double(c.scenario.FIELD); })
  add("scenario.kind", "--kind", "Scenario: nominal|distracted|impaired", S,
      [](CliConfig& c, std::string_view v) {
        const auto kind = scenario::parse_kind(trim(v));
        if (!kind) bad_value("scenario.kind", v, "nominal, distracted or impaired");
        c.scenario.kind = *kind;
      },
      [](const CliConfig& c) {
        return std::string(scenario::to_string(c.scenario.kind));
      });
  LW_SINT("scenario.frames", "--frames", "Number of frames", frames);
  LW_SDOUBLE("scenario.amplitude", "--amplitude", "Lateral amplitude (px)",
             amplitude);
  LW_SINT("scenario.period", "--period", "Oscillation or ramp period (frames)",
          period);
  add("scenario.seed", "--seed", "Noise seed (LANEWATCH_SEED overrides)", S,
      [](CliConfig& c, std::string_view v) {
        c.scenario.seed = parse_number<std::uint64_t>("scenario.seed", v);
      },
      [](const CliConfig& c) { return std::to_string(c.scenario.seed); });
  LW_SDOUBLE("scenario.noise_px", "--noise", "Gaussian jitter sigma on cx (px)",
             noise_px);
  LW_SDOUBLE("scenario.fps", "", "Frames per second", fps);
  LW_SINT("scenario.width", "", "Frame width (px)", width);
  LW_SINT("scenario.height", "", "Frame height (px)", height);
  LW_SDOUBLE("scenario.lane_center_x", "", "Lane center column (px)",
             lane_center_x);
  LW_SDOUBLE("scenario.lane_width", "", "Lane width (px)", lane_width);
  LW_SDOUBLE("scenario.vehicle_width", "", "Vehicle box width (px)",
             vehicle_width);
  LW_SDOUBLE("scenario.vehicle_height", "", "Vehicle box height (px)",
             vehicle_height);
  LW_SDOUBLE("scenario.vehicle_cy_frac", "",
             "Vehicle centroid row as a fraction of height", vehicle_cy_frac);
  LW_SINT("scenario.line_width", "", "Rendered lane stroke width (px)",
          line_width);
  add("scenario.class_label", "", "Detection class label", S,
      [](CliConfig& c, std::string_view v) {
        c.scenario.class_label = std::string(trim(v));
      },
      [](const CliConfig& c) { return c.scenario.class_label; });
  add("scenario.out_dir", "--out-dir", "Output directory", S,
      [](CliConfig& c, std::string_view v) { c.out_dir = std::string(v); },
      [](const CliConfig& c) { return c.out_dir.string(); });
  add("scenario.raster", "--raster", "Also render PGM frames into out_dir/frames",
      S,
      [](CliConfig& c, std::string_view v) {
        c.raster = parse_bool("scenario.raster", v);
      },
      [](const CliConfig& c) { return show_bool(c.raster); }, true);
#undef LW_SINT
#undef LW_SDOUBLE
  return s;
}

std::filesystem::path out_path(const CliConfig& cfg, std::string_view name) {
  return cfg.out_dir / std::string(name);
}

}  // namespace

const std::vector<Setting>& settings() {
  static const std::vector<Setting> all = build_settings();
  return all;
}

const Setting* find_setting(std::string_view key) {
  for (const auto& s : settings()) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cli",
                "cannot open config file " + path.string());
  }
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw Error(ErrorKind::kInvalidConfig, "cli",
                path.string() + ": " + e.what());
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    if (item.name == "--" || item.name == "++") continue;
    // Inputs were split on commas; rejoin to keep list-valued settings whole.
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i > 0) value += ',';
      value += item.inputs[i];
    }
    out.emplace_back(item.fullname(), std::move(value));
  }
  return out;
}

void apply_config_file(CliConfig& cfg, const std::filesystem::path& path,
                       Scope scope) {
  for (const auto& [key, value] : read_config_file(path)) {
    const Setting* s = find_setting(key);
    if (s == nullptr) {
      throw Error(ErrorKind::kInvalidConfig, "cli",
                  path.string() + ": unknown key '" + key + "'");
    }
    if (s->scope == scope) s->apply(cfg, value);
  }
}

void apply_seed_env(CliConfig& cfg) {
  const char* env = std::getenv("LANEWATCH_SEED");
  if (env == nullptr || *env == '\0') return;
  const auto seed = parse_number<std::uint64_t>("LANEWATCH_SEED", env);
  cfg.run.pipeline.lane.ransac_seed = seed;
  cfg.scenario.seed = seed;
}

std::string format_roi(const RoiPolygon& roi) {
  std::string out;
  for (const auto& v : roi.vertices()) {
    if (!out.empty()) out += ';';
    out += show_double(v.x) + ',' + show_double(v.y);
  }
  return out;
}

RoiPolygon parse_roi(std::string_view text) {
  std::vector<Point2> vertices;
  std::string_view rest = trim(text);
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const auto pair = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view{}
                                          : rest.substr(semi + 1);
    const auto comma = pair.find(',');
    if (comma == std::string_view::npos) {
      bad_value("imaging.roi", text, "x,y;x,y;...");
    }
    vertices.push_back(Point2{parse_double("imaging.roi", pair.substr(0, comma)),
                              parse_double("imaging.roi", pair.substr(comma + 1))});
  }
  return RoiPolygon(std::move(vertices));
}

int run_command(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto summary = pipeline::run(cfg.run, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  out << summary.to_string() << '\n';
  return kExitOk;
}

int simulate_command(const CliConfig& cfg, std::ostream& out,
                     std::ostream& err) {
  (void)err;
  scenario::validate(cfg.scenario);
  std::filesystem::create_directories(cfg.out_dir);
  const auto data = scenario::generate(cfg.scenario);
  io::write_detection_log(data.detections,
                          out_path(cfg, "detections.jsonl"));
  io::write_lane_truth(data.left, data.right, out_path(cfg, "lane_truth.json"));
  if (cfg.raster) {
    const auto frames_dir = out_path(cfg, "frames");
    std::filesystem::create_directories(frames_dir);
    // Static camera: render once and write the same raster for every frame.
    const Raster frame = scenario::render_frame(cfg.scenario, 0);
    for (int f = 0; f < cfg.scenario.frames; ++f) {
      netpbm::write(frame, frames_dir / netpbm::frame_filename(f, 1));
    }
  }
  out << "wrote " << data.detections.size() << " detections for "
      << cfg.scenario.frames << " frames ("
      << scenario::to_string(cfg.scenario.kind) << ") to "
      << cfg.out_dir.string() << '\n';
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  const CliConfig defaults;
  CLI::App app{"Lane-referenced driver behavior monitoring", "lanewatch"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand(
      "run", "Process frames or detections and write behavior CSV");
  auto* sim = app.add_subcommand(
      "simulate", "Generate a synthetic scenario (detections + lane truth)");

  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;
  for (auto* sub : {run, sim}) {
    sub->add_option("--config", config_path,
                    "Config file ([section] key = value)");
  }
  for (const auto& s : settings()) {
    auto* sub = s.scope == Scope::kRun ? run : sim;
    std::string names = "--" + s.key;
    if (!s.alias.empty()) names += "," + s.alias;
    const std::string help = s.help + " [default: " + s.show(defaults) + "]";
    if (s.is_flag) {
      options[s.key] = sub->add_flag(names, flags[s.key], help);
    } else {
      options[s.key] = sub->add_option(names, values[s.key], help);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const Scope scope = run->parsed() ? Scope::kRun : Scope::kSimulate;
  CliConfig cfg;
  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path, scope);
    for (const auto& s : settings()) {
      if (s.scope != scope || options[s.key]->count() == 0) continue;
      s.apply(cfg, s.is_flag ? show_bool(flags[s.key]) : values[s.key]);
    }
    apply_seed_env(cfg);
    return scope == Scope::kRun ? run_command(cfg, out, err)
                                : simulate_command(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInvalidConfig ? kExitUsage : kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: io_pipeline: io: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace lanewatch::cli
