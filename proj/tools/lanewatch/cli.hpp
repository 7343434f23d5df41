#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lanewatch/pipeline.hpp"
#include "lanewatch/scenario.hpp"

namespace lanewatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CliConfig {
  pipeline::RunOptions run;
  scenario::ScenarioSpec scenario;
  std::filesystem::path out_dir = ".";
  bool raster = false;  // simulate: also render PGM frames
};

enum class Scope { kRun, kSimulate };

// One configurable value. `key` is the config-file name (section.name) and
// also a long flag; `alias` is an optional shorter flag.
struct Setting {
  std::string key;
  std::string alias;
  std::string help;
  Scope scope = Scope::kRun;
  bool is_flag = false;
  std::function<void(CliConfig&, std::string_view)> apply;
  std::function<std::string(const CliConfig&)> show;
};

const std::vector<Setting>& settings();
const Setting* find_setting(std::string_view key);

// Parses an INI-style file ([section] headers, key = value) into
// (key, value) pairs in file order.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path);

// Applies a config file to cfg. Keys of the other subcommand are ignored;
// unknown keys are invalid-config errors.
void apply_config_file(CliConfig& cfg, const std::filesystem::path& path,
                       Scope scope);

// Applies LANEWATCH_SEED (when set) to the RANSAC and scenario seeds.
void apply_seed_env(CliConfig& cfg);

std::string format_roi(const RoiPolygon& roi);
RoiPolygon parse_roi(std::string_view text);

int run_command(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int simulate_command(const CliConfig& cfg, std::ostream& out,
                     std::ostream& err);

// Full command line entry (arguments exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace lanewatch::cli
