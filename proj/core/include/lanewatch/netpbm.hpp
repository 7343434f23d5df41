#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lanewatch/raster.hpp"
#include "lanewatch/types.hpp"

namespace lanewatch::netpbm {

// Binary PGM (P5) or PPM (P6), maxval 255 only.
Raster read(const std::filesystem::path& path);
void write(const Raster& img, const std::filesystem::path& path);

// "frame_000042.pgm" (or .ppm for three-channel rasters).
std::string frame_filename(FrameIndex frame, int channels = 1);

// Parses the frame index out of a frame_%06d.pgm|ppm name.
std::optional<FrameIndex> parse_frame_filename(const std::string& name);

struct FrameFile {
  FrameIndex frame;
  std::filesystem::path path;
};

// Frame files in a directory, sorted by frame index.
std::vector<FrameFile> list_frames(const std::filesystem::path& dir);

}  // namespace lanewatch::netpbm
