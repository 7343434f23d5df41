#include "lanewatch/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "lanewatch/error.hpp"

namespace lanewatch::netpbm {
namespace {

[[noreturn]] void format_error(const std::filesystem::path& path,
                               const std::string& msg) {
  throw Error(ErrorKind::kFormat, "imaging", path.string() + ": " + msg);
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(ch));
    }
    ch = in.get();
  }
  return token;
}

std::size_t parse_size(const std::string& token,
                       const std::filesystem::path& path) {
  std::size_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    format_error(path, "bad header field '" + token + "'");
  }
  return value;
}

}  // namespace

Raster read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "imaging",
                "cannot open frame " + path.string());
  }
  const std::string magic = next_token(in);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    format_error(path, "unsupported magic '" + magic + "' (want P5 or P6)");
  }
  const std::size_t width = parse_size(next_token(in), path);
  const std::size_t height = parse_size(next_token(in), path);
  const std::size_t maxval = parse_size(next_token(in), path);
  if (maxval != 255) format_error(path, "maxval must be 255");
  if (width == 0 || height == 0) format_error(path, "empty image");

  std::vector<std::uint8_t> data(width * height *
                                 static_cast<std::size_t>(channels));
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (static_cast<std::size_t>(in.gcount()) != data.size()) {
    format_error(path, "truncated pixel data");
  }
  return Raster(width, height, channels, std::move(data));
}

void write(const Raster& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "imaging",
                "cannot write frame " + path.string());
  }
  out << (img.channels() == 1 ? "P5" : "P6") << '\n'
      << img.width() << ' ' << img.height() << "\n255\n";
  const auto data = img.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, "imaging",
                "failed writing frame " + path.string());
  }
}

std::string frame_filename(FrameIndex frame, int channels) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "frame_%06lld.%s",
                static_cast<long long>(frame), channels == 3 ? "ppm" : "pgm");
  return buf;
}

std::optional<FrameIndex> parse_frame_filename(const std::string& name) {
  constexpr std::string_view kPrefix = "frame_";
  if (name.size() < kPrefix.size() + 4 + 6 ||
      name.compare(0, kPrefix.size(), kPrefix) != 0) {
    return std::nullopt;
  }
  const std::string ext = name.substr(name.size() - 4);
  if (ext != ".pgm" && ext != ".ppm") return std::nullopt;
  const std::string digits =
      name.substr(kPrefix.size(), name.size() - kPrefix.size() - 4);
  if (digits.size() < 6 ||
      !std::all_of(digits.begin(), digits.end(),
                   [](char c) { return std::isdigit(
                                    static_cast<unsigned char>(c)); })) {
    return std::nullopt;
  }
  FrameIndex value = 0;
  std::from_chars(digits.data(), digits.data() + digits.size(), value);
  return value;
}

std::vector<FrameFile> list_frames(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::kIo, "imaging",
                "frames directory not found: " + dir.string());
  }
  std::vector<FrameFile> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto idx = parse_frame_filename(entry.path().filename().string())) {
      frames.push_back({*idx, entry.path()});
    }
  }
  std::sort(frames.begin(), frames.end(),
            [](const FrameFile& a, const FrameFile& b) {
              return a.frame < b.frame ||
                     (a.frame == b.frame && a.path < b.path);
            });
  const auto dup = std::adjacent_find(
      frames.begin(), frames.end(),
      [](const FrameFile& a, const FrameFile& b) { return a.frame == b.frame; });
  if (dup != frames.end()) {
    throw Error(ErrorKind::kFormat, "imaging",
                "duplicate frame index " + std::to_string(dup->frame) +
                    " in " + dir.string());
  }
  return frames;
}

}  // namespace lanewatch::netpbm
