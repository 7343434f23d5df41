#include <gtest/gtest.h>

#include "lanewatch/error.hpp"
#include "lanewatch/netpbm.hpp"
#include "read_file.hpp"
#include "temp_dir.hpp"

namespace lanewatch::netpbm {
namespace {

using lanewatch::testing::read_file;
using lanewatch::testing::TempDir;
using lanewatch::testing::write_file;

TEST(Netpbm, GrayRoundTrip) {
  TempDir dir;
  Raster img(5, 3, 1);
  for (std::size_t i = 0; i < 15; ++i) img.data()[i] = static_cast<std::uint8_t>(i * 17);
  write(img, dir / "a.pgm");
  EXPECT_EQ(read_file(dir / "a.pgm").substr(0, 11), "P5\n5 3\n255\n");
  EXPECT_EQ(read(dir / "a.pgm"), img);
}

TEST(Netpbm, ColorRoundTrip) {
  TempDir dir;
  Raster img(2, 2, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  write(img, dir / "a.ppm");
  EXPECT_EQ(read(dir / "a.ppm"), img);
}

TEST(Netpbm, HeaderCommentsAreSkipped) {
  TempDir dir;
  write_file(dir / "c.pgm", std::string("P5\n# made by hand\n2 1\n255\n") +
                                std::string("\x07\x09", 2));
  const auto img = read(dir / "c.pgm");
  EXPECT_EQ(img.at(0, 0), 7);
  EXPECT_EQ(img.at(1, 0), 9);
}

TEST(Netpbm, MalformedFilesRejected) {
  TempDir dir;
  write_file(dir / "magic.pgm", "P2\n1 1\n255\n0");
  write_file(dir / "maxval.pgm", std::string("P5\n1 1\n65535\n\0\0", 16));
  write_file(dir / "short.pgm", "P5\n4 4\n255\nab");
  for (const char* name : {"magic.pgm", "maxval.pgm", "short.pgm"}) {
    try {
      read(dir / name);
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kFormat) << name;
    }
  }
  try {
    read(dir / "missing.pgm");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Netpbm, FrameNames) {
  EXPECT_EQ(frame_filename(7, 1), "frame_000007.pgm");
  EXPECT_EQ(frame_filename(123456, 3), "frame_123456.ppm");
  EXPECT_EQ(parse_frame_filename("frame_000042.pgm"), 42);
  EXPECT_EQ(parse_frame_filename("frame_000042.ppm"), 42);
  EXPECT_FALSE(parse_frame_filename("frame_42.png").has_value());
  EXPECT_FALSE(parse_frame_filename("notes.txt").has_value());
}

TEST(Netpbm, ListFramesSortsAndIgnoresOthers) {
  TempDir dir;
  const Raster img(1, 1, 1);
  write(img, dir / frame_filename(10, 1));
  write(img, dir / frame_filename(2, 1));
  write_file(dir / "readme.txt", "x");
  const auto frames = list_frames(dir.path());
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].frame, 2);
  EXPECT_EQ(frames[1].frame, 10);
}

TEST(Netpbm, DuplicateFrameIndexRejected) {
  TempDir dir;
  write(Raster(1, 1, 1), dir / frame_filename(3, 1));
  write(Raster(1, 1, 3), dir / frame_filename(3, 3));
  EXPECT_THROW(list_frames(dir.path()), Error);
}

}  // namespace
}  // namespace lanewatch::netpbm
