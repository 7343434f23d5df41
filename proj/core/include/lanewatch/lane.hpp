#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "lanewatch/raster.hpp"
#include "lanewatch/types.hpp"

namespace lanewatch::lane {

// x(y) = a*y^2 + b*y + c in pixel units, valid on rows [y_min, y_max].
struct LanePolynomial {
  std::array<double, 3> coeffs{0.0, 0.0, 0.0};
  std::size_t inlier_count = 0;
  double y_min = 0.0;
  double y_max = 0.0;

  double at(double y) const {
    return (coeffs[0] * y + coeffs[1]) * y + coeffs[2];
  }

  friend bool operator==(const LanePolynomial&,
                         const LanePolynomial&) = default;
};

struct LaneModel {
  LanePolynomial left;
  LanePolynomial right;
  LanePolynomial center;
  FrameIndex frame = 0;

  friend bool operator==(const LaneModel&, const LaneModel&) = default;
};

struct EdgePointSet {
  std::vector<Point2> points;
};

struct SplitEdgePoints {
  EdgePointSet left;
  EdgePointSet right;
};

enum class OffCenterMode { kEuclidean, kHorizontal };

struct LaneConfig {
  int degree = 2;
  int ransac_iterations = 200;
  // Covers both Canny flanks of a thin painted stroke.
  double inlier_tol = 3.0;
  double min_inlier_frac = 0.3;
  std::uint64_t ransac_seed = 0;
  double smoothing_alpha = 0.4;
  int max_carry = 15;
  OffCenterMode offcenter_mode = OffCenterMode::kEuclidean;
};

void validate(const LaneConfig& cfg);

struct RansacParams {
  int degree = 2;
  int iterations = 200;
  double inlier_tol = 2.0;
  double min_inlier_frac = 0.3;
  std::uint64_t seed = 0;
};

// Nonzero pixels inside the ROI; x < width/2 goes left, everything else right.
SplitEdgePoints extract_edge_points(const Raster& edges,
                                    const RoiPolygon& roi);

// Least-squares fit of x(y) of the given degree (1 or 2). Returns nullopt
// when fewer than degree+1 distinct rows are available.
std::optional<std::array<double, 3>> least_squares_fit(
    const std::vector<Point2>& points, int degree);

// RANSAC over minimal (degree+1)-point samples, least-squares refit on the
// best consensus set. Deterministic for a fixed seed.
std::optional<LanePolynomial> ransac_polyfit(const EdgePointSet& points,
                                             const RansacParams& params);

// Throws Error(kGeometry) if the boundaries do not overlap or touch/cross on
// the shared domain.
LaneModel build_lane_model(const LanePolynomial& left,
                           const LanePolynomial& right, FrameIndex frame);

// Exponential blend of boundary coefficients; the current domain is kept.
std::optional<LaneModel> smooth_lane_model(
    const std::optional<LaneModel>& previous,
    const std::optional<LaneModel>& current, double alpha);

// Temporal smoothing with bounded carry-forward of the last model when the
// current frame yields none.
class LaneSmoother {
 public:
  LaneSmoother(double alpha, int max_carry);

  std::optional<LaneModel> update(const std::optional<LaneModel>& current,
                                  FrameIndex frame);
  const std::optional<LaneModel>& last() const noexcept { return last_; }

 private:
  double alpha_;
  int max_carry_;
  int carried_ = 0;
  std::optional<LaneModel> last_;
};

struct OffCenter {
  double distance = 0.0;  // signed: positive when the centroid is right
  Point2 closest;
};

// Closest point on the centerline sampled at integer rows of its domain.
OffCenter off_center_distance(const LaneModel& model, const Point2& centroid,
                              OffCenterMode mode = OffCenterMode::kEuclidean);

// Full per-frame estimate from an edge map: split, fit both sides, build.
// Returns nullopt when either side has no fit or the geometry is rejected.
std::optional<LaneModel> estimate_lane(const Raster& edges,
                                       const RoiPolygon& roi,
                                       const LaneConfig& cfg, FrameIndex frame);

}  // namespace lanewatch::lane
