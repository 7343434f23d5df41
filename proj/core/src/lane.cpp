#include "lanewatch/lane.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "lanewatch/error.hpp"

namespace lanewatch::lane {
namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::kInvalidConfig, "lane_estimation", msg);
}

void check_ransac(const RansacParams& p) {
  if (p.degree != 1 && p.degree != 2) {
    config_error("polynomial degree must be 1 or 2, got " +
                 std::to_string(p.degree));
  }
  if (p.iterations < 1) config_error("RANSAC iterations must be >= 1");
  if (!(p.inlier_tol > 0.0)) config_error("inlier tolerance must be > 0");
  if (!(p.min_inlier_frac >= 0.0 && p.min_inlier_frac <= 1.0)) {
    config_error("min_inlier_frac must lie in [0, 1]");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    config_error("smoothing alpha must lie in (0, 1]");
  }
}

LanePolynomial blend(const LanePolynomial& prev, const LanePolynomial& cur,
                     double alpha) {
  LanePolynomial out = cur;
  for (std::size_t i = 0; i < 3; ++i) {
    out.coeffs[i] = alpha * cur.coeffs[i] + (1.0 - alpha) * prev.coeffs[i];
  }
  return out;
}

}  // namespace

void validate(const LaneConfig& cfg) {
  check_ransac({cfg.degree, cfg.ransac_iterations, cfg.inlier_tol,
                cfg.min_inlier_frac, cfg.ransac_seed});
  check_alpha(cfg.smoothing_alpha);
  if (cfg.max_carry < 0) config_error("max_carry must be >= 0");
}

SplitEdgePoints extract_edge_points(const Raster& edges,
                                    const RoiPolygon& roi) {
  if (edges.channels() != 1) {
    throw Error(ErrorKind::kInvalidInput, "lane_estimation",
                "edge map must be single-channel");
  }
  const std::size_t width = edges.width();
  const auto inside = roi.mask(width, edges.height());
  const double mid = static_cast<double>(width) / 2.0;
  const auto data = edges.data();
  SplitEdgePoints out;
  for (std::size_t y = 0; y < edges.height(); ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      if (data[i] == 0 || !inside[i]) continue;
      const Point2 p{static_cast<double>(x), static_cast<double>(y)};
      (p.x < mid ? out.left : out.right).points.push_back(p);
    }
  }
  return out;
}

std::optional<std::array<double, 3>> least_squares_fit(
    const std::vector<Point2>& points, int degree) {
  const auto terms = static_cast<Eigen::Index>(degree + 1);
  std::set<double> rows;
  double scale = 1.0;
  for (const auto& p : points) {
    rows.insert(p.y);
    scale = std::max(scale, std::abs(p.y));
  }
  if (static_cast<Eigen::Index>(rows.size()) < terms) return std::nullopt;

  // Columns are powers of y/scale to keep the system well conditioned.
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, terms);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = points[static_cast<std::size_t>(i)].y / scale;
    double power = 1.0;
    for (Eigen::Index k = terms - 1; k >= 0; --k) {
      design(i, k) = power;
      power *= t;
    }
    target(i) = points[static_cast<std::size_t>(i)].x;
  }
  const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(target);

  std::array<double, 3> coeffs{0.0, 0.0, 0.0};
  if (degree == 2) {
    coeffs[0] = sol(0) / (scale * scale);
    coeffs[1] = sol(1) / scale;
    coeffs[2] = sol(2);
  } else {
    coeffs[1] = sol(0) / scale;
    coeffs[2] = sol(1);
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) return std::nullopt;
  }
  return coeffs;
}

std::optional<LanePolynomial> ransac_polyfit(const EdgePointSet& points,
                                             const RansacParams& params) {
  check_ransac(params);
  const auto& pts = points.points;
  const auto sample_size = static_cast<std::size_t>(params.degree + 1);
  if (pts.size() < sample_size) return std::nullopt;

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);

  const auto eval = [](const std::array<double, 3>& c, double y) {
    return (c[0] * y + c[1]) * y + c[2];
  };

  std::vector<std::size_t> best_inliers;
  std::vector<std::size_t> inliers;
  std::vector<std::size_t> sample_idx;
  std::vector<Point2> sample;
  for (int it = 0; it < params.iterations; ++it) {
    sample_idx.clear();
    while (sample_idx.size() < sample_size) {
      const std::size_t i = pick(rng);
      if (std::find(sample_idx.begin(), sample_idx.end(), i) ==
          sample_idx.end()) {
        sample_idx.push_back(i);
      }
    }
    sample.clear();
    for (auto i : sample_idx) sample.push_back(pts[i]);
    const auto hypothesis = least_squares_fit(sample, params.degree);
    if (!hypothesis) continue;  // repeated rows, no unique x(y)

    inliers.clear();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(pts[i].x - eval(*hypothesis, pts[i].y)) <=
          params.inlier_tol) {
        inliers.push_back(i);
      }
    }
    if (inliers.size() > best_inliers.size()) best_inliers.swap(inliers);
  }

  const double needed =
      params.min_inlier_frac * static_cast<double>(pts.size());
  if (best_inliers.size() < sample_size ||
      static_cast<double>(best_inliers.size()) < needed) {
    return std::nullopt;
  }

  std::vector<Point2> consensus;
  consensus.reserve(best_inliers.size());
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (auto i : best_inliers) {
    consensus.push_back(pts[i]);
    y_min = std::min(y_min, pts[i].y);
    y_max = std::max(y_max, pts[i].y);
  }
  const auto refit = least_squares_fit(consensus, params.degree);
  if (!refit || !(y_min < y_max)) return std::nullopt;

  LanePolynomial out;
  out.coeffs = *refit;
  out.inlier_count = best_inliers.size();
  out.y_min = y_min;
  out.y_max = y_max;
  return out;
}

LaneModel build_lane_model(const LanePolynomial& left,
                           const LanePolynomial& right, FrameIndex frame) {
  const double lo = std::max(left.y_min, right.y_min);
  const double hi = std::min(left.y_max, right.y_max);
  if (!(lo < hi)) {
    throw Error(ErrorKind::kGeometry, "lane_estimation",
                "left and right boundary domains do not overlap");
  }
  const auto check_row = [&](double y) {
    if (!(left.at(y) < right.at(y))) {
      throw Error(ErrorKind::kGeometry, "lane_estimation",
                  "left boundary meets or crosses right boundary at y=" +
                      std::to_string(y));
    }
  };
  check_row(lo);
  check_row(hi);
  for (double y = std::ceil(lo); y <= hi; y += 1.0) check_row(y);

  LaneModel model;
  model.left = left;
  model.right = right;
  model.frame = frame;
  for (std::size_t i = 0; i < 3; ++i) {
    model.center.coeffs[i] = (left.coeffs[i] + right.coeffs[i]) / 2.0;
  }
  model.center.inlier_count = std::min(left.inlier_count, right.inlier_count);
  model.center.y_min = lo;
  model.center.y_max = hi;
  return model;
}

std::optional<LaneModel> smooth_lane_model(
    const std::optional<LaneModel>& previous,
    const std::optional<LaneModel>& current, double alpha) {
  check_alpha(alpha);
  if (!current) return previous;
  if (!previous) return current;
  try {
    return build_lane_model(blend(previous->left, current->left, alpha),
                            blend(previous->right, current->right, alpha),
                            current->frame);
  } catch (const Error&) {
    return current;
  }
}

LaneSmoother::LaneSmoother(double alpha, int max_carry)
    : alpha_(alpha), max_carry_(max_carry) {
  check_alpha(alpha);
  if (max_carry < 0) config_error("max_carry must be >= 0");
}

std::optional<LaneModel> LaneSmoother::update(
    const std::optional<LaneModel>& current, FrameIndex /*frame*/) {
  if (current) {
    last_ = smooth_lane_model(last_, current, alpha_);
    carried_ = 0;
    return last_;
  }
  if (last_ && carried_ < max_carry_) {
    ++carried_;
    return last_;
  }
  last_.reset();
  return std::nullopt;
}

OffCenter off_center_distance(const LaneModel& model, const Point2& centroid,
                              OffCenterMode mode) {
  const auto& center = model.center;
  const double first = std::ceil(center.y_min);
  const double last = std::floor(center.y_max);
  if (!(center.y_min < center.y_max) || first > last) {
    throw Error(ErrorKind::kGeometry, "lane_estimation",
                "lane centerline has an empty domain");
  }

  OffCenter out;
  if (mode == OffCenterMode::kHorizontal) {
    const double y = std::clamp(centroid.y, center.y_min, center.y_max);
    out.closest = {center.at(y), y};
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (double y = first; y <= last; y += 1.0) {
      const double dx = centroid.x - center.at(y);
      const double dy = centroid.y - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        out.closest = {center.at(y), y};
      }
    }
  }
  const double magnitude = std::hypot(centroid.x - out.closest.x,
                                      centroid.y - out.closest.y);
  out.distance = centroid.x < out.closest.x ? -magnitude : magnitude;
  return out;
}

std::optional<LaneModel> estimate_lane(const Raster& edges,
                                       const RoiPolygon& roi,
                                       const LaneConfig& cfg,
                                       FrameIndex frame) {
  const auto split = extract_edge_points(edges, roi);
  RansacParams params{cfg.degree, cfg.ransac_iterations, cfg.inlier_tol,
                      cfg.min_inlier_frac, 0};
  const auto base = cfg.ransac_seed + 2 * static_cast<std::uint64_t>(frame);
  params.seed = base;
  const auto left = ransac_polyfit(split.left, params);
  params.seed = base + 1;
  const auto right = ransac_polyfit(split.right, params);
  if (!left || !right) return std::nullopt;
  try {
    return build_lane_model(*left, *right, frame);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kGeometry) throw;
    return std::nullopt;
  }
}

}  // namespace lanewatch::lane
