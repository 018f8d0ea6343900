// kinematics.hpp -- routes, vehicle motion generation, and the geometric
// "following" predicate.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_KINEMATICS_HPP
#define POF_KINEMATICS_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pof/errors.hpp"

namespace pof {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

struct RoutePoint {
  double t = 0.0;  // seconds
  Vec2 pos;        // meters, local tangent plane
};

// Time-ordered positions of one vehicle. Immutable after construction.
class Route {
 public:
  static constexpr double kDefaultMaxSpeed = 60.0;  // m/s

  // Validates: >= 2 points, strictly increasing timestamps, consecutive-point
  // speed <= v_max.
  explicit Route(std::vector<RoutePoint> points,
                 double v_max = kDefaultMaxSpeed);

  const std::vector<RoutePoint>& points() const { return points_; }
  double start_time() const { return points_.front().t; }
  double end_time() const { return points_.back().t; }

  // Linear interpolation between bracketing points; exact at sample times.
  // Throws OutOfRangeError for t outside [start_time, end_time].
  Vec2 position_at(double t) const;

 private:
  std::vector<RoutePoint> points_;
};

// Generator for the synthetic drives used in simulations: constant speed
// along a polyline with optional positional jitter.
struct KinematicSpec {
  std::vector<Vec2> path;     // polyline, meters
  double speed = 13.3;        // m/s
  double start_offset = 0.0;  // meters along path
  double start_time = 0.0;    // seconds
  double jitter = 0.0;        // zero-mean positional noise std, meters
};

// Samples the spec at sample_dt over [start_time, start_time + duration].
// Motion past the end of the polyline continues along the last segment
// direction. jitter > 0 draws per-sample Gaussian noise from the seed.
Route make_route(const KinematicSpec& spec, double duration,
                 double sample_dt = 0.05, std::uint64_t seed = 0);

// Euclidean distance between the two interpolated positions at t.
double separation(const Route& a, const Route& b, double t);

struct FollowingResult {
  bool following = false;
  double max_separation = 0.0;
};

// Ground-truth oracle for Definition 2: separation <= d_ref at every sampled
// t over the overlap of the two spans. Throws on disjoint spans.
FollowingResult is_following(const Route& v, const Route& c, double d_ref,
                             double sample_dt = 0.05);

// Route CSV, header `t_s,x_m,y_m`.
Route load_route_csv(const std::string& path);
void save_route_csv(const Route& route, const std::string& path);

struct GeoPoint {
  double t = 0.0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

// Equirectangular projection about the trace centroid; adequate at platoon
// scales.
Route route_from_latlon(const std::vector<GeoPoint>& points);

}  // namespace pof

#endif  // POF_KINEMATICS_HPP
