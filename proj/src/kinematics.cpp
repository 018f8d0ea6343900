// kinematics.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/kinematics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace pof {

Route::Route(std::vector<RoutePoint> points, double v_max)
    : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw InvalidArgumentError("route needs at least 2 points, got " +
                               std::to_string(points_.size()));
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double dt = points_[i].t - points_[i - 1].t;
    if (dt <= 0.0) {
      throw InvalidArgumentError("route timestamps must be strictly "
                                 "increasing (index " + std::to_string(i) +
                                 ")");
    }
    const double speed = distance(points_[i].pos, points_[i - 1].pos) / dt;
    if (!std::isfinite(speed) || speed > v_max) {
      throw InvalidArgumentError(
          "route segment speed " + std::to_string(speed) + " m/s exceeds " +
          std::to_string(v_max) + " m/s at index " + std::to_string(i));
    }
  }
}

Vec2 Route::position_at(double t) const {
  if (t < start_time() || t > end_time()) {
    throw OutOfRangeError("time " + std::to_string(t) +
                          " outside route span [" +
                          std::to_string(start_time()) + ", " +
                          std::to_string(end_time()) + "]");
  }
  auto it = std::lower_bound(
      points_.begin(), points_.end(), t,
      [](const RoutePoint& p, double v) { return p.t < v; });
  if (it == points_.begin()) return it->pos;
  const RoutePoint& hi = *it;
  const RoutePoint& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.pos + (hi.pos - lo.pos) * w;
}

namespace {

// Position at arc length s along a polyline; extrapolates along the last
// segment direction.
Vec2 polyline_at(const std::vector<Vec2>& path, double s) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double len = distance(path[i], path[i - 1]);
    if (s <= len || i == path.size() - 1) {
      const Vec2 dir = len > 0.0 ? (path[i] - path[i - 1]) * (1.0 / len)
                                 : Vec2{1.0, 0.0};
      return path[i - 1] + dir * s;
    }
    s -= len;
  }
  return path.front();
}

}  // namespace

Route make_route(const KinematicSpec& spec, double duration, double sample_dt,
                 std::uint64_t seed) {
  if (spec.path.size() < 2) {
    throw InvalidArgumentError("kinematic spec path needs >= 2 vertices");
  }
  if (spec.speed <= 0.0) {
    throw InvalidArgumentError("kinematic spec speed must be > 0");
  }
  if (spec.jitter < 0.0) {
    throw InvalidArgumentError("kinematic spec jitter must be >= 0");
  }
  if (duration <= 0.0 || sample_dt <= 0.0) {
    throw InvalidArgumentError("duration and sample_dt must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spec.jitter);
  std::vector<RoutePoint> pts;
  const std::size_t n = static_cast<std::size_t>(duration / sample_dt) + 1;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = spec.start_time + static_cast<double>(i) * sample_dt;
    Vec2 p = polyline_at(spec.path, spec.start_offset + spec.speed *
                                        (t - spec.start_time));
    if (spec.jitter > 0.0) {
      p.x += noise(rng);
      p.y += noise(rng);
    }
    pts.push_back({t, p});
  }
  // Jitter can exceed the nominal v_max between consecutive samples; allow
  // headroom for it.
  const double v_max = std::max(Route::kDefaultMaxSpeed,
                                spec.speed + 8.0 * spec.jitter / sample_dt);
  return Route(std::move(pts), v_max);
}

double separation(const Route& a, const Route& b, double t) {
  return distance(a.position_at(t), b.position_at(t));
}

FollowingResult is_following(const Route& v, const Route& c, double d_ref,
                             double sample_dt) {
  if (sample_dt <= 0.0) {
    throw InvalidArgumentError("sample_dt must be > 0");
  }
  const double t0 = std::max(v.start_time(), c.start_time());
  const double t1 = std::min(v.end_time(), c.end_time());
  if (t0 > t1) {
    throw InvalidArgumentError("route spans do not overlap");
  }
  FollowingResult r;
  r.following = true;
  for (double t = t0; t <= t1 + 1e-9; t += sample_dt) {
    const double d = separation(v, c, std::min(t, t1));
    r.max_separation = std::max(r.max_separation, d);
    if (d > d_ref) r.following = false;
  }
  return r;
}

Route load_route_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open route file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t_s,x_m,y_m", 0) != 0) {
    throw InvalidArgumentError(path + ": expected header t_s,x_m,y_m");
  }
  std::vector<RoutePoint> pts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    RoutePoint p;
    char c1 = 0, c2 = 0;
    if (!(ss >> p.t >> c1 >> p.pos.x >> c2 >> p.pos.y) || c1 != ',' ||
        c2 != ',') {
      throw InvalidArgumentError(path + ": bad row " + std::to_string(row) +
                                 ": " + line);
    }
    pts.push_back(p);
  }
  return Route(std::move(pts));
}

void save_route_csv(const Route& route, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgumentError("cannot write route file: " + path);
  out << "t_s,x_m,y_m\n";
  out.precision(9);
  for (const auto& p : route.points()) {
    out << p.t << ',' << p.pos.x << ',' << p.pos.y << '\n';
  }
}

Route route_from_latlon(const std::vector<GeoPoint>& points) {
  if (points.size() < 2) {
    throw InvalidArgumentError("need >= 2 geo points");
  }
  constexpr double kEarthRadius = 6371000.0;
  constexpr double kDeg = M_PI / 180.0;
  double lat0 = 0.0, lon0 = 0.0;
  for (const auto& g : points) {
    lat0 += g.lat_deg;
    lon0 += g.lon_deg;
  }
  lat0 /= static_cast<double>(points.size());
  lon0 /= static_cast<double>(points.size());
  const double cos_lat0 = std::cos(lat0 * kDeg);
  std::vector<RoutePoint> pts;
  pts.reserve(points.size());
  for (const auto& g : points) {
    pts.push_back({g.t,
                   {kEarthRadius * (g.lon_deg - lon0) * kDeg * cos_lat0,
                    kEarthRadius * (g.lat_deg - lat0) * kDeg}});
  }
  return Route(std::move(pts));
}

}  // namespace pof
