// test_kinematics.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "pof/kinematics.hpp"

using namespace pof;

namespace {

Route two_point_route() {
  return Route({{0.0, {0.0, 0.0}}, {1.0, {10.0, 0.0}}});
}

Route straight_route(double y_offset, double t0 = 0.0, double t1 = 100.0) {
  return Route({{t0, {0.0, y_offset}}, {t1, {10.0 * (t1 - t0), y_offset}}});
}

}  // namespace

TEST_CASE("position_at interpolates linearly") {
  const Route r = two_point_route();
  CHECK(r.position_at(0.5).x == doctest::Approx(5.0));
  CHECK(r.position_at(0.5).y == doctest::Approx(0.0));
  CHECK(r.position_at(1.0).x == doctest::Approx(10.0));

  const Route bent({{0.0, {0.0, 0.0}}, {1.0, {10.0, 0.0}}, {3.0, {10.0, 20.0}}});
  const Vec2 p = bent.position_at(2.0);
  CHECK(p.x == doctest::Approx(10.0));
  CHECK(p.y == doctest::Approx(10.0));
}

TEST_CASE("position_at rejects out-of-span queries") {
  const Route r = two_point_route();
  CHECK_THROWS_AS(r.position_at(-0.1), OutOfRangeError);
  CHECK_THROWS_AS(r.position_at(1.1), OutOfRangeError);
}

TEST_CASE("route construction enforces invariants") {
  CHECK_THROWS_AS(Route(std::vector<RoutePoint>{{0.0, {0.0, 0.0}}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(Route({{1.0, {0.0, 0.0}}, {1.0, {1.0, 0.0}}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(Route({{1.0, {0.0, 0.0}}, {0.5, {1.0, 0.0}}}),
                  InvalidArgumentError);
  // 100 m in 1 s exceeds the default 60 m/s cap.
  CHECK_THROWS_AS(Route({{0.0, {0.0, 0.0}}, {1.0, {100.0, 0.0}}}),
                  InvalidArgumentError);
  CHECK_NOTHROW(Route({{0.0, {0.0, 0.0}}, {1.0, {100.0, 0.0}}}, 200.0));
}

TEST_CASE("separation basics") {
  const Route a = straight_route(0.0);
  SUBCASE("identical routes") {
    for (double t : {0.0, 17.3, 99.0}) {
      CHECK(separation(a, a, t) == doctest::Approx(0.0));
    }
  }
  SUBCASE("parallel offset 20 m") {
    const Route b = straight_route(20.0);
    for (double t : {0.0, 42.0, 100.0}) {
      CHECK(separation(a, b, t) == doctest::Approx(20.0));
    }
  }
  SUBCASE("symmetry") {
    const Route b = straight_route(7.0);
    for (double t : {1.0, 50.0}) {
      CHECK(separation(a, b, t) == doctest::Approx(separation(b, a, t)));
    }
  }
}

TEST_CASE("same path with start offsets 40 m apart keeps separation 40") {
  KinematicSpec lead;
  lead.path = {{0.0, 0.0}, {5000.0, 0.0}};
  lead.speed = 13.3;
  lead.start_offset = 100.0;
  KinematicSpec follow = lead;
  follow.start_offset = 60.0;
  const Route rl = make_route(lead, 120.0);
  const Route rf = make_route(follow, 120.0);
  for (double t : {0.0, 33.0, 120.0}) {
    CHECK(separation(rl, rf, t) == doctest::Approx(40.0).epsilon(1e-9));
  }
}

TEST_CASE("is_following thresholds") {
  const Route v = straight_route(0.0);
  CHECK(is_following(v, straight_route(20.0), 25.0).following);
  CHECK_FALSE(is_following(v, straight_route(40.0), 25.0).following);
  CHECK(is_following(v, v, 0.0).following);

  // Lateral gap ramping 10 -> 30 m.
  const Route ramp({{0.0, {0.0, 10.0}}, {100.0, {1000.0, 30.0}}});
  const FollowingResult fr = is_following(v, ramp, 25.0);
  CHECK_FALSE(fr.following);
  CHECK(fr.max_separation == doctest::Approx(30.0).epsilon(1e-3));
}

TEST_CASE("is_following rejects disjoint spans") {
  const Route a = straight_route(0.0, 0.0, 10.0);
  const Route b = straight_route(0.0, 20.0, 30.0);
  CHECK_THROWS_AS(is_following(a, b, 10.0), InvalidArgumentError);
}

TEST_CASE("separation invariant under joint translation") {
  const Route a = straight_route(0.0);
  const Route b = straight_route(15.0);
  const Vec2 shift{123.0, -77.0};
  auto translate = [&](const Route& r) {
    std::vector<RoutePoint> pts;
    for (const auto& p : r.points()) pts.push_back({p.t, p.pos + shift});
    return Route(std::move(pts), 1e9);
  };
  const Route at = translate(a), bt = translate(b);
  for (double t : {0.0, 31.0, 100.0}) {
    CHECK(separation(a, b, t) == doctest::Approx(separation(at, bt, t)));
  }
}

TEST_CASE("make_route jitter is seeded and bounded in effect") {
  KinematicSpec spec;
  spec.path = {{0.0, 0.0}, {5000.0, 0.0}};
  spec.jitter = 1.0;
  const Route a = make_route(spec, 30.0, 0.05, 9);
  const Route b = make_route(spec, 30.0, 0.05, 9);
  const Route c = make_route(spec, 30.0, 0.05, 10);
  CHECK(a.points()[100].pos.x == b.points()[100].pos.x);
  CHECK(a.points()[100].pos.x != c.points()[100].pos.x);
}

TEST_CASE("route CSV round trip") {
  const Route r = straight_route(3.5);
  const std::string path =
      (std::filesystem::temp_directory_path() / "pof_route_rt.csv").string();
  save_route_csv(r, path);
  const Route back = load_route_csv(path);
  REQUIRE(back.points().size() == r.points().size());
  for (std::size_t i = 0; i < back.points().size(); ++i) {
    CHECK(back.points()[i].t == doctest::Approx(r.points()[i].t));
    CHECK(back.points()[i].pos.x == doctest::Approx(r.points()[i].pos.x));
    CHECK(back.points()[i].pos.y == doctest::Approx(r.points()[i].pos.y));
  }
  std::filesystem::remove(path);
}

TEST_CASE("lat/lon ingestion preserves small-scale distances") {
  // 0.001 deg of latitude is about 111.2 m.
  std::vector<GeoPoint> pts = {{0.0, 45.0, 7.0}, {10.0, 45.001, 7.0}};
  const Route r = route_from_latlon(pts);
  const double d = distance(r.points()[0].pos, r.points()[1].pos);
  CHECK(d == doctest::Approx(111.2).epsilon(0.01));
}
