// bench_main.cpp -- wall-clock comparison of the OpenMP kernels against
// their serial references, with an equality check on the results.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <chrono>
#include <cstdio>
#include <random>

#include "pof/channel.hpp"
#include "pof/verify.hpp"

namespace {

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
  using namespace pof;

  // Trace generation: one long drive.
  KinematicSpec spec;
  spec.path = {{0.0, 0.0}, {60000.0, 0.0}};
  spec.speed = 13.3;
  const Route route = make_route(spec, 3000.0);
  const std::vector<Vec2> stations = {{0.0, 400.0}, {20000.0, -400.0}};
  const PathLossParams pl;
  const ShadowField field(ShadowFieldParams{}, pl.sigma_shadow);

  RssTrace par, ser;
  const double t_par = time_ms([&] {
    par = generate_rss_trace(route, stations, pl, field, 20.0, 4.0, 7,
                             "bench");
  });
  const double t_ser = time_ms([&] {
    ser = generate_rss_trace_serial(route, stations, pl, field, 20.0, 4.0, 7,
                                    "bench");
  });
  bool same = par.samples.size() == ser.samples.size();
  for (std::size_t i = 0; same && i < par.samples.size(); ++i) {
    same = par.samples[i].rss == ser.samples[i].rss;
  }
  std::printf("trace_gen   %zu samples  openmp %.1f ms  serial %.1f ms  "
              "speedup %.2fx  identical %s\n",
              par.samples.size(), t_par, t_ser, t_ser / t_par,
              same ? "yes" : "NO");

  // EER grid search on synthetic training clouds.
  std::mt19937_64 rng(42);
  std::normal_distribution<double> dc(0.7, 0.12), dm(0.25, 0.12);
  std::vector<double> train_C(20000), train_M(20000);
  for (auto& x : train_C) x = dc(rng);
  for (auto& x : train_M) x = dm(rng);

  TunedParams tp_par, tp_ser;
  const double g_par = time_ms([&] { tp_par = tune(train_C, train_M); });
  const double g_ser =
      time_ms([&] { tp_ser = tune_serial(train_C, train_M); });
  const bool tune_same = tp_par.tau == tp_ser.tau && tp_par.K == tp_ser.K &&
                         tp_par.alpha == tp_ser.alpha &&
                         tp_par.eer == tp_ser.eer;
  std::printf("tune        %zu+%zu samples  openmp %.1f ms  serial %.1f ms  "
              "speedup %.2fx  identical %s\n",
              train_C.size(), train_M.size(), g_par, g_ser, g_ser / g_par,
              tune_same ? "yes" : "NO");
  return (same && tune_same) ? 0 : 1;
}
