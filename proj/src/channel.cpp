// channel.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/channel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace pof {

void PathLossParams::validate() const {
  if (d0 <= 0.0) throw InvalidArgumentError("d0 must be > 0");
  if (beta <= 0.0) throw InvalidArgumentError("beta must be > 0");
  if (sigma_shadow < 0.0) {
    throw InvalidArgumentError("sigma_shadow must be >= 0");
  }
}

void ShadowFieldParams::validate() const {
  if (d_corr <= 0.0) throw InvalidArgumentError("d_corr must be > 0");
  if (t_corr <= 0.0) throw InvalidArgumentError("t_corr must be > 0");
  if (num_waves < 1) throw InvalidArgumentError("num_waves must be >= 1");
}

std::vector<double> RssTrace::values() const {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.rss);
  return v;
}

void RssTrace::validate(double spacing_tol) const {
  if (samples.empty()) throw InvalidArgumentError("empty RSS trace");
  if (rate <= 0.0) throw InvalidArgumentError("trace rate must be > 0");
  const double dt = 1.0 / rate;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].rss)) {
      throw InvalidArgumentError("non-finite RSS at index " +
                                 std::to_string(i));
    }
    if (i > 0) {
      const double gap = samples[i].t - samples[i - 1].t;
      if (gap <= 0.0 || std::abs(gap - dt) > spacing_tol * dt) {
        throw InvalidArgumentError("irregular sample spacing at index " +
                                   std::to_string(i));
      }
    }
  }
}

double path_loss(double d_tr, const PathLossParams& p, bool* clamped) {
  p.validate();
  bool clip = d_tr < p.d0;
  if (clamped) *clamped = clip;
  const double d = clip ? p.d0 : d_tr;
  return p.L_d0 + 10.0 * p.beta * std::log10(d / p.d0);
}

double spatial_correlation(double d, double d_corr) {
  if (d < 0.0) throw InvalidArgumentError("distance must be >= 0");
  if (d_corr <= 0.0) throw InvalidArgumentError("d_corr must be > 0");
  return std::exp(-d / d_corr);
}

ShadowField::ShadowField(const ShadowFieldParams& params, double sigma_shadow)
    : params_(params), sigma_(sigma_shadow) {
  params_.validate();
  if (sigma_shadow < 0.0) {
    throw InvalidArgumentError("sigma_shadow must be >= 0");
  }
  const int n = params_.num_waves;
  amplitude_ = sigma_ * std::sqrt(2.0 / static_cast<double>(n));
  kx_.resize(n);
  ky_.resize(n);
  omega_.resize(n);
  phase_.resize(n);
  std::mt19937_64 rng(params_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int j = 0; j < n; ++j) {
    // Radial wavenumber from the 2-D spectral density of e^(-r/d_corr):
    // P(|k| <= kappa) = 1 - (1 + (d_corr*kappa)^2)^(-1/2).
    const double u = unit(rng);
    const double inv = 1.0 / (1.0 - u);
    const double kappa = std::sqrt(inv * inv - 1.0) / params_.d_corr;
    const double theta = 2.0 * M_PI * unit(rng);
    kx_[j] = kappa * std::cos(theta);
    ky_[j] = kappa * std::sin(theta);
    // Temporal frequency: e^(-|dt|/t_corr) is the characteristic function of
    // a Cauchy distribution with scale 1/t_corr.
    omega_[j] = std::tan(M_PI * (unit(rng) - 0.5)) / params_.t_corr;
    phase_[j] = 2.0 * M_PI * unit(rng);
  }
}

double ShadowField::sample(const Vec2& pos, double t) const {
  double acc = 0.0;
  const int n = params_.num_waves;
  for (int j = 0; j < n; ++j) {
    acc += std::cos(kx_[j] * pos.x + ky_[j] * pos.y + omega_[j] * t +
                    phase_[j]);
  }
  return amplitude_ * acc;
}

ExactShadowField::ExactShadowField(const ShadowFieldParams& params,
                                   double sigma_shadow,
                                   std::vector<Query> queries)
    : params_(params), queries_(std::move(queries)) {
  params_.validate();
  const std::size_t n = queries_.size();
  if (n == 0) throw InvalidArgumentError("exact field needs >= 1 query");
  if (n > 2000) {
    throw InvalidArgumentError("exact field limited to 2000 query points");
  }
  Eigen::MatrixXd cov(n, n);
  const double var = sigma_shadow * sigma_shadow;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double dd = distance(queries_[i].pos, queries_[j].pos);
      const double dt = std::abs(queries_[i].t - queries_[j].t);
      double c = var * std::exp(-dd / params_.d_corr - dt / params_.t_corr);
      if (i == j) c += 1e-10;  // jitter for numerical rank
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error("covariance Cholesky factorization failed");
  }
  Eigen::MatrixXd L = llt.matrixL();
  chol_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) chol_[i * n + j] = L(i, j);
  }
}

std::vector<double> ExactShadowField::realize(
    std::uint64_t realization_index) const {
  const std::size_t n = queries_.size();
  std::mt19937_64 rng(params_.seed ^ (0x9e3779b97f4a7c15ULL *
                                      (realization_index + 1)));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> g(n);
  for (auto& v : g) v = normal(rng);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += chol_[i * n + j] * g[j];
    out[i] = acc;
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Counter-based standard normal: deterministic per (stream, index) so samples
// can be generated in any order.
double counter_normal(std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t a = splitmix64(stream ^ splitmix64(index));
  const std::uint64_t b = splitmix64(a);
  const double u1 =
      (static_cast<double>(a >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  const double u2 =
      static_cast<double>(b >> 11) * (1.0 / 9007199254740992.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double nearest_station_distance(const Vec2& pos,
                                const std::vector<Vec2>& stations) {
  double best = distance(pos, stations.front());
  for (std::size_t i = 1; i < stations.size(); ++i) {
    best = std::min(best, distance(pos, stations[i]));
  }
  return best;
}

template <bool Parallel>
RssTrace generate_impl(const Route& route, const std::vector<Vec2>& stations,
                       const PathLossParams& p, const ShadowField& field,
                       double rate, double small_scale_std,
                       std::uint64_t seed, const std::string& vehicle_id) {
  p.validate();
  if (stations.empty()) throw InvalidArgumentError("empty station list");
  if (rate <= 0.0) throw InvalidArgumentError("rate must be > 0");
  if (small_scale_std < 0.0) {
    throw InvalidArgumentError("small_scale_std must be >= 0");
  }
  const double span = route.end_time() - route.start_time();
  if (span < 1.0 / rate) {
    throw InvalidArgumentError("route span shorter than one sample period");
  }
  const std::int64_t n = static_cast<std::int64_t>(span * rate) + 1;
  const std::uint64_t stream = splitmix64(seed ^ fnv1a(vehicle_id));

  RssTrace trace;
  trace.rate = rate;
  trace.vehicle_id = vehicle_id;
  trace.samples.resize(n);
  RssSample* out = trace.samples.data();

#pragma omp parallel for schedule(static) if (Parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = route.start_time() + static_cast<double>(i) / rate;
    const Vec2 pos = route.position_at(std::min(t, route.end_time()));
    const double loss = path_loss(nearest_station_distance(pos, stations), p);
    double rss = p.tx_power - loss - field.sample(pos, t);
    if (small_scale_std > 0.0) {
      rss += small_scale_std * counter_normal(stream, i);
    }
    out[i] = {t, rss};
  }
  return trace;
}

}  // namespace

RssTrace generate_rss_trace(const Route& route,
                            const std::vector<Vec2>& stations,
                            const PathLossParams& p, const ShadowField& field,
                            double rate, double small_scale_std,
                            std::uint64_t seed,
                            const std::string& vehicle_id) {
  return generate_impl<true>(route, stations, p, field, rate, small_scale_std,
                             seed, vehicle_id);
}

RssTrace generate_rss_trace_serial(const Route& route,
                                   const std::vector<Vec2>& stations,
                                   const PathLossParams& p,
                                   const ShadowField& field, double rate,
                                   double small_scale_std, std::uint64_t seed,
                                   const std::string& vehicle_id) {
  return generate_impl<false>(route, stations, p, field, rate,
                              small_scale_std, seed, vehicle_id);
}

}  // namespace pof
