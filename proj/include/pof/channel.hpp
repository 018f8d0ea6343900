// channel.hpp -- generative RF model: log-distance path loss plus a
// spatio-temporally correlated shadow-fading field plus small-scale residue.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_CHANNEL_HPP
#define POF_CHANNEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pof/kinematics.hpp"

namespace pof {

struct PathLossParams {
  double d0 = 1.0;            // reference distance, m
  double L_d0 = 40.0;         // path loss at d0, dB
  double beta = 3.0;          // path-loss exponent
  double sigma_shadow = 6.0;  // shadow-fading std, dB
  double tx_power = 43.0;     // base-station transmit power, dB

  void validate() const;
};

struct ShadowFieldParams {
  double d_corr = 53.35;     // decorrelation distance, m
  double t_corr = 2.0;       // temporal decorrelation constant, s
  std::uint64_t seed = 0;
  int num_waves = 512;       // spectral components of the fast field

  void validate() const;
};

struct RssSample {
  double t = 0.0;    // seconds
  double rss = 0.0;  // dB
};

struct RssTrace {
  std::vector<RssSample> samples;
  double rate = 20.0;  // Hz
  std::string vehicle_id;

  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }
  std::vector<double> values() const;

  // Strictly increasing timestamps with spacing 1/rate within tolerance,
  // finite values.
  void validate(double spacing_tol = 0.25) const;
};

// Deterministic part of Eq.-style log-distance loss:
//   L(d) = L(d0) + 10 * beta * log10(d / d0).
// d < d0 is clamped to d0 (near-field not modeled); *clamped flags it.
double path_loss(double d_tr, const PathLossParams& p,
                 bool* clamped = nullptr);

// Exponential spatial correlation e^(-d / d_corr).
double spatial_correlation(double d, double d_corr);

// Zero-mean Gaussian random field over (position, time) with separable
// correlation e^(-dd/d_corr) * e^(-dt/t_corr), evaluated as a superposition
// of random plane waves drawn from the matching spectral densities. Queries
// are O(num_waves), pure, and an exact function of (seed, pos, t).
class ShadowField {
 public:
  ShadowField(const ShadowFieldParams& params, double sigma_shadow);

  double sample(const Vec2& pos, double t) const;

  const ShadowFieldParams& params() const { return params_; }
  double sigma() const { return sigma_; }

 private:
  ShadowFieldParams params_;
  double sigma_;
  double amplitude_;
  std::vector<double> kx_, ky_, omega_, phase_;
};

// Slow exact reference: draws jointly Gaussian values for a fixed list of
// query points via Cholesky factorization of the model covariance. Intended
// for validation on <= 2,000 points.
class ExactShadowField {
 public:
  struct Query {
    Vec2 pos;
    double t = 0.0;
  };

  ExactShadowField(const ShadowFieldParams& params, double sigma_shadow,
                   std::vector<Query> queries);

  // One realization of the field at all query points; realization_index
  // selects an independent draw under the configured seed.
  std::vector<double> realize(std::uint64_t realization_index) const;

  std::size_t size() const { return queries_.size(); }

 private:
  ShadowFieldParams params_;
  std::vector<Query> queries_;
  std::vector<double> chol_;  // lower-triangular factor, row-major
};

// RSS collection along a route: at each sample time,
//   rss = tx_power - path_loss(distance to nearest station) - shadow + noise
// with per-sample independent small-scale residue derived from
// (seed, vehicle_id, sample index). The shadow field is shared across
// vehicles; the residue is per-receiver.
RssTrace generate_rss_trace(const Route& route,
                            const std::vector<Vec2>& stations,
                            const PathLossParams& p, const ShadowField& field,
                            double rate, double small_scale_std,
                            std::uint64_t seed,
                            const std::string& vehicle_id);

// Serial reference for the OpenMP trace generator; must be bit-identical.
RssTrace generate_rss_trace_serial(const Route& route,
                                   const std::vector<Vec2>& stations,
                                   const PathLossParams& p,
                                   const ShadowField& field, double rate,
                                   double small_scale_std, std::uint64_t seed,
                                   const std::string& vehicle_id);

}  // namespace pof

#endif  // POF_CHANNEL_HPP
