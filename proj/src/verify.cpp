// verify.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/verify.hpp"

#include <algorithm>
#include <cmath>

namespace pof {

void PofParams::validate() const {
  if (N < 2 || N % 2 != 0) throw InvalidArgumentError("N must be even >= 2");
  if (M < 1) throw InvalidArgumentError("M must be >= 1");
  if (N < 2 * M) throw InvalidArgumentError("N must be >= 2M");
  if (K < 1) throw InvalidArgumentError("K must be >= 1");
  if (tau < 0.0 || tau > 1.0) {
    throw InvalidArgumentError("tau must be in [0, 1]");
  }
  const std::size_t need = required_passes(alpha, K);
  if (need < 1 || need > K) {
    throw InvalidArgumentError("ceil(alpha*K) must be in [1, K]");
  }
}

std::size_t required_passes(double alpha, std::size_t K) {
  const double raw = alpha * static_cast<double>(K);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

std::vector<double> correlation_tests(const AlignedPair& pair,
                                      const PofParams& p) {
  p.validate();
  const std::size_t need = p.required_samples();
  if (pair.a.size() < need) {
    throw InvalidArgumentError(
        "insufficient aligned samples: need " + std::to_string(need) +
        ", have " + std::to_string(pair.a.size()));
  }
  const auto sub_a =
      split_subsets(std::span<const double>(pair.a).first(need), p.N);
  const auto sub_b =
      split_subsets(std::span<const double>(pair.b).first(need), p.N);
  std::vector<double> rhos;
  rhos.reserve(p.K);
  for (std::size_t k = 0; k < p.K; ++k) {
    const auto sa = moving_average(sub_a[k], p.M);
    const auto sb = moving_average(sub_b[k], p.M);
    const auto rho = pearson(sa, sb);
    rhos.push_back(rho.value_or(-1.0));  // degenerate subset counts as failed
  }
  return rhos;
}

PofDecision decide(const std::vector<double>& rhos, double tau, double alpha) {
  if (rhos.empty()) throw InvalidArgumentError("empty rho list");
  PofDecision d;
  d.rhos = rhos;
  for (double r : rhos) {
    if (r >= tau) ++d.passed_count;
  }
  d.accept = d.passed_count >= required_passes(alpha, rhos.size());
  return d;
}

double pass_probability(double f, std::size_t K, double alpha) {
  if (f < 0.0 || f > 1.0) throw InvalidArgumentError("f must be in [0, 1]");
  if (K < 1) throw InvalidArgumentError("K must be >= 1");
  const std::size_t m = required_passes(alpha, K);
  if (m > K) return 0.0;
  if (m == 0) return 1.0;
  if (f == 0.0) return 0.0;
  if (f == 1.0) return 1.0;
  // Sum log-space binomial terms from the largest one outward.
  const double lf = std::log(f);
  const double l1f = std::log1p(-f);
  const double n = static_cast<double>(K);
  double total = 0.0;
  for (std::size_t x = m; x <= K; ++x) {
    const double xv = static_cast<double>(x);
    const double lterm = std::lgamma(n + 1.0) - std::lgamma(xv + 1.0) -
                         std::lgamma(n - xv + 1.0) + xv * lf +
                         (n - xv) * l1f;
    total += std::exp(lterm);
  }
  return std::min(total, 1.0);
}

double model_threshold(double d_ref, double d_corr) {
  if (d_ref < 0.0) throw InvalidArgumentError("d_ref must be >= 0");
  if (d_corr <= 0.0) throw InvalidArgumentError("d_corr must be > 0");
  return std::exp(-d_ref / d_corr);
}

double estimate_pass_rate(const std::vector<double>& train, double tau) {
  if (train.empty()) throw InvalidArgumentError("empty training rho list");
  std::size_t pass = 0;
  for (double r : train) {
    if (r >= tau) ++pass;
  }
  return static_cast<double>(pass) / static_cast<double>(train.size());
}

namespace {

struct Candidate {
  TunedParams p;
  bool valid = false;

  // Lexicographic preference: smaller EER, then smaller K, then larger
  // F_C - F_M gap, then smaller tau.
  bool better_than(const Candidate& o) const {
    if (!o.valid) return valid;
    if (!valid) return false;
    if (p.eer != o.p.eer) return p.eer < o.p.eer;
    if (p.K != o.p.K) return p.K < o.p.K;
    const double gap = pass_probability(p.f_C, p.K, p.alpha) -
                       pass_probability(p.f_M, p.K, p.alpha);
    const double ogap = pass_probability(o.p.f_C, o.p.K, o.p.alpha) -
                        pass_probability(o.p.f_M, o.p.K, o.p.alpha);
    if (gap != ogap) return gap > ogap;
    return p.tau < o.p.tau;
  }
};

Candidate best_for_tau(double tau, double f_C, double f_M,
                       std::size_t K_max) {
  Candidate best;
  for (std::size_t K = 1; K <= K_max; ++K) {
    for (std::size_t j = 1; j <= K; ++j) {
      TunedParams t;
      t.tau = tau;
      t.K = K;
      t.alpha = static_cast<double>(j) / static_cast<double>(K);
      t.f_C = f_C;
      t.f_M = f_M;
      const double F_C = pass_probability(f_C, K, t.alpha);
      const double F_M = pass_probability(f_M, K, t.alpha);
      t.eer = std::max(1.0 - F_C, F_M);
      Candidate c{t, true};
      if (c.better_than(best)) best = c;
    }
  }
  return best;
}

template <bool Parallel>
TunedParams tune_impl(const std::vector<double>& train_C,
                      const std::vector<double>& train_M, std::size_t K_max) {
  if (train_C.empty() || train_M.empty()) {
    throw InvalidArgumentError("both training rho sets must be nonempty");
  }
  if (K_max < 1) throw InvalidArgumentError("K_max must be >= 1");

  struct TauPoint {
    double tau, f_C, f_M;
  };
  std::vector<TauPoint> grid;
  for (int j = 1; j <= 99; ++j) {
    const double tau = 0.01 * j;
    const double f_C = estimate_pass_rate(train_C, tau);
    const double f_M = estimate_pass_rate(train_M, tau);
    if (f_C > 0.5 && f_M < 0.5) grid.push_back({tau, f_C, f_M});
  }
  if (grid.empty()) {
    throw InseparableTrainingError(
        "no tau satisfies f_C > 0.5 and f_M < 0.5; training distributions "
        "are inseparable");
  }

  std::vector<Candidate> per_tau(grid.size());
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(grid.size()); ++i) {
    per_tau[i] = best_for_tau(grid[i].tau, grid[i].f_C, grid[i].f_M, K_max);
  }
  Candidate best;
  for (const auto& c : per_tau) {
    if (c.better_than(best)) best = c;
  }
  return best.p;
}

}  // namespace

TunedParams tune(const std::vector<double>& train_C,
                 const std::vector<double>& train_M, std::size_t K_max) {
  return tune_impl<true>(train_C, train_M, K_max);
}

TunedParams tune_serial(const std::vector<double>& train_C,
                        const std::vector<double>& train_M,
                        std::size_t K_max) {
  return tune_impl<false>(train_C, train_M, K_max);
}

TunedParams tune_alpha_for_gap(const std::vector<double>& train_C,
                               const std::vector<double>& train_M, double tau,
                               std::size_t K) {
  if (K < 1) throw InvalidArgumentError("K must be >= 1");
  TunedParams best;
  best.tau = tau;
  best.K = K;
  best.f_C = estimate_pass_rate(train_C, tau);
  best.f_M = estimate_pass_rate(train_M, tau);
  double best_gap = -2.0;
  for (std::size_t j = 1; j <= K; ++j) {
    const double alpha = static_cast<double>(j) / static_cast<double>(K);
    const double F_C = pass_probability(best.f_C, K, alpha);
    const double F_M = pass_probability(best.f_M, K, alpha);
    if (F_C - F_M > best_gap) {
      best_gap = F_C - F_M;
      best.alpha = alpha;
      best.eer = std::max(1.0 - F_C, F_M);
    }
  }
  return best;
}

}  // namespace pof
