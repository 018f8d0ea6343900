// verify.hpp -- per-subset correlation tests, K-of-alpha acceptance, binomial
// passing probability, and EER-minimizing parameter search.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_VERIFY_HPP
#define POF_VERIFY_HPP

#include <cstddef>
#include <vector>

#include "pof/sigproc.hpp"

namespace pof {

struct PofParams {
  std::size_t N = 400;  // subset length, samples
  std::size_t M = 20;   // smoothing window
  std::size_t K = 20;   // number of correlation tests
  double tau = 0.35;    // single-test threshold
  double alpha = 0.55;  // required passing fraction

  void validate() const;
  std::size_t required_samples() const { return pof::required_samples(K, N); }
};

struct PofDecision {
  std::vector<double> rhos;
  std::size_t passed_count = 0;
  bool accept = false;
};

// ceil(alpha * K) with protection against floating-point representation of
// alpha = j/K landing just above the integer.
std::size_t required_passes(double alpha, std::size_t K);

// Smooths each raw half-overlapping subset with M and correlates the two
// sides; degenerate (zero-variance) subsets map to rho = -1. Requires
// (K+1)*N/2 aligned samples.
std::vector<double> correlation_tests(const AlignedPair& pair,
                                      const PofParams& p);

// Accept iff at least ceil(alpha*K) of the rho values reach tau.
PofDecision decide(const std::vector<double>& rhos, double tau, double alpha);

// Probability of passing K tests given single-test pass rate f:
//   sum_{x=ceil(alpha K)}^{K} C(K,x) f^x (1-f)^(K-x).
double pass_probability(double f, std::size_t K, double alpha);

// Model-based single-test threshold e^(-d_ref / d_corr).
double model_threshold(double d_ref, double d_corr);

// Empirical fraction of training rho values >= tau.
double estimate_pass_rate(const std::vector<double>& train, double tau);

struct TunedParams {
  double tau = 0.0;
  std::size_t K = 0;
  double alpha = 0.0;
  double eer = 1.0;
  double f_C = 0.0;
  double f_M = 0.0;
};

// Exhaustive grid search minimizing the discrete EER surrogate
// max(1 - F_C, F_M) over tau in {0.01 j} with f_C(tau) > 0.5 and
// f_M(tau) < 0.5, K in 1..K_max, alpha in {j/K}. Ties broken by smaller K,
// then larger F_C - F_M, then smaller tau. Throws InseparableTrainingError
// when no tau is feasible. OpenMP-parallel over the tau grid; the result is
// independent of evaluation order.
TunedParams tune(const std::vector<double>& train_C,
                 const std::vector<double>& train_M, std::size_t K_max = 40);

// Serial reference for tune(); must return the identical minimizer.
TunedParams tune_serial(const std::vector<double>& train_C,
                        const std::vector<double>& train_M,
                        std::size_t K_max = 40);

// Secondary strategy: tau fixed (typically from model_threshold), K fixed,
// alpha chosen to maximize the gap F_C - F_M.
TunedParams tune_alpha_for_gap(const std::vector<double>& train_C,
                               const std::vector<double>& train_M, double tau,
                               std::size_t K);

}  // namespace pof

#endif  // POF_VERIFY_HPP
