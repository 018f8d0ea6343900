// sigproc.hpp -- alignment, smoothing, subset formation, Pearson
// correlation, approximate entropy.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_SIGPROC_HPP
#define POF_SIGPROC_HPP

#include <optional>
#include <span>
#include <vector>

#include "pof/channel.hpp"
#include "pof/errors.hpp"

namespace pof {

// Two equal-length, time-aligned RSS value sequences.
struct AlignedPair {
  std::vector<double> a;
  std::vector<double> b;
  double t0 = 0.0;     // shared start time, s
  double rate = 20.0;  // Hz
};

// Pairs each sample of one trace with the nearest-timestamp sample of the
// other over the overlap; drops unmatched head/tail. tol < 0 selects the
// default of half the sample period. Errors: rate mismatch, no overlap, or
// more than 5% of pairs exceeding tol.
AlignedPair align(const RssTrace& tv, const RssTrace& tc, double tol = -1.0);

// Trailing window mean: out[i] = mean(x[i..i+M)), length len(x) - M + 1.
std::vector<double> moving_average(std::span<const double> x, std::size_t M);

// Pearson correlation clamped to [-1, 1]; nullopt when either input has zero
// variance (degenerate, no co-travel evidence).
std::optional<double> pearson(std::span<const double> a,
                              std::span<const double> b);

// Half-overlapping subsets of length N at offsets 0, N/2, N, ...;
// K = floor((len - N) / (N/2)) + 1. N must be even and <= len.
std::vector<std::span<const double>> split_subsets(std::span<const double> x,
                                                   std::size_t N);

// Samples consumed by K half-overlapping subsets of length N.
constexpr std::size_t required_samples(std::size_t K, std::size_t N) {
  return (K + 1) * N / 2;
}

// Approximate entropy (Pincus): Phi^m(R) - Phi^(m+1)(R) with self-matches
// included, Chebyshev distance, natural log.
double approx_entropy(std::span<const double> x, std::size_t m, double R);

}  // namespace pof

#endif  // POF_SIGPROC_HPP
