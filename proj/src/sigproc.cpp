// sigproc.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/sigproc.hpp"

#include <algorithm>
#include <cmath>

namespace pof {

AlignedPair align(const RssTrace& tv, const RssTrace& tc, double tol) {
  tv.validate();
  tc.validate();
  if (tv.rate != tc.rate) {
    throw InvalidArgumentError("trace rate mismatch: " +
                               std::to_string(tv.rate) + " Hz vs " +
                               std::to_string(tc.rate) + " Hz");
  }
  const double period = 1.0 / tv.rate;
  if (tol < 0.0) tol = 0.5 * period;
  const double lo = std::max(tv.start_time(), tc.start_time());
  const double hi = std::min(tv.end_time(), tc.end_time());
  if (lo > hi) throw MisalignmentError("trace spans do not overlap");

  AlignedPair out;
  out.rate = tv.rate;
  std::size_t over_tol = 0;
  std::size_t j = 0;
  bool first = true;
  for (const auto& s : tv.samples) {
    if (s.t < lo - 0.5 * period || s.t > hi + 0.5 * period) continue;
    // Nearest tc sample; both grids are monotone so the cursor only advances.
    while (j + 1 < tc.samples.size() &&
           std::abs(tc.samples[j + 1].t - s.t) <=
               std::abs(tc.samples[j].t - s.t)) {
      ++j;
    }
    const double gap = std::abs(tc.samples[j].t - s.t);
    if (gap > tol) {
      ++over_tol;
      continue;
    }
    if (first) {
      out.t0 = s.t;
      first = false;
    }
    out.a.push_back(s.rss);
    out.b.push_back(tc.samples[j].rss);
  }
  const std::size_t candidates = out.a.size() + over_tol;
  if (candidates == 0 ||
      static_cast<double>(over_tol) > 0.05 * static_cast<double>(candidates)) {
    throw MisalignmentError(
        "misaligned traces: " + std::to_string(over_tol) + " of " +
        std::to_string(candidates) + " candidate pairs exceed tolerance " +
        std::to_string(tol) + " s");
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> x, std::size_t M) {
  if (M < 1 || x.size() < M) {
    throw InvalidArgumentError("moving_average needs 1 <= M <= len(x)");
  }
  std::vector<double> out;
  out.reserve(x.size() - M + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < M; ++i) acc += x[i];
  out.push_back(acc / static_cast<double>(M));
  for (std::size_t i = M; i < x.size(); ++i) {
    acc += x[i] - x[i - M];
    out.push_back(acc / static_cast<double>(M));
  }
  return out;
}

std::optional<double> pearson(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InvalidArgumentError("pearson needs equal lengths >= 2");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<std::span<const double>> split_subsets(std::span<const double> x,
                                                   std::size_t N) {
  if (N < 2 || N % 2 != 0) {
    throw InvalidArgumentError("subset length N must be even and >= 2");
  }
  if (x.size() < N) {
    throw InvalidArgumentError("input shorter than one subset: " +
                               std::to_string(x.size()) + " < " +
                               std::to_string(N));
  }
  const std::size_t half = N / 2;
  const std::size_t K = (x.size() - N) / half + 1;
  std::vector<std::span<const double>> subsets;
  subsets.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    subsets.push_back(x.subspan(k * half, N));
  }
  return subsets;
}

namespace {

double phi(std::span<const double> x, std::size_t m, double R) {
  const std::size_t count = x.size() - m + 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t matches = 0;
    for (std::size_t j = 0; j < count; ++j) {
      bool close = true;
      for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(x[i + k] - x[j + k]) > R) {
          close = false;
          break;
        }
      }
      if (close) ++matches;  // includes the self-match at j == i
    }
    acc += std::log(static_cast<double>(matches) /
                    static_cast<double>(count));
  }
  return acc / static_cast<double>(count);
}

}  // namespace

double approx_entropy(std::span<const double> x, std::size_t m, double R) {
  if (m < 1) throw InvalidArgumentError("run length m must be >= 1");
  if (R <= 0.0) throw InvalidArgumentError("similarity radius R must be > 0");
  if (x.size() < m + 2) {
    throw InvalidArgumentError("approx_entropy needs len(x) >= m + 2");
  }
  return phi(x, m, R) - phi(x, m + 1, R);
}

}  // namespace pof
