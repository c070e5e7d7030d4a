// Copyright 2026 The Multisec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MULTISEC_MONTECARLO_HPP_
#define MULTISEC_MONTECARLO_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "multisec/problem.hpp"

namespace multisec {

// SplitMix64 (Steele, Lea & Flood). 64 bits of state, so a fresh stream per
// trial is free to construct. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Stream for trial `index` of a run seeded with `seed`. The derivation is
// part of the reproducibility contract and must not change:
//   state = mix(seed) ^ mix(index ^ 0xd1b54a32d192ed03)
// where mix is one SplitMix64 output from the given state.
SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t index);

// Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
// Used instead of std::uniform_int_distribution, whose output is not
// specified across standard libraries.
std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound);

// Replays an arrival stream and applies the threshold rule. Ranks are
// 1..n with n the best. A nice event is an arrival that completes the m-th
// sighting of the current maximal; for m = 1 that is every new record.
class ArrivalScanner {
 public:
  ArrivalScanner(int m, int n, int threshold);

  void reset();

  // Returns the outcome once a candidate is accepted, nullopt otherwise.
  std::optional<bool> observe(int rank);

  int distinct_seen() const { return distinct_; }
  int maximal_rank() const { return max_rank_; }
  int maximal_count() const { return max_count_; }

 private:
  int m_;
  int n_;
  int threshold_;
  std::vector<char> seen_;
  int distinct_ = 0;
  int max_rank_ = 0;
  int max_count_ = 0;
};

struct SimulationConfig {
  ProblemSpec spec;
  int threshold = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 selects std::thread::hardware_concurrency()
};

struct SimulationEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double std_err = 0.0;
  std::uint64_t seed = 0;
};

void validate(const SimulationConfig& config);

// One uniformly random arrangement, scanned under the threshold rule.
bool run_trial(const ProblemSpec& spec, int threshold, SplitMix64& rng);

// Trial t draws from trial_stream(seed, t), so the estimate is identical for
// any thread count.
SimulationEstimate estimate(const SimulationConfig& config);

inline constexpr std::uint64_t kDefaultArrangementCap = 1'000'000;

// (mn)! / (m!)^n, the number of distinct arrangements.
mpz_class arrangement_count(const ProblemSpec& spec);

// Exact success probability of `threshold` over every distinct arrangement.
// Throws SizeLimitExceeded when arrangement_count exceeds `cap`.
Rational exhaustive(const ProblemSpec& spec, int threshold,
                    std::uint64_t cap = kDefaultArrangementCap);

struct ExhaustiveOptimum {
  int threshold = 1;               // smallest maximizing threshold
  Rational probability;
  std::vector<Rational> by_threshold;  // entry k - 1 holds threshold k
};

ExhaustiveOptimum exhaustive_optimal(const ProblemSpec& spec,
                                     std::uint64_t cap = kDefaultArrangementCap);

}  // namespace multisec

#endif  // MULTISEC_MONTECARLO_HPP_
