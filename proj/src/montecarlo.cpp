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

#include "multisec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace multisec {

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = SplitMix64(seed)();
  const std::uint64_t b = SplitMix64(index ^ 0xd1b54a32d192ed03ULL)();
  return SplitMix64(a ^ b);
}

std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) {
  __uint128_t product = static_cast<__uint128_t>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t floor = -bound % bound;
    while (low < floor) {
      product = static_cast<__uint128_t>(rng()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

ArrivalScanner::ArrivalScanner(int m, int n, int threshold)
    : m_(m), n_(n), threshold_(threshold),
      seen_(static_cast<std::size_t>(n) + 1, 0) {}

void ArrivalScanner::reset() {
  std::fill(seen_.begin(), seen_.end(), 0);
  distinct_ = 0;
  max_rank_ = 0;
  max_count_ = 0;
}

std::optional<bool> ArrivalScanner::observe(int rank) {
  if (!seen_[rank]) {
    seen_[rank] = 1;
    ++distinct_;
    if (rank > max_rank_) {
      max_rank_ = rank;
      max_count_ = 1;
    }
  } else if (rank == max_rank_) {
    ++max_count_;
  } else {
    // Later copies of a dominated candidate carry no information.
    return std::nullopt;
  }
  if (rank == max_rank_ && max_count_ == m_ && distinct_ >= threshold_) {
    return rank == n_;
  }
  return std::nullopt;
}

void validate(const SimulationConfig& config) {
  validate(config.spec);
  if (config.threshold < 1 || config.threshold > config.spec.n) {
    throw InvalidSpec("threshold " + std::to_string(config.threshold) +
                      " outside 1.." + std::to_string(config.spec.n));
  }
  if (config.trials < 1) throw InvalidSpec("trials must be >= 1");
}

namespace {

std::vector<int> sorted_multiset(const ProblemSpec& spec) {
  std::vector<int> ranks;
  ranks.reserve(static_cast<std::size_t>(spec.stream_length()));
  for (int r = 1; r <= spec.n; ++r) ranks.insert(ranks.end(), spec.m, r);
  return ranks;
}

// Draws the arrangement lazily with a partial Fisher-Yates shuffle and stops
// at the first acceptance. `arrivals` must hold the multiset in sorted order.
bool run_trial_with(std::vector<int>& arrivals, ArrivalScanner& scanner,
                    SplitMix64& rng) {
  scanner.reset();
  const std::size_t length = arrivals.size();
  for (std::size_t pos = 0; pos < length; ++pos) {
    const std::size_t pick = pos + uniform_below(rng, length - pos);
    std::swap(arrivals[pos], arrivals[pick]);
    if (const auto verdict = scanner.observe(arrivals[pos])) return *verdict;
  }
  return false;
}

std::uint64_t count_successes(const SimulationConfig& config,
                              std::uint64_t begin, std::uint64_t end) {
  const std::vector<int> sorted = sorted_multiset(config.spec);
  std::vector<int> arrivals;
  ArrivalScanner scanner(config.spec.m, config.spec.n, config.threshold);
  std::uint64_t successes = 0;
  for (std::uint64_t t = begin; t < end; ++t) {
    arrivals = sorted;
    SplitMix64 rng = trial_stream(config.seed, t);
    successes += run_trial_with(arrivals, scanner, rng) ? 1 : 0;
  }
  return successes;
}

}  // namespace

bool run_trial(const ProblemSpec& spec, int threshold, SplitMix64& rng) {
  validate(SimulationConfig{spec, threshold, 1, 0, 1});
  std::vector<int> arrivals = sorted_multiset(spec);
  ArrivalScanner scanner(spec.m, spec.n, threshold);
  return run_trial_with(arrivals, scanner, rng);
}

SimulationEstimate estimate(const SimulationConfig& config) {
  validate(config);
  unsigned threads =
      config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  threads = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads, 1, config.trials));

  std::vector<std::uint64_t> partial(threads, 0);
  const std::uint64_t chunk = config.trials / threads;
  const std::uint64_t extra = config.trials % threads;
  std::vector<std::thread> workers;
  std::uint64_t begin = 0;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
    if (w + 1 == threads) {
      partial[w] = count_successes(config, begin, end);
    } else {
      workers.emplace_back([&config, &partial, w, begin, end] {
        partial[w] = count_successes(config, begin, end);
      });
    }
    begin = end;
  }
  for (auto& worker : workers) worker.join();

  SimulationEstimate out;
  out.successes = std::accumulate(partial.begin(), partial.end(),
                                  std::uint64_t{0});
  out.trials = config.trials;
  out.seed = config.seed;
  out.p_hat = static_cast<double>(out.successes) /
              static_cast<double>(out.trials);
  out.std_err = std::sqrt(out.p_hat * (1.0 - out.p_hat) /
                          static_cast<double>(out.trials));
  return out;
}

mpz_class arrangement_count(const ProblemSpec& spec) {
  validate(spec);
  mpz_class total;
  mpz_fac_ui(total.get_mpz_t(), static_cast<unsigned long>(spec.stream_length()));
  mpz_class copies;
  mpz_fac_ui(copies.get_mpz_t(), static_cast<unsigned long>(spec.m));
  mpz_class denom;
  mpz_pow_ui(denom.get_mpz_t(), copies.get_mpz_t(),
             static_cast<unsigned long>(spec.n));
  return total / denom;
}

namespace {

void check_cap(const ProblemSpec& spec, std::uint64_t cap) {
  const mpz_class count = arrangement_count(spec);
  if (count > mpz_class(static_cast<unsigned long>(cap))) {
    throw SizeLimitExceeded("instance m=" + std::to_string(spec.m) +
                            ", n=" + std::to_string(spec.n) + " has " +
                            count.get_str() +
                            " arrangements, above the enumeration cap of " +
                            std::to_string(cap));
  }
}

}  // namespace

ExhaustiveOptimum exhaustive_optimal(const ProblemSpec& spec,
                                     std::uint64_t cap) {
  check_cap(spec, cap);
  std::vector<int> arrivals = sorted_multiset(spec);
  std::vector<ArrivalScanner> scanners;
  for (int k = 1; k <= spec.n; ++k) scanners.emplace_back(spec.m, spec.n, k);
  std::vector<std::uint64_t> successes(spec.n, 0);
  std::uint64_t total = 0;
  do {
    ++total;
    for (int k = 1; k <= spec.n; ++k) {
      ArrivalScanner& scanner = scanners[k - 1];
      scanner.reset();
      for (int rank : arrivals) {
        if (const auto verdict = scanner.observe(rank)) {
          successes[k - 1] += *verdict ? 1 : 0;
          break;
        }
      }
    }
  } while (std::next_permutation(arrivals.begin(), arrivals.end()));

  ExhaustiveOptimum out;
  for (int k = 1; k <= spec.n; ++k) {
    Rational p{mpz_class(static_cast<unsigned long>(successes[k - 1])),
               mpz_class(static_cast<unsigned long>(total))};
    p.canonicalize();
    if (k == 1 || p > out.probability) {
      out.threshold = k;
      out.probability = p;
    }
    out.by_threshold.push_back(std::move(p));
  }
  return out;
}

Rational exhaustive(const ProblemSpec& spec, int threshold, std::uint64_t cap) {
  validate(SimulationConfig{spec, threshold, 1, 0, 1});
  return exhaustive_optimal(spec, cap).by_threshold[threshold - 1];
}

}  // namespace multisec
