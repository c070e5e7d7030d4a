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

#ifndef MULTISEC_CORE_DP_HPP_
#define MULTISEC_CORE_DP_HPP_

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "multisec/problem.hpp"

namespace multisec {

// Read-only (i, k) -> value table, 1 <= i <= m, 1 <= k <= n. Storage is
// column-major in k so that a whole state column is contiguous.
template <typename Scalar>
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(int m, int n)
      : m_(m), n_(n), data_(static_cast<std::size_t>(m) * n) {}

  int copies() const { return m_; }
  int candidates() const { return n_; }

  const Scalar& operator()(int i, int k) const { return data_[index(i, k)]; }

  // Entries i = 1..m of column k, at offsets 0..m-1.
  std::span<const Scalar> column(int k) const {
    return {data_.data() + index(1, k), static_cast<std::size_t>(m_)};
  }
  std::span<Scalar> mutable_column(int k) {
    return {data_.data() + index(1, k), static_cast<std::size_t>(m_)};
  }

 private:
  std::size_t index(int i, int k) const {
    return static_cast<std::size_t>(k - 1) * m_ + (i - 1);
  }

  int m_ = 0;
  int n_ = 0;
  std::vector<Scalar> data_;
};

// How the last copy of the current maximal ("nice" event) is treated when
// it arrives in state i = m - 1.
enum class NicePolicy {
  kOptimal,           // take the better of accepting and continuing
  kAlwaysAccept,      // accept the first nice candidate
};

// Psi^i(k): success probability under optimal play after k distinct
// candidates have been rejected and the maximal has been seen i times.
// Requires m >= 2; m = 1 is handled by classic_m1.
template <typename Scalar>
ValueTable<Scalar> compute_psi(const ProblemSpec& spec);

// Phi^i(k): as compute_psi, but the first nice candidate is always taken.
template <typename Scalar>
ValueTable<Scalar> compute_phi(const ProblemSpec& spec);

// Theta^i(k): probability that the maximal has been seen exactly i times when
// the k-th distinct candidate arrives. Valid for every m >= 1.
template <typename Scalar>
ValueTable<Scalar> compute_theta(const ProblemSpec& spec);

// Classical single-copy problem. psi(1, k) is the continuation value after
// rejecting k candidates and phi(1, k) the success probability of accepting
// the next record.
template <typename Scalar>
struct ClassicTables {
  ValueTable<Scalar> psi;
  ValueTable<Scalar> phi;
};

template <typename Scalar>
ClassicTables<Scalar> classic_m1(int n);

// min{k : k/n >= psi(m, k)}, using the last row of the table (row 1 when
// m = 1). Throws std::logic_error if the stopping set is not {k*, ..., n}.
template <typename Scalar>
int optimal_threshold(const ProblemSpec& spec, const ValueTable<Scalar>& psi);

template <typename Scalar>
struct ValueTables {
  ValueTable<Scalar> psi;
  ValueTable<Scalar> phi;
  ValueTable<Scalar> theta;
};

// All three tables for any m >= 1 (classic tables when m = 1).
template <typename Scalar>
ValueTables<Scalar> compute_tables(const ProblemSpec& spec);

// Success probability of the threshold rule "accept the first nice event
// occurring once at least k distinct candidates have been inspected".
template <typename Scalar>
Scalar success_probability(const ProblemSpec& spec, int k);

// Same, read off precomputed tables.
template <typename Scalar>
Scalar success_probability(const ValueTables<Scalar>& tables, int k);

template <typename Scalar>
struct ThresholdSolution {
  ProblemSpec spec;
  int k_star = 1;
  Scalar p_success{};
  Scalar p_check{};  // optimal value Psi^1(1), computed independently
};

// Optimal threshold and success probability in O(m n) time and O(m) memory.
// Throws InvalidSpec when spec.mode does not match Scalar.
template <typename Scalar>
ThresholdSolution<Scalar> solve(const ProblemSpec& spec);

using AnySolution =
    std::variant<ThresholdSolution<double>, ThresholdSolution<Rational>>;

// Dispatches on spec.mode.
AnySolution solve_any(const ProblemSpec& spec);

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

}  // namespace multisec

#endif  // MULTISEC_CORE_DP_HPP_
