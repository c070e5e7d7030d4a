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

#include "multisec/core_dp.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

namespace multisec {

void validate(const ProblemSpec& spec) {
  if (spec.m < 1) {
    throw InvalidSpec("copy count m must be >= 1, got " +
                      std::to_string(spec.m));
  }
  if (spec.n < 1) {
    throw InvalidSpec("candidate count n must be >= 1, got " +
                      std::to_string(spec.n));
  }
}

std::string to_string(Arithmetic mode) {
  return mode == Arithmetic::kBinary64 ? "binary64" : "exact-rational";
}

namespace {

template <typename Scalar>
void check_mode(const ProblemSpec& spec) {
  validate(spec);
  if (spec.mode != ArithmeticOf<Scalar>::value) {
    throw InvalidSpec("spec requests " + to_string(spec.mode) +
                      " arithmetic but tables were requested in " +
                      to_string(ArithmeticOf<Scalar>::value));
  }
}

template <typename Scalar>
void require_multi_copy(const ProblemSpec& spec) {
  check_mode<Scalar>(spec);
  if (spec.m < 2) {
    throw InvalidSpec("multi-copy recurrences need m >= 2; use classic_m1");
  }
}

// Column at k = n: the best has been seen; it can still be taken unless all
// of its copies are gone.
template <typename Scalar>
void boundary_column(int m, std::span<Scalar> col) {
  for (int i = 1; i < m; ++i) col[i - 1] = Scalar(1);
  col[m - 1] = Scalar(0);
}

// Fills column k from column k + 1. Row i = m is needed by row m - 1 and
// row i + 1 by row i, so rows are produced in descending order.
template <typename Scalar>
void backward_step(int m, int n, int k, std::span<const Scalar> next,
                   std::span<Scalar> cur, NicePolicy policy) {
  const std::int64_t q = static_cast<std::int64_t>(m) * (n - k);
  const Scalar& next_first = next[0];

  // Next relevant arrival is a new candidate; it is the new maximal w.p.
  // 1/(k+1).
  cur[m - 1] = ratio<Scalar>(k, k + 1) * next[m - 1] +
               ratio<Scalar>(1, k + 1) * next_first;

  const Scalar accept = ratio<Scalar>(k, n);
  Scalar nice_value = accept;
  if (policy == NicePolicy::kOptimal && cur[m - 1] > accept) {
    nice_value = cur[m - 1];
  }
  cur[m - 2] = nice_value / Scalar(q + 1) +
               ratio<Scalar>(k, k + 1) * ratio<Scalar>(q, q + 1) * next[m - 2] +
               ratio<Scalar>(1, k + 1) * ratio<Scalar>(q, q + 1) * next_first;

  for (int i = m - 2; i >= 1; --i) {
    const std::int64_t s = q + m - i;
    cur[i - 1] = ratio<Scalar>(k, k + 1) * ratio<Scalar>(q, s) * next[i - 1] +
                 ratio<Scalar>(m - i, s) * cur[i] +
                 ratio<Scalar>(1, k + 1) * ratio<Scalar>(q, s) * next_first;
  }
}

// Fills column k from column k - 1. Row i >= 3 uses row i - 1 of the same
// column, so rows are produced in ascending order.
template <typename Scalar>
void forward_theta_step(int m, int n, int k, std::span<const Scalar> prev,
                        std::span<Scalar> cur) {
  const std::int64_t remaining = static_cast<std::int64_t>(m) * (n - k + 1);
  auto pending = [&](int i) { return remaining + m - i; };

  const std::int64_t d1 = pending(1);
  cur[0] = ratio<Scalar>(1, k) +
           (ratio<Scalar>(m - 1, k) / Scalar(d1) + ratio<Scalar>(remaining, d1) -
            ratio<Scalar>(1, k)) *
               prev[0];
  if (m < 2) return;

  const std::int64_t d2 = pending(2);
  cur[1] = ratio<Scalar>(k - 1, k) * ratio<Scalar>(remaining, d2) * prev[1] +
           ratio<Scalar>(k - 1, k) * ratio<Scalar>(remaining, d2) *
               ratio<Scalar>(m - 1, d1) * prev[0];
  for (int i = 3; i <= m; ++i) {
    const std::int64_t di = pending(i);
    cur[i - 1] = ratio<Scalar>(k - 1, k) * ratio<Scalar>(remaining, di) *
                     prev[i - 1] +
                 ratio<Scalar>(m - i + 1, di) * cur[i - 2];
  }
}

template <typename Scalar>
void theta_first_column(std::span<Scalar> col) {
  std::fill(col.begin(), col.end(), Scalar(0));
  col[0] = Scalar(1);
}

template <typename Scalar>
ValueTable<Scalar> backward_table(const ProblemSpec& spec, NicePolicy policy) {
  require_multi_copy<Scalar>(spec);
  ValueTable<Scalar> table(spec.m, spec.n);
  boundary_column<Scalar>(spec.m, table.mutable_column(spec.n));
  for (int k = spec.n - 1; k >= 1; --k) {
    backward_step<Scalar>(spec.m, spec.n, k, table.column(k + 1),
                          table.mutable_column(k), policy);
  }
  return table;
}

// Classical recurrences, one step from k + 1 to k.
template <typename Scalar>
void classic_step(int n, int k, const Scalar& psi_next, const Scalar& phi_next,
                  Scalar& psi, Scalar& phi) {
  const Scalar record_value = ratio<Scalar>(k + 1, n);
  const Scalar& best = psi_next > record_value ? psi_next : record_value;
  psi = ratio<Scalar>(k, k + 1) * psi_next + ratio<Scalar>(1, k + 1) * best;
  phi = ratio<Scalar>(1, n) + ratio<Scalar>(k, k + 1) * phi_next;
}

// Scans k = n down to 1 and returns min S, checking that S = {k*, ..., n}.
class StoppingSetTracker {
 public:
  void observe(int k, bool in_set) {
    if (in_set) {
      if (left_set_) {
        throw std::logic_error("stopping set has more than one island (k=" +
                               std::to_string(k) + ")");
      }
      k_star_ = k;
    } else {
      left_set_ = true;
    }
  }
  int k_star() const { return k_star_; }

 private:
  int k_star_ = 0;
  bool left_set_ = false;
};

template <typename Scalar>
ThresholdSolution<Scalar> solve_classic(const ProblemSpec& spec) {
  const int n = spec.n;
  StoppingSetTracker tracker;
  Scalar psi(0);
  Scalar phi(0);
  tracker.observe(n, true);
  // The first k (scanning down) outside the stopping set is k* - 1.
  std::optional<Scalar> phi_before_threshold;
  for (int k = n - 1; k >= 1; --k) {
    Scalar psi_k;
    Scalar phi_k;
    classic_step<Scalar>(n, k, psi, phi, psi_k, phi_k);
    psi = std::move(psi_k);
    phi = std::move(phi_k);
    const bool in_set = ratio<Scalar>(k, n) >= psi;
    tracker.observe(k, in_set);
    if (!in_set && !phi_before_threshold) phi_before_threshold = phi;
  }
  ThresholdSolution<Scalar> out;
  out.spec = spec;
  out.k_star = tracker.k_star();
  out.p_success = phi_before_threshold.value_or(ratio<Scalar>(1, n));
  const Scalar first = ratio<Scalar>(1, n);
  out.p_check = psi > first ? psi : first;
  return out;
}

}  // namespace

template <typename Scalar>
ValueTable<Scalar> compute_psi(const ProblemSpec& spec) {
  return backward_table<Scalar>(spec, NicePolicy::kOptimal);
}

template <typename Scalar>
ValueTable<Scalar> compute_phi(const ProblemSpec& spec) {
  return backward_table<Scalar>(spec, NicePolicy::kAlwaysAccept);
}

template <typename Scalar>
ValueTable<Scalar> compute_theta(const ProblemSpec& spec) {
  check_mode<Scalar>(spec);
  ValueTable<Scalar> table(spec.m, spec.n);
  theta_first_column<Scalar>(table.mutable_column(1));
  for (int k = 2; k <= spec.n; ++k) {
    forward_theta_step<Scalar>(spec.m, spec.n, k, table.column(k - 1),
                               table.mutable_column(k));
  }
  return table;
}

template <typename Scalar>
ClassicTables<Scalar> classic_m1(int n) {
  check_mode<Scalar>(ProblemSpec{1, n, ArithmeticOf<Scalar>::value});
  ClassicTables<Scalar> out{ValueTable<Scalar>(1, n), ValueTable<Scalar>(1, n)};
  out.psi.mutable_column(n)[0] = Scalar(0);
  out.phi.mutable_column(n)[0] = Scalar(0);
  for (int k = n - 1; k >= 1; --k) {
    classic_step<Scalar>(n, k, out.psi(1, k + 1), out.phi(1, k + 1),
                         out.psi.mutable_column(k)[0],
                         out.phi.mutable_column(k)[0]);
  }
  return out;
}

template <typename Scalar>
int optimal_threshold(const ProblemSpec& spec, const ValueTable<Scalar>& psi) {
  validate(spec);
  if (psi.copies() != spec.m || psi.candidates() != spec.n) {
    throw InvalidSpec("psi table shape does not match the spec");
  }
  StoppingSetTracker tracker;
  for (int k = spec.n; k >= 1; --k) {
    tracker.observe(k, ratio<Scalar>(k, spec.n) >= psi(spec.m, k));
  }
  return tracker.k_star();
}

template <typename Scalar>
ValueTables<Scalar> compute_tables(const ProblemSpec& spec) {
  check_mode<Scalar>(spec);
  if (spec.m == 1) {
    ClassicTables<Scalar> classic = classic_m1<Scalar>(spec.n);
    return {std::move(classic.psi), std::move(classic.phi),
            compute_theta<Scalar>(spec)};
  }
  return {compute_psi<Scalar>(spec), compute_phi<Scalar>(spec),
          compute_theta<Scalar>(spec)};
}

template <typename Scalar>
Scalar success_probability(const ValueTables<Scalar>& tables, int k) {
  const int m = tables.theta.copies();
  const int n = tables.theta.candidates();
  if (k < 1 || k > n) {
    throw std::out_of_range("threshold " + std::to_string(k) +
                            " outside 1.." + std::to_string(n));
  }
  if (m == 1) {
    // A record arriving as the k-th distinct candidate is itself acceptable.
    return k == 1 ? ratio<Scalar>(1, n) : tables.phi(1, k - 1);
  }
  Scalar total(0);
  for (int i = 1; i <= m; ++i) total += tables.phi(i, k) * tables.theta(i, k);
  return total;
}

template <typename Scalar>
Scalar success_probability(const ProblemSpec& spec, int k) {
  check_mode<Scalar>(spec);
  const int m = spec.m;
  const int n = spec.n;
  if (k < 1 || k > n) {
    throw std::out_of_range("threshold " + std::to_string(k) +
                            " outside 1.." + std::to_string(n));
  }
  if (m == 1) {
    if (k == 1) return ratio<Scalar>(1, n);
    Scalar phi(0);
    for (int j = n - 1; j >= k - 1; --j) {
      phi = ratio<Scalar>(1, n) + ratio<Scalar>(j, j + 1) * phi;
    }
    return phi;
  }

  std::vector<Scalar> next(m), cur(m);
  boundary_column<Scalar>(m, std::span<Scalar>(next));
  for (int j = n - 1; j >= k; --j) {
    backward_step<Scalar>(m, n, j, next, cur, NicePolicy::kAlwaysAccept);
    std::swap(next, cur);
  }
  const std::vector<Scalar> phi = std::move(next);

  std::vector<Scalar> prev(m), theta(m);
  theta_first_column<Scalar>(std::span<Scalar>(prev));
  for (int j = 2; j <= k; ++j) {
    forward_theta_step<Scalar>(m, n, j, prev, theta);
    std::swap(prev, theta);
  }
  Scalar total(0);
  for (int i = 0; i < m; ++i) total += phi[i] * prev[i];
  return total;
}

template <typename Scalar>
ThresholdSolution<Scalar> solve(const ProblemSpec& spec) {
  check_mode<Scalar>(spec);
  if (spec.n == 1) {
    return {spec, 1, Scalar(1), Scalar(1)};
  }
  if (spec.m == 1) return solve_classic<Scalar>(spec);

  const int m = spec.m;
  const int n = spec.n;
  StoppingSetTracker tracker;
  std::vector<Scalar> next(m), cur(m);
  boundary_column<Scalar>(m, std::span<Scalar>(next));
  tracker.observe(n, true);
  for (int k = n - 1; k >= 1; --k) {
    backward_step<Scalar>(m, n, k, next, cur, NicePolicy::kOptimal);
    tracker.observe(k, ratio<Scalar>(k, n) >= cur[m - 1]);
    std::swap(next, cur);
  }

  ThresholdSolution<Scalar> out;
  out.spec = spec;
  out.k_star = tracker.k_star();
  out.p_check = next[0];
  out.p_success = success_probability<Scalar>(spec, out.k_star);
  return out;
}

AnySolution solve_any(const ProblemSpec& spec) {
  if (spec.mode == Arithmetic::kExactRational) return solve<Rational>(spec);
  return solve<double>(spec);
}

#define MULTISEC_INSTANTIATE(S)                                             \
  template ValueTable<S> compute_psi<S>(const ProblemSpec&);                \
  template ValueTable<S> compute_phi<S>(const ProblemSpec&);                \
  template ValueTable<S> compute_theta<S>(const ProblemSpec&);              \
  template ClassicTables<S> classic_m1<S>(int);                             \
  template int optimal_threshold<S>(const ProblemSpec&,                     \
                                    const ValueTable<S>&);                  \
  template ValueTables<S> compute_tables<S>(const ProblemSpec&);            \
  template S success_probability<S>(const ValueTables<S>&, int);            \
  template S success_probability<S>(const ProblemSpec&, int);               \
  template ThresholdSolution<S> solve<S>(const ProblemSpec&);

MULTISEC_INSTANTIATE(double)
MULTISEC_INSTANTIATE(Rational)

#undef MULTISEC_INSTANTIATE

}  // namespace multisec
