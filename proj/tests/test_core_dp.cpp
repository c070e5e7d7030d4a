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

#include <cmath>
#include <random>
#include <thread>

#include "doctest.h"
#include "multisec/core_dp.hpp"
#include "oracle/brute_force.hpp"

using multisec::Arithmetic;
using multisec::ProblemSpec;
using multisec::Rational;

namespace {

ProblemSpec exact(int m, int n) {
  return {m, n, Arithmetic::kExactRational};
}

Rational q(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(multisec::validate({0, 5}), multisec::InvalidSpec);
  CHECK_THROWS_AS(multisec::validate({2, 0}), multisec::InvalidSpec);
  CHECK_NOTHROW(multisec::validate({1, 1}));
  CHECK_THROWS_AS(multisec::compute_psi<double>({1, 10}),
                  multisec::InvalidSpec);
  CHECK_THROWS_AS(multisec::compute_phi<double>({1, 10}),
                  multisec::InvalidSpec);
  // Mixed-mode requests are refused.
  CHECK_THROWS_AS(multisec::compute_psi<Rational>({2, 10}),
                  multisec::InvalidSpec);
  CHECK_THROWS_AS(multisec::solve<double>(exact(2, 10)),
                  multisec::InvalidSpec);
}

TEST_CASE("psi boundary column") {
  const auto psi = multisec::compute_psi<double>({3, 17});
  CHECK(psi(3, 17) == 0.0);
  CHECK(psi(1, 17) == 1.0);
  CHECK(psi(2, 17) == 1.0);
}

TEST_CASE("psi matches optimal play over information sets") {
  // Frozen from an enumeration of the 90 arrangements of {1,1,2,2,3,3}.
  const auto psi = multisec::compute_psi<Rational>(exact(2, 3));
  CHECK(psi(1, 1) == q(5, 6));
  CHECK(psi(2, 1) == q(11, 18));
  CHECK(psi(1, 2) == q(8, 9));
  CHECK(psi(2, 2) == q(1, 3));
  CHECK(psi(1, 3) == 1);
  CHECK(psi(2, 3) == 0);

  for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 2}, {2, 4}, {3, 3}}) {
    CAPTURE(m);
    CAPTURE(n);
    const auto table = multisec::compute_psi<Rational>(exact(m, n));
    const auto brute = multisec::oracle::optimal_continuation(m, n);
    for (const auto& [state, value] : brute) {
      const auto [k, i] = state;
      CAPTURE(k);
      CAPTURE(i);
      CHECK(table(i, k) == value);
    }
  }
}

TEST_CASE("classic single-copy problem") {
  const auto classic = multisec::classic_m1<double>(100);
  const ProblemSpec spec{1, 100};
  CHECK(multisec::optimal_threshold(spec, classic.psi) == 38);
  CHECK(std::abs(classic.phi(1, 37) - 0.37104277) <= 5e-8);

  const auto tiny = multisec::solve<Rational>(exact(1, 2));
  CHECK(tiny.p_success == q(1, 2));
  CHECK(multisec::success_probability<Rational>(exact(1, 2), 2) == q(1, 2));
  CHECK(multisec::success_probability<Rational>(exact(1, 3), 1) == q(1, 3));
}

TEST_CASE("optimal threshold") {
  CHECK(multisec::solve<double>({3, 1000}).k_star == 493);
  CHECK(multisec::solve<double>({10, 10000}).k_star == 5000);

  const auto psi = multisec::compute_psi<double>({3, 1000});
  CHECK(multisec::optimal_threshold(ProblemSpec{3, 1000}, psi) == 493);

  const auto brute = multisec::oracle::threshold_success(2, 3, 2);
  CHECK(brute == q(5, 6));
  CHECK(multisec::solve<Rational>(exact(2, 3)).k_star == 2);
}

TEST_CASE("phi boundary and agreement with psi past the threshold") {
  const ProblemSpec spec{4, 300};
  const auto psi = multisec::compute_psi<double>(spec);
  const auto phi = multisec::compute_phi<double>(spec);
  for (int i = 1; i < 4; ++i) CHECK(phi(i, 300) == 1.0);
  CHECK(phi(4, 300) == 0.0);
  const int k_star = multisec::optimal_threshold(spec, psi);
  for (int k = k_star; k <= 300; ++k) {
    for (int i = 1; i <= 4; ++i) CHECK(phi(i, k) == psi(i, k));
  }
}

TEST_CASE("phi matches conditional success rates") {
  // Frozen from the 2520 arrangements of {1,1,2,2,3,3,4,4}.
  const auto phi = multisec::compute_phi<Rational>(exact(2, 4));
  CHECK(phi(2, 1) == q(47, 72));
  CHECK(phi(2, 2) == q(17, 36));
  CHECK(phi(2, 3) == q(1, 4));
  CHECK(phi(2, 4) == 0);
  CHECK(phi(1, 1) == q(3, 4));
  CHECK(phi(1, 3) == q(11, 12));

  for (auto [m, n] : {std::pair{2, 4}, {3, 3}}) {
    const auto table = multisec::compute_phi<Rational>(exact(m, n));
    for (int i = 1; i <= m; ++i) {
      for (int k = 1; k <= n; ++k) {
        const auto brute =
            multisec::oracle::conditional_accept_first_nice(m, n, i, k);
        if (!brute) continue;
        CAPTURE(m);
        CAPTURE(i);
        CAPTURE(k);
        CHECK(table(i, k) == *brute);
      }
    }
  }
}

TEST_CASE("theta") {
  auto t22 = multisec::compute_theta<Rational>(exact(2, 2));
  CHECK(t22(1, 2) == q(5, 6));
  CHECK(t22(2, 2) == q(1, 6));

  auto t32 = multisec::compute_theta<Rational>(exact(3, 2));
  CHECK(t32(1, 2) == q(4, 5));
  CHECK(t32(2, 2) == q(3, 20));
  CHECK(t32(3, 2) == q(1, 20));

  auto t33 = multisec::compute_theta<Rational>(exact(3, 3));
  CHECK(t33(1, 3) == q(41, 60));
  CHECK(t33(2, 3) == q(8, 35));
  CHECK(t33(3, 3) == q(37, 420));

  const auto single = multisec::compute_theta<double>({1, 50});
  for (int k = 1; k <= 50; ++k) CHECK(single(1, k) == 1.0);

  for (auto [m, n] : {std::pair{2, 4}, {4, 2}, {3, 3}}) {
    const auto table = multisec::compute_theta<Rational>(exact(m, n));
    for (int k = 1; k <= n; ++k) {
      const auto brute = multisec::oracle::sighting_distribution(m, n, k);
      for (int i = 1; i <= m; ++i) CHECK(table(i, k) == brute[i - 1]);
    }
  }
}

TEST_CASE("success probability") {
  CHECK(std::abs(multisec::success_probability<double>({2, 100}, 48) -
                 0.76970661) <= 5e-8);
  CHECK(std::abs(multisec::success_probability<double>({3, 100}, 50) -
                 0.93518916) <= 5e-8);
  for (int kappa = 1; kappa <= 3; ++kappa) {
    CHECK(multisec::success_probability<Rational>(exact(2, 3), kappa) ==
          multisec::oracle::threshold_success(2, 3, kappa));
  }
  CHECK_THROWS_AS(multisec::success_probability<double>({2, 10}, 0),
                  std::out_of_range);
  CHECK_THROWS_AS(multisec::success_probability<double>({2, 10}, 11),
                  std::out_of_range);

  // Streaming and table-based evaluation agree exactly.
  const auto spec = exact(3, 12);
  const auto tables = multisec::compute_tables<Rational>(spec);
  for (int k = 1; k <= 12; ++k) {
    CHECK(multisec::success_probability(tables, k) ==
          multisec::success_probability<Rational>(spec, k));
  }
}

TEST_CASE("solve") {
  const auto s1 = multisec::solve<double>({1, 1000});
  CHECK(s1.k_star == 369);
  CHECK(std::abs(s1.p_success - 0.36819561) <= 5e-8);

  const auto s5 = multisec::solve<double>({5, 10000});
  CHECK(s5.k_star == 4995);
  CHECK(std::abs(s5.p_success - 0.99561693) <= 5e-8);

  for (int m = 1; m <= 4; ++m) {
    const auto one = multisec::solve<Rational>(exact(m, 1));
    CHECK(one.k_star == 1);
    CHECK(one.p_success == 1);
  }

  for (auto [m, n] : {std::pair{1, 7}, {2, 9}, {3, 11}, {5, 6}}) {
    const auto s = multisec::solve<Rational>(exact(m, n));
    CHECK(s.p_success == s.p_check);
    const auto d = multisec::solve<double>({m, n});
    CHECK(d.k_star == s.k_star);
    CHECK(std::abs(d.p_success - d.p_check) <= 1e-12);
  }

  const auto any = multisec::solve_any(exact(2, 3));
  CHECK(std::get<multisec::ThresholdSolution<Rational>>(any).p_success ==
        q(5, 6));
}

TEST_CASE("binary64 tables track exact tables") {
  for (auto [m, n] : {std::pair{1, 200}, {2, 200}, {3, 120}, {6, 80}}) {
    CAPTURE(m);
    CAPTURE(n);
    const auto d = multisec::compute_tables<double>({m, n});
    const auto r = multisec::compute_tables<Rational>(exact(m, n));
    double worst = 0;
    for (int i = 1; i <= m; ++i) {
      for (int k = 1; k <= n; ++k) {
        worst = std::max(worst, std::abs(d.psi(i, k) - r.psi(i, k).get_d()));
        worst = std::max(worst, std::abs(d.phi(i, k) - r.phi(i, k).get_d()));
        worst =
            std::max(worst, std::abs(d.theta(i, k) - r.theta(i, k).get_d()));
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("structural invariants on random instances") {
  std::mt19937 gen(20260415);
  std::uniform_int_distribution<int> copies(2, 7);
  std::uniform_int_distribution<int> candidates(2, 400);
  for (int trial = 0; trial < 40; ++trial) {
    const ProblemSpec spec{copies(gen), candidates(gen)};
    const int m = spec.m;
    const int n = spec.n;
    CAPTURE(m);
    CAPTURE(n);
    const auto t = multisec::compute_tables<double>(spec);
    const int k_star = multisec::optimal_threshold(spec, t.psi);

    for (int k = 1; k <= n; ++k) {
      double mass = 0;
      for (int i = 1; i <= m; ++i) {
        for (double v : {t.psi(i, k), t.phi(i, k), t.theta(i, k)}) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0 + 1e-15);
        }
        CHECK(t.phi(i, k) <= t.psi(i, k) + 1e-15);
        mass += t.theta(i, k);
      }
      CHECK(std::abs(mass - 1.0) <= 1e-12);
      if (k < n) CHECK(t.psi(m, k) >= t.psi(m, k + 1));
    }
    CHECK(t.phi(m, k_star) <= static_cast<double>(k_star) / n);
    if (k_star > 1) {
      CHECK(t.phi(m, k_star - 1) > static_cast<double>(k_star - 1) / n);
      CHECK(t.phi(m, k_star - 1) == t.psi(m, k_star - 1));
    }

    const double best = multisec::success_probability(t, k_star);
    for (int kappa = 1; kappa <= n; ++kappa) {
      CHECK(multisec::success_probability(t, kappa) <= best + 1e-12);
    }
    CHECK(std::abs(best - t.psi(1, 1)) <= 1e-12);
  }
}

TEST_CASE("concurrent solves are independent") {
  std::vector<multisec::ThresholdSolution<double>> parallel(6);
  std::vector<std::thread> workers;
  for (int m = 1; m <= 6; ++m) {
    workers.emplace_back([&parallel, m] {
      parallel[m - 1] = multisec::solve<double>({m, 5000});
    });
  }
  for (auto& w : workers) w.join();
  for (int m = 1; m <= 6; ++m) {
    const auto serial = multisec::solve<double>({m, 5000});
    CHECK(parallel[m - 1].k_star == serial.k_star);
    CHECK(parallel[m - 1].p_success == serial.p_success);
  }
}
