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
#include <thread>

#include "doctest.h"
#include "multisec/asymptotics.hpp"
#include "multisec/core_dp.hpp"

using multisec::Polynomial;
using multisec::Rational;
using multisec::Real;

namespace {

const Polynomial kX{0, 1};

// Series as a polynomial in t.
Polynomial as_polynomial(const multisec::TaylorSeries& s) {
  return Polynomial(s.coeffs());
}

// d/dx = -d/dt.
Polynomial minus_derivative(const multisec::TaylorSeries& s) {
  std::vector<Rational> d;
  for (int j = 1; j <= s.order(); ++j) d.push_back(-s[j] * j);
  return Polynomial(std::move(d));
}

double at(const multisec::TaylorSeries& s, double x) {
  return multisec::evaluate(s, Real(x)).value.convert_to<double>();
}

}  // namespace

TEST_CASE("system for m = 2") {
  const auto sys = multisec::build_system(2);
  REQUIRE(sys.equations.size() == 2);
  // x times { 2 (1 - x) y_1' = y_1 - x }.
  const auto& first = sys.equations[0];
  CHECK(first.lead == kX * Polynomial{2, -2});
  CHECK(first.coupling[0] == kX * Polynomial{1});
  CHECK(first.coupling[1].is_zero());
  CHECK(first.forcing == kX * Polynomial{0, -1});
  // x y_2' = y_2 - y_1.
  const auto& last = sys.equations[1];
  CHECK(last.lead == kX);
  CHECK(last.coupling[0] == Polynomial{-1});
  CHECK(last.coupling[1] == Polynomial{1});
  CHECK(sys.boundary == std::vector<Rational>{1, 0});

  CHECK_THROWS_AS(multisec::build_system(1), multisec::InvalidSpec);
}

TEST_CASE("system for m = 3 has the first, penultimate and last equations") {
  const auto sys = multisec::build_system(3);
  REQUIRE(sys.equations.size() == 3);
  CHECK(sys.equations[0].lead == Polynomial{3, -3});
  CHECK(sys.equations[0].coupling[0] == Polynomial{2});
  CHECK(sys.equations[0].coupling[1] == Polynomial{-2});
  CHECK(sys.equations[1].lead == Polynomial{0, 3, -3});
  CHECK(sys.equations[1].forcing == Polynomial{0, 0, -1});
  CHECK(sys.equations[2].lead == kX);
}

TEST_CASE("interior equation at i = 1 reduces to the first equation") {
  for (int m = 3; m <= 10; ++m) {
    CAPTURE(m);
    const long mm = m;
    const auto sys = multisec::build_system(m);
    // Interior form with i = 1:
    //   m x (1 - x) y_1' = m (x - 1) y_1 + (m - x) y_1 - (m - 1) x y_2
    const Polynomial lead{0, mm, -mm};
    const Polynomial on_y1 = Polynomial{-mm, mm} + Polynomial{mm, -1};
    const Polynomial on_y2{0, -(mm - 1)};
    const auto& first = sys.equations[0];
    CHECK(lead == kX * first.lead);
    CHECK(on_y1 == kX * first.coupling[0]);
    CHECK(on_y2 == kX * first.coupling[1]);
    for (int l = 3; l <= m; ++l) CHECK(first.coupling[l - 1].is_zero());
  }
}

TEST_CASE("taylor series satisfy the system") {
  for (int m = 2; m <= 6; ++m) {
    CAPTURE(m);
    const int order = 40;
    const auto sys = multisec::build_system(m);
    const auto series = multisec::taylor_solve(sys, order);
    REQUIRE(series.size() == static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) CHECK(series[i - 1][0] == sys.boundary[i - 1]);
    CHECK(series[m - 1][1] == 1);  // y_m'(1) = -1

    // Substitute back: lead(t) (-y_i') - sum c_il(t) y_l - f(t) vanishes
    // through degree order - 1.
    for (int i = 1; i <= m; ++i) {
      const auto& eq = sys.equations[i - 1];
      Polynomial residual =
          eq.lead.about_one() * minus_derivative(series[i - 1]) -
          eq.forcing.about_one();
      for (int l = 1; l <= m; ++l) {
        residual = residual -
                   eq.coupling[l - 1].about_one() * as_polynomial(series[l - 1]);
      }
      for (int d = 0; d < order; ++d) {
        CAPTURE(i);
        CAPTURE(d);
        CHECK(residual.coeff(d) == 0);
      }
    }
  }
  CHECK_THROWS_AS(multisec::taylor_solve(multisec::build_system(3), 1),
                  std::invalid_argument);
}

TEST_CASE("coefficient bound for m = 3") {
  const auto series = multisec::taylor_solve(multisec::build_system(3), 200);
  for (const auto& s : series) CHECK(s.unit_bounded());
  CHECK(series[2][1] == 1);
  for (int j = 2; j <= 200; ++j) CHECK(abs(series[2][j]) < 1);
  for (int i = 0; i < 2; ++i) {
    for (int j = 1; j <= 200; ++j) CHECK(abs(series[i][j]) < 1);
  }
}

TEST_CASE("evaluation and tail bounds") {
  const auto series = multisec::taylor_solve(multisec::build_system(3), 1000);
  const auto one = multisec::evaluate(series[0], Real(1));
  CHECK(one.value == 1);
  CHECK(one.tail_bound == 0);
  CHECK(multisec::evaluate(series[2], Real(1)).value == 0);

  for (double x : {0.25, 0.3, 0.5, 0.9}) {
    CHECK(multisec::evaluate(series[2], Real(x)).tail_bound <
          Real("4e-124"));
  }

  const auto exact = multisec::evaluate_exact(series[2], Rational(1, 2));
  const auto approx = multisec::evaluate(series[2], Real(0.5));
  CHECK(abs(multisec::to_real(exact.value) - approx.value) < Real("1e-140"));
  CHECK(abs(multisec::to_real(exact.tail_bound) - approx.tail_bound) <
        Real("1e-150"));

  CHECK_THROWS_AS(multisec::evaluate(series[2], Real(0.2)), std::domain_error);
  CHECK_THROWS_AS(multisec::evaluate(series[2], Real(1.01)),
                  std::domain_error);

  const multisec::TaylorSeries wild({Rational(0), Rational(2), Rational(1)});
  CHECK_FALSE(wild.unit_bounded());
  CHECK_THROWS_AS(multisec::evaluate(wild, Real(0.5)),
                  multisec::CertificationError);
}

TEST_CASE("fixed point") {
  const Real theta3 = multisec::theta_limit(3, 200, Real("1e-25"));
  CHECK(abs(theta3 - Real("0.49263576026053198177870853577593")) <
        Real("1e-24"));
  const Real theta2 = multisec::theta_limit(2, 200, Real("1e-15"));
  CHECK(abs(theta2 - Real("0.470926543")) < Real("5e-9"));
  CHECK(multisec::theta_limit(1, 200, Real("1e-15")) == exp(Real(-1)));

  Real previous = 0;
  for (int m = 1; m <= 10; ++m) {
    const auto sol = multisec::solve_asymptotics(m);
    CHECK(sol.theta > previous);
    CHECK(sol.theta < Real(0.5));
    previous = sol.theta;
    if (m >= 2) {
      const auto series = multisec::taylor_solve(multisec::build_system(m), 200);
      const auto y = multisec::evaluate(series[m - 1], sol.theta);
      CHECK(abs(y.value - sol.theta) <= Real("1e-15"));
      CHECK(sol.theta_radius < Real("1e-15"));
    }
  }

  CHECK_THROWS_AS(multisec::solve_asymptotics(3, 200, 500),
                  std::invalid_argument);
  // At order 2 the truncation error swamps a 1e-15 tolerance.
  CHECK_THROWS_AS(multisec::theta_limit(3, 2, Real("1e-15")),
                  multisec::CertificationError);
}

TEST_CASE("closed-form sighting limits") {
  for (int m = 1; m <= 8; ++m) {
    CHECK(multisec::z_closed(m, 1, Real(0)) == 1);
    for (int i = 2; i <= m; ++i) CHECK(multisec::z_closed(m, i, Real(0)) == 0);
    for (double x : {1e-9, 0.1, 0.37, 0.5, 0.99, 1.0}) {
      Real total = 0;
      for (int i = 1; i <= m; ++i) total += multisec::z_closed(m, i, Real(x));
      CHECK(abs(total - 1) < Real("1e-100"));
    }
  }
  // Single copy: the maximal has always been seen once.
  CHECK(abs(multisec::z_closed(1, 1, Real(0.3)) - 1) < Real("1e-100"));
  CHECK_THROWS_AS(multisec::z_closed(3, 4, Real(0.5)), std::out_of_range);
  CHECK_THROWS_AS(multisec::z_closed(3, 0, Real(0.5)), std::out_of_range);
  CHECK_THROWS_AS(multisec::z_closed(3, 1, Real(1.5)), std::domain_error);
}

TEST_CASE("limits agree with finite-n tables") {
  const int n = 10000;
  for (int m = 2; m <= 4; ++m) {
    CAPTURE(m);
    const auto tables = multisec::compute_tables<double>({m, n});
    const auto series = multisec::taylor_solve(multisec::build_system(m), 200);
    for (int step = 0; step <= 13; ++step) {
      const double x = 0.30 + 0.05 * step;
      const int k = static_cast<int>(std::floor(x * n));
      for (int i = 1; i <= m; ++i) {
        CAPTURE(x);
        CAPTURE(i);
        CHECK(std::abs(at(series[i - 1], x) - tables.phi(i, k)) <= 1e-2);
        const double z = multisec::z_closed(m, i, Real(x)).convert_to<double>();
        CHECK(std::abs(z - tables.theta(i, k)) <= 1e-2);
      }
    }
  }

  // lim P lies just below the n = 10^4 value, consistent with an O(1/n)
  // approach from above.
  for (int m = 1; m <= 10; ++m) {
    const double p_lim =
        multisec::limit_probability(m, 200, 15).convert_to<double>();
    const auto sol = multisec::solve<double>({m, n});
    const double p_n = sol.p_success;
    CHECK(std::abs(p_lim - p_n) <= 1e-4);
    const double theta =
        multisec::solve_asymptotics(m, 200, 15).theta.convert_to<double>();
    CHECK(std::abs(theta - static_cast<double>(sol.k_star) / n) <= 5e-4);
    CHECK(p_lim <= p_n + 1e-12);
  }
}

TEST_CASE("concurrent asymptotics match serial results") {
  std::vector<Real> parallel(4);
  std::vector<std::thread> workers;
  for (int m = 2; m <= 5; ++m) {
    workers.emplace_back([&parallel, m] {
      parallel[m - 2] = multisec::solve_asymptotics(m, 120, 20).p_limit;
    });
  }
  for (auto& w : workers) w.join();
  for (int m = 2; m <= 5; ++m) {
    CHECK(parallel[m - 2] == multisec::solve_asymptotics(m, 120, 20).p_limit);
  }
}
