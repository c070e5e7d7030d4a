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

#ifndef MULTISEC_ASYMPTOTICS_HPP_
#define MULTISEC_ASYMPTOTICS_HPP_

#include <stdexcept>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "multisec/problem.hpp"

namespace multisec {

// Working precision for all floating evaluations, in decimal digits. A
// fixed-precision backend keeps evaluation free of shared global state.
inline constexpr unsigned kWorkingDigits = 160;
// Largest digit count callers may request for reported values.
inline constexpr unsigned kMaxReportDigits = 120;

using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<kWorkingDigits>,
    boost::multiprecision::et_off>;

Real to_real(const Rational& q);

// Dense polynomial in x with exact coefficients, lowest degree first.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);
  Polynomial(std::initializer_list<long> coeffs);

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  // Coefficient of x^d (zero beyond the degree).
  Rational coeff(int d) const;
  Rational operator()(const Rational& x) const;

  // p(1 - t), as a polynomial in t.
  Polynomial about_one() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// lead(x) * y_i'(x) = sum_l coupling[l - 1](x) * y_l(x) + forcing(x)
struct OdeEquation {
  Polynomial lead;
  std::vector<Polynomial> coupling;
  Polynomial forcing;
};

// Limits of the accept-first-nice profiles Phi^i(floor(x n)) as n grows.
struct OdeSystem {
  int m = 2;
  std::vector<OdeEquation> equations;  // entry i - 1 defines y_i'
  std::vector<Rational> boundary;      // y_i(1)
};

// Throws InvalidSpec for m < 2.
OdeSystem build_system(int m);

// Power series sum_j a_j t^j in t = 1 - x.
class TaylorSeries {
 public:
  explicit TaylorSeries(std::vector<Rational> coeffs);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const Rational& operator[](int j) const { return coeffs_[j]; }

  // |a_j| <= 1 for every 1 <= j <= order. This is what licenses the
  // truncation bound (1 - x)^(N+1) / x.
  bool unit_bounded() const { return unit_bounded_; }
  // Largest |a_j| over j >= 1 (zero for order 0).
  const Rational& max_abs_coefficient() const { return max_abs_; }

 private:
  std::vector<Rational> coeffs_;
  Rational max_abs_;
  bool unit_bounded_ = true;
};

class UnsolvableSeries : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matches coefficients of every equation order by order with exact
// arithmetic. x = 1 is a singular point for equations whose lead vanishes
// there; their coefficients at each order come from a small linear system
// that must be nonsingular. Returns one series per y_i.
std::vector<TaylorSeries> taylor_solve(const OdeSystem& system, int order);

struct SeriesValue {
  Real value;
  Real tail_bound;  // |y(x) - truncated sum| <= tail_bound
};

struct ExactSeriesValue {
  Rational value;
  Rational tail_bound;
};

// Truncated sum at x in [1/4, 1]. Throws CertificationError when the
// coefficients are not unit bounded, std::domain_error for x out of range.
SeriesValue evaluate(const TaylorSeries& series, const Real& x);
ExactSeriesValue evaluate_exact(const TaylorSeries& series, const Rational& x);

// Limit of Theta^i(floor(x n)):
//   C(m, i) u^i v^(m-i) / x,  v = (1 - x)^(1/m),  u = 1 - v,
// with the x = 0 limits 1 (i = 1) and 0 (i >= 2).
Real z_closed(int m, int i, const Real& x);

// lim k*/n. m = 1 gives 1/e; otherwise the root of ybar_m(x) = x found by
// bisection to width `tolerance`.
Real theta_limit(int m, int order, const Real& tolerance);

// lim P, i.e. sum_i ybar_i(theta) z^i(theta) at theta = theta_limit.
Real limit_probability(int m, int order, unsigned digits);

struct AsymptoticSolution {
  int m = 1;
  int order = 0;
  unsigned digits = 0;
  Real theta;
  Real theta_radius;  // bisection width plus series truncation
  Real p_limit;
  Real p_radius;
};

inline constexpr int kDefaultOrder = 200;

// Both limits with error radii. Values are resolved to at least `digits`
// decimal places (at most kMaxReportDigits).
AsymptoticSolution solve_asymptotics(int m, int order = kDefaultOrder,
                                     unsigned digits = 15);

}  // namespace multisec

#endif  // MULTISEC_ASYMPTOTICS_HPP_
