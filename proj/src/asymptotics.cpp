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

#include "multisec/asymptotics.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>

namespace multisec {

Real to_real(const Rational& q) {
  Real r;
  mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

// --- Polynomial -------------------------------------------------------------

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

Polynomial::Polynomial(std::initializer_list<long> coeffs) {
  for (long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

void Polynomial::trim() {
  while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
}

Rational Polynomial::coeff(int d) const {
  if (d < 0 || d > degree()) return Rational(0);
  return coeffs_[d];
}

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

Polynomial Polynomial::about_one() const {
  // Horner in the polynomial ring: p(1 - t) = c_0 + (1 - t)(c_1 + (1 - t)(...)).
  const Polynomial one_minus_t{1, -1};
  Polynomial acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * one_minus_t + Polynomial(std::vector<Rational>{*it});
  }
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t d = 0; d < out.size(); ++d) {
    out[d] = a.coeff(static_cast<int>(d)) + b.coeff(static_cast<int>(d));
  }
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t d = 0; d < out.size(); ++d) {
    out[d] = a.coeff(static_cast<int>(d)) - b.coeff(static_cast<int>(d));
  }
  return Polynomial(std::move(out));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return Polynomial(std::move(out));
}

// --- ODE system -------------------------------------------------------------

OdeSystem build_system(int m) {
  if (m < 2) {
    throw InvalidSpec("the limit system is defined for m >= 2, got " +
                      std::to_string(m));
  }
  const long mm = m;
  OdeSystem sys;
  sys.m = m;
  sys.equations.resize(m);
  for (auto& eq : sys.equations) eq.coupling.resize(m);
  auto coupling = [&](int i, int l) -> Polynomial& {
    return sys.equations[i - 1].coupling[l - 1];
  };
  const Polynomial interior_lead{0, mm, -mm};  // m x (1 - x)

  // m (1 - x) y_1' = (m - 1)(y_1 - y_2)
  if (m >= 3) {
    sys.equations[0].lead = Polynomial{mm, -mm};
    coupling(1, 1) = Polynomial{mm - 1};
    coupling(1, 2) = Polynomial{-(mm - 1)};
  }
  // m x (1 - x) y_i' = m (x - 1) y_1 + (m - i x) y_i - (m - i) x y_{i+1}
  for (int i = 2; i <= m - 2; ++i) {
    const long ii = i;
    sys.equations[i - 1].lead = interior_lead;
    coupling(i, 1) = coupling(i, 1) + Polynomial{-mm, mm};
    coupling(i, i) = coupling(i, i) + Polynomial{mm, -ii};
    coupling(i, i + 1) = coupling(i, i + 1) + Polynomial{0, -(mm - ii)};
  }
  // m x (1 - x) y_{m-1}' = -m (1 - x) y_1 + (m - (m - 1) x) y_{m-1} - x^2
  sys.equations[m - 2].lead = interior_lead;
  coupling(m - 1, 1) = coupling(m - 1, 1) + Polynomial{-mm, mm};
  coupling(m - 1, m - 1) = coupling(m - 1, m - 1) + Polynomial{mm, -(mm - 1)};
  sys.equations[m - 2].forcing = Polynomial{0, 0, -1};
  // x y_m' = y_m - y_1
  sys.equations[m - 1].lead = Polynomial{0, 1};
  coupling(m, m) = Polynomial{1};
  coupling(m, 1) = Polynomial{-1};

  sys.boundary.assign(m, Rational(1));
  sys.boundary[m - 1] = 0;
  return sys;
}

// --- Taylor series ----------------------------------------------------------

TaylorSeries::TaylorSeries(std::vector<Rational> coeffs)
    : coeffs_(std::move(coeffs)), max_abs_(0) {
  if (coeffs_.empty()) throw std::invalid_argument("empty series");
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    const Rational mag = abs(coeffs_[j]);
    if (mag > max_abs_) max_abs_ = mag;
  }
  unit_bounded_ = max_abs_ <= 1;
}

namespace {

struct ShiftedEquation {
  std::vector<Rational> lead;                   // in t
  std::vector<std::vector<Rational>> coupling;  // in t, per state index
  std::vector<Rational> forcing;                // in t
  bool singular = false;
};

const Rational& at(const std::vector<Rational>& v, int j) {
  static const Rational kZero(0);
  return j >= 0 && j < static_cast<int>(v.size()) ? v[j] : kZero;
}

// Solves A x = b in place with exact arithmetic. Returns false if singular.
bool gaussian_solve(std::vector<std::vector<Rational>>& a,
                    std::vector<Rational>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || sgn(a[row][col]) == 0) continue;
      const Rational factor = a[row][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[row][c] -= factor * a[col][c];
      b[row] -= factor * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return true;
}

}  // namespace

std::vector<TaylorSeries> taylor_solve(const OdeSystem& system, int order) {
  if (order < 2) throw std::invalid_argument("series order must be >= 2");
  const int m = system.m;
  if (static_cast<int>(system.equations.size()) != m ||
      static_cast<int>(system.boundary.size()) != m) {
    throw std::invalid_argument("malformed ODE system");
  }

  // Writing y_i(x) = sum_j a_{i,j} t^j with t = 1 - x turns
  // lead(x) y_i'(x) = rhs into -lead(t) dy_i/dt = rhs(t).
  std::vector<ShiftedEquation> eqs(m);
  std::vector<int> singular;
  std::vector<int> regular;
  for (int i = 0; i < m; ++i) {
    const OdeEquation& src = system.equations[i];
    ShiftedEquation& eq = eqs[i];
    eq.lead = src.lead.about_one().coeffs();
    eq.forcing = src.forcing.about_one().coeffs();
    for (const Polynomial& c : src.coupling) {
      eq.coupling.push_back(c.about_one().coeffs());
    }
    if (sgn(at(eq.lead, 0)) != 0) {
      regular.push_back(i);
    } else if (sgn(at(eq.lead, 1)) != 0) {
      eq.singular = true;
      singular.push_back(i);
    } else {
      throw UnsolvableSeries("equation " + std::to_string(i + 1) +
                             " has a higher-order zero of its lead at x = 1");
    }
  }

  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(order + 1));
  for (int i = 0; i < m; ++i) a[i][0] = system.boundary[i];

  // sum_l sum_{r >= r_min} c_{il,r} a_{l, j - r} + f_j
  auto coupling_sum = [&](const ShiftedEquation& eq, int j, int r_min) {
    Rational s = at(eq.forcing, j);
    for (int l = 0; l < m; ++l) {
      const auto& c = eq.coupling[l];
      const int r_max = std::min<int>(j, static_cast<int>(c.size()) - 1);
      for (int r = r_min; r <= r_max; ++r) {
        if (sgn(c[r]) != 0) s += c[r] * a[l][j - r];
      }
    }
    return s;
  };
  // sum_{r >= r_min} lead_r (j - r + 1) a_{i, j - r + 1}
  auto lead_sum = [&](int i, int j, int r_min) {
    const auto& lead = eqs[i].lead;
    Rational s(0);
    const int r_max = std::min<int>(j + 1, static_cast<int>(lead.size()) - 1);
    for (int r = r_min; r <= r_max; ++r) {
      if (sgn(lead[r]) != 0) s += lead[r] * (j - r + 1) * a[i][j - r + 1];
    }
    return s;
  };

  for (int j = 0; j <= order; ++j) {
    if (j == 0) {
      for (int i : singular) {
        if (sgn(coupling_sum(eqs[i], 0, 0)) != 0) {
          throw UnsolvableSeries("boundary values violate equation " +
                                 std::to_string(i + 1) + " at x = 1");
        }
      }
    } else if (!singular.empty()) {
      // Unknowns a_{l,j} for singular l:
      //   -lead_1 j a_{i,j} - sum_{l sing} c_{il,0} a_{l,j} =
      //     sum_{r>=2} lead_r (j-r+1) a_{i,j-r+1}
      //     + sum_{l reg} c_{il,0} a_{l,j} + sum_l sum_{r>=1} c_{il,r} a_{l,j-r} + f_j
      const std::size_t s = singular.size();
      std::vector<std::vector<Rational>> lhs(s, std::vector<Rational>(s));
      std::vector<Rational> rhs(s);
      for (std::size_t row = 0; row < s; ++row) {
        const int i = singular[row];
        const ShiftedEquation& eq = eqs[i];
        for (std::size_t col = 0; col < s; ++col) {
          lhs[row][col] = -at(eq.coupling[singular[col]], 0);
        }
        lhs[row][row] -= at(eq.lead, 1) * j;
        Rational b = lead_sum(i, j, 2) + coupling_sum(eq, j, 1);
        for (int l : regular) b += at(eq.coupling[l], 0) * a[l][j];
        rhs[row] = std::move(b);
      }
      if (!gaussian_solve(lhs, rhs)) {
        throw UnsolvableSeries("coefficient system is singular at order " +
                               std::to_string(j));
      }
      for (std::size_t row = 0; row < s; ++row) {
        a[singular[row]][j] = std::move(rhs[row]);
      }
    }
    if (j == order) break;
    // Regular equations give a_{i,j+1} explicitly:
    //   lead_0 (j+1) a_{i,j+1} = -sum_{r>=1} lead_r (j-r+1) a_{i,j-r+1}
    //                            - sum_l sum_r c_{il,r} a_{l,j-r} - f_j
    for (int i : regular) {
      const Rational num = -(lead_sum(i, j, 1) + coupling_sum(eqs[i], j, 0));
      a[i][j + 1] = num / (at(eqs[i].lead, 0) * (j + 1));
    }
  }

  std::vector<TaylorSeries> out;
  out.reserve(m);
  for (auto& coeffs : a) out.emplace_back(std::move(coeffs));
  return out;
}

// --- Evaluation -------------------------------------------------------------

namespace {

void require_certifiable(const TaylorSeries& series) {
  if (!series.unit_bounded()) {
    throw CertificationError(
        "series coefficients exceed 1 in magnitude (max |a_j| = " +
        to_real(series.max_abs_coefficient()).str(12) +
        "); truncation bound is not certified");
  }
}

void require_in_range(const Real& x) {
  if (x < Real(0.25) || x > Real(1)) {
    throw std::domain_error("series evaluation needs x in [1/4, 1], got " +
                            x.str(20));
  }
}

// Coefficients converted once, for repeated evaluation.
class RealSeries {
 public:
  explicit RealSeries(const TaylorSeries& series) {
    coeffs_.reserve(series.coeffs().size());
    for (const Rational& c : series.coeffs()) coeffs_.push_back(to_real(c));
  }

  Real value(const Real& x) const {
    const Real t = 1 - x;
    Real acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc = acc * t + *it;
    }
    return acc;
  }

  // d/dx of the truncated sum.
  Real derivative(const Real& x) const {
    const Real t = 1 - x;
    Real acc = 0;
    for (std::size_t j = coeffs_.size() - 1; j >= 1; --j) {
      acc = acc * t + coeffs_[j] * static_cast<long>(j);
    }
    return -acc;
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }

 private:
  std::vector<Real> coeffs_;
};

Real tail_bound(int order, const Real& x) {
  return pow(1 - x, order + 1) / x;
}

struct Root {
  Real theta;
  Real radius;
};

Root fixed_point(const TaylorSeries& series, const Real& tolerance) {
  require_certifiable(series);
  if (tolerance <= 0) throw std::invalid_argument("tolerance must be > 0");
  const RealSeries f(series);
  auto g = [&](const Real& x) { return f.value(x) - x; };

  Real lo = 0.25;
  Real hi = 1;
  if (!(g(lo) > 0)) {
    // Fall back to a coarse scan of [0.01, 1] for a + to - sign change.
    bool found = false;
    for (int step = 1; step < 100 && !found; ++step) {
      const Real a = Real(step) / 100;
      const Real b = Real(step + 1) / 100;
      if (g(a) > 0 && !(g(b) > 0)) {
        lo = a;
        hi = b;
        found = true;
      }
    }
    if (!found) throw std::runtime_error("no sign change of ybar_m(x) - x");
  }
  while (hi - lo > tolerance) {
    const Real mid = (lo + hi) / 2;
    if (g(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Root root{(lo + hi) / 2, 0};
  const Real tail = tail_bound(f.order(), root.theta);
  if (tail > tolerance) {
    throw CertificationError("tolerance " + tolerance.str(6) +
                             " not reachable at order " +
                             std::to_string(f.order()) + " (tail bound " +
                             tail.str(6) + ")");
  }
  // Mean value theorem: |theta - theta_bar| <= tail / |ybar'(c) - 1|.
  const Real slope_gap = abs(f.derivative(root.theta) - 1);
  root.radius = tolerance / 2 + tail / (slope_gap < 1 ? slope_gap : Real(1));
  return root;
}

Real tolerance_for(unsigned digits) {
  if (digits > kMaxReportDigits) {
    throw std::invalid_argument("at most " + std::to_string(kMaxReportDigits) +
                                " digits can be resolved");
  }
  return pow(Real(10), -static_cast<int>(digits) - 2);
}

}  // namespace

SeriesValue evaluate(const TaylorSeries& series, const Real& x) {
  require_in_range(x);
  require_certifiable(series);
  return {RealSeries(series).value(x), tail_bound(series.order(), x)};
}

ExactSeriesValue evaluate_exact(const TaylorSeries& series, const Rational& x) {
  if (x < Rational(1, 4) || x > 1) {
    throw std::domain_error("series evaluation needs x in [1/4, 1]");
  }
  require_certifiable(series);
  const Rational t = 1 - x;
  Rational acc(0);
  for (auto it = series.coeffs().rbegin(); it != series.coeffs().rend(); ++it) {
    acc = acc * t + *it;
  }
  Rational t_pow(1);
  for (int j = 0; j <= series.order(); ++j) t_pow *= t;
  return {acc, Rational(t_pow / x)};
}

Real z_closed(int m, int i, const Real& x) {
  if (m < 1 || i < 1 || i > m) {
    throw std::out_of_range("z_closed needs 1 <= i <= m, got m=" +
                            std::to_string(m) + ", i=" + std::to_string(i));
  }
  if (x < 0 || x > 1) throw std::domain_error("z_closed needs x in [0, 1]");
  if (x == 0) return i == 1 ? Real(1) : Real(0);
  const Real v = pow(1 - x, Real(1) / m);
  const Real u = 1 - v;
  Real binom = 1;
  for (int j = 1; j <= i; ++j) binom = binom * (m - i + j) / j;
  return binom * pow(u, i) * pow(v, m - i) / x;
}

Real theta_limit(int m, int order, const Real& tolerance) {
  if (m < 1) throw InvalidSpec("m must be >= 1");
  if (m == 1) return exp(Real(-1));
  const auto series = taylor_solve(build_system(m), order);
  return fixed_point(series[m - 1], tolerance).theta;
}

AsymptoticSolution solve_asymptotics(int m, int order, unsigned digits) {
  if (m < 1) throw InvalidSpec("m must be >= 1");
  const Real tolerance = tolerance_for(digits);
  AsymptoticSolution out;
  out.m = m;
  out.order = order;
  out.digits = digits;
  if (m == 1) {
    // Classical limit: -x log x is maximized at 1/e with value 1/e.
    out.theta = exp(Real(-1));
    out.p_limit = out.theta;
    out.theta_radius = 0;
    out.p_radius = 0;
    return out;
  }
  const auto series = taylor_solve(build_system(m), order);
  const Root root = fixed_point(series[m - 1], tolerance);
  out.theta = root.theta;
  out.theta_radius = root.radius;

  Real p = 0;
  Real radius = root.radius;  // pi_m is stationary at theta; first-order slack
  for (int i = 1; i <= m; ++i) {
    const SeriesValue y = evaluate(series[i - 1], root.theta);
    const Real z = z_closed(m, i, root.theta);
    p += y.value * z;
    radius += y.tail_bound * z;
  }
  out.p_limit = p;
  out.p_radius = radius;
  return out;
}

Real limit_probability(int m, int order, unsigned digits) {
  return solve_asymptotics(m, order, digits).p_limit;
}

}  // namespace multisec
