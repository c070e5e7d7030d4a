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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "multisec/asymptotics.hpp"
#include "multisec/core_dp.hpp"
#include "multisec/montecarlo.hpp"

namespace py = pybind11;

namespace {

struct Solution {
  int m;
  int n;
  int k_star;
  double p_success;
  double p_check;
  std::optional<std::string> p_exact;  // "num/den" in exact mode
};

Solution solve(int m, int n, bool exact) {
  if (exact) {
    const auto s = multisec::solve<multisec::Rational>(
        {m, n, multisec::Arithmetic::kExactRational});
    return {m, n, s.k_star, s.p_success.get_d(), s.p_check.get_d(),
            s.p_success.get_str()};
  }
  const auto s = multisec::solve<double>({m, n});
  return {m, n, s.k_star, s.p_success, s.p_check, std::nullopt};
}

// Rows i = 1..m, columns k = 1..n.
py::array_t<double> to_array(const multisec::ValueTable<double>& t) {
  const int m = t.copies();
  const int n = t.candidates();
  py::array_t<double> out({m, n});
  auto view = out.mutable_unchecked<2>();
  for (int k = 1; k <= n; ++k) {
    for (int i = 1; i <= m; ++i) view(i - 1, k - 1) = t(i, k);
  }
  return out;
}

std::string text(const multisec::Real& x, unsigned digits) {
  return x.str(static_cast<std::streamsize>(digits) + 2, std::ios::fixed);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Multi-copy secretary problem engine";

  py::register_exception<multisec::SizeLimitExceeded>(mod, "SizeLimitExceeded",
                                                     PyExc_RuntimeError);
  py::register_exception<multisec::CertificationError>(
      mod, "CertificationError", PyExc_RuntimeError);

  py::class_<Solution>(mod, "Solution")
      .def_readonly("m", &Solution::m)
      .def_readonly("n", &Solution::n)
      .def_readonly("k_star", &Solution::k_star)
      .def_readonly("p_success", &Solution::p_success)
      .def_readonly("p_check", &Solution::p_check)
      .def_readonly("p_exact", &Solution::p_exact)
      .def("__repr__", [](const Solution& s) {
        return "Solution(m=" + std::to_string(s.m) +
               ", n=" + std::to_string(s.n) +
               ", k_star=" + std::to_string(s.k_star) +
               ", p_success=" + py::repr(py::float_(s.p_success)).cast<std::string>() +
               ")";
      });

  mod.def("solve", &solve, py::arg("m"), py::arg("n"),
          py::arg("exact") = false,
          py::call_guard<py::gil_scoped_release>(),
          "Optimal threshold k* and success probability.");

  mod.def(
      "tables",
      [](int m, int n) {
        multisec::ValueTables<double> t;
        {
          py::gil_scoped_release release;
          t = multisec::compute_tables<double>({m, n});
        }
        py::dict out;
        out["psi"] = to_array(t.psi);
        out["phi"] = to_array(t.phi);
        out["theta"] = to_array(t.theta);
        return out;
      },
      py::arg("m"), py::arg("n"),
      "Psi, Phi and Theta as (m, n) arrays; column k - 1 holds k.");

  mod.def(
      "success_probability",
      [](int m, int n, int k, bool exact) -> py::object {
        if (exact) {
          return py::str(multisec::success_probability<multisec::Rational>(
                             {m, n, multisec::Arithmetic::kExactRational}, k)
                             .get_str());
        }
        return py::float_(multisec::success_probability<double>({m, n}, k));
      },
      py::arg("m"), py::arg("n"), py::arg("k"), py::arg("exact") = false,
      "P(k); a 'num/den' string when exact.");

  mod.def(
      "simulate",
      [](int m, int n, int threshold, std::uint64_t trials, std::uint64_t seed,
         unsigned threads) {
        multisec::SimulationEstimate est;
        {
          py::gil_scoped_release release;
          est = multisec::estimate({{m, n}, threshold, trials, seed, threads});
        }
        py::dict out;
        out["successes"] = est.successes;
        out["trials"] = est.trials;
        out["p_hat"] = est.p_hat;
        out["std_err"] = est.std_err;
        out["seed"] = est.seed;
        return out;
      },
      py::arg("m"), py::arg("n"), py::arg("threshold"),
      py::arg("trials") = 100000, py::arg("seed") = 0, py::arg("threads") = 1);

  mod.def(
      "exhaustive",
      [](int m, int n, int threshold, std::uint64_t cap) {
        return multisec::exhaustive(
                   {m, n, multisec::Arithmetic::kExactRational}, threshold, cap)
            .get_str();
      },
      py::arg("m"), py::arg("n"), py::arg("threshold"),
      py::arg("cap") = multisec::kDefaultArrangementCap,
      "Exact P(threshold) by enumerating every arrangement.");

  mod.def(
      "asymptotics",
      [](int m, int order, unsigned digits) {
        multisec::AsymptoticSolution s;
        {
          py::gil_scoped_release release;
          s = multisec::solve_asymptotics(m, order, digits);
        }
        py::dict out;
        out["theta_lim"] = text(s.theta, digits);
        out["theta_radius"] = s.theta_radius.convert_to<double>();
        out["p_lim"] = text(s.p_limit, digits);
        out["p_radius"] = s.p_radius.convert_to<double>();
        return out;
      },
      py::arg("m"), py::arg("order") = multisec::kDefaultOrder,
      py::arg("digits") = 15,
      "Limits as decimal strings with two guard digits, plus error radii.");

  mod.def(
      "theta_limit",
      [](int m, int order, unsigned digits) {
        return text(multisec::solve_asymptotics(m, order, digits).theta,
                    digits);
      },
      py::arg("m"), py::arg("order") = multisec::kDefaultOrder,
      py::arg("digits") = 15);

  mod.def(
      "limit_probability",
      [](int m, int order, unsigned digits) {
        return text(multisec::limit_probability(m, order, digits), digits);
      },
      py::arg("m"), py::arg("order") = multisec::kDefaultOrder,
      py::arg("digits") = 15);

  mod.def(
      "z_closed",
      [](int m, int i, double x) {
        return multisec::z_closed(m, i, multisec::Real(x)).convert_to<double>();
      },
      py::arg("m"), py::arg("i"), py::arg("x"));
}
