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

#ifndef MULTISEC_PROBLEM_HPP_
#define MULTISEC_PROBLEM_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace multisec {

using Rational = mpq_class;

enum class Arithmetic { kBinary64, kExactRational };

// An instance of the m-returning secretary problem: n distinct candidates,
// each of which arrives m times in a uniformly random order.
struct ProblemSpec {
  int m = 1;  // copies per candidate
  int n = 1;  // distinct candidates
  Arithmetic mode = Arithmetic::kBinary64;

  // m * n, the length of the arrival stream.
  std::int64_t stream_length() const {
    return static_cast<std::int64_t>(m) * n;
  }
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an instance is too large for exhaustive treatment.
class SizeLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a truncation error bound cannot be certified.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws InvalidSpec unless m >= 1 and n >= 1.
void validate(const ProblemSpec& spec);

std::string to_string(Arithmetic mode);

template <typename Scalar>
struct ArithmeticOf;
template <>
struct ArithmeticOf<double> {
  static constexpr Arithmetic value = Arithmetic::kBinary64;
};
template <>
struct ArithmeticOf<Rational> {
  static constexpr Arithmetic value = Arithmetic::kExactRational;
};

// a / b in the requested scalar type.
template <typename Scalar>
Scalar ratio(std::int64_t a, std::int64_t b);

template <>
inline double ratio<double>(std::int64_t a, std::int64_t b) {
  return static_cast<double>(a) / static_cast<double>(b);
}

template <>
inline Rational ratio<Rational>(std::int64_t a, std::int64_t b) {
  Rational r{mpz_class(static_cast<long>(a)), mpz_class(static_cast<long>(b))};
  r.canonicalize();
  return r;
}

}  // namespace multisec

#endif  // MULTISEC_PROBLEM_HPP_
