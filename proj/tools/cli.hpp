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

#ifndef MULTISEC_TOOLS_CLI_HPP_
#define MULTISEC_TOOLS_CLI_HPP_

#include <ostream>
#include <string>

#include "multisec/asymptotics.hpp"
#include "multisec/problem.hpp"

namespace multisec::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kInfeasible = 2,
  kCertification = 3,
};

// Largest m * n accepted with --exact. Rational denominators grow linearly
// in the stream length, so cost rises steeply past this point.
inline constexpr std::int64_t kExactStreamCap = 10000;

// Decimal text truncated (not rounded) after `digits` fractional digits.
// Inputs are non-negative.
std::string truncate_decimal(const Rational& value, int digits);
std::string truncate_decimal(const Real& value, int digits);
std::string truncate_decimal(double value, int digits);

// Parses "a..b" or a single integer.
std::pair<int, int> parse_range(const std::string& text);

// Entry point shared by the executable and the tests. argv[0] is the
// program name.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace multisec::cli

#endif  // MULTISEC_TOOLS_CLI_HPP_
