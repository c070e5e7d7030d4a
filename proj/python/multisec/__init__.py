# Copyright 2026 The Multisec Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Multi-copy secretary problem: thresholds, success probabilities,
asymptotic limits and Monte Carlo validation."""

from fractions import Fraction

from ._core import (
    CertificationError,
    SizeLimitExceeded,
    Solution,
    asymptotics,
    exhaustive,
    limit_probability,
    simulate,
    solve,
    success_probability,
    tables,
    theta_limit,
    z_closed,
)

__all__ = [
    "CertificationError",
    "SizeLimitExceeded",
    "Solution",
    "asymptotics",
    "exact_probability",
    "exhaustive",
    "limit_probability",
    "simulate",
    "solve",
    "success_probability",
    "tables",
    "theta_limit",
    "z_closed",
]


def exact_probability(m: int, n: int, k: int) -> Fraction:
    """P(k) as a Fraction."""
    return Fraction(success_probability(m, n, k, exact=True))
