"""Closed-form complexity bounds and the enumeration oracles behind them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DomainError
from .prefixcode import ceil_log2_power

CASE_A = "a"  # theta <= m1 <= m2
CASE_B = "b"  # m1 <= m2 < theta
CASE_C = "c"  # m1 < theta <= m2
CONSTANT = "constant"


@dataclass(frozen=True)
class BoundReport:
    """Per-instance bounds, kept both as integer set sizes and as bits.

    ``fooling_size`` is the lower-bound count (``lower = log2`` of it) and
    ``upper_size`` the upper-bound count. Comparisons against measured bit
    counts should go through :meth:`lower_block_bits` /
    :meth:`upper_block_bits`, which are exact.
    """

    lower_bits_per_instance: float
    upper_bits_per_instance: float
    fooling_size: int
    upper_size: int
    case_tag: Optional[str] = None
    valid: bool = True

    def lower_block_bits(self, B: int) -> int:
        """``ceil(B * lower)``: a fooling set of ``N`` inputs needs ``N`` distinct
        transcripts, hence at least ``ceil(log2 N)`` bits in the worst case."""
        return ceil_log2_power(self.fooling_size, B)

    def upper_block_bits(self, B: int) -> int:
        """``ceil(B * upper)`` computed exactly."""
        return ceil_log2_power(self.upper_size, B)

    def to_dict(self) -> dict:
        return {
            "lower": self.lower_bits_per_instance,
            "upper": self.upper_bits_per_instance,
            "fooling_size": self.fooling_size,
            "upper_size": self.upper_size,
            "case": self.case_tag,
            "valid": self.valid,
        }


def _report(lower_size: int, upper_size: int, case: Optional[str], valid: bool = True) -> BoundReport:
    return BoundReport(math.log2(lower_size), math.log2(upper_size), lower_size, upper_size, case, valid)


def threshold_case(theta: int, m1: int, m2: int) -> str:
    lo, hi = sorted((m1, m2))
    if theta == 0 or theta > lo + hi:
        return CONSTANT
    if theta <= lo:
        return CASE_A
    if theta > hi:
        return CASE_B
    return CASE_C


def threshold_size(theta: int, m1: int, m2: int) -> int:
    """``min(2θ+1, 2 min(m1,m2) + 2, 2(n-θ+1)+1)``, or 1 for a constant function."""
    if min(theta, m1, m2) < 0:
        raise DomainError("threshold and maxima must be >= 0")
    n = m1 + m2
    if theta == 0 or theta > n:
        return 1
    return min(2 * theta + 1, 2 * min(m1, m2) + 2, 2 * (n - theta + 1) + 1)


def case_formula(theta: int, m1: int, m2: int) -> int:
    """|Z| from the formula of the case that applies (not the min)."""
    lo, hi = sorted((m1, m2))
    case = threshold_case(theta, lo, hi)
    if case == CASE_A:
        return 2 * theta + 1
    if case == CASE_B:
        return 2 * (lo + hi - theta + 1) + 1
    if case == CASE_C:
        return 2 * lo + 2
    return 1


def threshold_complexity(theta: int, m1: int, m2: int) -> BoundReport:
    size = threshold_size(theta, m1, m2)
    return _report(size, size, threshold_case(theta, m1, m2))


def fooling_oracle(theta: int, m1: int, m2: int) -> int:
    """Count pairs ``(z1, z2)`` in the grid with ``θ-1 <= z1 + z2 <= θ``.

    Returns 1 for ``θ = 0`` by convention.
    """
    if theta <= 0:
        return 1
    return sum(
        1
        for z1 in range(m1 + 1)
        for z2 in range(m2 + 1)
        if theta - 1 <= z1 + z2 <= theta
    )


def coefficient_oracle(max_values: Sequence[int], powers: Iterable[int]) -> int:
    """Sum of the coefficients of ``Y^e``, ``e`` in ``powers``, in
    ``prod_i (1 + Y + ... + Y^{max_i})``.

    Negative exponents contribute zero.
    """
    poly = [1]
    for m in max_values:
        if m < 0:
            raise DomainError("maxima must be >= 0")
        out = [0] * (len(poly) + m)
        for i, c in enumerate(poly):
            if c:
                for j in range(m + 1):
                    out[i + j] += c
        poly = out
    return sum(poly[e] for e in set(powers) if 0 <= e < len(poly))


def interval_bounds(a: int, b: int, m1: int, m2: int) -> BoundReport:
    """Lower/upper per-instance bounds for ``1{a <= X1 + X2 <= b}``.

    ``valid`` records whether ``b <= (m1 + m2) / 2``, the regime in which
    the lower bound is claimed.
    """
    if a > b or min(a, b, m1, m2) < 0:
        raise DomainError(f"bad interval [{a}, {b}] or maxima ({m1}, {m2})")
    n = m1 + m2
    valid = 2 * b <= n
    if a > n or (a == 0 and b >= n):
        return _report(1, 1, CONSTANT, valid)
    lo = min(m1, m2)
    lower = min(2 * b - a + 3, lo + 1)
    upper = min(2 * (b + 1) + 1, 2 * lo + 2)
    return _report(lower, upper, None, valid)
