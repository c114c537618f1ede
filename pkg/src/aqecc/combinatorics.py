"""Sector counting: binomials, Motzkin-sector counts and their Gaussian limits.

Counts are exact Python integers while they stay below ``10**digit_budget``;
past that only the natural log is kept, evaluated through ``math.lgamma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ParityError, RangeError

DEFAULT_DIGIT_BUDGET = 300
_LN10 = math.log(10.0)


@dataclass(frozen=True)
class SectorCount:
    """A non-negative count held exactly, in log space, or both.

    ``exact`` is ``None`` once the value outgrows the digit budget.
    ``log_value`` is ``-inf`` for a zero count.
    """

    exact: Optional[int]
    log_value: float

    def __post_init__(self):
        if self.exact is not None and self.exact < 0:
            raise ValueError("counts are non-negative")

    @classmethod
    def from_int(cls, value: int) -> "SectorCount":
        return cls(value, math.log(value) if value > 0 else -math.inf)

    @property
    def is_zero(self) -> bool:
        return self.exact == 0 if self.exact is not None else self.log_value == -math.inf

    def __int__(self):
        if self.exact is None:
            raise OverflowError("count only available in log space")
        return self.exact


ZERO = SectorCount(0, -math.inf)


def _log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binomial(n: int, k: int, digit_budget: int = DEFAULT_DIGIT_BUDGET) -> SectorCount:
    """C(n, k), zero outside ``0 <= k <= n``."""
    if n < 0:
        raise RangeError(f"n must be non-negative, got {n}")
    if k < 0 or k > n:
        return ZERO
    log_value = _log_binomial(n, k)
    if log_value / _LN10 < digit_budget:
        return SectorCount.from_int(math.comb(n, k))
    return SectorCount(None, log_value)


def heisenberg_sector_count(N: int, m: int, digit_budget: int = DEFAULT_DIGIT_BUDGET) -> SectorCount:
    """Number of spin-1/2 strings of length N with magnetization m."""
    check_heisenberg_label(N, m)
    return binomial(N, (N + m) // 2, digit_budget)


def check_heisenberg_label(N: int, m: int) -> None:
    if N < 0:
        raise RangeError(f"chain length must be non-negative, got {N}")
    if abs(m) > N:
        raise RangeError(f"|m| = {abs(m)} exceeds N = {N}")
    if (N - m) % 2:
        raise ParityError(f"magnetization {m} has the wrong parity for N = {N}")


def _motzkin_terms(L: int, i: int):
    """Yield (f, up) for the non-vanishing terms of the flat-step sum."""
    for f in range(L + 1):
        rest = L - f
        if (rest + i) % 2:
            continue
        up = (rest + i) // 2
        if 0 <= up <= rest:
            yield f, up


def motzkin_log_count(L: int, i: int) -> float:
    """log of the number of strings in {-1,0,1}^L summing to i, via lgamma.

    Terms are combined with a shifted exponential sum accumulated by
    ``math.fsum`` in ascending f.
    """
    if L < 0 or abs(i) > L:
        raise RangeError(f"|i| = {abs(i)} exceeds L = {L}")
    logs = [_log_binomial(L - f, up) + _log_binomial(L, f) for f, up in _motzkin_terms(L, i)]
    top = max(logs)
    return top + math.log(math.fsum(math.exp(t - top) for t in logs))


def motzkin_sector_count(L: int, i: int, digit_budget: int = DEFAULT_DIGIT_BUDGET) -> SectorCount:
    """Number of strings in {-1,0,1}^L with coordinate sum i.

    Sums C(L-f, (L-f+i)/2) * C(L, f) over the number f of flat steps.
    """
    log_value = motzkin_log_count(L, i)
    if log_value / _LN10 >= digit_budget:
        return SectorCount(None, log_value)
    total = sum(math.comb(L - f, up) * math.comb(L, f) for f, up in _motzkin_terms(L, i))
    return SectorCount.from_int(total)


def motzkin_sector_count_asymptotic(L: int, i: int) -> float:
    """log of 3^(L+1/2) / (2 sqrt(pi L)) * exp(-3 i^2 / 4L)."""
    return (
        (L + 0.5) * math.log(3.0)
        - math.log(2.0)
        - 0.5 * math.log(math.pi * L)
        - 3.0 * i * i / (4.0 * L)
    )


def gaussian_binomial_approx(a: int, b: int) -> float:
    """log of 2^(a+1) / sqrt(2 pi a) * exp(-b^2 / 2a), the Gaussian form of C(a, a/2 + b/2)."""
    if a < 1:
        raise RangeError(f"a must be >= 1, got {a}")
    return (a + 1) * math.log(2.0) - 0.5 * math.log(2.0 * math.pi * a) - b * b / (2.0 * a)
