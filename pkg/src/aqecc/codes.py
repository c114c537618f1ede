"""Closed-form d-site reduced density matrices of magnetization-sector codewords.

A codeword is the uniform superposition over all basis strings of a chain
with fixed magnetization: spin-1/2 strings in {-1,1}^N ("heisenberg") or
spin-1 strings in {-1,0,1}^N ("motzkin"). Cutting the ring into d sites and
the rest, the reduced state is diagonal in the basis of d-site sector states,
so it is stored as a weight per sector label r in -d..d.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from . import combinatorics as cb
from .errors import CapacityError, RangeError, ShapeError


class Model(str, enum.Enum):
    HEISENBERG = "heisenberg"
    MOTZKIN = "motzkin"

    @property
    def site_dim(self) -> int:
        return 2 if self is Model.HEISENBERG else 3


def as_model(model) -> Model:
    try:
        return Model(model.value if isinstance(model, Model) else str(model).lower())
    except ValueError:
        raise RangeError(f"unknown model {model!r}") from None


@dataclass(frozen=True)
class CodewordSpec:
    model: Model
    N: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "model", as_model(self.model))
        if self.N < 1:
            raise RangeError(f"chain length must be positive, got {self.N}")
        if self.model is Model.HEISENBERG:
            cb.check_heisenberg_label(self.N, self.m)
        elif abs(self.m) > self.N:
            raise RangeError(f"|m| = {abs(self.m)} exceeds N = {self.N}")


@dataclass(frozen=True)
class CodeSpace:
    model: Model
    N: int
    d: int
    k: int
    spacing: int
    magnetizations: Tuple[int, ...]

    def codewords(self) -> List[CodewordSpec]:
        return [CodewordSpec(self.model, self.N, m) for m in self.magnetizations]

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "N": self.N,
            "d": self.d,
            "k": self.k,
            "spacing": self.spacing,
            "magnetizations": list(self.magnetizations),
        }


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """Diagonal d-site reduced state, one weight per sector label.

    ``exact`` records whether the weights were formed from exact integer
    counts (True) or from log-space counts (False).
    """

    model: Model
    d: int
    weights: Dict[int, float]
    log_weights: Dict[int, float] = field(repr=False)
    exact: bool = True

    def labels(self) -> List[int]:
        return list(range(-self.d, self.d + 1))

    def weight(self, r: int) -> float:
        return self.weights.get(r, 0.0)

    def total(self) -> float:
        return math.fsum(self.weights.values())


def _count(model: Model, L: int, i: int) -> cb.SectorCount:
    if abs(i) > L:
        return cb.ZERO
    if model is Model.HEISENBERG:
        if (L - i) % 2:
            return cb.ZERO
        return cb.heisenberg_sector_count(L, i)
    return cb.motzkin_sector_count(L, i)


def _sector_labels(model: Model, d: int) -> List[int]:
    step = 2 if model is Model.HEISENBERG else 1
    return list(range(-d, d + 1, step))


def schmidt_weights(spec: CodewordSpec, d: int) -> ReducedDensityMatrix:
    """Diagonal weights of the d-site reduced density matrix of a codeword.

    weight(r) = |sector(d, r)| * |sector(N-d, m-r)| / |sector(N, m)|.
    """
    model, N, m = spec.model, spec.N, spec.m
    if not 1 <= d < N:
        raise RangeError(f"support length d={d} must satisfy 1 <= d < N={N}")
    total = _count(model, N, m)
    parts = {r: (_count(model, d, r), _count(model, N - d, m - r)) for r in _sector_labels(model, d)}
    exact = total.exact is not None and all(
        a.exact is not None and b.exact is not None for a, b in parts.values()
    )
    weights, log_weights = {}, {}
    for r, (inner, outer) in parts.items():
        if inner.is_zero or outer.is_zero:
            continue
        if exact:
            w = Fraction(inner.exact * outer.exact, total.exact)
            weights[r] = float(w)
            log_weights[r] = math.log(w.numerator) - math.log(w.denominator)
        else:
            lw = inner.log_value + outer.log_value - total.log_value
            weights[r] = math.exp(lw)
            log_weights[r] = lw
    return ReducedDensityMatrix(model, d, weights, log_weights, exact)


def _abs_diff(la: float, lb: float) -> float:
    # |e^la - e^lb| without forming the two near-equal terms separately.
    hi, lo = (la, lb) if la >= lb else (lb, la)
    if hi == -math.inf:
        return 0.0
    return -math.exp(hi) * math.expm1(lo - hi)


def rdm_trace_distance(a: ReducedDensityMatrix, b: ReducedDensityMatrix) -> float:
    """Trace norm of the difference, sum_r |a(r) - b(r)| (no factor 1/2)."""
    if a.model is not b.model or a.d != b.d:
        raise ShapeError(
            f"cannot compare {a.model.value} d={a.d} with {b.model.value} d={b.d}"
        )
    labels = sorted(set(a.log_weights) | set(b.log_weights))
    return math.fsum(
        _abs_diff(a.log_weights.get(r, -math.inf), b.log_weights.get(r, -math.inf))
        for r in labels
    )


def code_spacing(model, d: int) -> int:
    """Magnetization step between codewords.

    2d+1 for spin-1; spin-1/2 labels share the parity of N, so the smallest
    admissible step above 2d there is 2d+2.
    """
    model = as_model(model)
    return 2 * d + 1 if model is Model.MOTZKIN else 2 * d + 2


def select_code_space(model, N: int, k: int, d: int, c: float = 1.0) -> CodeSpace:
    """Magnetization ladder with at least 2**k codewords, spaced beyond 2d.

    The half-width m_max is the smallest multiple of the spacing that gives
    enough rungs. Odd-N spin-1/2 ladders are centred on m = 1.
    """
    model = as_model(model)
    if k < 1:
        raise RangeError(f"k must be >= 1, got {k}")
    if d < 1:
        raise RangeError(f"d must be >= 1, got {d}")
    spacing = code_spacing(model, d)
    rungs = math.ceil((2**k - 1) / 2)
    m_max = rungs * spacing
    centre = 1 if model is Model.HEISENBERG and N % 2 else 0
    mags = tuple(centre + j * spacing for j in range(-rungs, rungs + 1))
    largest = max(abs(x) for x in mags)
    if largest > c * math.sqrt(N):
        raise CapacityError(
            f"need |m| up to {largest} (m_max = {m_max}) but only |m| <= {c} sqrt(N) = "
            f"{c * math.sqrt(N):.3g} is allowed at N = {N}"
        )
    for m in mags:
        CodewordSpec(model, N, m)
    return CodeSpace(model, N, d, k, spacing, mags)


def predicted_error_exponent(a: float, b: float) -> Tuple[float, bool]:
    """Exponent 1/2 - 5a/2 - b of the code error decay, and whether it is admissible."""
    exponent = 0.5 - 2.5 * a - b
    return exponent, bool(a > 0 and b > 0 and exponent > 0)


def scaling_curve(
    model,
    d: int,
    m: int,
    m_prime: int,
    N_grid: Sequence[int],
    workers: int = 1,
) -> List[Tuple[int, float]]:
    """Trace distance between the d-site states of codewords m and m' for each N."""
    model = as_model(model)

    def point(N):
        a = schmidt_weights(CodewordSpec(model, N, m), d)
        b = schmidt_weights(CodewordSpec(model, N, m_prime), d)
        return N, rdm_trace_distance(a, b)

    grid = sorted(N_grid)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, grid))
    return [point(N) for N in grid]

