"""Empirical eigenstate scans over a microcanonical window.

The scans report what they measure; none of them fail when a thermalization
hypothesis is violated.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import dense, lattice
from .dense import LocalOperator
from .ed import (
    EigenSolution,
    MicrocanonicalWindow,
    build_hamiltonian,
    diagonalize_sectored,
    make_window,
    sample_random_codewords,
)
from .errors import BudgetError, EmptyWindowError, ShapeError


@dataclass
class ScanReport:
    model: str
    N: int
    observable: str
    window: dict
    rows: List[dict]
    statistics: dict
    fit: Optional[dict] = None
    columns: List[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row[c]) for c in self.columns])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {
            "model": self.model,
            "N": self.N,
            "observable": self.observable,
            "window": self.window,
            "statistics": self.statistics,
            "fit": self.fit,
            "row_count": len(self.rows),
        }


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def summarize(values: Sequence[float], threshold: Optional[float] = None) -> dict:
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        return {"count": 0, "max": None, "median": None, "exceedance_fraction": None, "undefined": True}
    out = {"count": int(vals.size), "max": float(vals.max()), "median": float(np.median(vals)), "undefined": False}
    if threshold is not None:
        out["threshold"] = threshold
        out["exceedance_fraction"] = float(np.mean(vals > threshold))
    return out


def _members(window: MicrocanonicalWindow, minimum: int) -> np.ndarray:
    idx = np.array(window.member_indices, dtype=int)
    if idx.size < minimum:
        raise EmptyWindowError(f"window holds {idx.size} states, need at least {minimum}")
    return idx


def _operator_matrix_elements(sol: EigenSolution, idx: np.ndarray, O: LocalOperator) -> np.ndarray:
    """<E_k|O|E_l> for k, l in idx."""
    if O.site_dim != sol.site_dim:
        raise ShapeError("observable and solution have different site dimensions")
    vecs = sol.vectors(idx)
    images = lattice.apply_on_sites(O.matrix, vecs, O.sites(sol.N), sol.site_dim, sol.N)
    return vecs.conj().T @ images


def _diagonal_expectations(sol, idx, O):
    vecs = sol.vectors(idx)
    images = lattice.apply_on_sites(O.matrix, vecs, O.sites(sol.N), sol.site_dim, sol.N)
    return np.einsum("ik,ik->k", vecs.conj(), images)


def _header(sol, window, O, model):
    return dict(model=model, N=sol.N, observable=O.label or "O", window=window.to_dict())


def diagonal_eth_scan(sol: EigenSolution, window: MicrocanonicalWindow, O: LocalOperator,
                      model: str = "") -> ScanReport:
    """Differences of <E|O|E> between energy-consecutive window members."""
    idx = _members(window, 1)
    diag = _diagonal_expectations(sol, idx, O)
    rows = []
    for a, b in zip(range(idx.size - 1), range(1, idx.size)):
        rows.append({
            "index_a": int(idx[a]),
            "index_b": int(idx[b]),
            "energy_a": float(sol.energies[idx[a]]),
            "energy_b": float(sol.energies[idx[b]]),
            "value": float(abs(diag[a] - diag[b])),
        })
    return ScanReport(
        **_header(sol, window, O, model),
        rows=rows,
        statistics=summarize([r["value"] for r in rows], threshold=1e-12),
        columns=["index_a", "index_b", "energy_a", "energy_b", "value"],
    )


def _binned_fit(gaps, values, bins=8, floor=1e-14):
    keep = values > floor
    if keep.sum() < 2:
        return None
    g, v = gaps[keep], values[keep]
    order = np.argsort(g, kind="stable")
    chunks = [c for c in np.array_split(order, min(bins, order.size)) if c.size]
    xs = np.array([np.median(g[c]) for c in chunks])
    ys = np.array([np.median(np.log(v[c])) for c in chunks])
    if np.unique(xs).size < 2:
        return None
    slope, intercept = np.polyfit(xs, ys, 1)
    return {"slope": float(slope), "intercept": float(intercept), "bins": len(chunks),
            "bin_gap_medians": xs.tolist(), "bin_log_medians": ys.tolist()}


def offdiagonal_decay_scan(sol: EigenSolution, window: MicrocanonicalWindow, O: LocalOperator,
                           model: str = "", bins: int = 8) -> ScanReport:
    """|<E_k|O|E_l>| against |E_k - E_l| over unordered member pairs, with a decay fit
    on equal-population gap bins."""
    idx = _members(window, 2)
    elems = np.abs(_operator_matrix_elements(sol, idx, O))
    rows = []
    for a, b in itertools.combinations(range(idx.size), 2):
        rows.append({
            "index_a": int(idx[a]),
            "index_b": int(idx[b]),
            "gap": float(abs(sol.energies[idx[a]] - sol.energies[idx[b]])),
            "value": float(elems[a, b]),
        })
    gaps = np.array([r["gap"] for r in rows])
    vals = np.array([r["value"] for r in rows])
    return ScanReport(
        **_header(sol, window, O, model),
        rows=rows,
        statistics=summarize(vals, threshold=1e-12),
        fit=_binned_fit(gaps, vals, bins),
        columns=["index_a", "index_b", "gap", "value"],
    )


def offdiagonal_elements(sol: EigenSolution, window: MicrocanonicalWindow, O: LocalOperator) -> np.ndarray:
    """Full matrix of |<E_k|O|E_l>| over the window members."""
    return np.abs(_operator_matrix_elements(sol, _members(window, 1), O))


def weak_eth_fraction(sol: EigenSolution, window: MicrocanonicalWindow, O: LocalOperator, delta: float) -> float:
    """Fraction of members whose recentred expectation <E_k|O - <O>_MC|E_k> is >= delta."""
    idx = _members(window, 1)
    diag = _diagonal_expectations(sol, idx, O).real
    centred = diag - diag.mean()
    return float(np.mean(centred >= delta))


def weak_eth_scan(sol: EigenSolution, window: MicrocanonicalWindow, O: LocalOperator, delta: float,
                  model: str = "") -> ScanReport:
    """Per-member recentred expectations; ``exceedance_fraction`` equals :func:`weak_eth_fraction`."""
    idx = _members(window, 1)
    diag = _diagonal_expectations(sol, idx, O).real
    centred = diag - diag.mean()
    rows = [{"index": int(i), "energy": float(sol.energies[i]), "value": float(v)} for i, v in zip(idx, centred)]
    stats = summarize(centred)
    stats.update(threshold=delta, exceedance_fraction=float(np.mean(centred >= delta)),
                 microcanonical_mean=float(diag.mean()))
    return ScanReport(**_header(sol, window, O, model), rows=rows, statistics=stats,
                      columns=["index", "energy", "value"])


def rdm_distance_pairs(
    sol: EigenSolution,
    window: MicrocanonicalWindow,
    d: int,
    sample_pairs: int,
    seed: Optional[int] = None,
    support_start: int = 1,
    max_rdm_dim: int = 256,
    model: str = "",
) -> ScanReport:
    """Trace norms of differences of d-site reduced states for sampled distinct member pairs."""
    idx = _members(window, 2)
    if sol.site_dim**d > max_rdm_dim:
        raise BudgetError(f"reduced state of dimension {sol.site_dim}^{d} exceeds {max_rdm_dim}")
    n = idx.size
    if sample_pairs >= n * (n - 1) // 2:
        pairs = list(itertools.combinations(range(n), 2))
    else:
        rng = np.random.default_rng(seed)
        picked = set()
        while len(picked) < sample_pairs:
            a, b = (int(x) for x in rng.integers(0, n, size=2))
            if a != b:
                picked.add((min(a, b), max(a, b)))
        pairs = sorted(picked)
    cache = {}

    def rdm(pos):
        if pos not in cache:
            cache[pos] = dense.partial_trace(sol.state(int(idx[pos])), support_start, d)
        return cache[pos]

    rows = []
    for a, b in pairs:
        rows.append({
            "index_a": int(idx[a]),
            "index_b": int(idx[b]),
            "energy_a": float(sol.energies[idx[a]]),
            "energy_b": float(sol.energies[idx[b]]),
            "value": dense.trace_norm(rdm(a) - rdm(b)),
        })
    return ScanReport(
        model=model,
        N=sol.N,
        observable=f"rdm(d={d}, start={support_start})",
        window=window.to_dict(),
        rows=rows,
        statistics=summarize([r["value"] for r in rows]),
        columns=["index_a", "index_b", "energy_a", "energy_b", "value"],
    )


def sampled_code_epsilon(
    sol: EigenSolution,
    window: MicrocanonicalWindow,
    L: int,
    d: int,
    seed: Optional[int] = None,
    mode: str = "uniform",
    all_positions: bool = True,
):
    """Draw L window eigenstates and evaluate their KL epsilon matrix over the d-local basis.

    Returns (indices, epsilon matrix).
    """
    idx = sample_random_codewords(sol, window, L, mode, seed)
    positions = range(1, sol.N + 1) if all_positions else [1]
    basis = dense.error_basis(sol.site_dim, d, positions)
    eps = dense.kl_epsilon_oracle([sol.state(i) for i in idx], basis)
    return idx, eps


def theorem1_trend(model_name: str, N: int, L: int = 4, d: int = 1, seeds=range(1, 21)) -> float:
    """Seed-averaged max epsilon for codewords drawn at E = N/2."""
    sol = diagonalize_sectored(build_hamiltonian(model_name, N))
    window = make_window(sol, N / 2)
    return float(np.mean([sampled_code_epsilon(sol, window, L, d, s)[1].max() for s in seeds]))

