"""Brute-force state vectors for small rings.

Everything here works on explicit length-D**N amplitude vectors and makes no
use of the closed forms in :mod:`aqecc.codes`; the two are meant to check one
another.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import lattice
from .budget import check_dimension
from .codes import CodewordSpec, Model, ReducedDensityMatrix
from .errors import OrthogonalityError, ShapeError


@dataclass(frozen=True, eq=False)
class DenseState:
    N: int
    site_dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.site_dim**self.N,):
            raise ShapeError(f"expected {self.site_dim**self.N} amplitudes, got {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ShapeError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Operator on ``support_len`` consecutive sites starting at 1-based ``support_start``."""

    matrix: np.ndarray
    site_dim: int
    support_len: int
    support_start: int = 1
    label: str = ""

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        dim = self.site_dim**self.support_len
        if mat.shape != (dim, dim):
            raise ShapeError(f"matrix of shape {mat.shape} does not act on {self.support_len} sites")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def sites(self, N: int) -> List[int]:
        return lattice.support_sites(self.support_start, self.support_len, N)

    def at(self, start: int) -> "LocalOperator":
        return LocalOperator(self.matrix, self.site_dim, self.support_len, start, self.label)

    def adjoint(self) -> "LocalOperator":
        return LocalOperator(self.matrix.conj().T, self.site_dim, self.support_len, self.support_start,
                             self.label + "^dag" if self.label else "")


def _check_geometry(*states: DenseState):
    ref = states[0]
    for s in states[1:]:
        if (s.N, s.site_dim) != (ref.N, ref.site_dim):
            raise ShapeError("states live on different chains")


def build_codeword_vector(spec: CodewordSpec) -> DenseState:
    """Uniform superposition over all basis strings with magnetization ``spec.m``."""
    D = spec.model.site_dim
    check_dimension(D, spec.N)
    mask = lattice.magnetizations(D, spec.N) == spec.m
    amps = mask / np.sqrt(mask.sum())
    return DenseState(spec.N, D, amps)


def apply(op: LocalOperator, state: DenseState) -> np.ndarray:
    if op.site_dim != state.site_dim:
        raise ShapeError("operator and state have different site dimensions")
    return lattice.apply_on_sites(op.matrix, state.amplitudes, op.sites(state.N), state.site_dim, state.N)


def matrix_element(bra: DenseState, op: LocalOperator, ket: DenseState) -> complex:
    """<bra| E |ket> with E embedded on its (wrapped) support."""
    _check_geometry(bra, ket)
    return complex(np.vdot(bra.amplitudes, apply(op, ket)))


def partial_trace(state: DenseState, support_start: int, support_len: int) -> np.ndarray:
    """Reduced density matrix on a contiguous wrapped support, first support site most significant."""
    N, D = state.N, state.site_dim
    check_dimension(D, N)
    sites = lattice.support_sites(support_start, support_len, N)
    psi = state.amplitudes.reshape((D,) * N)
    rest = [j for j in range(N) if j not in sites]
    mat = np.transpose(psi, sites + rest).reshape(D**support_len, D ** (N - support_len))
    return mat @ mat.conj().T


def sector_state(model, d: int, r: int) -> np.ndarray:
    """Normalized uniform superposition over d-site strings with magnetization r."""
    D = Model(model).site_dim
    mask = lattice.magnetizations(D, d) == r
    return mask / np.sqrt(mask.sum())


def rdm_dense_matrix(rdm: ReducedDensityMatrix) -> np.ndarray:
    """Materialize a diagonal sector-basis RDM as a D**d x D**d matrix."""
    D = rdm.model.site_dim
    out = np.zeros((D**rdm.d, D**rdm.d))
    for r, w in rdm.weights.items():
        v = sector_state(rdm.model, rdm.d, r)
        out += w * np.outer(v, v)
    return out


def trace_norm(mat: np.ndarray) -> float:
    return float(np.linalg.svd(mat, compute_uv=False).sum())


# single-site bases with unit operator norm, digit ordering of aqecc.lattice
_PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, 1j], [-1j, 0]]),
    "Z": np.diag([-1.0, 1.0]),
}


def _gell_mann():
    mats = {"I": np.eye(3)}
    n = 1
    for a, b in itertools.combinations(range(3), 2):
        sym = np.zeros((3, 3), complex)
        sym[a, b] = sym[b, a] = 1
        asym = np.zeros((3, 3), complex)
        asym[a, b], asym[b, a] = -1j, 1j
        mats[f"L{n}"], mats[f"L{n + 1}"] = sym, asym
        n += 2
    mats["L7"] = np.diag([1.0, -1.0, 0.0])
    # rescaled to unit operator norm
    mats["L8"] = np.diag([1.0, 1.0, -2.0]) / 2.0
    return mats


_SINGLE_SITE = {2: _PAULI, 3: _gell_mann()}


def single_site_basis(site_dim: int):
    """Hermitian operator basis of the single-site algebra, each of unit norm."""
    return dict(_SINGLE_SITE[site_dim])


def error_basis(site_dim: int, d: int, positions: Optional[Sequence[int]] = None) -> List[LocalOperator]:
    """Tensor products of the single-site basis over d consecutive sites.

    One copy per 1-based start position (default: position 1 only).
    """
    single = single_site_basis(site_dim)
    ops = []
    for labels in itertools.product(single, repeat=d):
        mat = reduce(np.kron, [single[x] for x in labels])
        ops.append(LocalOperator(mat, site_dim, d, 1, "".join(labels) if site_dim == 2 else "*".join(labels)))
    positions = list(positions) if positions is not None else [1]
    return [op.at(p) for p in positions for op in ops]


def kl_epsilon_oracle(codewords: Sequence[DenseState], error_basis: Sequence[LocalOperator]) -> np.ndarray:
    """Per-pair maxima over the basis of |<psi_i|E|psi_j> - C_E delta_ij|, with C_E = <psi_1|E|psi_1>."""
    _check_geometry(*codewords)
    vecs = np.array([c.amplitudes for c in codewords])
    gram = vecs.conj() @ vecs.T
    off = gram - np.diag(np.diag(gram))
    if np.abs(off).max(initial=0.0) > 1e-10:
        raise OrthogonalityError(f"codewords overlap by up to {np.abs(off).max():.3g}")
    n = len(codewords)
    eps = np.zeros((n, n))
    for op in error_basis:
        images = np.array([apply(op, c) for c in codewords])
        elements = vecs.conj() @ images.T
        elements -= elements[0, 0] * np.eye(n)
        np.maximum(eps, np.abs(elements), out=eps)
    return eps


def operator_basis_hash(ops: Sequence[LocalOperator]) -> str:
    h = hashlib.sha256()
    for op in ops:
        h.update(f"{op.site_dim}:{op.support_len}:{op.support_start};".encode())
        h.update(np.ascontiguousarray(op.matrix).tobytes())
    return h.hexdigest()


def _complex_entry(x):
    if isinstance(x, (list, tuple)):
        re, im = x
        return complex(re, im)
    return complex(x)


def load_operators(path) -> List[LocalOperator]:
    """Read ``{site_dim, d, operators: [[[re, im], ...], ...]}``; each operator is a
    row-major flat list of complex pairs (an optional ``support_start`` applies to all)."""
    data = json.loads(Path(path).read_text())
    D, d = int(data["site_dim"]), int(data["d"])
    start = int(data.get("support_start", 1))
    dim = D**d
    ops = []
    for n, flat in enumerate(data["operators"]):
        entries = [_complex_entry(x) for x in flat]
        if len(entries) != dim * dim:
            raise ShapeError(f"operator {n} has {len(entries)} entries, expected {dim * dim}")
        ops.append(LocalOperator(np.array(entries).reshape(dim, dim), D, d, start, f"op{n}"))
    return ops


def dump_operators(ops: Sequence[LocalOperator]) -> dict:
    first = ops[0]
    return {
        "site_dim": first.site_dim,
        "d": first.support_len,
        "operators": [[[z.real, z.imag] for z in op.matrix.reshape(-1)] for op in ops],
    }
