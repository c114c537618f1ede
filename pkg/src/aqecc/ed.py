"""Exact diagonalization of translation-invariant rings in momentum and magnetization blocks.

Momentum states are built from translation-orbit representatives:
|a, q> = R^(-1/2) sum_{l<R} exp(-2 pi i q l / N) T^l |a>, allowed when q R = 0 mod N,
so that T|a, q> = exp(2 pi i q / N)|a, q>.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import lattice
from .budget import check_dimension
from .dense import DenseState, single_site_basis
from .errors import (
    BudgetError,
    ConvergenceError,
    EmptyWindowError,
    InsufficientDataError,
    PopulationError,
    RangeError,
    ShapeError,
)

# ---------------------------------------------------------------- Hamiltonians


class ModelName(str, enum.Enum):
    ONE_LOCAL_SPIN_HALF = "one-local-spin-half"
    ONE_LOCAL_SPIN_ONE = "one-local-spin-one"
    HEISENBERG_PBC = "heisenberg-pbc"
    MOTZKIN_PBC = "motzkin-pbc"


@dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    """Sum over every site j of each term placed on sites j..j+s-1 (periodic)."""

    site_dim: int
    N: int
    terms: Tuple[Tuple[int, np.ndarray], ...]
    name: str = "custom"

    def __post_init__(self):
        terms = []
        for s, mat in self.terms:
            mat = np.array(mat, dtype=complex)
            if mat.shape != (self.site_dim**s, self.site_dim**s):
                raise ShapeError(f"term on {s} sites has shape {mat.shape}")
            if np.abs(mat - mat.conj().T).max() > 1e-12:
                raise ShapeError("local terms must be Hermitian")
            if s > self.N:
                raise ShapeError(f"term support {s} exceeds N = {self.N}")
            mat.setflags(write=False)
            terms.append((int(s), mat))
        object.__setattr__(self, "terms", tuple(terms))


def _ket(D, *digits):
    v = np.zeros(D ** len(digits))
    v[int(np.ravel_multi_index(digits, (D,) * len(digits)))] = 1.0
    return v


def motzkin_local_term():
    """|F><F| + |U><U| + |D><D| on two spin-1 sites (digits d=0, 0=1, u=2)."""
    dn, zero, up = 0, 1, 2
    F = (_ket(3, up, dn) - _ket(3, zero, zero)) / math.sqrt(2)
    U = (_ket(3, zero, up) - _ket(3, up, zero)) / math.sqrt(2)
    Dv = (_ket(3, zero, dn) - _ket(3, dn, zero)) / math.sqrt(2)
    return sum(np.outer(v, v) for v in (F, U, Dv))


def build_hamiltonian(name, N: int) -> LocalHamiltonian:
    name = ModelName(name)
    if name is ModelName.ONE_LOCAL_SPIN_HALF:
        return LocalHamiltonian(2, N, ((1, np.diag([1.0, 0.0])),), name.value)
    if name is ModelName.ONE_LOCAL_SPIN_ONE:
        return LocalHamiltonian(3, N, ((1, np.diag([1.0, 0.5, 0.0])),), name.value)
    if N < 3:
        raise RangeError(f"two-site periodic models need N >= 3, got {N}")
    if name is ModelName.HEISENBERG_PBC:
        P = single_site_basis(2)
        bond = -0.5 * sum(np.kron(P[a], P[a]) for a in "XYZ")
        return LocalHamiltonian(2, N, ((2, bond),), name.value)
    return LocalHamiltonian(3, N, ((2, motzkin_local_term()),), name.value)


def _matrix_from_json(raw):
    return np.array([[complex(*x) if isinstance(x, list) else complex(x) for x in row] for row in raw])


def load_hamiltonian(path) -> LocalHamiltonian:
    """Read ``{site_dim, N, terms: [{support_len, matrix}]}``; matrix entries are
    numbers or [re, im] pairs, given as a list of rows."""
    data = json.loads(Path(path).read_text())
    terms = tuple((int(t["support_len"]), _matrix_from_json(t["matrix"])) for t in data["terms"])
    return LocalHamiltonian(int(data["site_dim"]), int(data["N"]), terms, data.get("name", "custom"))


def local_term_matrix(site_dim, N, support_len, mat, start=1):
    """Sparse D**N matrix of a single local term on sites start..start+s-1 (1-based, wrapped)."""
    digits = lattice.basis_digits(site_dim, N)
    places = lattice.place_values(site_dim, N)
    sites = lattice.support_sites(start, support_len, N)
    local_places = site_dim ** np.arange(support_len - 1, -1, -1)
    local = digits[:, sites].astype(np.int64) @ local_places
    base = np.arange(site_dim**N) - digits[:, sites].astype(np.int64) @ places[sites]
    # digit string of each local output index, weighted by global place values
    out_offsets = lattice.basis_digits(site_dim, support_len).astype(np.int64) @ places[sites]
    mat = np.asarray(mat)
    rows, cols = np.nonzero(mat)
    R, C, V = [], [], []
    for a, b in zip(rows, cols):
        src = np.nonzero(local == b)[0]
        R.append(base[src] + out_offsets[a])
        C.append(src)
        V.append(np.full(src.size, mat[a, b]))
    dim = site_dim**N
    if not R:
        return sp.csr_matrix((dim, dim), dtype=complex)
    return sp.csr_matrix((np.concatenate(V), (np.concatenate(R), np.concatenate(C))), shape=(dim, dim))


def hamiltonian_matrix(h: LocalHamiltonian) -> sp.csr_matrix:
    check_dimension(h.site_dim, h.N, "Hamiltonian")
    dim = h.site_dim**h.N
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for s, mat in h.terms:
        for j in range(1, h.N + 1):
            total = total + local_term_matrix(h.site_dim, h.N, s, mat, j)
    total.sum_duplicates()
    total.eliminate_zeros()
    return total


def conserves_magnetization(H: sp.spmatrix, site_dim: int, N: int, tol: float = 1e-10) -> bool:
    """True when [H, M] = 0, i.e. H never connects different magnetizations."""
    coo = H.tocoo()
    mags = lattice.magnetizations(site_dim, N)
    bad = mags[coo.row] != mags[coo.col]
    return not np.any(np.abs(coo.data[bad]) > tol)


# ---------------------------------------------------------------- eigensolver


@dataclass
class _Block:
    q: int
    m: Optional[int]
    V: sp.csc_matrix  # D**N x n momentum basis
    U: np.ndarray  # n x n_kept eigenvectors in that basis


@dataclass
class EigenSolution:
    """Joint eigenbasis of H, translation and (when conserved) magnetization.

    Vectors are kept blockwise; use :meth:`vectors` to materialize columns.
    """

    N: int
    site_dim: int
    energies: np.ndarray
    momentum: np.ndarray
    magnetization: Optional[np.ndarray]
    complete: bool
    _blocks: List[_Block] = field(repr=False)
    _where: np.ndarray = field(repr=False)  # (block id, column) per eigenstate

    def __len__(self):
        return self.energies.size

    def vectors(self, indices: Optional[Sequence[int]] = None) -> np.ndarray:
        idx = np.arange(len(self)) if indices is None else np.asarray(indices, dtype=int)
        out = np.zeros((self.site_dim**self.N, idx.size), dtype=complex)
        for pos, i in enumerate(idx):
            b, c = self._where[i]
            blk = self._blocks[b]
            out[:, pos] = blk.V @ blk.U[:, c]
        return out

    def vector(self, i: int) -> np.ndarray:
        return self.vectors([i])[:, 0]

    def state(self, i: int) -> DenseState:
        return DenseState(self.N, self.site_dim, self.vector(i))

    def block_dims(self) -> List[int]:
        return [blk.V.shape[1] for blk in self._blocks]


def _orbits(perm, members):
    """Representatives (least index) and periods of the translation orbits within ``members``."""
    cur = members.copy()
    rep = members.copy()
    period = np.zeros(members.size, dtype=int)
    step = 0
    while True:
        step += 1
        cur = perm[cur]
        np.minimum(rep, cur, out=rep)
        hit = (period == 0) & (cur == members)
        period[hit] = step
        if np.all(period > 0):
            break
    keep = rep == members
    return members[keep], period[keep]


def _momentum_basis(perm, reps, periods, q, N):
    rows, cols, vals = [], [], []
    col = 0
    for a, R in zip(reps, periods):
        if (q * R) % N:
            continue
        s = a
        for l in range(R):
            rows.append(s)
            cols.append(col)
            vals.append(np.exp(-2j * np.pi * q * l / N) / math.sqrt(R))
            s = perm[s]
        col += 1
    return rows, cols, vals, col


def _fix_phases(U, tol=1e-8):
    # Columns of V are ordered by ascending representative, and the
    # representative is the smallest index of its orbit, so the first
    # nonzero amplitude of V @ u comes from the first large entry of u.
    for c in range(U.shape[1]):
        u = U[:, c]
        big = np.nonzero(np.abs(u) > tol * np.abs(u).max())[0]
        if big.size:
            u *= abs(u[big[0]]) / u[big[0]]
    return U


def diagonalize_sectored(
    h: Union[LocalHamiltonian, sp.spmatrix],
    *,
    site_dim: Optional[int] = None,
    N: Optional[int] = None,
    conserve: Optional[bool] = None,
    q0_only: bool = False,
    lowest: Optional[int] = None,
    dense_block_max: int = 4000,
) -> EigenSolution:
    """Diagonalize H block by block in (momentum, magnetization) sectors.

    ``lowest`` switches to a Krylov solver returning only that many lowest
    states per block (for blocks larger than 64). Ordering of the result:
    energy, then momentum index, then magnetization.
    """
    if isinstance(h, LocalHamiltonian):
        site_dim, N = h.site_dim, h.N
        H = hamiltonian_matrix(h)
    else:
        if site_dim is None or N is None:
            raise ShapeError("site_dim and N are required with a raw matrix")
        check_dimension(site_dim, N, "Hamiltonian")
        H = sp.csr_matrix(h)
    H = H.tocsr()
    if conserve is None:
        conserve = conserves_magnetization(H, site_dim, N)
    perm = lattice.translation_permutation(site_dim, N)
    everything = np.arange(site_dim**N)
    if conserve:
        mags = lattice.magnetizations(site_dim, N)
        sectors = [(int(m), everything[mags == m]) for m in np.unique(mags)]
    else:
        sectors = [(None, everything)]
    blocks, energies, qs, ms, where = [], [], [], [], []
    qrange = [0] if q0_only else range(N)
    for m, members in sectors:
        reps, periods = _orbits(perm, members)
        for q in qrange:
            rows, cols, vals, n = _momentum_basis(perm, reps, periods, q, N)
            if n == 0:
                continue
            V = sp.csc_matrix((vals, (rows, cols)), shape=(site_dim**N, n))
            Hb = (V.conj().T @ (H @ V))
            if lowest is not None and n > 64:
                k = min(lowest, n - 2)
                try:
                    w, U = spla.eigsh(Hb.tocsc(), k=k, which="SA", tol=1e-12)
                except spla.ArpackNoConvergence as exc:
                    raise ConvergenceError(f"Krylov solver failed in block q={q}, m={m}: {exc}") from exc
                resid = np.linalg.norm(Hb @ U - U * w, axis=0).max()
                if resid > 1e-9:
                    raise ConvergenceError(f"residual {resid:.2e} in block q={q}, m={m}")
            else:
                if n > dense_block_max:
                    raise BudgetError(f"block of size {n} exceeds the dense block limit {dense_block_max}")
                Hd = Hb.toarray()
                w, U = scipy.linalg.eigh((Hd + Hd.conj().T) / 2)
                if lowest is not None:
                    w, U = w[:lowest], U[:, :lowest]
            U = _fix_phases(np.array(U, dtype=complex))
            b = len(blocks)
            blocks.append(_Block(q, m, V, U))
            for c, e in enumerate(w):
                energies.append(float(e))
                qs.append(q)
                ms.append(m if m is not None else 0)
                where.append((b, c))
    energies = np.array(energies)
    qs, ms = np.array(qs), np.array(ms)
    order = np.lexsort((ms, qs, np.round(energies, 9)))
    return EigenSolution(
        N=N,
        site_dim=site_dim,
        energies=energies[order],
        momentum=qs[order],
        magnetization=ms[order] if conserve else None,
        complete=lowest is None and not q0_only,
        _blocks=blocks,
        _where=np.array(where)[order],
    )


def projector_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Operator-norm distance between the projectors onto span(A) and span(B).

    Both inputs are orthonormalized first; unequal dimensions give 1.
    """
    Qa = scipy.linalg.orth(A)
    Qb = scipy.linalg.orth(B)
    if Qa.shape[1] != Qb.shape[1]:
        return 1.0
    resid = Qb - Qa @ (Qa.conj().T @ Qb)
    return float(np.linalg.norm(resid, 2)) if resid.size else 0.0


def ground_indices(sol: EigenSolution, tol: float = 1e-9) -> np.ndarray:
    return np.nonzero(sol.energies <= sol.energies.min() + tol)[0]


# ---------------------------------------------------------------- windows


@dataclass(frozen=True)
class MicrocanonicalWindow:
    E_center: float
    half_width: float
    member_indices: Tuple[int, ...]
    q0_only: bool = False

    def to_dict(self) -> dict:
        return {
            "E_center": self.E_center,
            "half_width": self.half_width,
            "population": len(self.member_indices),
            "q0_only": self.q0_only,
        }


def make_window(
    sol: EigenSolution,
    E: float,
    half_width: Optional[float] = None,
    q0_only: bool = False,
    atol: float = 1e-10,
) -> MicrocanonicalWindow:
    """Eigenstates with E - hw <= E_k <= E + hw (closed; hw defaults to sqrt(N)).

    ``atol`` absorbs eigensolver round-off at the interval ends.
    """
    hw = math.sqrt(sol.N) if half_width is None else float(half_width)
    inside = (sol.energies >= E - hw - atol) & (sol.energies <= E + hw + atol)
    if q0_only:
        inside &= sol.momentum == 0
    return MicrocanonicalWindow(float(E), hw, tuple(int(i) for i in np.nonzero(inside)[0]), q0_only)


class MixedState:
    """Finite mixture sum_k p_k |psi_k><psi_k| of full state vectors (columns)."""

    def __init__(self, N, site_dim, probabilities, vectors):
        self.N = N
        self.site_dim = site_dim
        self.probabilities = np.asarray(probabilities, dtype=float)
        self.vectors = np.asarray(vectors, dtype=complex)

    def expectation_of(self, images: np.ndarray) -> complex:
        """Tr(rho A) given ``images`` = A applied to every column."""
        per_state = np.einsum("ik,ik->k", self.vectors.conj(), images)
        return complex(per_state @ self.probabilities)

    def apply_sites(self, matrix, sites, vecs=None):
        vecs = self.vectors if vecs is None else vecs
        return lattice.apply_on_sites(np.asarray(matrix), vecs, sites, self.site_dim, self.N)

    def dense(self) -> np.ndarray:
        check_dimension(self.site_dim, 2 * self.N, "density matrix")
        return (self.vectors * self.probabilities) @ self.vectors.conj().T


def microcanonical_state(sol: EigenSolution, window: MicrocanonicalWindow) -> MixedState:
    """Uniform mixture over the window members."""
    if not window.member_indices:
        raise EmptyWindowError(f"no eigenstates within {window.half_width} of E = {window.E_center}")
    n = len(window.member_indices)
    return MixedState(sol.N, sol.site_dim, np.full(n, 1.0 / n), sol.vectors(window.member_indices))


def _as_mixture(rho, N=None, site_dim=None) -> MixedState:
    if isinstance(rho, MixedState):
        return rho
    if isinstance(rho, DenseState):
        return MixedState(rho.N, rho.site_dim, [1.0], rho.amplitudes[:, None])
    mat = np.asarray(rho)
    if N is None or site_dim is None:
        raise ShapeError("N and site_dim are required for a density matrix input")
    w, U = np.linalg.eigh((mat + mat.conj().T) / 2)
    keep = w > 1e-14
    return MixedState(N, site_dim, w[keep], U[:, keep])


@dataclass
class CorrelationFit:
    xi: float
    flag: str
    slope: Optional[float]
    intercept: Optional[float]
    residual: Optional[float]
    separations: List[int]
    correlations: List[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def correlation_length_estimate(
    rho,
    operator_family: Optional[Dict[str, np.ndarray]] = None,
    *,
    N: Optional[int] = None,
    site_dim: Optional[int] = None,
    floor: float = 1e-12,
) -> Tuple[float, CorrelationFit]:
    """Fit the decay of connected two-point functions from site 1.

    For each ring separation 1..N//2 the largest normalized connected
    correlator over pairs from ``operator_family`` is recorded;
    xi = -1/slope of log-correlation vs separation.
    """
    state = _as_mixture(rho, N, site_dim)
    N, D = state.N, state.site_dim
    if operator_family is None:
        operator_family = {k: v for k, v in single_site_basis(D).items() if k != "I"}
    seps = list(range(1, N // 2 + 1))
    if len(seps) < 4:
        raise InsufficientDataError(f"N = {N} gives only {len(seps)} distinct separations, need 4")
    ops = {k: np.asarray(v, dtype=complex) for k, v in operator_family.items()}
    norms = {k: np.linalg.norm(v, 2) for k, v in ops.items()}
    first = {k: state.apply_sites(v, [0]) for k, v in ops.items()}
    one_point = {k: state.expectation_of(first[k]) for k in ops}
    corr = []
    for dist in seps:
        best = 0.0
        for kz, Z in ops.items():
            z_mean = state.expectation_of(state.apply_sites(Z, [dist]))
            for kx in ops:
                both = state.expectation_of(state.apply_sites(Z, [dist], first[kx]))
                val = abs(both - one_point[kx] * z_mean) / (norms[kx] * norms[kz])
                best = max(best, val)
        corr.append(float(best))
    corr_arr = np.array(corr)
    usable = corr_arr > floor
    if not usable.any():
        return 0.0, CorrelationFit(0.0, "uncorrelated", None, None, None, seps, corr)
    if usable.sum() < 2:
        return math.nan, CorrelationFit(math.nan, "too-few-points", None, None, None, seps, corr)
    x = np.array(seps)[usable]
    y = np.log(corr_arr[usable])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    if slope >= -1e-12:
        return math.inf, CorrelationFit(math.inf, "non-decaying", float(slope), float(intercept), residual, seps, corr)
    xi = float(-1.0 / slope)
    return xi, CorrelationFit(xi, "ok", float(slope), float(intercept), residual, seps, corr)


# ---------------------------------------------------------------- random codewords


def sample_random_codewords(
    sol: EigenSolution,
    window: MicrocanonicalWindow,
    L: int,
    mode: str = "uniform",
    seed: Optional[int] = None,
) -> List[int]:
    """Draw L distinct eigenstate indices.

    ``uniform``: without replacement from the window.
    ``stratified``: one from each of the windows centred at E + 2 j hw, j = 0..L-1.
    """
    rng = np.random.default_rng(seed)
    if mode == "uniform":
        members = np.array(window.member_indices, dtype=int)
        if members.size < L:
            raise PopulationError(f"window holds {members.size} states, {L} requested")
        return [int(i) for i in rng.choice(members, size=L, replace=False)]
    if mode == "stratified":
        chosen: List[int] = []
        for j in range(L):
            sub = make_window(sol, window.E_center + 2 * j * window.half_width, window.half_width, window.q0_only)
            pool = np.array([i for i in sub.member_indices if i not in chosen], dtype=int)
            if pool.size == 0:
                raise PopulationError(f"stratum {j} centred at {sub.E_center:.4g} is empty")
            chosen.append(int(rng.choice(pool)))
        return chosen
    raise RangeError(f"unknown sampling mode {mode!r}")


def theorem1_distance(energies: Sequence[float], N: int, c_log: float = 1.0) -> int:
    """max(0, floor(min(c log N, min pairwise gap - c log N)))."""
    e = np.sort(np.asarray(energies, dtype=float))
    if e.size < 2:
        raise RangeError("need at least two energies")
    gap = float(np.diff(e).min())
    term = c_log * math.log(N)
    return max(0, math.floor(min(term, gap - term) + 1e-9))
