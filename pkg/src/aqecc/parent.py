"""Frustration-free parent Hamiltonians from local symmetry moves.

A move is an invertible map on k-site strings. Applying every move at every
position of the ring splits the product basis into orbits; the sum of
two-level projectors built from the moves is annihilated exactly by the
uniform superposition over each orbit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh

from . import lattice
from .budget import check_dimension
from .ed import local_term_matrix
from .errors import ShapeError

String = Tuple[int, ...]


@dataclass(frozen=True)
class LocalSymmetryGenerator:
    """Invertible map on k-site strings over digits 0..D-1, identity off ``mapping``."""

    D: int
    k: int
    mapping: Tuple[Tuple[String, String], ...]
    label: str = ""

    def __post_init__(self):
        pairs = tuple((tuple(int(x) for x in a), tuple(int(x) for x in b)) for a, b in self.mapping)
        for a, b in pairs:
            if len(a) != self.k or len(b) != self.k:
                raise ShapeError(f"strings {a}, {b} are not of length {self.k}")
            if any(not 0 <= x < self.D for x in a + b):
                raise ShapeError(f"digits of {a} -> {b} fall outside 0..{self.D - 1}")
        domain = [a for a, _ in pairs]
        image = [b for _, b in pairs]
        if len(set(domain)) != len(domain) or len(set(image)) != len(image):
            raise ShapeError("mapping is not injective")
        if set(domain) != set(image):
            raise ShapeError("mapping must permute the strings it moves")
        object.__setattr__(self, "mapping", pairs)

    def table(self) -> np.ndarray:
        """Permutation of local indices 0..D**k-1."""
        places = self.D ** np.arange(self.k - 1, -1, -1)
        out = np.arange(self.D**self.k)
        for a, b in self.mapping:
            out[int(np.dot(a, places))] = int(np.dot(b, places))
        return out

    def is_involution(self) -> bool:
        t = self.table()
        return bool(np.all(t[t] == np.arange(t.size)))


def swap_move(D: int, a, b, label: str = "") -> LocalSymmetryGenerator:
    """The involution exchanging strings ``a`` and ``b``."""
    a, b = _parse_string(a), _parse_string(b)
    return LocalSymmetryGenerator(D, len(a), ((a, b), (b, a)), label or f"{_fmt(a)}<->{_fmt(b)}")


def _parse_string(s) -> String:
    if isinstance(s, str):
        return tuple(int(c) for c in s)
    return tuple(int(x) for x in s)


def _fmt(s: String) -> str:
    return "".join(str(x) for x in s)


def motzkin_moves() -> List[LocalSymmetryGenerator]:
    """ud <-> 00, 0u <-> u0, 0d <-> d0 in digits d=0, 0=1, u=2."""
    return [swap_move(3, "20", "11"), swap_move(3, "12", "21"), swap_move(3, "10", "01")]


def exchange_move() -> List[LocalSymmetryGenerator]:
    """Spin-1/2 neighbour exchange 01 <-> 10."""
    return [swap_move(2, "01", "10")]


def load_generators(path) -> Tuple[int, List[LocalSymmetryGenerator]]:
    """Read ``{D, k, rules: [[in, out], ...]}``; each rule is a swap of two digit strings."""
    data = json.loads(Path(path).read_text())
    D, k = int(data["D"]), int(data["k"])
    gens = [swap_move(D, a, b) for a, b in data["rules"]]
    if any(g.k != k for g in gens):
        raise ShapeError(f"every rule must act on k = {k} sites")
    return D, gens


def dump_generators(D: int, gens: Sequence[LocalSymmetryGenerator]) -> dict:
    rules = []
    for g in gens:
        seen = set()
        for a, b in g.mapping:
            if (b, a) in seen:
                continue
            seen.add((a, b))
            rules.append([_fmt(a), _fmt(b)])
    return {"D": D, "k": gens[0].k if gens else 1, "rules": rules}


@dataclass
class OrbitPartition:
    D: int
    N: int
    orbits: List[np.ndarray]
    generator_set: List[str] = field(default_factory=list)

    @property
    def representatives(self) -> List[int]:
        return [int(o[0]) for o in self.orbits]

    def labels(self) -> np.ndarray:
        """Orbit number of every basis index."""
        out = np.empty(self.D**self.N, dtype=int)
        for n, o in enumerate(self.orbits):
            out[o] = n
        return out

    def uniform_state(self, n: int) -> np.ndarray:
        v = np.zeros(self.D**self.N)
        o = self.orbits[n]
        v[o] = 1.0 / np.sqrt(o.size)
        return v

    def to_dict(self) -> dict:
        digits = lattice.basis_digits(self.D, self.N)
        spins = lattice.spin_values(self.D) if self.D in (2, 3) else None
        rows = []
        for o in self.orbits:
            rep = digits[o[0]]
            row = {"representative": _fmt(rep), "size": int(o.size)}
            if spins is not None:
                row["magnetization"] = int(spins[rep].sum())
            rows.append(row)
        return {"D": self.D, "N": self.N, "count": len(self.orbits), "generators": self.generator_set, "orbits": rows}


def _moved_indices(gen: LocalSymmetryGenerator, N: int, start: int) -> np.ndarray:
    digits = lattice.basis_digits(gen.D, N)
    places = lattice.place_values(gen.D, N)
    sites = lattice.support_sites(start, gen.k, N)
    local_places = gen.D ** np.arange(gen.k - 1, -1, -1)
    local = digits[:, sites].astype(np.int64) @ local_places
    base = np.arange(gen.D**N) - digits[:, sites].astype(np.int64) @ places[sites]
    offsets = lattice.basis_digits(gen.D, gen.k).astype(np.int64) @ places[sites]
    return base + offsets[gen.table()[local]]


def orbit_decompose(generators: Sequence[LocalSymmetryGenerator], D: int, N: int) -> OrbitPartition:
    """Connected components of the basis under every move at every ring position.

    Orbits are sorted by representative, the least index (lexicographically
    least digit string) in each orbit.
    """
    dim = check_dimension(D, N, "orbit enumeration")
    src, dst = [], []
    for g in generators:
        if g.D != D:
            raise ShapeError("generator site dimension differs from D")
        if g.k > N:
            raise ShapeError(f"generator on {g.k} sites does not fit on {N}")
        for j in range(1, N + 1):
            moved = _moved_indices(g, N, j)
            changed = moved != np.arange(dim)
            src.append(np.nonzero(changed)[0])
            dst.append(moved[changed])
    if src:
        s, t = np.concatenate(src), np.concatenate(dst)
    else:
        s = t = np.zeros(0, dtype=int)
    graph = sp.coo_matrix((np.ones(s.size), (s, t)), shape=(dim, dim))
    _, labels = connected_components(graph, directed=False)
    groups: Dict[int, List[int]] = {}
    for idx, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(idx)
    orbits = sorted((np.array(v) for v in groups.values()), key=lambda o: o[0])
    names = [g.label or repr(g.mapping) for g in generators] + [f"T^{j}" for j in range(N)]
    return OrbitPartition(D, N, orbits, names)


def local_projector(gen: LocalSymmetryGenerator) -> np.ndarray:
    """Sum over unordered pairs {s, r(s)}, s != r(s), of (|s> - |r(s)>)(<s| - <r(s)|) / 2."""
    t = gen.table()
    P = np.zeros((t.size, t.size))
    for s in range(t.size):
        r = int(t[s])
        if r == s:
            continue
        if gen.is_involution() and r < s:
            continue
        v = np.zeros(t.size)
        v[s], v[r] = 1.0, -1.0
        P += 0.5 * np.outer(v, v)
    return P


def build_projector_hamiltonian(generators: Sequence[LocalSymmetryGenerator], D: int, N: int) -> sp.csr_matrix:
    """H = sum over sites j and moves r of the local projector of r on sites j..j+k-1."""
    dim = check_dimension(D, N, "projector Hamiltonian")
    H = sp.csr_matrix((dim, dim))
    for g in generators:
        P = local_projector(g)
        for j in range(1, N + 1):
            H = H + local_term_matrix(D, N, g.k, P, j)
    H = sp.csr_matrix(H)
    H.sum_duplicates()
    H.eliminate_zeros()
    return H


def _low_spectrum(block: sp.spmatrix, tol: float, dense_max: int = 600):
    """Every eigenpair below ``tol`` plus the first one above it (when there is one)."""
    n = block.shape[0]
    block = (block + block.conj().T) / 2
    if n <= dense_max:
        w, U = scipy.linalg.eigh(block.toarray())
        cut = min(int(np.sum(w < tol)) + 1, n)
        return w[:cut], U[:, :cut]
    count = 4
    while True:
        # shift-invert just below zero; H is expected to be positive semidefinite
        w, U = eigsh(block.tocsc(), k=count, sigma=-1e-2, which="LM")
        order = np.argsort(w)
        w, U = w[order], U[:, order]
        if w[-1] >= tol or count >= n - 2:
            return w, U
        count = min(2 * count, n - 2)


@dataclass
class GroundSpaceReport:
    min_eigenvalue: float
    degeneracy: int
    n_orbits: int
    max_orbit_residual: float
    projector_distance: float
    block_diagonal: bool
    failures: List[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "degeneracy": self.degeneracy,
            "n_orbits": self.n_orbits,
            "max_orbit_residual": self.max_orbit_residual,
            "projector_distance": self.projector_distance,
            "block_diagonal": self.block_diagonal,
            "failures": self.failures,
            "ok": self.ok,
        }


def ground_space_check(H: sp.spmatrix, partition: OrbitPartition, tol: float = 1e-10) -> GroundSpaceReport:
    """Check that H >= 0 has a zero-energy space spanned exactly by the uniform orbit states.

    H is diagonalized orbit block by orbit block when it has no elements
    between orbits (the expected case), otherwise as a whole.
    """
    H = sp.csr_matrix(H)
    labels = partition.labels()
    coo = H.tocoo()
    cross = labels[coo.row] != labels[coo.col]
    block_diag = not np.any(np.abs(coo.data[cross]) > tol)
    residual = 0.0
    for n in range(len(partition.orbits)):
        residual = max(residual, float(np.linalg.norm(H @ partition.uniform_state(n))))
    if block_diag:
        lows, degeneracy, dist = [], 0, 0.0
        for o in partition.orbits:
            w, U = _low_spectrum(H[o][:, o], tol)
            lows.append(w[0])
            zero = w < tol
            degeneracy += int(zero.sum())
            u = np.full(o.size, 1.0 / np.sqrt(o.size))
            G = U[:, zero]
            if G.shape[1] != 1:
                dist = 1.0
            else:
                dist = max(dist, float(np.linalg.norm(u - G @ (G.conj().T @ u))))
        min_eig = float(min(lows))
    else:
        check_dimension(partition.D, 2 * partition.N, "dense Hamiltonian")
        full = H.toarray()
        w, U = np.linalg.eigh((full + full.conj().T) / 2)
        min_eig = float(w[0])
        zero = w < tol
        degeneracy = int(zero.sum())
        from .ed import projector_distance

        uniform = np.array([partition.uniform_state(n) for n in range(len(partition.orbits))]).T
        dist = projector_distance(U[:, zero], uniform)
    failures = []
    if abs(min_eig) > tol:
        failures.append(f"smallest eigenvalue {min_eig:.3e} is not 0")
    if min_eig < -tol:
        failures.append("H is not positive semidefinite")
    if degeneracy != len(partition.orbits):
        failures.append(f"ground degeneracy {degeneracy} differs from {len(partition.orbits)} orbits")
    if residual > tol:
        failures.append(f"uniform orbit states have residual {residual:.3e}")
    if dist > 1e-9:
        failures.append(f"ground projector differs from the orbit span by {dist:.3e}")
    if not block_diag:
        failures.append("H connects different orbits")
    return GroundSpaceReport(min_eig, degeneracy, len(partition.orbits), residual, dist, block_diag, failures)
