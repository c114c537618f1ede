"""Product-basis bookkeeping for rings of spin-1/2 or spin-1 sites.

Basis index = base-D digit string with site 1 as the most significant digit.
Digit -> spin value: D=2 {0: -1, 1: +1}; D=3 {0: -1, 1: 0, 2: +1}.
"""
from functools import lru_cache

import numpy as np

from .errors import ShapeError

SPIN_VALUES = {2: np.array([-1, 1]), 3: np.array([-1, 0, 1])}


def spin_values(site_dim):
    try:
        return SPIN_VALUES[site_dim]
    except KeyError:
        raise ShapeError(f"site dimension must be 2 or 3, got {site_dim}") from None


@lru_cache(maxsize=32)
def _digits(site_dim, n_sites):
    idx = np.arange(site_dim**n_sites)
    out = np.empty((idx.size, n_sites), dtype=np.int8)
    for j in range(n_sites - 1, -1, -1):
        out[:, j] = idx % site_dim
        idx = idx // site_dim
    out.setflags(write=False)
    return out


def basis_digits(site_dim, n_sites):
    """(D**N, N) read-only array of digits, column j = site j+1."""
    return _digits(site_dim, n_sites)


def place_values(site_dim, n_sites):
    return site_dim ** np.arange(n_sites - 1, -1, -1, dtype=np.int64)


@lru_cache(maxsize=32)
def _magnetizations(site_dim, n_sites):
    mags = spin_values(site_dim)[basis_digits(site_dim, n_sites)].sum(axis=1)
    mags.setflags(write=False)
    return mags


def magnetizations(site_dim, n_sites):
    """Magnetization (sum of spin values) of every basis string."""
    return _magnetizations(site_dim, n_sites)


@lru_cache(maxsize=32)
def _translation(site_dim, n_sites):
    shifted = np.roll(basis_digits(site_dim, n_sites), 1, axis=1)
    perm = shifted.astype(np.int64) @ place_values(site_dim, n_sites)
    perm.setflags(write=False)
    return perm


def translation_permutation(site_dim, n_sites):
    """perm[s] = index of T|s>, where T moves the content of site j to site j+1."""
    return _translation(site_dim, n_sites)


def translate(vec, site_dim, n_sites, steps=1):
    """Apply T**steps to a full state vector."""
    perm = translation_permutation(site_dim, n_sites)
    out = np.asarray(vec)
    for _ in range(steps % n_sites):
        nxt = np.empty_like(out)
        nxt[perm] = out
        out = nxt
    return out


def support_sites(start, length, n_sites):
    """0-based site indices of a contiguous support starting at 1-based ``start``, wrapping."""
    if not 1 <= length <= n_sites:
        raise ShapeError(f"support length {length} does not fit on {n_sites} sites")
    return [(start - 1 + j) % n_sites for j in range(length)]


def apply_on_sites(matrix, vec, sites, site_dim, n_sites):
    """Apply ``matrix`` (acting on ``sites`` in order, first site most significant)
    to a full state vector, identity elsewhere.

    ``vec`` may also be a (D**N, K) stack of column vectors.
    """
    d = len(sites)
    if len(set(sites)) != d:
        raise ShapeError("support sites must be distinct")
    if matrix.shape != (site_dim**d, site_dim**d):
        raise ShapeError(f"operator of shape {matrix.shape} does not act on {d} sites of dim {site_dim}")
    vec = np.asarray(vec)
    batch = vec.shape[1:]
    psi = vec.reshape((site_dim,) * n_sites + batch)
    op = np.asarray(matrix).reshape((site_dim,) * (2 * d))
    out = np.tensordot(op, psi, axes=(list(range(d, 2 * d)), list(sites)))
    # tensordot leaves the operator's output legs first
    out = np.moveaxis(out, list(range(d)), list(sites))
    return out.reshape(vec.shape)
