import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqecc import dense, ed, lattice, parent
from aqecc.codes import CodewordSpec, Model
from aqecc.errors import BudgetError, ShapeError


def _bfs_orbits(rules, D, N):
    """Orbits by breadth-first search over digit tuples, with swaps applied at every wrapped position."""
    table = {}
    for a, b in rules:
        table[a], table[b] = b, a
    seen, orbits = set(), []
    for start in itertools.product(range(D), repeat=N):
        if start in seen:
            continue
        orbit, frontier = {start}, [start]
        while frontier:
            s = frontier.pop()
            for j in range(N):
                for a, b in table.items():
                    k = len(a)
                    window = tuple(s[(j + t) % N] for t in range(k))
                    if window == a:
                        nxt = list(s)
                        for t in range(k):
                            nxt[(j + t) % N] = b[t]
                        nxt = tuple(nxt)
                        if nxt not in orbit:
                            orbit.add(nxt)
                            frontier.append(nxt)
        seen |= orbit
        orbits.append(sorted(orbit))
    return orbits


MOTZKIN_RULES = [((2, 0), (1, 1)), ((1, 2), (2, 1)), ((1, 0), (0, 1))]


def test_no_generators_gives_singletons():
    part = parent.orbit_decompose([], 2, 4)
    assert len(part.orbits) == 16 and all(o.size == 1 for o in part.orbits)
    assert parent.build_projector_hamiltonian([], 2, 4).nnz == 0


def test_motzkin_two_sites():
    part = parent.orbit_decompose(parent.motzkin_moves(), 3, 2)
    rows = part.to_dict()["orbits"]
    assert [r["size"] for r in rows] == [1, 2, 3, 2, 1]
    assert [r["magnetization"] for r in rows] == [-2, -1, 0, 1, 2]


@pytest.mark.parametrize("N", range(2, 8))
def test_motzkin_orbits_are_magnetization_classes(N):
    part = parent.orbit_decompose(parent.motzkin_moves(), 3, N)
    assert len(part.orbits) == 2 * N + 1
    mags = lattice.magnetizations(3, N)
    for o in part.orbits:
        assert np.unique(mags[o]).size == 1


@pytest.mark.parametrize("N", [3, 4, 5])
def test_orbits_match_bfs(N):
    ours = parent.orbit_decompose(parent.motzkin_moves(), 3, N)
    places = lattice.place_values(3, N)
    ref = sorted(sorted(int(np.dot(s, places)) for s in orb) for orb in _bfs_orbits(MOTZKIN_RULES, 3, N))
    assert [o.tolist() for o in ours.orbits] == ref


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_projector_hamiltonian_equals_motzkin_chain(N):
    Hp = parent.build_projector_hamiltonian(parent.motzkin_moves(), 3, N)
    Hm = ed.hamiltonian_matrix(ed.build_hamiltonian("motzkin-pbc", N))
    assert abs(Hp - Hm).max() <= 1e-12


def test_local_projectors_are_projectors():
    for g in parent.motzkin_moves() + parent.exchange_move():
        P = parent.local_projector(g)
        assert np.allclose(P @ P, P)
        assert np.allclose(P, P.T)


def test_exchange_chain():
    H = parent.build_projector_hamiltonian(parent.exchange_move(), 2, 4)
    part = parent.orbit_decompose(parent.exchange_move(), 2, 4)
    rep = parent.ground_space_check(H, part)
    assert rep.ok and rep.degeneracy == 5
    ground = np.array([part.uniform_state(n) for n in range(5)]).T
    codewords = np.array([dense.build_codeword_vector(CodewordSpec(Model.HEISENBERG, 4, m)).amplitudes
                          for m in range(-4, 5, 2)]).T
    assert ed.projector_distance(ground, codewords) < 1e-12


def test_motzkin_ground_check_and_codewords():
    H = parent.build_projector_hamiltonian(parent.motzkin_moves(), 3, 4)
    part = parent.orbit_decompose(parent.motzkin_moves(), 3, 4)
    rep = parent.ground_space_check(H, part)
    assert rep.ok and rep.degeneracy == 9 and rep.block_diagonal
    for n in range(9):
        m = n - 4
        g = dense.build_codeword_vector(CodewordSpec(Model.MOTZKIN, 4, m)).amplitudes
        assert np.allclose(part.uniform_state(n), g)


def test_empty_generators_everything_is_ground():
    part = parent.orbit_decompose([], 2, 3)
    rep = parent.ground_space_check(parent.build_projector_hamiltonian([], 2, 3), part)
    assert rep.ok and rep.degeneracy == 8 and rep.min_eigenvalue == 0.0


def test_check_reports_each_failure():
    # Heisenberg ring against singleton orbits: cross-orbit elements, negative spectrum, wrong degeneracy
    N = 4
    H = ed.hamiltonian_matrix(ed.build_hamiltonian("heisenberg-pbc", N))
    rep = parent.ground_space_check(H, parent.orbit_decompose([], 2, N))
    assert not rep.ok and not rep.block_diagonal
    text = " | ".join(rep.failures)
    assert "not positive semidefinite" in text
    assert "connects different orbits" in text
    assert "ground degeneracy" in text
    assert "residual" in text


def test_check_flags_degeneracy_mismatch_only():
    # Motzkin chain with the 0d <-> d0 move removed: its orbits are finer than the true ground space
    part = parent.orbit_decompose(parent.motzkin_moves(), 3, 3)
    H = parent.build_projector_hamiltonian(parent.motzkin_moves()[:2], 3, 3)
    rep = parent.ground_space_check(H, part)
    assert rep.block_diagonal and not rep.ok
    assert any("degeneracy" in f for f in rep.failures)


@pytest.mark.parametrize("N", [3, 5])
def test_frustration_free_term_by_term(N):
    gens = parent.motzkin_moves()
    part = parent.orbit_decompose(gens, 3, N)
    psis = np.array([part.uniform_state(n) for n in range(len(part.orbits))]).T
    for g in gens:
        P = parent.local_projector(g)
        for j in range(1, N + 1):
            term = ed.local_term_matrix(3, N, g.k, P, j)
            assert np.abs(term @ psis).max() <= 1e-12


def test_h_is_block_diagonal_and_psd():
    gens = parent.motzkin_moves()
    H = parent.build_projector_hamiltonian(gens, 3, 5).tocoo()
    labels = parent.orbit_decompose(gens, 3, 5).labels()
    assert np.all(labels[H.row] == labels[H.col])
    assert np.linalg.eigvalsh(H.toarray()).min() >= -1e-10


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_random_swap_rules(data):
    D = data.draw(st.sampled_from([2, 3]))
    N = data.draw(st.integers(3, 5 if D == 3 else 7))
    strings = list(itertools.product(range(D), repeat=2))
    n_rules = data.draw(st.integers(1, 3))
    rules = []
    used = set()
    for _ in range(n_rules):
        a = data.draw(st.sampled_from(strings))
        b = data.draw(st.sampled_from(strings))
        if a == b or a in used or b in used:
            continue
        used |= {a, b}
        rules.append((a, b))
    gens = [parent.swap_move(D, a, b) for a, b in rules]
    part = parent.orbit_decompose(gens, D, N)
    places = lattice.place_values(D, N)
    ref = sorted(sorted(int(np.dot(s, places)) for s in orb) for orb in _bfs_orbits(rules, D, N))
    assert [o.tolist() for o in part.orbits] == ref
    assert sorted(np.concatenate(part.orbits).tolist()) == list(range(D**N))
    rep = parent.ground_space_check(parent.build_projector_hamiltonian(gens, D, N), part)
    assert rep.ok, rep.failures


def test_generator_validation():
    with pytest.raises(ShapeError):
        parent.LocalSymmetryGenerator(2, 2, (((0, 1), (1, 0)),))  # not a permutation of its strings
    with pytest.raises(ShapeError):
        parent.LocalSymmetryGenerator(2, 2, (((0, 1), (1, 1)), ((1, 0), (1, 1))))
    with pytest.raises(ShapeError):
        parent.swap_move(2, "02", "20")
    cycle = parent.LocalSymmetryGenerator(3, 1, (((0,), (1,)), ((1,), (2,)), ((2,), (0,))))
    assert not cycle.is_involution()
    assert len(parent.orbit_decompose([cycle], 3, 2).orbits) == 1


def test_budget_guard(tmp_budget):
    tmp_budget(1000)
    with pytest.raises(BudgetError):
        parent.orbit_decompose(parent.motzkin_moves(), 3, 7)


def test_generator_json_round_trip(tmp_path):
    path = tmp_path / "gens.json"
    path.write_text(json.dumps({"D": 3, "k": 2, "rules": [["20", "11"], [[1, 2], [2, 1]], ["10", "01"]]}))
    D, gens = parent.load_generators(path)
    assert D == 3 and len(gens) == 3
    H1 = parent.build_projector_hamiltonian(gens, 3, 4)
    H2 = parent.build_projector_hamiltonian(parent.motzkin_moves(), 3, 4)
    assert abs(H1 - H2).max() == 0
    assert parent.dump_generators(3, gens)["rules"] == [["20", "11"], ["12", "21"], ["10", "01"]]
    path.write_text(json.dumps({"D": 2, "k": 2, "rules": [["011", "110"]]}))
    with pytest.raises(ShapeError):
        parent.load_generators(path)
