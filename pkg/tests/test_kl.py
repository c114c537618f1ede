import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqecc import dense, kl
from aqecc.codes import Model, rdm_trace_distance, schmidt_weights, select_code_space
from aqecc.dense import LocalOperator
from aqecc.errors import BudgetError, RangeError

H, M = Model.HEISENBERG, Model.MOTZKIN
PAULI = dense.single_site_basis(2)


def test_bound_examples():
    assert kl.code_error_bound(0.0, 2, 3) == (0.0, 0.0)
    app, main = kl.code_error_bound(1e-4, 1, 1)
    assert app == pytest.approx(0.08, rel=1e-14)
    assert main == pytest.approx(0.0016, rel=1e-14)
    with pytest.raises(RangeError):
        kl.code_error_bound(1.0, 0, 1)
    with pytest.raises(RangeError):
        kl.code_error_bound(-1e-3, 1, 1)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.integers(1, 5), st.integers(1, 4))
def test_bound_ordering(eps, k, d):
    app, main = kl.code_error_bound(eps, k, d)
    assert app >= 0 and main >= 0
    if eps > 0 and abs(eps - 2.0 ** (-2 * d)) > 1e-12:
        assert (app >= main) == (eps <= 2.0 ** (-2 * d))


def _code_states(model, N, d=1):
    space = select_code_space(model, N, 1, d, c=math.inf)
    return space, [dense.build_codeword_vector(s) for s in space.codewords()]


def test_beny_oreshkov_identity_and_single_codeword():
    _, states = _code_states(H, 10)
    ident = LocalOperator(np.eye(2), 2, 1)
    res = kl.beny_oreshkov_decomposition(states, ident, ident)
    assert res.lam == pytest.approx(1.0)
    assert np.abs(res.B).max() < 1e-14
    z = LocalOperator(PAULI["Z"], 2, 1, 1)
    one = kl.beny_oreshkov_decomposition(states[:1], z, LocalOperator(PAULI["X"], 2, 1, 2))
    assert one.B.shape == (1, 1) and one.B[0, 0] == 0


def test_beny_oreshkov_sigma_z_trace_norm():
    space, states = _code_states(H, 10)
    z = LocalOperator(PAULI["Z"], 2, 1, 1)
    ident = LocalOperator(np.eye(2), 2, 1)
    # E_i^dag E_j = sigma^z: diagonal entries m/N relative to the first codeword
    res = kl.beny_oreshkov_decomposition(states, ident, z)
    mags = space.magnetizations
    expected = sum(abs(m - mags[0]) for m in mags) / 10
    assert res.B_trace_norm == pytest.approx(expected, abs=1e-13)
    assert res.lam == pytest.approx(mags[0] / 10)
    # sigma^z squared is the identity, so B vanishes
    assert kl.beny_oreshkov_decomposition(states, z, z).B_trace_norm < 1e-13


def test_beny_oreshkov_matches_oracle_elements():
    _, states = _code_states(M, 6)
    rng = np.random.default_rng(3)
    Ei = LocalOperator(rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)), 3, 2, 5)
    Ej = LocalOperator(rng.normal(size=(3, 3)), 3, 1, 2)
    res = kl.beny_oreshkov_decomposition(states, Ei, Ej)
    n = len(states)
    G = np.array([[np.vdot(dense.apply(Ei, a), dense.apply(Ej, b)) for b in states] for a in states])
    assert np.allclose(res.B, G - G[0, 0] * np.eye(n), atol=1e-12)


def test_beny_oreshkov_hermitian_b():
    for model, N, D in ((H, 10, 2), (M, 6, 3)):
        _, states = _code_states(model, N)
        for E in dense.error_basis(D, 1, [1, 3]):
            res = kl.beny_oreshkov_decomposition(states, E, E)
            assert np.allclose(res.B, res.B.conj().T, atol=1e-13)


def test_verify_heisenberg_dense_and_rdm_paths_agree():
    space = select_code_space(H, 12, 1, 1, c=math.inf)
    a = kl.verify_code(space, path="dense")
    b = kl.verify_code(space, path="rdm")
    assert a.path == "dense" and b.path == "rdm"
    off = ~np.eye(3, dtype=bool)
    assert np.all(a.epsilon_matrix[off] == 0)
    assert abs(a.epsilon_max - b.epsilon_max) <= 1e-10
    assert a.epsilon_max == pytest.approx(2 / 3, abs=1e-12)  # |<Z>| = |m|/N with m = 4, 8 above m = -4


def test_verify_motzkin_dense():
    space = select_code_space(M, 8, 1, 1, c=math.inf)
    rep = kl.verify_code(space)
    assert rep.path == "dense"
    states = [dense.build_codeword_vector(s) for s in space.codewords()]
    ref = dense.kl_epsilon_oracle(states, dense.error_basis(3, 1))
    assert np.allclose(rep.epsilon_matrix, ref, atol=1e-14)
    assert rep.epsilon_max == pytest.approx(kl.verify_code(space, path="rdm").epsilon_max, abs=1e-10)


def test_report_fields():
    space = select_code_space(M, 7, 1, 2, c=math.inf)
    rep = kl.verify_code(space)
    assert rep.epsilon_max == rep.epsilon_matrix.max()
    app, main = kl.code_error_bound(rep.epsilon_max, 1, 2)
    assert (rep.bound_appendix, rep.bound_maintext) == (app, main)
    out = rep.to_dict()
    assert out["provenance"]["path"] == "dense"
    assert len(out["provenance"]["operator_basis_hash"]) == 64
    assert "psi_1" in out["c_e_convention"]


def test_rdm_path_beyond_dense_budget():
    space = select_code_space(H, 40, 1, 2, c=math.inf)
    with pytest.raises(BudgetError):
        kl.verify_code(space, path="dense")
    rep = kl.verify_code(space)
    assert rep.path == "rdm"
    assert np.all(rep.epsilon_matrix[~np.eye(len(space.magnetizations), dtype=bool)] == 0)


@pytest.mark.parametrize("model,N,d", [(H, 10, 1), (H, 12, 2), (M, 7, 1), (M, 6, 2)])
def test_operator_norm_contraction(model, N, d):
    # |<psi_i|E|psi_i> - <psi_1|E|psi_1>| <= ||E|| * ||rho_i - rho_1||_1 for unit-norm E
    space = select_code_space(model, N, 1, d, c=math.inf)
    rep = kl.verify_code(space, path="dense")
    ref = schmidt_weights(space.codewords()[0], d)
    for i, spec in enumerate(space.codewords()):
        tdist = rdm_trace_distance(ref, schmidt_weights(spec, d))
        assert rep.epsilon_matrix[i, i] <= tdist + 1e-12
