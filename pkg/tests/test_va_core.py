import json
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab import (AxiomReport, HeisenbergVertexAlgebra, LatticeVertexAlgebra, LaurentSeries, SeriesVector,
                       Vector, check_tensor_identity, check_va_axioms, d_op, d_power, y_ext_mode, y_mode,
                       yhat_mode)

Z = LaurentSeries.monomial


@pytest.fixture(scope="module")
def M():
    return HeisenbergVertexAlgebra(kappa=1, cutoff=6)


@pytest.fixture(scope="module")
def VL():
    return LatticeVertexAlgebra(k=1, cutoff=6)


def alpha(V):
    return V.alpha_vec(-1, V.vac())


# -- modes ---------------------------------------------------------------

def test_vacuum_modes(M):
    for w in M.basis(3):
        bw = M.basis_vector(w)
        for n in range(-3, 4):
            expected = bw if n == -1 else Vector()
            assert y_mode(M, M.vac(), n, bw) == expected


@pytest.mark.parametrize("kappa", [1, 2, 3])
def test_free_boson_pairing(kappa):
    V = HeisenbergVertexAlgebra(kappa=kappa, cutoff=4)
    a = alpha(V)
    assert y_mode(V, a, 1, a) == V.vac() * kappa


def test_nonnegative_modes_kill_vacuum(M, VL):
    for V in (M, VL):
        for u in V.basis(3):
            for n in range(0, 5):
                assert y_mode(V, V.basis_vector(u), n, V.vac()) == Vector()


def test_translation_examples(M):
    assert d_op(M, M.vac()) == Vector()
    assert d_op(M, alpha(M)) == M.alpha_vec(-2, M.vac())


def test_y_ext_mode_examples(M):
    f, g = Z(-1) + Z(2, 3), Z(1)
    got = y_ext_mode(M, SeriesVector.dressed(f, M.vac()), -1, SeriesVector.dressed(g, M.vac()))
    assert got == SeriesVector.dressed(f * g, M.vac())
    a = alpha(M)
    got = y_ext_mode(M, SeriesVector.dressed(Z(-1), a), 1, SeriesVector.constant(a))
    assert got == SeriesVector.dressed(Z(-1), y_mode(M, a, 1, a))
    assert y_ext_mode(M, SeriesVector(), 0, SeriesVector.constant(a)).is_zero()


def test_yhat_examples(M):
    one = SeriesVector.constant(M.vac())
    z_one = SeriesVector.dressed(Z(1), M.vac())
    assert yhat_mode(M, z_one, -1, one) == z_one
    assert yhat_mode(M, z_one, -2, one) == one
    # f(z+x) = z^-1 - z^-2 x + ...; the x^1 coefficient is mode -2
    inv = SeriesVector.dressed(Z(-1), M.vac())
    assert yhat_mode(M, inv, -2, one) == SeriesVector.dressed(Z(-2, -1), M.vac())
    assert yhat_mode(M, inv, 0, one).is_zero()
    a = alpha(M)
    for n in range(-3, 3):
        assert yhat_mode(M, SeriesVector.constant(a), n, SeriesVector.constant(a)) == \
            SeriesVector.constant(y_mode(M, a, n, a))


# -- grading properties ------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(st.data())
def test_grading_and_lower_truncation(data):
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=6)
    basis = V.basis(3)
    u = data.draw(st.sampled_from(basis))
    w = data.draw(st.sampled_from(basis))
    n = data.draw(st.integers(-3, 6))
    out = y_mode(V, V.basis_vector(u), n, V.basis_vector(w))
    target = V.weight(u) + V.weight(w) - n - 1
    assert all(V.weight(lab) == target for lab in out)
    if n > V.weight(u) + V.weight(w) - 1:
        assert out == Vector()


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_creation_reconstruction(data):
    V = data.draw(st.sampled_from([HeisenbergVertexAlgebra(cutoff=6), LatticeVertexAlgebra(cutoff=6)]))
    u = data.draw(st.sampled_from(V.basis(3)))
    k = data.draw(st.integers(0, 3))
    bu = V.basis_vector(u)
    assert y_mode(V, bu, -k - 1, V.vac()) == d_power(V, bu, k) * Fraction(1, factorial(k))


# -- tensor identity ---------------------------------------------------------

@pytest.mark.parametrize("f", [LaurentSeries.constant(1), Z(1), Z(-1)])
def test_tensor_identity_passes(M, f):
    for u in M.basis(2):
        rep = check_tensor_identity(M, SeriesVector.dressed(f, M.basis_vector(u)), (2, (-3, 3)))
        assert rep.passed, rep.counterexample


def test_tensor_identity_detects_jet_mutation(M):
    def broken(f, k):
        return LaurentSeries.zero() if k == 1 else f.jet(k)
    rep = check_tensor_identity(M, SeriesVector.dressed(Z(1), alpha(M)), (2, (-3, 3)), broken)
    assert not rep.passed
    assert rep.counterexample["inputs"] and rep.counterexample["label"]


# -- axiom suites on small windows -------------------------------------------

def test_axioms_small_window(M, VL):
    for V in (M, VL):
        rep = check_va_axioms(V, window=(2, (-3, 3)))
        assert rep.passed, rep.counterexample
        assert rep.checked > 0


def test_mutated_commutator_fails_borcherds():
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=6, mutation="heisenberg_commutator")
    rep = check_va_axioms(V, ["borcherds"], (2, (-3, 3)))
    assert not rep.passed
    loc = rep.counterexample
    assert set(loc["inputs"]) >= {"u", "v", "w", "p", "q", "r"}
    assert y_mode(V, alpha(V), 1, alpha(V)) == V.vac() * 2


def test_axiom_report_round_trip(M):
    rep = check_va_axioms(M, ["creation", "skew"], (2, (-2, 2)))
    d = json.loads(json.dumps(rep.to_dict(), sort_keys=True))
    assert AxiomReport.from_dict(d) == rep


@pytest.mark.parametrize("mutation", [None, "heisenberg_commutator"])
def test_pascal_sweep_agrees_with_direct(mutation):
    # the row sweep derives cells from the previous row; it must reach the same verdicts
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=5, mutation=mutation)
    win = (2, (-3, 3))
    direct = check_va_axioms(V, ["borcherds"], win, borcherds_method="direct")
    pascal = check_va_axioms(V, ["borcherds"], win, borcherds_method="pascal")
    assert direct.status == pascal.status
    assert direct.failures == pascal.failures
    assert direct.checked + direct.skipped == pascal.checked + pascal.skipped
    assert pascal.checked >= direct.checked


def test_pascal_sweep_agrees_on_lattice():
    V = LatticeVertexAlgebra(k=1, cutoff=4, mutation="lattice_sign")
    win = (2, (-2, 2))
    direct = check_va_axioms(V, ["borcherds"], win, borcherds_method="direct")
    pascal = check_va_axioms(V, ["borcherds"], win, borcherds_method="pascal")
    assert (direct.status, direct.failures) == (pascal.status, pascal.failures) == ("fail", direct.failures)
