from fractions import Fraction

import pytest

from vertexlab import (CommutativityUnverified, DeltaPreconditionViolated, HeisenbergVertexAlgebra,
                       LatticeVertexAlgebra, LaurentSeries, NonIntegralEigenvalue, PseudoMap, SeriesVector, Vector,
                       check_lie_hom, check_pseudo, compose, delta_build, delta_exponent_map, delta_inverse_check,
                       exp_unchecked, pd_bracket, pd_commute_check, pd_exp, pd_extend_check, scalar_test_set,
                       tensor_bracket, xfv_build)
from vertexlab.pseudo import DERIVATION, ENDOMORPHISM

Z = LaurentSeries.monomial
ONE = LaurentSeries.constant(1)
SMALL = (2, (-3, 3))


@pytest.fixture(scope="module")
def M():
    return HeisenbergVertexAlgebra(kappa=1, cutoff=6)


@pytest.fixture(scope="module")
def alpha(M):
    return M.alpha_vec(-1, M.vac())


@pytest.fixture(scope="module")
def X(M, alpha):
    return xfv_build(M, Z(-1), alpha)


def omega(V):
    return Vector(V.conformal_vector)


def test_scalar_test_set():
    names = [n for n, _ in scalar_test_set(8)]
    assert names[:5] == ["1", "z", "z^2", "z^-1", "z^-2"]
    f = scalar_test_set(8)[-1][1]
    assert (f * LaurentSeries({0: 1, 1: 1})).agrees_with(ONE)


# -- X_{f,v} -------------------------------------------------------------------

def test_xfv_of_vacuum_is_zero(M):
    X0 = xfv_build(M, Z(-1), M.vac())
    assert all(X0.block(b).is_zero() for b in M.basis(3))


def test_xfv_image_example(M, alpha, X):
    assert X.apply(alpha) == SeriesVector.dressed(Z(-2, -1), M.vac())


@pytest.mark.parametrize("name, f", scalar_test_set(16))
def test_xfv_kills_vacuum_and_is_derivation(M, alpha, name, f):
    for v in (alpha, omega(M), M.alpha_vec(-2, M.vac())):
        A = xfv_build(M, f, v)
        assert A.block(M.vacuum).is_zero()
        rep = check_pseudo(M, A, DERIVATION, SMALL)
        assert rep.passed, rep.counterexample


def test_degenerate_maps(M):
    assert check_pseudo(M, PseudoMap.zero(M), DERIVATION, SMALL).passed
    assert check_pseudo(M, PseudoMap.identity(M), ENDOMORPHISM, SMALL).passed


def test_kind_mismatch_fails_on_vacuum(M, X):
    rep = check_pseudo(M, X, ENDOMORPHISM, SMALL)
    assert not rep.passed
    vac = next(s for s in rep.subchecks if s.name == "vacuum")
    assert not vac.passed
    assert (vac.counterexample["expected"], vac.counterexample["actual"]) == ("1", "0")


def test_report_lists_derived_subchecks(M, X):
    rep = check_pseudo(M, X, DERIVATION, SMALL)
    names = [s.name for s in rep.subchecks]
    assert "vacuum" in names and "translation_bracket" in names


# -- brackets ------------------------------------------------------------------

def test_bracket_with_self_vanishes(M, X):
    B = pd_bracket(X, X)
    assert all(B.block(b).is_zero() for b in M.basis(3))


def test_bracket_of_positive_oscillator_maps(M, alpha, X):
    B = pd_bracket(X, xfv_build(M, ONE, alpha))
    assert all(B.block(b).is_zero() for b in M.basis(4))


def test_tensor_bracket_examples(M, alpha):
    assert tensor_bracket(M, ONE, M.vac(), ONE, M.vac()).is_zero()
    assert tensor_bracket(M, Z(-1), alpha, ONE, alpha) == SeriesVector.dressed(Z(-2, -1), M.vac())


@pytest.mark.parametrize("f, g, u, v", [
    (ONE, ONE, "alpha", "alpha"),
    (Z(-1), ONE, "alpha", "alpha"),
    (ONE, Z(1), "omega", "omega"),
    (Z(2), Z(-2), "omega", "alpha"),
])
def test_lie_hom_examples(M, alpha, f, g, u, v):
    vecs = {"alpha": alpha, "omega": omega(M)}
    rep = check_lie_hom(M, f, vecs[u], g, vecs[v])
    assert rep.passed, rep.counterexample
    assert {s.name for s in rep.subchecks} == {"bracket", "dhat_kernel"}


def test_bracket_jacobi_on_test_set(M, alpha):
    maps = [xfv_build(M, f, v) for (_, f), v in
            zip(scalar_test_set(12)[:3], (alpha, omega(M), M.alpha_vec(-2, M.vac())))]
    a, b, c = maps
    J = [pd_bracket(a, pd_bracket(b, c)), pd_bracket(b, pd_bracket(c, a)), pd_bracket(c, pd_bracket(a, b))]
    for lab in M.basis(3):
        total = SeriesVector()
        for j in J:
            total.add_scaled(j.block(lab))
        assert all(f.agrees_with(LaurentSeries.zero()) for f in total.values())


# -- commuting and exp ----------------------------------------------------------

def test_commute_passes_for_oscillator_maps(M, alpha):
    for _, f in scalar_test_set(12):
        assert pd_commute_check(M, xfv_build(M, f, alpha), (3, (0, 0))).passed
    assert pd_commute_check(M, PseudoMap.zero(M), (3, (0, 0))).passed


def test_commute_reports_rectangle(M, X):
    rep = pd_commute_check(M, X, (3, (0, 0)))
    assert "rectangle" in rep.window


def test_commute_fails_for_virasoro_map(M):
    rep = pd_commute_check(M, xfv_build(M, Z(1), omega(M)), (3, (0, 0)))
    assert not rep.passed
    assert rep.counterexample["exponent"] is not None


def test_exp_refuses_unverified(M):
    with pytest.raises(CommutativityUnverified):
        pd_exp(M, xfv_build(M, Z(1), omega(M)), window=(3, (0, 0)))


def test_exp_of_zero_is_identity(M):
    E = pd_exp(M, PseudoMap.zero(M))
    for b in M.basis(4):
        assert E.block(b) == SeriesVector.constant(M.basis_vector(b))


def test_exp_two_term_example(M, alpha, X):
    E = pd_exp(M, X, window=(3, (0, 0)))
    expected = SeriesVector.constant(alpha) + SeriesVector.dressed(Z(-2, -1), M.vac())
    assert E.apply(alpha) == expected
    assert E.apply(M.vac()) == SeriesVector.constant(M.vac())
    assert check_pseudo(M, E, ENDOMORPHISM, SMALL).passed


# -- Delta(h, z) ---------------------------------------------------------------

def test_delta_examples(M, alpha):
    D = delta_build(M, alpha)
    assert D.apply(M.vac()) == SeriesVector.constant(M.vac())
    assert D.apply(alpha) == SeriesVector.constant(alpha) + SeriesVector.dressed(Z(-1), M.vac())
    expected = SeriesVector.constant(omega(M)) + SeriesVector.dressed(Z(-1), alpha) \
        + SeriesVector.dressed(Z(-2, Fraction(1, 2)), M.vac())
    assert D.apply(omega(M)) == expected


def test_delta_is_exp_of_exponent_map(M, alpha):
    D = delta_build(M, alpha)
    E = exp_unchecked(delta_exponent_map(M, alpha))
    for b in M.basis(4):
        assert D.block(b) == E.block(b)


def test_delta_is_endomorphism_with_inverse(M, alpha):
    D = delta_build(M, alpha)
    assert check_pseudo(M, D, ENDOMORPHISM, SMALL).passed
    assert delta_inverse_check(M, D, (3, (0, 0))).passed
    Dinv = delta_build(M, -alpha)
    both = compose(D, Dinv, ENDOMORPHISM)
    for b in M.basis(3):
        assert both.block(b) == SeriesVector.constant(M.basis_vector(b))


def test_delta_on_lattice():
    VL = LatticeVertexAlgebra(k=1, cutoff=6)
    half = VL.alpha_vec(-1, VL.vac()) * Fraction(1, 2)
    D = delta_build(VL, half)
    e = VL.basis_vector(VL.state((), 1))
    assert D.apply(e) == SeriesVector.dressed(Z(1), e)
    expected = SeriesVector.constant(omega(VL)) + SeriesVector.dressed(Z(-1), half) \
        + SeriesVector.dressed(Z(-2, Fraction(1, 4)), VL.vac())
    assert D.apply(omega(VL)) == expected


def test_delta_preconditions_enforced(M, alpha):
    with pytest.raises(DeltaPreconditionViolated):
        delta_build(M, omega(M)).block(M.vacuum)
    VL = LatticeVertexAlgebra(k=1, cutoff=6)
    with pytest.raises((NonIntegralEigenvalue, DeltaPreconditionViolated)):
        delta_build(VL, VL.alpha_vec(-1, VL.vac()) * Fraction(1, 4)).block(VL.vacuum)


# -- extension to C((z)) (x) V ---------------------------------------------------

def test_extend_verified_maps(M, alpha, X):
    assert pd_extend_check(M, X, DERIVATION, (2, (-2, 2))).passed
    assert pd_extend_check(M, delta_build(M, alpha), ENDOMORPHISM, (2, (-2, 2))).passed


def test_extend_rejects_broken_map(M, alpha):
    bad = PseudoMap.from_blocks(M, {M.state((1,)): SeriesVector.constant(M.vac())}, DERIVATION, "bad")
    assert not check_pseudo(M, bad, DERIVATION, SMALL).passed
    assert not pd_extend_check(M, bad, DERIVATION, (2, (-2, 2))).passed


def test_jet_order_exhaustion_is_a_skip():
    # v_n on weight-5 states needs jets past order 2; those cells are skipped, the rest checked
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=6, jet_order=2)
    X = xfv_build(V, scalar_test_set(8)[-1][1], V.alpha_vec(-2, V.vac()))
    rep = check_pseudo(V, X, DERIVATION, SMALL)
    assert rep.passed and rep.checked > 0 and rep.skipped > 0
    notes = [n for s in [rep, *rep.subchecks] for n in s.notes]
    assert any("jet terms beyond order 2" in n for n in notes)
