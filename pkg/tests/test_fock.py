from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab import (HeisenbergParams, HeisenbergVertexAlgebra, Vector, check_va_axioms, delta_preconditions,
                       fock_weight, heis_iterate_mode, heis_mode, partitions, y_mode)


@pytest.fixture(scope="module")
def M():
    return HeisenbergVertexAlgebra(kappa=1, cutoff=6)


def test_partitions_counts():
    assert [sum(1 for _ in partitions(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]


def test_fock_weights(M):
    p = HeisenbergParams(Fraction(1), 8)
    assert fock_weight(M.state(()), p) == 0
    assert fock_weight(M.state((1,)), p) == 1
    assert fock_weight(M.state((), 1), HeisenbergParams(Fraction(2), 8)) == Fraction(1, 4)


@pytest.mark.parametrize("kappa", [1, 2])
def test_oscillator_action(kappa):
    V = HeisenbergVertexAlgebra(kappa=kappa, cutoff=5)
    a = V.state((1,))
    assert heis_mode(1, a, V) == V.vac() * kappa
    assert heis_mode(0, V.vacuum, V) == Vector()
    assert heis_mode(2, a, V) == Vector()


def test_conformal_vector_acts_as_l0(M):
    omega = Vector(M.conformal_vector)
    assert omega == M.alpha_vec(-1, M.alpha_vec(-1, M.vac())) * Fraction(1, 2)
    for u in M.basis(4):
        assert y_mode(M, omega, 1, M.basis_vector(u)) == M.basis_vector(u) * M.weight(u)


def test_high_modes_vanish(M):
    a = M.basis_vector(M.state((2, 1)))
    b = M.basis_vector(M.state((1,)))
    assert y_mode(M, a, 4, b) == Vector()


def test_iterate_mode_matches_dispatch(M):
    for u in M.basis(3):
        for w in M.basis(2):
            for n in range(-2, 3):
                assert heis_iterate_mode(u, n, M.basis_vector(w), M) == y_mode(M, M.basis_vector(u), n,
                                                                             M.basis_vector(w))


def test_delta_preconditions_for_alpha(M):
    h = M.alpha_vec(-1, M.vac())
    assert y_mode(M, h, 1, h) == M.vac()
    for n in (0, 2, 3):
        assert y_mode(M, h, n, h) == Vector()
    delta_preconditions(M, h)


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=4), st.integers(0, 3))
def test_momentum_sector(mu, level):
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=6)
    h = V.alpha_vec(-1, V.vac())
    for lab in V.module_states(mu, level):
        if V.weight(lab) > V.cutoff:
            continue
        assert y_mode(V, h, 0, V.basis_vector(lab)) == V.basis_vector(lab) * mu
        # positive modes strictly lower the level
        for n in (1, 2):
            for out in y_mode(V, h, n, V.basis_vector(lab)):
                assert sum(out.partition) == sum(lab.partition) - n


def test_axioms_weight_three_window():
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=5)
    assert check_va_axioms(V, window=(3, (-3, 3))).passed
