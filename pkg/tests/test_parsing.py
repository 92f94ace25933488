from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab import (CutoffExceeded, HeisenbergVertexAlgebra, LatticeVertexAlgebra, LaurentSeries, ParseError,
                       UnknownSymbol, Vector, parse_scalar_expr, parse_vector_expr)
from vertexlab.scalars import INF, ls_mul


@pytest.fixture(scope="module")
def M():
    return HeisenbergVertexAlgebra(kappa=1, cutoff=6)


@pytest.fixture(scope="module")
def VL():
    return LatticeVertexAlgebra(k=1, cutoff=6)


# -- scalars -------------------------------------------------------------------

def test_scalar_literal():
    f = parse_scalar_expr("3*z^-2 + 1/2*z")
    assert f == LaurentSeries({-2: 3, 1: Fraction(1, 2)})
    assert f.order == INF


def test_scalar_inverse():
    f = parse_scalar_expr("inv(1+z, 5)")
    assert f == LaurentSeries({0: 1, 1: -1, 2: 1, 3: -1, 4: 1}, 5)
    assert ls_mul(f, LaurentSeries({0: 1, 1: 1})) == LaurentSeries({0: 1}, 5)


def test_scalar_cancellation():
    assert parse_scalar_expr("z - z").is_exact_zero()


def test_scalar_grouping_and_powers():
    assert parse_scalar_expr("(1+z)^2") == LaurentSeries({0: 1, 1: 2, 2: 1})
    assert parse_scalar_expr("-(z^-1)*2") == LaurentSeries({-1: -2})
    assert parse_scalar_expr("z^3/4") == LaurentSeries({3: Fraction(1, 4)})


@pytest.mark.parametrize("text, pos", [
    ("3*z^", 4),
    ("z + + 1", 4),
    ("(1 + z", 6),
    ("z $ 2", 2),
    ("inv(1+z 5)", 8),
    ("z / z", 2),
    ("(1+z)^-1", 0),
    ("", 0),
])
def test_scalar_syntax_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_scalar_expr(text)
    assert info.value.position == pos
    assert isinstance(info.value, SyntaxError)


def test_scalar_unknown_symbol():
    with pytest.raises(UnknownSymbol, match="position 4"):
        parse_scalar_expr("1 + w")


@pytest.mark.parametrize("text", ["inv(0, 3)", "inv(z - z, 2)", "1/0"])
def test_scalar_zero_division(text):
    with pytest.raises(ZeroDivisionError):
        parse_scalar_expr(text)


# -- vectors -------------------------------------------------------------------

def test_vector_generator(M):
    assert parse_vector_expr("a(-1)*vac", M) == M.alpha_vec(-1, M.vac())
    assert parse_vector_expr("a(-1)", M) == M.alpha_vec(-1, M.vac())


def test_vector_omega(M):
    assert parse_vector_expr("omega", M) == M.alpha_vec(-1, M.alpha_vec(-1, M.vac())) * Fraction(1, 2)
    assert parse_vector_expr("omega", M) == parse_vector_expr("1/2*a(-1)*a(-1)*vac", M)


def test_vector_lattice_sector(VL):
    assert parse_vector_expr("E(1)", VL) == VL.basis_vector(VL.state((), 1))
    assert parse_vector_expr("2*a(-2)*E(-1) - E(1)", VL) == \
        VL.basis_vector(VL.state((2,), -1)) * 2 - VL.basis_vector(VL.state((), 1))


def test_vector_names(M):
    h = M.alpha_vec(-1, M.vac())
    assert parse_vector_expr("3*(h + vac)", M, {"h": h}) == (h + M.vac()) * 3


def test_vector_errors(M, VL):
    with pytest.raises(UnknownSymbol, match="position 6"):
        parse_vector_expr("a(-1)*foo", M)
    with pytest.raises(UnknownSymbol):
        parse_vector_expr("E(1)", M)
    with pytest.raises(CutoffExceeded):
        parse_vector_expr("a(-7)*vac", M)
    with pytest.raises(CutoffExceeded):
        parse_vector_expr("E(3)", VL)
    with pytest.raises(ParseError) as info:
        parse_vector_expr("a(2)*vac", M)
    assert info.value.position == 2
    with pytest.raises(ParseError):
        parse_vector_expr("vac*a(-1)", M)


# -- totality ------------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="z0123456789+-*/^() inv,ab", max_size=24))
def test_scalar_parser_is_total(text):
    # every input either parses or fails with a documented error naming a position
    try:
        parse_scalar_expr(text)
    except ParseError as e:
        assert 0 <= e.position <= len(text)
    except (UnknownSymbol, ZeroDivisionError) as e:
        assert "position" in str(e)


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="a()-+*/0123456789 vacomegEhx", max_size=24))
def test_vector_parser_is_total(text):
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=6)
    try:
        out = parse_vector_expr(text, V)
        assert isinstance(out, Vector)
    except ParseError as e:
        assert 0 <= e.position <= len(text)
    except (UnknownSymbol, CutoffExceeded) as e:
        assert "position" in str(e)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 3), st.fractions(-4, 4, max_denominator=5)), min_size=1, max_size=4))
def test_vector_format_round_trip(terms):
    V = HeisenbergVertexAlgebra(kappa=1, cutoff=6)
    v = Vector()
    for n, c in terms:
        v.add_scaled(V.alpha_vec(-n, V.vac()), c)
    text = V.format_vector(v)
    assert parse_vector_expr(text, V) == v
