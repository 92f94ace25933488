"""Truncated formal Laurent series in one variable ``z`` over the rationals.

Every series carries a validity order ``N``: the stored coefficients are
asserted correct for every exponent ``e < N``. Exact (finitely supported)
series use ``N = INF``. Binary operations compute the provable joint order
instead of assuming a global window, so a coefficient is never reported
beyond what the inputs actually determine.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Union

from gmpy2 import mpq as Q

INF = math.inf
# coefficients are stored as gmpy2 rationals (an order of magnitude faster than
# Fraction); ints and Fractions are accepted everywhere as input
RATIONAL_TYPES = (int, Fraction, type(Q()))

Order = Union[int, float]
Scalar = Union[int, Fraction, Q]


def _binom(e: int, k: int) -> int:
    """Generalised binomial coefficient C(e, k) for integer e (possibly negative)."""
    if k < 0:
        return 0
    if e >= 0:
        return math.comb(e, k)
    return (-1) ** k * math.comb(k - e - 1, k)


class LaurentSeries:
    """An element of Q((z)) known below ``order``.

    >>> f = LaurentSeries({-1: 1, 2: Fraction(1, 2)})
    >>> str(f)
    'z^-1 + 1/2*z^2'
    """

    __slots__ = ("_coeffs", "_order", "_jet", "_hash")

    def __init__(self, coeffs: Mapping[int, Scalar] | None = None, order: Order = INF):
        if order != INF:
            order = int(order)
        cleaned: Dict[int, Q] = {}
        for e, c in (coeffs or {}).items():
            c = Q(c)
            if c and e < order:
                cleaned[int(e)] = c
        self._coeffs = cleaned
        self._order = order
        self._jet: List[LaurentSeries] | None = None
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar) -> "LaurentSeries":
        return cls({0: c})

    @classmethod
    def monomial(cls, e: int, c: Scalar = 1) -> "LaurentSeries":
        return cls({e: c})

    @classmethod
    def zero(cls, order: Order = INF) -> "LaurentSeries":
        return cls({}, order)

    # -- accessors ----------------------------------------------------
    @property
    def coeffs(self) -> Dict[int, Q]:
        return dict(self._coeffs)

    @property
    def order(self) -> Order:
        return self._order

    @property
    def is_exact(self) -> bool:
        return self._order == INF

    def __getitem__(self, e: int) -> Q:
        if e >= self._order:
            raise IndexError(f"coefficient of z^{e} is beyond the validity order {self._order}")
        return self._coeffs.get(e, Q(0))

    def items(self):
        return sorted(self._coeffs.items())

    def valuation(self) -> Order:
        """Least stored exponent; the order itself for a (truncated) zero."""
        return min(self._coeffs) if self._coeffs else self._order

    def is_zero(self) -> bool:
        """True when no nonzero coefficient is known (exact zero or 0 + O(z^N))."""
        return not self._coeffs

    def is_exact_zero(self) -> bool:
        return not self._coeffs and self._order == INF

    def truncate(self, order: Order) -> "LaurentSeries":
        return LaurentSeries(self._coeffs, min(order, self._order))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ls_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({e: -c for e, c in self._coeffs.items()}, self._order)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ls_add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ls_add(other, -self)

    def __mul__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return self.scale(other)
        if isinstance(other, LaurentSeries):
            return ls_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "LaurentSeries":
        c = Q(c)
        if not c:
            return LaurentSeries({}, self._order)
        return LaurentSeries({e: c * v for e, v in self._coeffs.items()}, self._order)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by z^k."""
        return LaurentSeries({e + k: c for e, c in self._coeffs.items()}, self._order + k)

    def derive(self) -> "LaurentSeries":
        return ls_derive(self)

    def jet(self, k: int) -> "LaurentSeries":
        """Term ``k`` of the Taylor jet, f^(k)(z)/k!, cached on the instance."""
        if self._jet is None:
            self._jet = [self]
        while len(self._jet) <= k:
            n = len(self._jet)
            self._jet.append(ls_derive(self._jet[-1]).scale(Q(1, n)))
        return self._jet[k]

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            other = LaurentSeries.constant(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self._order == other._order and self._coeffs == other._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._order, frozenset(self._coeffs.items())))
        return self._hash

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Equality of all coefficients below the joint validity order."""
        return first_mismatch(self, other) is None

    def __repr__(self):
        return f"LaurentSeries({str(self)!r})"

    def __str__(self):
        return format_series(self)


def _coerce(x):
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, RATIONAL_TYPES):
        return LaurentSeries.constant(x)
    return NotImplemented


def format_series(f: LaurentSeries, var: str = "z") -> str:
    parts = []
    for e, c in f.items():
        if e == 0:
            parts.append(str(c))
            continue
        mon = var if e == 1 else f"{var}^{e}"
        if c == 1:
            parts.append(mon)
        elif c == -1:
            parts.append("-" + mon)
        else:
            parts.append(f"{c}*{mon}")
    body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    if f.order != INF:
        body += f" + O({var}^{f.order})"
    return body


def ls_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    order = min(a.order, b.order)
    out = dict(a._coeffs)
    for e, c in b._coeffs.items():
        out[e] = out.get(e, 0) + c
    return LaurentSeries(out, order)


def ls_sum(terms: Iterable[LaurentSeries]) -> LaurentSeries:
    order: Order = INF
    out: Dict[int, Q] = {}
    for t in terms:
        order = min(order, t.order)
        for e, c in t._coeffs.items():
            out[e] = out.get(e, 0) + c
    return LaurentSeries(out, order)


def ls_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    va, vb = a.valuation(), b.valuation()
    order = min(a.order + vb, b.order + va)
    out: Dict[int, Q] = {}
    for ea, ca in a._coeffs.items():
        for eb, cb in b._coeffs.items():
            e = ea + eb
            if e < order:
                out[e] = out.get(e, 0) + ca * cb
    return LaurentSeries(out, order)


def ls_derive(a: LaurentSeries) -> LaurentSeries:
    return LaurentSeries({e - 1: e * c for e, c in a._coeffs.items() if e}, a.order - 1)


class TaylorJet:
    """The jet (f^(n)(z)/n!) for n = 0..K, i.e. the x-expansion of f(z+x)."""

    def __init__(self, terms: List[LaurentSeries]):
        if not terms:
            raise ValueError("a jet needs at least the constant term")
        self.terms = tuple(terms)

    @property
    def jet_order(self) -> int:
        return len(self.terms) - 1

    def __getitem__(self, n: int) -> LaurentSeries:
        return self.terms[n]

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def ls_shift_jet(a: LaurentSeries, K: int) -> TaylorJet:
    if K < 0:
        raise ValueError("jet order must be nonnegative")
    return TaylorJet([a.jet(n) for n in range(K + 1)])


def binomial_shift_term(a: LaurentSeries, k: int) -> LaurentSeries:
    """Coefficient of x^k in a(z+x), expanded monomialwise by the binomial series.

    Independent of the derivative chain used by :meth:`LaurentSeries.jet`.
    """
    return LaurentSeries({e - k: c * _binom(e, k) for e, c in a._coeffs.items()}, a.order - k)


def first_mismatch(a: LaurentSeries, b: LaurentSeries):
    """Return ``(exponent, a_coeff, b_coeff)`` of the first disagreement below the joint order."""
    order = min(a.order, b.order)
    exps = sorted(set(a._coeffs) | set(b._coeffs))
    for e in exps:
        if e >= order:
            break
        ca, cb = a._coeffs.get(e, Q(0)), b._coeffs.get(e, Q(0))
        if ca != cb:
            return e, ca, cb
    return None


def series_inverse(p: LaurentSeries, order: int) -> LaurentSeries:
    """Expand 1/p valid below z^order.

    ``p`` must have a known leading coefficient, i.e. a nonzero stored term.
    """
    if p.is_zero():
        raise ZeroDivisionError("cannot invert a series with no known nonzero coefficient")
    v = p.valuation()
    q = p.shift(-v)
    q0 = q[0]
    # 1/p = z^-v / q ; need exponents of 1/q below order + v
    need = order + v
    if q.order != INF:
        need = min(need, q.order)
    inv: Dict[int, Q] = {}
    for n in range(0, max(need, 0)):
        s = Q(0)
        for i in range(1, n + 1):
            c = q._coeffs.get(i)
            if c:
                s += c * inv.get(n - i, 0)
        inv[n] = ((1 if n == 0 else 0) - s) / q0
    return LaurentSeries(inv, max(need, 0)).shift(-v)
