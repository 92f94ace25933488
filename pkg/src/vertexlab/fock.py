"""Free boson (rank-one Heisenberg) vertex algebra M(1) and its Fock modules.

States are oscillator monomials a(-n_1)...a(-n_k)|mu> with n_1 >= ... >= n_k >= 1.
The single generator a = a(-1)1 has modes a(n) with

    [a(m), a(n)] = m * kappa * delta_{m+n,0},    a(0)|mu> = mu |mu>,

and arbitrary monomials act through the iterate formula

    (a_{-n} b)_q = sum_{i>=0} C(n+i-1, i) [a(-n-i) b_q+i  -  (-1)^n b_{q-n-i} a(i)],

memoized on (monomial, mode, state).
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Dict, Iterator, NamedTuple, Optional, Tuple

from .scalars import Q
from .va_core import Vector, VertexAlgebra

Partition = Tuple[int, ...]


def partitions(n: int, largest: Optional[int] = None) -> Iterator[Partition]:
    """Partitions of n as non-increasing tuples."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def insert_part(parts: Partition, n: int) -> Partition:
    out = list(parts)
    i = 0
    while i < len(out) and out[i] >= n:
        i += 1
    out.insert(i, n)
    return tuple(out)


def remove_part(parts: Partition, n: int) -> Partition:
    out = list(parts)
    out.remove(n)
    return tuple(out)


class FockMonomial(NamedTuple):
    partition: Partition
    momentum: Fraction = 0


def _charge(mu):
    # integral momenta are stored as int: hashing Fractions dominates mode lookups
    mu = Fraction(mu)
    return int(mu) if mu.denominator == 1 else mu


class HeisenbergParams(NamedTuple):
    kappa: Fraction
    cutoff: int

    @property
    def conformal_normalization(self) -> Fraction:
        return 1 / (2 * self.kappa)


def fock_weight(m: FockMonomial, p: HeisenbergParams) -> Fraction:
    return Fraction(sum(m.partition)) + Fraction(m.momentum) ** 2 / (2 * p.kappa)


class OscillatorAlgebra(VertexAlgebra):
    """Shared engine for algebras generated by one free boson plus charge sectors.

    Labels are ``(partition, charge)`` named tuples.  Subclasses define how the
    charge enters (``momentum``, ``sector_mode``, ``_enumerate``, ``weight``).
    """

    def __init__(self, kappa, cutoff: int, jet_order: int = 10, series_order: int = 16,
                 mutation: Optional[str] = None):
        super().__init__(cutoff, jet_order, series_order)
        kappa = Fraction(kappa)
        if kappa == 0:
            raise ValueError("kappa must be nonzero")
        self.kappa = kappa
        self.mutation = mutation
        self._memo: Dict[tuple, Vector] = {}
        self._memo_lock = threading.Lock()
        self._weights: Dict[tuple, object] = {}
        self._bounds: Dict[tuple, int] = {}
        # integral structure constants stay plain ints (much faster than Fraction)
        self._kappa_c = int(kappa) if kappa.denominator == 1 else Q(kappa)

    # -- label helpers ----------------------------------------------------
    def _make(self, parts: Partition, charge):
        raise NotImplementedError

    def momentum(self, label) -> Fraction:
        raise NotImplementedError

    def min_weight(self, charge) -> Fraction:
        raise NotImplementedError

    def result_charge(self, u, w):
        raise NotImplementedError

    def level(self, label) -> int:
        return sum(label[0])

    @property
    def generator(self):
        return self._make((1,), self.vacuum[1])

    def sector_mode(self, u, q: int, w) -> Vector:
        """Mode of an oscillator-free state u (a pure charge sector)."""
        raise NotImplementedError

    # -- oscillators --------------------------------------------------------
    def alpha(self, n: int, w) -> Vector:
        """Single oscillator a(n) on a basis label."""
        parts, charge = w[0], w[1]
        if n < 0:
            return Vector({self._make(insert_part(parts, -n), charge): 1})
        if n == 0:
            mu = self.momentum(w)
            return Vector({w: mu}) if mu else Vector()
        mult = parts.count(n)
        if not mult:
            return Vector()
        c = n * self._kappa_c * mult
        if self.mutation == "heisenberg_commutator" and n == 1 and parts == (1,) and not self.momentum(w):
            c = 2 * self._kappa_c
        return Vector({self._make(remove_part(parts, n), charge): c})

    def alpha_vec(self, n: int, v: Vector) -> Vector:
        out = Vector()
        for lab, c in v.items():
            out.add_scaled(self.alpha(n, lab), c)
        return out

    # -- modes ----------------------------------------------------------------
    def weight(self, label):
        wt = self._weights.get(label)
        if wt is None:
            wt = self._weight(label)
            wt = int(wt) if wt.denominator == 1 else wt
            self._weights[label] = wt
        return wt

    def _weight(self, label) -> Fraction:
        raise NotImplementedError

    def mode_bound(self, u, w) -> int:
        key = (u, w)
        b = self._bounds.get(key)
        if b is None:
            top = self.weight(u) + self.weight(w) - 1 - self.min_weight(self.result_charge(u, w))
            b = self._bounds[key] = math.floor(top)
        return b

    def raw_mode(self, u, n: int, w) -> Vector:
        key = (u, n, w)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if n > self.mode_bound(u, w):
            res = Vector()
        else:
            res = self._compute_mode(u, n, w)
        with self._memo_lock:
            self._memo[key] = res
        return res

    def _mode_vec(self, u, n: int, v: Vector) -> Vector:
        out = Vector()
        for lab, c in v.items():
            out.add_scaled(self.raw_mode(u, n, lab), c)
        return out

    def _compute_mode(self, u, q: int, w) -> Vector:
        parts, charge = u[0], u[1]
        if not parts:
            return self.sector_mode(u, q, w)
        if parts == (1,) and charge == self.vacuum[1]:
            return self.alpha(q, w)
        n = parts[0]
        b = self._make(parts[1:], charge)
        out = Vector()
        wb = self.mode_bound(b, w)
        i = 0
        while q + i <= wb:
            inner = self.raw_mode(b, q + i, w)
            if inner:
                out.add_scaled(self.alpha_vec(-n - i, inner), math.comb(n + i - 1, i))
            i += 1
        sign = -1 if n % 2 else 1
        for i in range(0, self.level(w) + 1):
            aw = self.alpha(i, w)
            if aw:
                out.add_scaled(self._mode_vec(b, q - n - i, aw), -sign * math.comb(n + i - 1, i))
        return out

    # -- presentation -------------------------------------------------------------
    def _osc_str(self, parts: Partition) -> str:
        return "*".join(f"a(-{p})" for p in parts)

    def l0(self, w) -> Vector:
        return self._mode_vec_general(self.conformal_vector, 1, w)

    def _mode_vec_general(self, u: Vector, n: int, w) -> Vector:
        out = Vector()
        for lab, c in u.items():
            out.add_scaled(self.mode(lab, n, w), c)
        return out


class HeisenbergVertexAlgebra(OscillatorAlgebra):
    """M(1) with <a, a> = kappa; Fock modules M(1, mu) share the engine."""

    name = "heisenberg"

    def __init__(self, kappa=1, cutoff: int = 8, jet_order: int = 10, series_order: int = 16,
                 mutation: Optional[str] = None):
        super().__init__(kappa, cutoff, jet_order, series_order, mutation)
        self.params = HeisenbergParams(self.kappa, cutoff)
        self.vacuum = FockMonomial((), 0)
        h = self._make((1, 1), 0)
        self.conformal_vector = Vector({h: Q(self.params.conformal_normalization)})

    def _make(self, parts, charge):
        return FockMonomial(parts, charge)

    def state(self, parts=(), momentum=0) -> FockMonomial:
        return FockMonomial(tuple(sorted(parts, reverse=True)), _charge(momentum))

    def momentum(self, label) -> Fraction:
        return label.momentum

    def min_weight(self, charge):
        if not charge:
            return 0
        return Fraction(charge) ** 2 / (2 * self.kappa)

    def result_charge(self, u, w):
        return u.momentum + w.momentum

    def _weight(self, label) -> Fraction:
        return fock_weight(label, self.params)

    def _enumerate(self):
        for level in range(self.cutoff + 1):
            for p in partitions(level):
                yield FockMonomial(p, 0)

    def _sort_key(self, label):
        return (self.weight(label), label.momentum, tuple(-x for x in label.partition))

    def sector_mode(self, u, q, w) -> Vector:
        if u.momentum:
            raise ValueError("M(1) has no charged sectors; momentum states are module states")
        return Vector({w: 1}) if q == -1 else Vector()

    def module_states(self, mu, max_level: Optional[int] = None):
        """Basis of the Fock module M(1, mu) up to oscillator level ``max_level``."""
        mu = _charge(mu)
        top = self.cutoff if max_level is None else max_level
        return [FockMonomial(p, mu) for level in range(top + 1) for p in partitions(level)]

    def label_str(self, label) -> str:
        base = "vac" if not label.momentum else f"vac[{label.momentum}]"
        return "*".join(filter(None, [self._osc_str(label.partition), base]))


def heis_mode(n: int, m: FockMonomial, V: HeisenbergVertexAlgebra) -> Vector:
    return V.alpha(n, m)


def heis_iterate_mode(u: FockMonomial, n: int, w: Vector, V: HeisenbergVertexAlgebra) -> Vector:
    out = Vector()
    for lab, c in w.items():
        out.add_scaled(V.mode(u, n, lab), c)
    return out
