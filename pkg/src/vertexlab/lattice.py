"""Rank-one even lattice vertex algebra V_L, L = Z alpha with <alpha, alpha> = 2k.

States a(-n_1)...a(-n_j) e^{m alpha}.  The pure sector states act by

    Y(e^{beta}, x) = E^-(-beta, x) E^+(-beta, x) e_beta x^{beta(0)},   beta = m alpha,

with the trivial cocycle: <m alpha, s alpha> = 2kms is always even, so no
sign corrections are needed in rank one.  Oscillator-dressed states reuse the
iterate recursion of the free boson engine.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Optional

from .fock import OscillatorAlgebra, Partition, partitions
from .scalars import Q
from .va_core import Vector


class LatticeMonomial(NamedTuple):
    partition: Partition
    sector: int = 0


def lattice_weight(m: LatticeMonomial, k: int) -> Fraction:
    return Fraction(sum(m.partition) + k * m.sector ** 2)


class LatticeVertexAlgebra(OscillatorAlgebra):
    name = "lattice_rank1"

    def __init__(self, k: int = 1, cutoff: int = 8, jet_order: int = 10, series_order: int = 16,
                 mutation: Optional[str] = None):
        if int(k) != k or k <= 0:
            raise ValueError("k must be a positive integer")
        self.k = int(k)
        super().__init__(2 * self.k, cutoff, jet_order, series_order, mutation)
        self.vacuum = LatticeMonomial((), 0)
        self.conformal_vector = Vector({LatticeMonomial((1, 1), 0): Q(1, 4 * self.k)})

    # -- labels -------------------------------------------------------------
    def _make(self, parts, charge):
        return LatticeMonomial(parts, charge)

    def state(self, parts=(), sector=0) -> LatticeMonomial:
        return LatticeMonomial(tuple(sorted(parts, reverse=True)), int(sector))

    def momentum(self, label):
        return 2 * self.k * label.sector

    def min_weight(self, sector):
        return self.k * sector * sector

    def result_charge(self, u, w):
        return u.sector + w.sector

    def _weight(self, label) -> Fraction:
        return lattice_weight(label, self.k)

    def sector_range(self):
        top = math.ceil(math.sqrt(self.cutoff / self.k))
        return [m for m in range(-top, top + 1) if self.k * m * m <= self.cutoff]

    def _enumerate(self):
        for m in self.sector_range():
            for level in range(self.cutoff - self.k * m * m + 1):
                for p in partitions(level):
                    yield LatticeMonomial(p, m)

    def _sort_key(self, label):
        return (self.weight(label), label.sector, tuple(-x for x in label.partition))

    def label_str(self, label) -> str:
        base = "vac" if label.sector == 0 else f"E({label.sector})"
        return "*".join(filter(None, [self._osc_str(label.partition), base]))

    # -- exponential vertex operators ---------------------------------------
    def sector_mode(self, u, q: int, w) -> Vector:
        m = u.sector
        if m == 0:
            return Vector({w: 1}) if q == -1 else Vector()
        s = w.sector
        shift = 2 * self.k * m * s
        # E^+ expansion: j P_j = -m sum_{n=1}^{j} a(n) P_{j-n}
        P = [Vector({w: 1})]
        for j in range(1, self.level(w) + 1):
            acc = Vector()
            for n in range(1, j + 1):
                if P[j - n]:
                    acc.add_scaled(self.alpha_vec(n, P[j - n]))
            P.append(acc * Q(-m, j))
        out = Vector()
        for j, pj in enumerate(P):
            t = j - q - 1 - shift
            if t < 0 or not pj:
                continue
            moved = Vector({LatticeMonomial(lab.partition, lab.sector + m): c for lab, c in pj.items()})
            out.add_scaled(self._schur(m, t, moved))
        if self.mutation == "lattice_sign" and m == 1 and w == LatticeMonomial((), -1):
            out = -out
        return out

    def _schur(self, m: int, t: int, v: Vector) -> Vector:
        """Coefficient of x^t in exp(sum_{n>=1} m a(-n) x^n / n), applied to v."""
        S = [v]
        for j in range(1, t + 1):
            acc = Vector()
            for n in range(1, j + 1):
                if S[j - n]:
                    acc.add_scaled(self.alpha_vec(-n, S[j - n]))
            S.append(acc * Q(m, j))
        return S[t]


def lattice_vertex_mode(u: LatticeMonomial, n: int, w: Vector, V: LatticeVertexAlgebra) -> Vector:
    out = Vector()
    for lab, c in w.items():
        out.add_scaled(V.mode(u, n, lab), c)
    return out
