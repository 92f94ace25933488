"""Pseudoderivations, pseudoendomorphisms and the deformation operator Delta(h, z).

A :class:`PseudoMap` is a linear map V -> Q((z)) (x) V given by its images
("blocks") on basis labels.  Its Q((z))-linear extension to Q((z)) (x) V is
what gets composed, bracketed and exponentiated.

Blocks are built lazily.  If building a block touched the weight cutoff the
block is marked tainted and every later use replays a truncation event, so
checkers skip the affected cells instead of reporting cutoff artifacts.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (CommutativityUnverified, CutoffExceeded, DeltaPreconditionViolated,
                     NonIntegralEigenvalue, NotLocallyNilpotent)
from .scalars import INF, LaurentSeries, Q, series_inverse
from .va_core import (AxiomReport, SeriesVector, Tally, Vector, VertexAlgebra, Window, _fmt,
                      as_series_vector, combine, d_hat, d_op, note_truncation, watch_truncation,
                      y_ext_mode, y_mode, yhat_mode)

DERIVATION = "derivation"
ENDOMORPHISM = "endomorphism"
UNCLASSIFIED = "unclassified"


def scalar_test_set(order: int = 16) -> List[Tuple[str, LaurentSeries]]:
    """The scalars used to dress identity checks: constants, polynomials, poles, and a
    genuinely infinite expansion."""
    z = LaurentSeries.monomial
    return [
        ("1", LaurentSeries.constant(1)),
        ("z", z(1)),
        ("z^2", z(2)),
        ("z^-1", z(-1)),
        ("z^-2", z(-2)),
        (f"inv(1+z, {order})", series_inverse(LaurentSeries({0: 1, 1: 1}), order)),
    ]


class PseudoMap:
    """Linear map V -> Q((z)) (x) V, stored blockwise on basis labels."""

    def __init__(self, V: VertexAlgebra, build: Callable, kind: str = UNCLASSIFIED,
                 provenance: str = "manual"):
        self.V = V
        self._build = build
        self.kind = kind
        self.provenance = provenance
        self._blocks: Dict[object, Tuple[SeriesVector, int]] = {}
        self.info: Dict[str, object] = {}

    # -- constructors --------------------------------------------------------
    @classmethod
    def from_blocks(cls, V, blocks: Dict[object, object], kind=UNCLASSIFIED, provenance="manual"):
        table = {lab: as_series_vector(img) for lab, img in blocks.items()}
        return cls(V, lambda lab: table.get(lab, SeriesVector()), kind, provenance)

    @classmethod
    def identity(cls, V):
        return cls(V, lambda lab: SeriesVector.constant(V.basis_vector(lab)), ENDOMORPHISM, "identity")

    @classmethod
    def zero(cls, V):
        return cls(V, lambda lab: SeriesVector(), DERIVATION, "zero")

    # -- evaluation ---------------------------------------------------------------
    def block(self, label) -> SeriesVector:
        hit = self._blocks.get(label)
        if hit is None:
            with watch_truncation() as hits:
                try:
                    img = self._build(label)
                except CutoffExceeded:
                    img, hits.count = SeriesVector(), hits.count + 1
            hit = self._blocks[label] = (img, hits.count)
        if hit[1]:
            note_truncation()
        return hit[0]

    def tainted(self, label) -> bool:
        self.block(label)
        return bool(self._blocks[label][1])

    def apply(self, x) -> SeriesVector:
        """Q((z))-linear extension applied to a vector or series vector."""
        out = SeriesVector()
        for lab, f in as_series_vector(x).items():
            img = self.block(lab)
            if not img:
                continue
            if f == 1:
                out.add_scaled(img)
            else:
                out.add_scaled(img * f)
        return out

    __call__ = apply

    def __repr__(self):
        return f"PseudoMap({self.provenance}, kind={self.kind})"


def compose(a: PseudoMap, b: PseudoMap, kind=UNCLASSIFIED) -> PseudoMap:
    """a o b on the Q((z))-linear extensions."""
    return PseudoMap(a.V, lambda lab: a.apply(b.block(lab)), kind, f"({a.provenance})o({b.provenance})")


def linear_combination(V, terms: Sequence[Tuple[object, PseudoMap]], kind=UNCLASSIFIED,
                       provenance="sum") -> PseudoMap:
    def build(lab):
        out = SeriesVector()
        for c, m in terms:
            out.add_scaled(m.block(lab), c)
        return out
    return PseudoMap(V, build, kind, provenance)


# ---------------------------------------------------------------------------
# X_{f,v}

def xfv_build(V: VertexAlgebra, f: LaurentSeries, v) -> PseudoMap:
    """X_{f,v} = Res_x f(z+x) Y(v, x) = sum_{n>=0} f^(n)(z)/n! v_n."""
    v = Vector(v)

    def build(lab):
        return yhat_mode(V, SeriesVector.dressed(f, v), 0, V.basis_vector(lab))
    return PseudoMap(V, build, DERIVATION, f"xfv({f}; {V.format_vector(v)})")


def xfv_from_series(V: VertexAlgebra, w) -> PseudoMap:
    """X_w for w in Q((z)) (x) V, i.e. the zero mode of Yhat(w, x) restricted to V."""
    w = as_series_vector(w)

    def build(lab):
        return yhat_mode(V, w, 0, V.basis_vector(lab))
    return PseudoMap(V, build, DERIVATION, "xfv(series)")


def tensor_bracket(V: VertexAlgebra, f: LaurentSeries, u, g: LaurentSeries, v) -> SeriesVector:
    """[f (x) u, g (x) v] = sum_{n>=0} f^(n) g / n! (x) u_n v."""
    return yhat_mode(V, SeriesVector.dressed(f, Vector(u)), 0, SeriesVector.dressed(g, Vector(v)))


def pd_bracket(a: PseudoMap, b: PseudoMap) -> PseudoMap:
    V = a.V

    def build(lab):
        return a.apply(b.block(lab)) - b.apply(a.block(lab))
    kind = DERIVATION if a.kind == b.kind == DERIVATION else UNCLASSIFIED
    return PseudoMap(V, build, kind, f"[{a.provenance}, {b.provenance}]")


# ---------------------------------------------------------------------------
# checks

def _cell_ok(V, u, v, n, win) -> bool:
    return V.weight(u) + V.weight(v) - n - 1 <= V.cutoff


def check_pseudo(V: VertexAlgebra, A: PseudoMap, kind: str, window=(3, (-4, 4))) -> AxiomReport:
    """Verify the defining identity of a pseudoderivation / pseudoendomorphism.

    derivation:   a(u_n v) - u_n a(v) = Yhat(a(u), x)v   at x^{-n-1}
    endomorphism: A(u_n v) = Yhat(A(u), x) A(v)           at x^{-n-1}

    The vacuum condition and the translation bracket [D, A] = -d/dz A are
    checked separately (they follow from the main identity, so a failure
    there while the main identity passes would indicate an engine bug).
    """
    if kind not in (DERIVATION, ENDOMORPHISM):
        raise ValueError(f"kind must be {DERIVATION!r} or {ENDOMORPHISM!r}")
    win = Window.of(window)
    basis = V.basis(win.max_weight)

    main = Tally(V, f"{kind}_identity", win.as_dict())
    for u in basis:
        bu = V.basis_vector(u)
        for v in basis:
            bv = V.basis_vector(v)
            for n in win.mode_range():
                if not _cell_ok(V, u, v, n, win):
                    main.skip()
                    continue
                if kind == DERIVATION:
                    def compute(bu=bu, bv=bv, u=u, v=v, n=n):
                        lhs = A.apply(y_mode(V, bu, n, bv)) - y_ext_mode(V, bu, n, A.block(v))
                        return lhs, yhat_mode(V, A.block(u), n, bv)
                else:
                    def compute(bu=bu, bv=bv, u=u, v=v, n=n):
                        return A.apply(y_mode(V, bu, n, bv)), yhat_mode(V, A.block(u), n, A.block(v))
                main.cell({"u": V.label_str(u), "v": V.label_str(v), "n": n}, compute)

    vac = Tally(V, "vacuum", win.as_dict())
    target = SeriesVector() if kind == DERIVATION else SeriesVector.constant(V.vac())
    vac.cell({"v": "vac"}, lambda: (target, A.block(V.vacuum)))

    dbr = Tally(V, "translation_bracket", win.as_dict())
    for v in basis:
        bv = V.basis_vector(v)

        def compute(v=v, bv=bv):
            img = A.block(v)
            lhs = SeriesVector()
            for lab, f in img.items():
                lhs.add_scaled(SeriesVector.dressed(f, d_op(V, V.basis_vector(lab))))
            lhs.add_scaled(A.apply(d_op(V, bv)), -1)
            return -img.derive(), lhs
        dbr.cell({"v": V.label_str(v)}, compute)

    parts = [main.done(), vac.done(), dbr.done()]
    return combine(f"pseudo[{kind}; {A.provenance}]", win.as_dict(), parts,
                   notes=["vacuum and translation_bracket are derived conditions"])


def check_lie_hom(V: VertexAlgebra, f: LaurentSeries, u, g: LaurentSeries, v, window=(3, (0, 0))) -> AxiomReport:
    """[X_{f,u}, X_{g,v}] = X_{[f (x) u, g (x) v]} blockwise, and X vanishes on the image of Dhat."""
    win = Window.of(window)
    u, v = Vector(u), Vector(v)
    lhs_map = pd_bracket(xfv_build(V, f, u), xfv_build(V, g, v))
    rhs_map = xfv_from_series(V, tensor_bracket(V, f, u, g, v))
    hom = Tally(V, "bracket", win.as_dict())
    kern = Tally(V, "dhat_kernel", win.as_dict())
    kernel_maps = []
    for name, s, x in (("f(x)u", f, u), ("g(x)v", g, v)):
        try:
            kernel_maps.append((name, xfv_from_series(V, d_hat(V, SeriesVector.dressed(s, x)))))
        except CutoffExceeded:
            kern.skip()
    for b in V.basis(win.max_weight):
        hom.cell({"b": V.label_str(b)}, lambda b=b: (rhs_map.block(b), lhs_map.block(b)))
        for name, m in kernel_maps:
            kern.cell({"element": name, "b": V.label_str(b)}, lambda b=b, m=m: (SeriesVector(), m.block(b)))
    return combine("lie_hom", win.as_dict(), [hom.done(), kern.done()])


# ---------------------------------------------------------------------------
# two-variable commutativity

def _bivariate(A: PseudoMap, lab):
    """A(z1) A(z2) on a basis label: {(label, i, j): coeff} plus the valid rectangle."""
    out: Dict[Tuple[object, int, int], Fraction] = {}
    r1 = r2 = INF
    for w, g in A.block(lab).items():          # g in z2
        for w2, f in A.block(w).items():       # f in z1
            r1 = min(r1, f.order)
            r2 = min(r2, g.order)
            for i, cf in f.items():
                for j, cg in g.items():
                    key = (w2, i, j)
                    s = out.get(key, 0) + cf * cg
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
    return out, r1, r2


def pd_commute_check(V: VertexAlgebra, A: PseudoMap, window=(4, (0, 0))) -> AxiomReport:
    """[A(z1), A(z2)] = 0 on basis vectors, coefficient by coefficient in z1^i z2^j.

    A(z1)A(z2)v and A(z2)A(z1)v are the same bivariate series with the
    variables swapped, so commutativity is symmetry of one series inside the
    square where both orderings are determined.
    """
    win = Window.of(window)
    t = Tally(V, "commute", win.as_dict())
    for b in V.basis(win.max_weight):
        def locate(b=b):
            P, r1, r2 = _bivariate(A, b)
            r = min(r1, r2)
            for (w, i, j), c in sorted(P.items(), key=lambda kv: (kv[0][1], kv[0][2])):
                if i >= r or j >= r:
                    continue
                swapped = P.get((w, j, i), 0)
                if swapped != c:
                    return {"label": V.label_str(w), "exponent": [i, j],
                            "expected": _fmt(Fraction(swapped)), "actual": _fmt(Fraction(c))}, r
            return None, r
        t.cell_located({"b": V.label_str(b)}, locate)
    rep = t.done()
    order = rep.window.pop("series_order_verified", None)
    # exponents (i, j) compared: all below `order` in both variables, or all of them for exact blocks
    rep.window["rectangle"] = [order, order] if order is not None else "exact"
    return rep


# ---------------------------------------------------------------------------
# exponentials

def _exp_block(A: PseudoMap, lab, k_max: int):
    term = SeriesVector.constant(A.V.basis_vector(lab))
    total = SeriesVector(term)
    j = 0
    while True:
        j += 1
        term = A.apply(term) * Q(1, j)
        if term.is_zero():
            total.add_scaled(term)  # keeps the validity order honest
            return total, j
        if j > k_max:
            raise NotLocallyNilpotent(
                f"{A.provenance}: iterates on {A.V.label_str(lab)} did not vanish within {k_max} steps")
        total.add_scaled(term)


def exp_unchecked(A: PseudoMap, k_max: Optional[int] = None, provenance=None) -> PseudoMap:
    V = A.V
    k_max = V.cutoff + 2 if k_max is None else k_max
    index: Dict[object, int] = {}

    def build(lab):
        img, j = _exp_block(A, lab, k_max)
        wt = V.weight(lab)
        index[wt] = max(index.get(wt, 0), j)
        return img
    out = PseudoMap(V, build, ENDOMORPHISM, provenance or f"exp({A.provenance})")
    out.info["nilpotency_index"] = index
    return out


def pd_exp(V: VertexAlgebra, A: PseudoMap, commute: Optional[AxiomReport] = None,
           k_max: Optional[int] = None, window=(4, (0, 0))) -> PseudoMap:
    """exp A(z) = sum_j A^j / j! for a commuting, locally nilpotent pseudoderivation.

    ``commute`` is a passing :func:`pd_commute_check` report; when omitted the
    check is run on ``window``.
    """
    if commute is None:
        commute = pd_commute_check(V, A, window)
    if not commute.passed or commute.checked == 0:
        raise CommutativityUnverified(f"[A(z1), A(z2)] = 0 not verified for {A.provenance}: "
                                      f"{commute.counterexample}")
    out = exp_unchecked(A, k_max)
    out.info["commute_window"] = dict(commute.window)
    for b in V.basis(Window.of(window).max_weight):
        out.block(b)
    return out


# ---------------------------------------------------------------------------
# Delta(h, z)

def _scalar_multiple_of_vacuum(V, x: Vector):
    if not x:
        return Fraction(0)
    if set(x) == {V.vacuum}:
        return Fraction(x[V.vacuum])
    return None


def delta_preconditions(V: VertexAlgebra, h) -> Dict[object, int]:
    """Check the hypotheses on h and return the integral h(0)-eigenvalue of each basis label."""
    h = Vector(h)
    if any(V.weight(lab) >= 2 for lab in h):
        raise DeltaPreconditionViolated("h(n), n >= 1, must lower weight (weight of h below 2)",
                                        V.format_vector(h))
    hh = y_mode(V, h, 1, h)
    if _scalar_multiple_of_vacuum(V, hh) is None:
        raise DeltaPreconditionViolated("h_1 h must be a multiple of the vacuum", V.format_vector(hh))
    top = max(V.mode_bound(a, b) for a in h for b in h)
    for n in range(0, top + 1):
        if n == 1:
            continue
        x = y_mode(V, h, n, h)
        if x:
            raise DeltaPreconditionViolated(f"h_{n} h must vanish", V.format_vector(x))
    eig: Dict[object, int] = {}
    for b in V.basis():
        img = y_mode(V, h, 0, V.basis_vector(b))
        if img and set(img) != {b}:
            raise DeltaPreconditionViolated("h(0) must act diagonally on the basis",
                                            f"h(0) {V.label_str(b)} = {V.format_vector(img)}")
        lam = Fraction(img.get(b, 0))
        if lam.denominator != 1:
            raise NonIntegralEigenvalue("h(0) eigenvalues must be integers",
                                        f"{V.label_str(b)}: {lam}")
        eig[b] = int(lam)
    return eig


def delta_exponent_map(V: VertexAlgebra, h) -> PseudoMap:
    """E = sum_{n>=1} (-1)^{n+1} z^{-n} h(n) / n, the exponent of Delta(h, z) without z^{h(0)}."""
    h = Vector(h)

    def build(lab):
        out = SeriesVector()
        b = V.basis_vector(lab)
        for n in range(1, V.weight(lab) + 2):
            x = y_mode(V, h, n, b)
            if x:
                sign = 1 if n % 2 else -1
                out.add_scaled(SeriesVector.dressed(LaurentSeries.monomial(-n, Fraction(sign, n)), x))
        return out
    return PseudoMap(V, build, DERIVATION, f"delta_exponent({V.format_vector(h)})")


def delta_build(V: VertexAlgebra, h) -> PseudoMap:
    """Delta(h, z) = z^{h(0)} exp(sum_{n>=1} h(n)/(-n) (-z)^{-n})."""
    h = Vector(h)
    eig = delta_preconditions(V, h)
    E = exp_unchecked(delta_exponent_map(V, h))

    def build(lab):
        out = SeriesVector()
        for w, f in E.block(lab).items():
            out.add_term(w, f.shift(eig[w]))
        return out
    D = PseudoMap(V, build, ENDOMORPHISM, f"delta({V.format_vector(h)})")
    D.info["h"] = h
    D.info["eigenvalues"] = eig
    return D


def delta_inverse_check(V: VertexAlgebra, D: PseudoMap, window=(4, (0, 0))) -> AxiomReport:
    """Witness Delta(-h, z) as a two-sided inverse of Delta(h, z) blockwise."""
    win = Window.of(window)
    h = D.info["h"]
    inv = delta_build(V, -h)
    left, right = compose(inv, D), compose(D, inv)
    t = Tally(V, "delta_inverse", win.as_dict())
    for b in V.basis(win.max_weight):
        ident = SeriesVector.constant(V.basis_vector(b))
        t.cell({"b": V.label_str(b), "side": "left"}, lambda b=b, e=ident: (e, left.block(b)))
        t.cell({"b": V.label_str(b), "side": "right"}, lambda b=b, e=ident: (e, right.block(b)))
    return t.done()


# ---------------------------------------------------------------------------
# correspondence with Q((z))-linear derivations / endomorphisms

def pd_extend_check(V: VertexAlgebra, A: PseudoMap, kind: str, window=(2, (-3, 3)),
                    scalars: Optional[Iterable[Tuple[str, LaurentSeries]]] = None) -> AxiomReport:
    """The Q((z))-linear extension of A is a derivation / endomorphism of Yhat.

    derivation:   A(a_n b) = (A a)_n b + a_n (A b)
    endomorphism: A(a_n b) = (A a)_n (A b),  A(1) = 1
    over a = f (x) u, b = g (x) v with f, g from ``scalars``.
    """
    if kind not in (DERIVATION, ENDOMORPHISM):
        raise ValueError(f"kind must be {DERIVATION!r} or {ENDOMORPHISM!r}")
    win = Window.of(window)
    scalars = list(scalars if scalars is not None else scalar_test_set(V.series_order))
    basis = V.basis(win.max_weight)
    t = Tally(V, f"extension[{kind}]", win.as_dict())
    for fn, f in scalars:
        for u in basis:
            a = SeriesVector.dressed(f, V.basis_vector(u))
            for gn, g in scalars:
                for v in basis:
                    b = SeriesVector.dressed(g, V.basis_vector(v))
                    for n in win.mode_range():
                        if not _cell_ok(V, u, v, n, win):
                            t.skip()
                            continue

                        def compute(a=a, b=b, n=n):
                            lhs = A.apply(yhat_mode(V, a, n, b))
                            if kind == DERIVATION:
                                rhs = yhat_mode(V, A.apply(a), n, b) + yhat_mode(V, a, n, A.apply(b))
                            else:
                                rhs = yhat_mode(V, A.apply(a), n, A.apply(b))
                            return rhs, lhs
                        t.cell({"a": f"({fn})*{V.label_str(u)}", "b": f"({gn})*{V.label_str(v)}", "n": n},
                               compute)
    parts = [t.done()]
    if kind == ENDOMORPHISM:
        vac = Tally(V, "vacuum", win.as_dict())
        vac.cell({"v": "vac"}, lambda: (SeriesVector.constant(V.vac()), A.block(V.vacuum)))
        parts.append(vac.done())
    return combine(f"pd_extend[{kind}; {A.provenance}]", win.as_dict(), parts)
