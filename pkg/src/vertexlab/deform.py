"""Module actions: plain modules, the lift to Q((z)) (x) V, and deformation by Delta.

Every module keeps the grading of the module it was built from; the weight
of u_n w is bounded by ``eff_weight(u) + weight(w) - n - 1``, which is what
the a priori truncation analysis of the checkers uses.  Deformed L(0)
eigenvalues are recomputed from the deformed action of the conformal vector
(see :func:`graded_spectrum`), never inherited.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DeltaUnverified, NotSemisimple, VertexLabError
from .pseudo import ENDOMORPHISM, PseudoMap, check_pseudo, compose, scalar_test_set
from .scalars import INF, LaurentSeries, ls_mul
from .va_core import (AxiomReport, BorcherdsTriple, SeriesVector, Tally, Vector, VertexAlgebra, Window, join_terms,
                      combine, note_truncation, run_borcherds_cells, y_mode, yhat_mode)

NEVER = -10 ** 9  # mode bound of an operator that is identically zero


class ModuleAction:
    """A graded module with a mode table ``mode(u, n, w)`` for V basis labels u."""

    provenance = "plain"

    def __init__(self, V: VertexAlgebra):
        self.V = V
        self._memo: Dict[tuple, Vector] = {}

    # -- grading --------------------------------------------------------------
    def states(self, max_weight=None) -> List:
        raise NotImplementedError

    def weight(self, w):
        raise NotImplementedError

    def label_str(self, w) -> str:
        return self.V.label_str(w)

    def sort_key(self, w):
        return self.V._sort_key(w)

    # -- action ---------------------------------------------------------------
    def mode(self, u, n: int, w) -> Vector:
        key = (u, n, w)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._mode(u, n, w)
        return hit

    def _mode(self, u, n: int, w) -> Vector:
        raise NotImplementedError

    def mode_bound(self, u, w) -> int:
        raise NotImplementedError

    def eff_weight(self, u):
        """Upper bound for the weight shift: wt(u_n w) <= eff_weight(u) + wt(w) - n - 1."""
        raise NotImplementedError

    def act(self, a, n: int, wvec) -> Vector:
        out = Vector()
        for u, c in Vector(a).items():
            for w, d in wvec.items():
                out.add_scaled(self.mode(u, n, w), c * d)
        return out

    # -- the algebra acting, as seen by the generic checker --------------------
    def algebra_elements(self, max_weight) -> List[Tuple[str, object, object]]:
        """(name, element, key) triples spanning the acting algebra up to ``max_weight``."""
        V = self.V
        return [(V.label_str(u), V.basis_vector(u), u) for u in V.basis(max_weight)]

    def vacuum_elements(self) -> List[Tuple[str, object, LaurentSeries]]:
        """(name, element, f) with Y(element, x) = f(x) id."""
        return [("vac", self.V.vac(), LaurentSeries.constant(1))]

    def product(self, a, n: int, b):
        return y_mode(self.V, a, n, b)

    def product_bound(self, ka, kb) -> int:
        return self.V.mode_bound(ka, kb)

    def product_weight(self, ka):
        return self.V.weight(ka)

    def key_eff_weight(self, ka):
        return self.eff_weight(ka)

    def action_bound(self, ka, w) -> int:
        return self.mode_bound(ka, w)

    def format_state(self, v: Vector) -> str:
        if not v:
            return "0"
        return join_terms((c, self.label_str(w)) for w, c in sorted(v.items(), key=lambda kv: self.sort_key(kv[0])))


class PlainModule(ModuleAction):
    """V acting on itself, or the free boson acting on the Fock module M(1, mu)."""

    def __init__(self, V: VertexAlgebra, momentum=None):
        super().__init__(V)
        self.momentum = momentum
        if momentum is not None and not hasattr(V, "module_states"):
            raise VertexLabError(f"{V.name} has no Fock modules")
        self.provenance = "adjoint" if momentum is None else f"fock[{momentum}]"

    def states(self, max_weight=None):
        top = self.V.cutoff if max_weight is None else min(max_weight, self.V.cutoff)
        if self.momentum is None:
            return self.V.basis(top)
        out = [s for s in self.V.module_states(self.momentum) if self.V.weight(s) <= top]
        return sorted(out, key=self.V._sort_key)

    def weight(self, w):
        return self.V.weight(w)

    def _mode(self, u, n, w):
        return self.V.mode(u, n, w)

    def mode_bound(self, u, w):
        return self.V.mode_bound(u, w)

    def eff_weight(self, u):
        return self.V.weight(u)


class LiftedModule(ModuleAction):
    """Q((z)) (x) V acting on W by Yhat_W(f (x) v, x) = f(x) Y_W(v, x).

    Mode n of f (x) v is sum_k f_k v_{n+k}.  A coefficient of f beyond its
    validity order would be needed only if n is very negative; that case is
    reported as a truncation event.
    """

    def __init__(self, base: ModuleAction, scalars: Optional[Sequence[Tuple[str, LaurentSeries]]] = None):
        super().__init__(base.V)
        self.base = base
        self.scalars = list(scalars if scalars is not None else scalar_test_set(base.V.series_order))
        self.provenance = f"lifted({base.provenance})"

    def states(self, max_weight=None):
        return self.base.states(max_weight)

    def weight(self, w):
        return self.base.weight(w)

    def label_str(self, w):
        return self.base.label_str(w)

    def sort_key(self, w):
        return self.base.sort_key(w)

    def lift_mode(self, f: LaurentSeries, u, n: int, w) -> Vector:
        out = Vector()
        top = self.base.mode_bound(u, w)
        for k in range(f.valuation(), top - n + 1):
            if k >= f.order:
                note_truncation()
                break
            c = f._coeffs.get(k)
            if c:
                out.add_scaled(self.base.mode(u, n + k, w), c)
        return out

    def act(self, a, n: int, wvec) -> Vector:
        out = Vector()
        pairs = a.items() if isinstance(a, SeriesVector) else \
            ((lab, LaurentSeries.constant(c)) for lab, c in a.items())
        for u, f in pairs:
            for w, d in wvec.items():
                out.add_scaled(self.lift_mode(f, u, n, w), d)
        return out

    def _mode(self, u, n, w):
        return self.base.mode(u, n, w)

    def mode_bound(self, u, w):
        return self.base.mode_bound(u, w)

    def eff_weight(self, u):
        return self.base.eff_weight(u)

    # the acting algebra is Q((z)) (x) V; keys are (scalar name, scalar, label)
    def algebra_elements(self, max_weight):
        V = self.V
        return [(f"({fn})*{V.label_str(u)}", SeriesVector.dressed(f, V.basis_vector(u)), (fn, f, u))
                for fn, f in self.scalars for u in V.basis(max_weight)]

    def vacuum_elements(self):
        V = self.V
        return [(f"({fn})*vac", SeriesVector.dressed(f, V.vac()), f) for fn, f in self.scalars]

    def product(self, a, n, b):
        return yhat_mode(self.V, a, n, b)

    def product_bound(self, ka, kb):
        return self.V.mode_bound(ka[2], kb[2])

    def product_weight(self, ka):
        return self.V.weight(ka[2])

    def key_eff_weight(self, ka):
        return self.base.eff_weight(ka[2]) - ka[1].valuation()

    def action_bound(self, ka, w):
        return self.base.mode_bound(ka[2], w) - ka[1].valuation()


def lift_module(V: VertexAlgebra, W: ModuleAction, scalars=None) -> LiftedModule:
    return LiftedModule(W, scalars)


class DeformedModule(ModuleAction):
    """(W, Y_W(Delta(x) ., x)): u acts through the lift of W applied to Delta(z) u."""

    def __init__(self, base: ModuleAction, delta: PseudoMap):
        super().__init__(base.V)
        self.base = base
        self.delta = delta
        self.lifted = LiftedModule(base, scalars=[])
        self.provenance = f"deformed({base.provenance}; {delta.provenance})"
        self._bounds: Dict[tuple, int] = {}

    def states(self, max_weight=None):
        return self.base.states(max_weight)

    def weight(self, w):
        return self.base.weight(w)

    def label_str(self, w):
        return self.base.label_str(w)

    def sort_key(self, w):
        return self.base.sort_key(w)

    def _mode(self, u, n, w):
        return self.lifted.act(self.delta.block(u), n, Vector({w: 1}))

    def direct_mode(self, u, n: int, w) -> Vector:
        """Same mode, read off the product of generating series f_i(x) * Y_W(u_i, x)w."""
        out = Vector()
        for ui, f in self.delta.block(u).items():
            if f.is_zero():
                continue
            vf = f.valuation()
            top = self.base.mode_bound(ui, w)
            # Y_W(ui, x)w as a series in x: exponent -m-1 carries ui_m w; exact for exponents
            # below -n - vf, which is all the product needs at x^{-n-1}
            by_label: Dict[object, Dict[int, Fraction]] = {}
            for m in range(n + vf, top + 1):
                for lab, c in self.base.mode(ui, m, w).items():
                    by_label.setdefault(lab, {})[-m - 1] = c
            for lab, coeffs in by_label.items():
                field = LaurentSeries(coeffs, -n - vf)
                prod = ls_mul(f, field)
                if -n - 1 >= prod.order:
                    note_truncation()
                    continue
                c = prod._coeffs.get(-n - 1)
                if c:
                    out.add_scaled(Vector({lab: c}))
        return out

    def mode_bound(self, u, w):
        key = (u, w)
        b = self._bounds.get(key)
        if b is None:
            b = max((self.base.mode_bound(ui, w) - f.valuation()
                     for ui, f in self.delta.block(u).items() if not f.is_zero()), default=NEVER)
            self._bounds[key] = b
        return b

    def eff_weight(self, u):
        return max((self.base.eff_weight(ui) - f.valuation()
                    for ui, f in self.delta.block(u).items() if not f.is_zero()), default=0)


def deform_action(V: VertexAlgebra, W: ModuleAction, delta: PseudoMap,
                  verified: Optional[AxiomReport] = None, window=(2, (-3, 3))) -> DeformedModule:
    """Deform W by a pseudoendomorphism.

    ``verified`` is a passing endomorphism-kind :func:`check_pseudo` report for
    ``delta``; when omitted the check is run on ``window``.
    """
    if verified is None:
        verified = check_pseudo(V, delta, ENDOMORPHISM, window)
    if not verified.passed or verified.checked == 0:
        raise DeltaUnverified(f"{delta.provenance} is not a verified pseudoendomorphism: "
                              f"{verified.counterexample}")
    return DeformedModule(W, delta)


# ---------------------------------------------------------------------------
# checks

def _state_compare(W: ModuleAction, expected: Vector, actual: Vector):
    for lab in sorted(set(expected) | set(actual), key=W.sort_key):
        ce, ca = expected.get(lab, 0), actual.get(lab, 0)
        if ce != ca:
            return {"label": W.label_str(lab), "exponent": None,
                    "expected": str(Fraction(ce)), "actual": str(Fraction(ca))}, INF
    return None, INF


class _ModuleTally(Tally):
    """Tally whose vector comparisons use the module's labels."""

    def __init__(self, W: ModuleAction, name, window):
        super().__init__(W.V, name, window)
        self.W = W

    def cell(self, inputs, compute):
        return self.cell_located(inputs, lambda: _state_compare(self.W, *compute()))


def check_module_axioms(V: VertexAlgebra, W: ModuleAction, window=(3, (-6, 6)),
                        borcherds_method: str = "pascal") -> AxiomReport:
    """Vacuum property and the component Borcherds identity of a module action."""
    win = Window.of(window)
    states = W.states(win.max_weight)

    vac = _ModuleTally(W, "module_vacuum", win.as_dict())
    for name, elem, f in W.vacuum_elements():
        for w in states:
            bw = Vector({w: 1})
            for n in win.mode_range():
                c = f._coeffs.get(-n - 1, 0) if -n - 1 < f.order else None
                if c is None:
                    vac.skip()
                    continue
                vac.cell({"u": name, "n": n, "w": W.label_str(w)},
                         lambda elem=elem, n=n, bw=bw, c=c: (bw * c, W.act(elem, n, bw)))

    t = _ModuleTally(W, "module_borcherds", win.as_dict())
    elems = W.algebra_elements(win.max_weight)
    cutoff = V.cutoff
    for nu, a, ka in elems:
        pa, ea = W.product_weight(ka), W.key_eff_weight(ka)
        for nv, b, kb in elems:
            pb, eb = W.product_weight(kb), W.key_eff_weight(kb)
            b_ab = W.product_bound(ka, kb)
            for w in states:
                ww = W.weight(w)
                bounds = (b_ab, W.action_bound(kb, w), W.action_bound(ka, w))
                sig = (pa + pb, eb + ww, ea + ww, ea + eb + ww)
                triple = BorcherdsTriple(W.product, W.act, a, b, Vector({w: 1}), bounds)
                run_borcherds_cells(t, triple, sig, win.modes, cutoff, {"u": nu, "v": nv, "w": W.label_str(w)},
                                    borcherds_method)
    rep = combine(f"module_axioms[{W.provenance}]", win.as_dict(), [vac.done(), t.done()])
    if isinstance(W, DeformedModule):
        rep.notes.append("simple-current property not checked: invertibility of Delta is witnessed separately, "
                         "irreducibility is out of scope")
    return rep


def check_route_equality(V: VertexAlgebra, W: DeformedModule, window=(3, (-6, 6))) -> AxiomReport:
    """Lift-then-precompose equals the direct generating-series formula."""
    win = Window.of(window)
    t = _ModuleTally(W, "route_equality", win.as_dict())
    for u in V.basis(win.max_weight):
        for w in W.states(win.max_weight):
            for n in win.mode_range():
                t.cell({"u": V.label_str(u), "n": n, "w": W.label_str(w)},
                       lambda u=u, n=n, w=w: (W.direct_mode(u, n, w), W.mode(u, n, w)))
    return t.done()


def check_same_action(V: VertexAlgebra, A: ModuleAction, B: ModuleAction, window=(3, (-6, 6)),
                      name="same_action") -> AxiomReport:
    """Blockwise equality of two actions on the same module."""
    win = Window.of(window)
    t = _ModuleTally(A, name, win.as_dict())
    for u in V.basis(win.max_weight):
        for w in A.states(win.max_weight):
            for n in win.mode_range():
                t.cell({"u": V.label_str(u), "n": n, "w": A.label_str(w)},
                       lambda u=u, n=n, w=w: (B.mode(u, n, w), A.mode(u, n, w)))
    return t.done()


def check_composition(V: VertexAlgebra, W: ModuleAction, d1: PseudoMap, d2: PseudoMap,
                      window=(3, (-6, 6))) -> AxiomReport:
    """deform(W, d1 o d2) = deform(deform(W, d1), d2)."""
    nested = DeformedModule(DeformedModule(W, d1), d2)
    direct = DeformedModule(W, compose(d1, d2, ENDOMORPHISM))
    return check_same_action(V, nested, direct, window, "composition")


# ---------------------------------------------------------------------------
# spectra

def l0_matrix(V: VertexAlgebra, W: ModuleAction, states) -> List[List[Fraction]]:
    """Matrix of the x^{-2} coefficient of the omega-action on ``states`` (columns = images)."""
    if V.conformal_vector is None:
        raise VertexLabError(f"{V.name} has no conformal vector")
    index = {s: i for i, s in enumerate(states)}
    M = [[Fraction(0)] * len(states) for _ in states]
    for j, s in enumerate(states):
        img = W.act(V.conformal_vector, 1, Vector({s: 1}))
        for lab, c in img.items():
            if lab not in index:
                raise VertexLabError(f"L(0) maps {W.label_str(s)} outside its graded piece")
            M[index[lab]][j] = Fraction(c)
    return M


def _block_eigenvalues(M, states, W) -> Dict[object, int]:
    n = len(M)
    if all(M[i][j] == 0 for i in range(n) for j in range(n) if i != j):
        out: Dict[object, int] = {}
        for i in range(n):
            out[M[i][i]] = out.get(M[i][i], 0) + 1
        return out
    import sympy
    S = sympy.Matrix(n, n, lambda i, j: sympy.Rational(M[i][j].numerator, M[i][j].denominator))
    if not S.is_diagonalizable():
        raise NotSemisimple("deformed L(0) is not semisimple on a graded piece",
                            [W.label_str(s) for s in states])
    out = {}
    for ev, mult in S.eigenvals().items():
        key = Fraction(int(ev.p), int(ev.q)) if ev.is_Rational else ev
        out[key] = out.get(key, 0) + int(mult)
    return out


def graded_spectrum(V: VertexAlgebra, W: ModuleAction, depth: int) -> List[Tuple[object, int]]:
    """Eigenvalues of the (deformed) L(0) with multiplicities on the graded pieces of W
    of weight at most ``depth`` (weights of the undeformed grading)."""
    pieces: Dict[object, list] = {}
    for s in W.states(depth):
        pieces.setdefault(W.weight(s), []).append(s)
    total: Dict[object, int] = {}
    for wt in sorted(pieces):
        states = pieces[wt]
        for ev, m in _block_eigenvalues(l0_matrix(V, W, states), states, W).items():
            total[ev] = total.get(ev, 0) + m
    return sorted(total.items(), key=lambda kv: float(kv[0]))
