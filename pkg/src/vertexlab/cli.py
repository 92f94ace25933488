"""Batch front end: JSON run configurations, check suites, structured reports.

    vertexlab check CONFIG [--jobs N] [--out PATH]
    vertexlab eval CONFIG EXPR
    vertexlab spectrum CONFIG --depth W [--module NAME]

CONFIG is a path or the name of a bundled configuration (``suite_heisenberg``,
``suite_lattice``, ``mutation_negative``, ...).  Exit status: 0 all checks
pass, 1 some check failed, 2 configuration or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from . import deform as dm
from . import pseudo as pd
from .errors import (ConfigError, CutoffExceeded, DeltaPreconditionViolated, ParseError, UnknownSymbol,
                     VertexLabError)
from .fock import HeisenbergVertexAlgebra
from .lattice import LatticeVertexAlgebra
from .parsing import parse_scalar_expr, parse_vector_expr
from .scalars import LaurentSeries
from .va_core import (AXIOMS, AxiomReport, SeriesVector, Tally, Vector, Window, check_tensor_identity,
                      check_va_axioms, combine, y_mode)

log = logging.getLogger("vertexlab")

INSTANCES = {
    "heisenberg": (HeisenbergVertexAlgebra, {"kappa": 1}),
    "lattice_rank1": (LatticeVertexAlgebra, {"k": 1}),
}
# seeded structure-constant mutations, for negative configs
MUTATIONS = {"heisenberg": {"heisenberg_commutator"}, "lattice_rank1": {"lattice_sign"}}


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    name: str
    instance: Dict[str, Any]
    scalars: Dict[str, str] = field(default_factory=dict)
    vectors: Dict[str, str] = field(default_factory=dict)
    operators: Dict[str, Any] = field(default_factory=dict)
    modules: Dict[str, Any] = field(default_factory=dict)
    checks: List[Dict[str, Any]] = field(default_factory=list)
    output: Optional[str] = None

    @classmethod
    def from_dict(cls, d: Dict[str, Any], name: str = "config") -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("a configuration must be a JSON object")
        known = {"name", "instance", "scalars", "vectors", "operators", "modules", "checks", "output"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown configuration keys: {sorted(extra)}")
        if "instance" not in d:
            raise ConfigError("configuration lacks an 'instance' section")
        cfg = cls(name=d.get("name", name), instance=dict(d["instance"]),
                  scalars=dict(d.get("scalars", {})), vectors=dict(d.get("vectors", {})),
                  operators=dict(d.get("operators", {})), modules=dict(d.get("modules", {})),
                  checks=list(d.get("checks", [])), output=d.get("output"))
        inst = cfg.instance
        if inst.get("name") not in INSTANCES:
            raise ConfigError(f"unknown instance {inst.get('name')!r}; expected one of {sorted(INSTANCES)}")
        if inst.get("mutation") is not None and inst["mutation"] not in MUTATIONS[inst["name"]]:
            raise ConfigError(f"unknown mutation {inst['mutation']!r} for {inst['name']}; "
                              f"expected one of {sorted(MUTATIONS[inst['name']])}")
        for key in ("cutoff", "series_order"):
            if key in inst and (not isinstance(inst[key], int) or inst[key] <= 0):
                raise ConfigError(f"instance.{key} must be a positive integer")
        if "jet_order" in inst and (not isinstance(inst["jet_order"], int) or inst["jet_order"] <= 0):
            raise ConfigError("instance.jet_order must be a positive integer")
        for i, c in enumerate(cfg.checks):
            if not isinstance(c, dict) or c.get("check") not in CHECKS:
                raise ConfigError(f"checks[{i}]: unknown check {c.get('check') if isinstance(c, dict) else c!r}; "
                                  f"expected one of {sorted(CHECKS)}")
            if "window" in c:
                _window(c["window"], f"checks[{i}].window")
        return cfg


def bundled_configs() -> List[str]:
    root = resources.files("vertexlab") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(ref: str) -> RunConfig:
    path = Path(ref)
    if path.exists():
        text, name = path.read_text(), path.stem
    else:
        res = resources.files("vertexlab") / "configs" / f"{ref}.json"
        if not res.is_file():
            raise ConfigError(f"no configuration file or bundled configuration named {ref!r} "
                              f"(bundled: {', '.join(bundled_configs())})")
        text, name = res.read_text(), ref
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{ref}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return RunConfig.from_dict(data, name)


def _window(w, where="window") -> Window:
    try:
        win = Window.of(w)
    except (KeyError, TypeError, ValueError):
        raise ConfigError(f"{where}: expected {{'max_weight': int, 'modes': [lo, hi]}}") from None
    if win.max_weight < 0 or win.modes[0] > win.modes[1]:
        raise ConfigError(f"{where}: empty window {w}")
    return win


# ---------------------------------------------------------------------------
# named objects

class Session:
    """Resolves the named scalars, vectors, operators and modules of a config."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        cls, defaults = INSTANCES[cfg.instance["name"]]
        params = dict(defaults)
        params.update({k: v for k, v in cfg.instance.items() if k != "name"})
        if "kappa" in params:
            params["kappa"] = Fraction(str(params["kappa"]))
        try:
            self.V = cls(**params)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"instance: {e}") from None
        self.params = params
        self.scalars: Dict[str, LaurentSeries] = {}
        self.vectors: Dict[str, Vector] = {}
        self.operators: Dict[str, pd.PseudoMap] = {}
        self.modules: Dict[str, dm.ModuleAction] = {}
        for k, s in cfg.scalars.items():
            self.scalars[k] = self.scalar(s)
        for k, s in cfg.vectors.items():
            self.vectors[k] = self.vector(s)
        for k, spec in cfg.operators.items():
            self.operators[k] = self._build_operator(k, spec)
        for k, spec in cfg.modules.items():
            self.modules[k] = self._build_module(k, spec)

    # -- leaves ---------------------------------------------------------------
    def scalar(self, s) -> LaurentSeries:
        if isinstance(s, (int, float)) and not isinstance(s, bool):
            s = str(s)
        if not isinstance(s, str):
            raise ConfigError(f"expected a scalar expression, got {s!r}")
        if s in self.scalars:
            return self.scalars[s]
        return parse_scalar_expr(s)

    def vector(self, s) -> Vector:
        if not isinstance(s, str):
            raise ConfigError(f"expected a vector expression, got {s!r}")
        return parse_vector_expr(s, self.V, self.vectors)

    def scalar_list(self, spec) -> List:
        if spec in (None, "test_set"):
            return pd.scalar_test_set(self.V.series_order)
        if not isinstance(spec, list):
            raise ConfigError("scalars: expected 'test_set' or a list of expressions")
        return [(str(s), self.scalar(s)) for s in spec]

    def operator(self, name) -> pd.PseudoMap:
        if name not in self.operators:
            raise ConfigError(f"operator {name!r} is not defined (operators must be defined before use)")
        return self.operators[name]

    def module(self, name) -> dm.ModuleAction:
        if name not in self.modules:
            raise ConfigError(f"module {name!r} is not defined (modules must be defined before use)")
        return self.modules[name]

    # -- constructions -----------------------------------------------------------
    def _build_operator(self, name, spec) -> pd.PseudoMap:
        V = self.V
        if not isinstance(spec, dict) or len(spec) != 1:
            raise ConfigError(f"operators.{name}: expected an object with exactly one construction")
        (kind, arg), = spec.items()
        if kind == "xfv":
            return pd.xfv_build(V, self.scalar(arg["f"]), self.vector(arg["v"]))
        if kind == "delta":
            return pd.delta_build(V, self.vector(arg))
        if kind == "delta_exponent":
            return pd.delta_exponent_map(V, self.vector(arg))
        if kind == "exp":
            return pd.pd_exp(V, self.operator(arg))
        if kind == "bracket":
            a, b = arg
            return pd.pd_bracket(self.operator(a), self.operator(b))
        if kind == "compose":
            a, b = arg
            return pd.compose(self.operator(a), self.operator(b), pd.ENDOMORPHISM)
        if kind == "identity":
            return pd.PseudoMap.identity(V)
        if kind == "zero":
            return pd.PseudoMap.zero(V)
        if kind == "manual":
            blocks = {}
            for entry in arg:
                src = self.vector(entry["from"])
                if len(src) != 1 or list(src.values())[0] != 1:
                    raise ConfigError(f"operators.{name}: 'from' must be a single basis state")
                img = SeriesVector()
                for term in entry.get("to", []):
                    img.add_scaled(SeriesVector.dressed(self.scalar(term.get("scalar", "1")),
                                                        self.vector(term["vector"])))
                blocks[next(iter(src))] = img
            return pd.PseudoMap.from_blocks(V, blocks, pd.UNCLASSIFIED, f"manual:{name}")
        raise ConfigError(f"operators.{name}: unknown construction {kind!r}")

    def _build_module(self, name, spec) -> dm.ModuleAction:
        V = self.V
        if not isinstance(spec, dict) or len(spec) != 1:
            raise ConfigError(f"modules.{name}: expected an object with exactly one construction")
        (kind, arg), = spec.items()
        if kind == "plain":
            mu = (arg or {}).get("momentum")
            return dm.PlainModule(V, None if mu is None else Fraction(str(mu)))
        if kind == "lift":
            if isinstance(arg, str):
                return dm.lift_module(V, self.module(arg))
            return dm.lift_module(V, self.module(arg["module"]), self.scalar_list(arg.get("scalars")))
        if kind == "deform":
            return dm.deform_action(V, self.module(arg["module"]), self.operator(arg["delta"]))
        raise ConfigError(f"modules.{name}: unknown construction {kind!r}")


# ---------------------------------------------------------------------------
# checks

def _w(spec, default):
    return _window(spec.get("window", default))


def _check_va_axioms(S: Session, spec):
    which = spec.get("axioms", list(AXIOMS))
    bad = [a for a in which if a not in AXIOMS]
    if bad:
        raise ConfigError(f"unknown axioms {bad}")
    return check_va_axioms(S.V, which, _w(spec, (4, (-5, 5))))


def _drop_jet_term(k):
    def jet(f, n):
        return LaurentSeries.zero() if n == k else f.jet(n)
    return jet


def _check_tensor_identity(S: Session, spec):
    V = S.V
    win = _w(spec, (3, (-4, 4)))
    jet = _drop_jet_term(int(spec["drop_jet_term"])) if "drop_jet_term" in spec else None
    parts = []
    for fn, f in S.scalar_list(spec.get("scalars", ["1", "z", "z^-1"])):
        for u in V.basis(spec.get("max_weight", 3)):
            a = SeriesVector.dressed(f, V.basis_vector(u))
            rep = check_tensor_identity(V, a, win) if jet is None else check_tensor_identity(V, a, win, jet)
            rep.name = f"tensor_identity[({fn})*{V.label_str(u)}]"
            parts.append(rep)
    return combine("tensor_identity", win.as_dict(), parts)


def _check_pseudo(S: Session, spec):
    return pd.check_pseudo(S.V, S.operator(spec["operator"]), spec.get("kind", pd.DERIVATION),
                           _w(spec, (3, (-4, 4))))


def _check_xfv_suite(S: Session, spec):
    V = S.V
    win = _w(spec, (3, (-4, 4)))
    parts = []
    for fn, f in S.scalar_list(spec.get("scalars")):
        for v in V.basis(spec.get("max_weight", 4)):
            rep = pd.check_pseudo(V, pd.xfv_build(V, f, V.basis_vector(v)), pd.DERIVATION, win)
            rep.name = f"xfv[{fn}; {V.label_str(v)}]"
            parts.append(rep)
    return combine("xfv_suite", win.as_dict(), parts)


def _check_lie_hom_suite(S: Session, spec):
    V = S.V
    win = _w(spec, (3, (0, 0)))
    scalars = S.scalar_list(spec.get("scalars"))
    basis = V.basis(spec.get("max_weight", 3))
    parts = []
    for fn, f in scalars:
        for gn, g in scalars:
            for u in basis:
                for v in basis:
                    rep = pd.check_lie_hom(V, f, V.basis_vector(u), g, V.basis_vector(v), win)
                    if not rep.passed or not parts:
                        rep.name = f"lie_hom[({fn})*{V.label_str(u)}, ({gn})*{V.label_str(v)}]"
                    parts.append(rep)
    out = combine("lie_hom_suite", win.as_dict(), [p for p in parts if not p.passed] or parts[:1])
    out.checked, out.skipped = sum(p.checked for p in parts), sum(p.skipped for p in parts)
    out.notes.append(f"{len(parts)} (f (x) u, g (x) v) pairs")
    return out


def _check_commute(S: Session, spec):
    rep = pd.pd_commute_check(S.V, S.operator(spec["operator"]), _w(spec, (4, (0, 0))))
    rep.name = f"commute[{spec['operator']}]"
    return rep


def _check_exp_suite(S: Session, spec):
    """exp of X_{f,v} for each test scalar: commutativity, then the endomorphism identity."""
    V = S.V
    win = _w(spec, (3, (-4, 4)))
    v = S.vector(spec.get("vector", "a(-1)*vac"))
    parts = []
    for fn, f in S.scalar_list(spec.get("scalars")):
        X = pd.xfv_build(V, f, v)
        com = pd.pd_commute_check(V, X, (win.max_weight + 1, (0, 0)))
        com.name = f"commute[xfv({fn})]"
        parts.append(com)
        if com.passed:
            rep = pd.check_pseudo(V, pd.pd_exp(V, X, com), pd.ENDOMORPHISM, win)
            rep.name = f"exp[xfv({fn})]"
            parts.append(rep)
    t = Tally(V, "exp_of_zero", win.as_dict())
    E0 = pd.pd_exp(V, pd.PseudoMap.zero(V))
    for b in V.basis(win.max_weight):
        t.cell({"b": V.label_str(b)}, lambda b=b: (SeriesVector.constant(V.basis_vector(b)), E0.block(b)))
    parts.append(t.done())
    return combine("exp_suite", win.as_dict(), parts)


def _check_delta(S: Session, spec):
    V = S.V
    win = _w(spec, (3, (-4, 4)))
    h = S.vector(spec["vector"])
    try:
        D = pd.delta_build(V, h)
        D.block(V.vacuum)
    except DeltaPreconditionViolated as e:
        rep = AxiomReport("delta_preconditions", win.as_dict(), status="fail", checked=1, failures=1,
                          counterexample={"inputs": {"h": V.format_vector(h)}, "label": e.condition,
                                          "exponent": None, "expected": "satisfied", "actual": str(e.witness)})
        return combine(f"delta[{V.format_vector(h)}]", win.as_dict(), [rep])
    pre = AxiomReport("delta_preconditions", win.as_dict(), checked=1)
    parts = [pre, pd.check_pseudo(V, D, pd.ENDOMORPHISM, win), pd.delta_inverse_check(V, D, (win.max_weight, (0, 0)))]
    if V.conformal_vector is not None:
        hh = y_mode(V, h, 1, h).get(V.vacuum, 0)
        expected = SeriesVector.constant(V.conformal_vector)
        expected.add_scaled(SeriesVector.dressed(LaurentSeries.monomial(-1), h))
        expected.add_scaled(SeriesVector.dressed(LaurentSeries.monomial(-2, Fraction(hh) / 2), V.vac()))
        t = Tally(V, "conformal_shift", win.as_dict())
        t.cell({"v": "omega"}, lambda: (expected, D.apply(V.conformal_vector)))
        parts.append(t.done())
    return combine(f"delta[{V.format_vector(h)}]", win.as_dict(), parts)


def _check_extend(S: Session, spec):
    scalars = S.scalar_list(spec.get("scalars"))
    return pd.pd_extend_check(S.V, S.operator(spec["operator"]), spec.get("kind", pd.DERIVATION),
                              _w(spec, (2, (-3, 3))), scalars)


def _check_module_axioms(S: Session, spec):
    return dm.check_module_axioms(S.V, S.module(spec["module"]), _w(spec, (3, (-6, 6))))


def _check_route_equality(S: Session, spec):
    W = S.module(spec["module"])
    if not isinstance(W, dm.DeformedModule):
        raise ConfigError(f"route_equality needs a deformed module, {spec['module']!r} is {W.provenance}")
    return dm.check_route_equality(S.V, W, _w(spec, (3, (-6, 6))))


def _check_composition(S: Session, spec):
    d1, d2 = (S.operator(n) for n in spec["deltas"])
    return dm.check_composition(S.V, S.module(spec["module"]), d1, d2, _w(spec, (3, (-6, 6))))


def _check_spectrum(S: Session, spec):
    W = S.module(spec["module"])
    depth = int(spec.get("depth", 2))
    spectrum = dm.graded_spectrum(S.V, W, depth)
    rep = AxiomReport(f"spectrum[{spec['module']}]", {"depth": depth}, checked=1)
    rep.notes.append("spectrum: " + ", ".join(f"{_q(w)} x{m}" for w, m in spectrum))
    expect = spec.get("expect", {})
    actual = {"min_weight": _q(spectrum[0][0]), "multiplicity": spectrum[0][1]} if spectrum else {}
    for key in ("min_weight", "multiplicity"):
        if key in expect and str(expect[key]) != str(actual.get(key)):
            rep.status, rep.failures = "fail", 1
            rep.counterexample = {"inputs": {"depth": str(depth)}, "label": key, "exponent": None,
                                  "expected": str(expect[key]), "actual": str(actual.get(key))}
            break
    return rep


CHECKS: Dict[str, Callable[[Session, Dict[str, Any]], AxiomReport]] = {
    "va_axioms": _check_va_axioms,
    "tensor_identity": _check_tensor_identity,
    "pseudo": _check_pseudo,
    "xfv_suite": _check_xfv_suite,
    "lie_hom_suite": _check_lie_hom_suite,
    "commute": _check_commute,
    "exp_suite": _check_exp_suite,
    "delta": _check_delta,
    "extend": _check_extend,
    "module_axioms": _check_module_axioms,
    "route_equality": _check_route_equality,
    "composition": _check_composition,
    "spectrum": _check_spectrum,
}


def _q(x) -> str:
    """Exact rational as 'p/q' (or 'p')."""
    return str(Fraction(x)) if not isinstance(x, str) else x


# ---------------------------------------------------------------------------
# reports

@dataclass
class Report:
    config: str
    status: str
    environment: Dict[str, Any]
    checks: List[AxiomReport]

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> Dict[str, Any]:
        return {"config": self.config, "status": self.status, "environment": self.environment,
                "checks": [c.to_dict() for c in self.checks]}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Report":
        return cls(d["config"], d["status"], d["environment"], [AxiomReport.from_dict(c) for c in d["checks"]])


def dumps_report(r: Report) -> str:
    return json.dumps(r.to_dict(), sort_keys=True, indent=2) + "\n"


def loads_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def emit_report(r: Report, path) -> None:
    Path(path).write_text(dumps_report(r))


def load_report(path) -> Report:
    return loads_report(Path(path).read_text())


def run_config(cfg: RunConfig, jobs: int = 1) -> Report:
    """Build every named object (config errors surface here), then run the checks."""
    S = Session(cfg)

    def run(spec):
        log.info("running %s", spec["check"])
        return CHECKS[spec["check"]](S, spec)

    if jobs > 1 and len(cfg.checks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run, cfg.checks))
    else:
        reports = [run(spec) for spec in cfg.checks]
    for spec, rep in zip(cfg.checks, reports):
        if "label" in spec:
            rep.name = str(spec["label"])
    env = {
        "instance": {k: (_q(v) if isinstance(v, Fraction) else v) for k, v in
                     dict(S.params, name=cfg.instance["name"], cutoff=S.V.cutoff, series_order=S.V.series_order,
                          jet_order=S.V.jet_order).items()},
        "truncation_count": S.V.truncation_log.count,
        "windows_verified": [{"check": r.name, "window": r.window} for r in reports],
    }
    status = "pass" if all(r.passed for r in reports) else "fail"
    return Report(cfg.name, status, env, reports)


# ---------------------------------------------------------------------------
# command line

_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*\((.*)\)\s*$", re.S)


def evaluate(S: Session, expr: str) -> str:
    """``OP(vector)`` prints an operator image; anything else is parsed as a vector, then a scalar."""
    m = _CALL.match(expr)
    if m and m.group(1) in S.operators:
        img = S.operators[m.group(1)].apply(S.vector(m.group(2)))
        return S.V.format_vector(img)
    try:
        return S.V.format_vector(S.vector(expr))
    except (ParseError, UnknownSymbol) as vector_error:
        try:
            return str(S.scalar(expr))
        except (ParseError, UnknownSymbol):
            raise vector_error from None


def _default_module(S: Session, name: Optional[str]):
    if name is not None:
        return S.module(name)
    if S.modules:
        return list(S.modules.values())[-1]
    return dm.PlainModule(S.V)


CONFIG_ERRORS = (ConfigError, ParseError, UnknownSymbol, CutoffExceeded, ZeroDivisionError, VertexLabError,
                 KeyError, TypeError, ValueError, OSError)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vertexlab", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run every check of a configuration")
    c.add_argument("config")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--out", default=None, help="write the JSON report here (default: stdout)")
    e = sub.add_parser("eval", help="print one operator image or expression")
    e.add_argument("config")
    e.add_argument("expr")
    s = sub.add_parser("spectrum", help="graded spectrum of a (deformed) module")
    s.add_argument("config")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--module", default=None)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "check":
            if args.jobs < 1:
                raise ConfigError("--jobs must be at least 1")
            report = run_config(cfg, args.jobs)
        else:
            S = Session(cfg)
            if args.command == "eval":
                print(evaluate(S, args.expr))
                return 0
            spectrum = dm.graded_spectrum(S.V, _default_module(S, args.module), args.depth)
            print(json.dumps([[_q(w), m] for w, m in spectrum]))
            return 0
    except CONFIG_ERRORS as e:
        print(f"vertexlab: error: {e}", file=sys.stderr)
        return 2
    out = args.out or cfg.output
    text = dumps_report(report)
    if out:
        Path(out).write_text(text)
        for rep in report.checks:
            print(rep.line())
            if rep.counterexample:
                print(f"     counterexample: {json.dumps(rep.counterexample, sort_keys=True)}")
        print(f"{report.status.upper()} {report.config}")
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
