import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab import AxiomReport
from vertexlab.cli import (Report, RunConfig, bundled_configs, dumps_report, load_config, loads_report, main,
                           run_config)

NEGATIVES = ["mutation_negative", "mutation_negative_lattice", "mutation_negative_jet", "negative_commute"]


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_bundled_configs_load():
    names = bundled_configs()
    assert {"smoke", "suite_heisenberg", "suite_lattice"} <= set(names)
    for n in names:
        assert load_config(n).name == n


def test_smoke_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["check", "smoke", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.strip().endswith("PASS smoke")
    report = json.loads(out.read_text())
    assert report["status"] == "pass"
    assert list(report) == sorted(report)
    assert report["environment"]["instance"]["name"] == "heisenberg"
    assert [w["check"] for w in report["environment"]["windows_verified"]][:2] == [
        "va_axioms[heisenberg]", "pseudo[derivation; xfv(z^-1; a(-1)*vac)]"]


def test_stdout_report_is_json(capsys):
    assert main(["check", "smoke"]) == 0
    assert json.loads(capsys.readouterr().out)["config"] == "smoke"


@pytest.mark.parametrize("name", NEGATIVES)
def test_negative_configs_fail_with_locator(tmp_path, capsys, name):
    out = tmp_path / "r.json"
    assert main(["check", name, "--out", str(out)]) == 1
    assert "counterexample" in capsys.readouterr().out
    report = loads_report(out.read_text())
    failing = [c for c in report.checks if not c.passed]
    assert failing
    for c in failing:
        ce = c.counterexample
        assert ce is not None
        assert {"inputs", "label", "expected", "actual"} <= set(ce)
        assert ce["expected"] != ce["actual"]


def test_empty_check_list_passes(tmp_path):
    path = write(tmp_path, {"name": "empty", "instance": {"name": "heisenberg"}, "checks": []})
    assert main(["check", path, "--out", str(tmp_path / "r.json")]) == 0


@pytest.mark.parametrize("cfg", [
    {"name": "x", "instance": {"name": "virasoro"}, "checks": []},
    {"name": "x", "instance": {"name": "heisenberg", "mutation": "nope"}, "checks": []},
    {"name": "x", "instance": {"name": "heisenberg", "cutoff": 0}, "checks": []},
    {"name": "x", "instance": {"name": "heisenberg"}, "checks": [{"check": "teleport"}]},
    {"name": "x", "instance": {"name": "heisenberg"}, "vectors": {"v": "a(-1)*"}, "checks": []},
    {"name": "x", "instance": {"name": "heisenberg"}, "vectors": {"v": "E(1)"}, "checks": []},
    {"name": "x", "instance": {"name": "heisenberg"}, "colour": "red", "checks": []},
    {"name": "x", "instance": {"name": "heisenberg"},
     "checks": [{"check": "va_axioms", "window": {"max_weight": 2, "modes": [3, -3]}}]},
])
def test_config_errors_exit_2(tmp_path, capsys, cfg):
    assert main(["check", write(tmp_path, cfg)]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_and_malformed_files_exit_2(tmp_path):
    assert main(["check", str(tmp_path / "absent.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", str(bad)]) == 2


def test_eval(capsys):
    assert main(["eval", "suite_heisenberg", "Delta(omega)"]) == 0
    assert capsys.readouterr().out.strip() == \
        "(1/2*z^-2)*vac + (z^-1)*a(-1)*vac + (1/2)*a(-1)*a(-1)*vac"
    assert main(["eval", "smoke", "alpha - 2*a(-2)*vac"]) == 0
    assert capsys.readouterr().out.strip() == "a(-1)*vac - 2*a(-2)*vac"
    assert main(["eval", "smoke", "inv(1-z, 3)"]) == 0
    assert capsys.readouterr().out.strip() == "1 + z + z^2 + O(z^3)"
    assert main(["eval", "smoke", "a(-1)*"]) == 2


def test_spectrum(capsys):
    assert main(["spectrum", "smoke", "--depth", "2"]) == 0
    assert json.loads(capsys.readouterr().out) == [["1/2", 1], ["3/2", 1], ["5/2", 2]]
    assert main(["spectrum", "smoke", "--depth", "1", "--module", "M"]) == 0
    assert json.loads(capsys.readouterr().out) == [["0", 1], ["1", 1]]
    assert main(["spectrum", "smoke", "--depth", "1", "--module", "nowhere"]) == 2


def test_jobs_do_not_change_the_report():
    cfg = load_config("smoke")
    assert dumps_report(run_config(cfg, 1)) == dumps_report(run_config(cfg, 2))


def test_report_round_trip_of_real_run():
    report = run_config(load_config("mutation_negative"))
    text = dumps_report(report)
    assert dumps_report(loads_report(text)) == text
    assert loads_report(text) == report


# -- serialization properties ---------------------------------------------------

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40).map(lambda q: str(q))
labels = st.text(alphabet="abcdefghijklmnopqrstuvwxyz_()-0123456789", min_size=1, max_size=12)


@st.composite
def axiom_reports(draw, depth=1):
    passed = draw(st.booleans())
    ce = None if passed else {
        "inputs": draw(st.dictionaries(labels, labels, max_size=3)),
        "label": draw(labels),
        "exponent": draw(st.one_of(st.none(), st.integers(-9, 9))),
        "expected": draw(rationals),
        "actual": draw(rationals),
    }
    subs = draw(st.lists(axiom_reports(depth=depth - 1), max_size=2)) if depth > 0 else []
    return AxiomReport(
        name=draw(labels), status="pass" if passed else "fail",
        window={"max_weight": draw(st.integers(0, 6)), "modes": [-3, 3]},
        checked=draw(st.integers(0, 10 ** 7)), skipped=draw(st.integers(0, 10 ** 7)),
        failures=0 if passed else draw(st.integers(1, 9)),
        counterexample=ce, notes=draw(st.lists(labels, max_size=2)), subchecks=subs)


@settings(max_examples=100, deadline=None)
@given(st.lists(axiom_reports(), max_size=4), labels)
def test_report_parse_emit_round_trip(checks, name):
    r = Report(name, "pass" if all(c.passed for c in checks) else "fail",
               {"instance": {"name": "heisenberg", "kappa": "1"}, "truncation_count": 0, "windows_verified": []},
               checks)
    text = dumps_report(r)
    assert loads_report(text) == r
    assert dumps_report(loads_report(text)) == text


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=-10, max_value=10, max_denominator=30))
def test_rationals_serialize_as_p_over_q(q):
    from vertexlab.cli import _q
    s = _q(q)
    assert Fraction(s) == q
    assert "." not in s


def test_run_config_accepts_dict():
    cfg = RunConfig.from_dict({"name": "tiny", "instance": {"name": "lattice_rank1", "cutoff": 4},
                               "checks": [{"check": "va_axioms", "axioms": ["creation"],
                                           "window": {"max_weight": 2, "modes": [-2, 2]}}]})
    report = run_config(cfg)
    assert report.passed
    assert report.environment["instance"]["k"] == 1
