import json

import pytest

from omegaorth.measure import Measure
from omegaorth.verify import SUITES, Check, Report, run_suite

MEASURES = {
    "one_minus_x": Measure.builtin("one_minus_x"),
    "lebesgue": Measure.builtin("lebesgue"),
    "gegenbauer": Measure.builtin("gegenbauer_eta", **{"lambda": 0.75, "eta": 0.5}),
    "chebyshev1": Measure.builtin("chebyshev1"),
}


@pytest.mark.parametrize("suite", ["orthogonality", "zeros", "quadrature"])
@pytest.mark.parametrize("name", MEASURES)
def test_suites_pass_on_all_builtins(suite, name):
    rep = run_suite(suite, MEASURES[name])
    assert rep.passed, rep.to_text()


@pytest.mark.parametrize("suite", ["chain", "opuc"])
@pytest.mark.parametrize("name", ["one_minus_x", "lebesgue", "gegenbauer"])
def test_circle_suites_pass(suite, name):
    rep = run_suite(suite, MEASURES[name])
    assert rep.passed, rep.to_text()


@pytest.mark.parametrize("suite", ["chain", "opuc"])
def test_circle_suites_refuse_non_integrable(suite):
    with pytest.raises(ValueError):
        run_suite(suite, MEASURES["chebyshev1"])


def test_bridge_suite():
    rep = run_suite("bridge")
    assert rep.passed, rep.to_text()


def test_orthogonality_tight_tolerance_on_example1():
    rep = run_suite("orthogonality", MEASURES["one_minus_x"], N=8, tol=1e-10)
    assert rep.passed, rep.to_text()


def test_chain_reports_constant_quarter():
    rep = run_suite("chain", Measure.builtin("gegenbauer_eta", **{"lambda": 1.0, "eta": 0.0}))
    assert rep.passed
    assert any("constant 1/4" in n for n in rep.notes)
    assert any("M_1 = 0.5" in n for n in rep.notes)


def test_designed_failure_at_tiny_tolerance():
    rep = run_suite("quadrature", MEASURES["one_minus_x"], tol=1e-15)
    assert not rep.passed
    failed = [c for c in rep.checks if not c.passed]
    assert failed and all(c.value > 1e-15 for c in failed)


def test_report_serialization():
    rep = run_suite("zeros", MEASURES["lebesgue"], N=4, seed=7)
    d = json.loads(rep.to_json())
    assert d["suite"] == "zeros" and d["params"]["seed"] == 7 and d["passed"]
    assert len(d["checks"]) == len(rep.checks)
    assert "suite zeros: PASS" in rep.to_text()


def test_check_semantics():
    assert Check("a", 1e-9, 1e-8).passed
    assert not Check("a", float("nan"), 1.0).passed
    assert Check("b", 0.2, 0.0, "gt").passed
    assert not Check("b", 0.0, 0.0, "gt").passed
    r = Report("x", {})
    r.add("c", 2.0, 1.0)
    assert not r.passed


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", MEASURES["lebesgue"])
    assert set(SUITES) == {"orthogonality", "quadrature", "chain", "opuc", "bridge", "zeros"}
