import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from omegaorth.measure import Measure
from omegaorth.opuc import (NotChainSequenceError, VerblunskySeq, chain_from_table, chain_parameters,
                            first_maximal_parameter, khat_from_recurrence, khat_moment_residuals,
                            khat_via_bridge, szego_polynomials, szego_verify, verblunsky)
from omegaorth.recurrence import generate
from omegaorth.selfinv import SelfInversivePoly


@pytest.fixture(scope="module")
def lebesgue_table():
    return generate(Measure.builtin("lebesgue"), 8)


def geg_table(lam, eta, N=12):
    return generate(Measure.builtin("gegenbauer_eta", **{"lambda": lam, "eta": eta}), N)


# -- K polynomials --------------------------------------------------------------------


def test_khat_start(lebesgue_table, example1_table):
    ks = khat_from_recurrence(lebesgue_table, 1)
    assert ks[0].k.tolist() == [1.0]
    assert np.allclose(ks[1].k, [1.0, 1.0])
    b = example1_table.beta_hat[1]
    k1 = khat_from_recurrence(example1_table, 1)[1]
    assert np.allclose(k1.k, [1 - 1j * b, 1 + 1j * b])


def test_khat_matches_bridge(example1_table):
    ks = khat_from_recurrence(example1_table, 10)
    assert np.allclose(ks[2].k, khat_via_bridge(example1_table, 2).k, atol=1e-11)
    for m, k in enumerate(ks):
        ref = khat_via_bridge(example1_table, m).k
        assert np.max(np.abs(k.k - ref)) <= 1e-10 * np.max(np.abs(ref))
        assert k.symmetry_defect() < 1e-13


def test_moment_residuals(example1_table, one_minus_x, lebesgue_table):
    leb = lebesgue_table.measure
    assert khat_moment_residuals(khat_from_recurrence(lebesgue_table, 1)[1], leb)[0] < 1e-15
    ks = khat_from_recurrence(example1_table, 6)
    for m in range(1, 7):
        r = khat_moment_residuals(ks[m], one_minus_x)
        assert r.size == m and np.max(r) <= 1e-9
    bumped = SelfInversivePoly(3, ks[3].k + np.array([1e-3, 0, 0, 0]))
    assert np.max(khat_moment_residuals(bumped, one_minus_x)) > 1e-5


def test_non_integrable_measure_refused():
    cheb = Measure.builtin("chebyshev1")
    with pytest.raises(ValueError):
        khat_moment_residuals(SelfInversivePoly(1, [1, 1]), cheb)
    with pytest.raises(ValueError):
        first_maximal_parameter(cheb, 0.0)


# -- chain sequences -------------------------------------------------------------------


def test_constant_quarter_chain():
    n = np.arange(11)
    ch = chain_parameters(np.full(10, 0.25))
    assert np.allclose(ch.minimal, n / (2 * n + 2), atol=1e-15)
    assert np.allclose(ch.maximal, 0.5, atol=1e-15)
    assert ch.identity_defect() < 1e-15


def test_large_head_is_not_a_chain():
    with pytest.raises(NotChainSequenceError) as info:
        chain_parameters(np.concatenate([[0.9], np.full(10, 0.25)]))
    assert info.value.index == 2


def test_constant_tail_above_quarter_rejected():
    with pytest.raises(NotChainSequenceError):
        chain_parameters(np.full(5, 0.26))


def test_example1_non_coincidence(example1_table):
    ch = chain_from_table(example1_table)
    assert ch.tail == "anchored"
    assert ch.identity_defect() <= 1e-10
    assert ch.gap > 1e-6
    assert ch.M(1) == pytest.approx(0.59006327, abs=1e-8)
    assert np.all(ch.minimal[1:] < 1) and np.all(ch.minimal[1:] > 0)
    assert np.all((ch.maximal > 0) & (ch.maximal < 1))
    assert np.all(ch.minimal <= ch.maximal)


@pytest.mark.parametrize("lam, eta", [(1.0, 0.0), (0.75, 0.5), (2.0, 1.0), (0.6, -0.3)])
def test_maximal_closed_form(lam, eta):
    ch = chain_from_table(geg_table(lam, eta))
    m = np.arange(1, ch.maximal.size + 1)
    assert np.allclose(ch.maximal, (m + 2 * lam - 2) / (2 * (m + lam - 1)), atol=1e-10)


def test_truncation_monotone_and_close():
    t = geg_table(2.0, 0.0)
    ch = chain_parameters(t.alpha_hat[2:], tail="truncate")
    est = [h[1] for h in ch.history]
    assert np.all(np.diff(est) <= 1e-12)
    assert ch.trunc_depth >= t.N + 20
    assert ch.identity_defect() < 1e-10


@given(st.lists(st.floats(0.05, 0.95), min_size=4, max_size=12))
def test_minimal_recovers_generating_parameters(gs):
    g = np.concatenate([[0.0], gs])
    c = (1 - g[:-1]) * g[1:]
    ch = chain_parameters(c, tail="anchored", anchor=0.0)
    assert np.allclose(ch.minimal, g, atol=1e-9)


# -- Verblunsky coefficients ----------------------------------------------------------


def test_symmetric_half_parameters_give_zero(lebesgue_table):
    ch = chain_from_table(lebesgue_table)
    vs = verblunsky(ch, lebesgue_table.beta_hat, 0.0)
    assert np.allclose(vs.frak_m[1:], 0.5)
    assert np.max(np.abs(vs.a)) < 1e-14


def test_tau_first_step(example1_table):
    ch = chain_from_table(example1_table)
    vs = verblunsky(ch, example1_table.beta_hat, 0.3)
    b = example1_table.beta_hat[1]
    assert vs.tau[1] == pytest.approx((1 - 1j * b) / (1 + 1j * b))
    assert np.allclose(np.abs(vs.tau), 1.0, atol=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.9, 0.999])
def test_coefficients_inside_disk(example1_table, t):
    ch = chain_from_table(example1_table)
    vs = verblunsky(ch, example1_table.beta_hat, t)
    assert np.all(np.abs(vs.a) < 1)
    assert vs.frak_m[1] == pytest.approx((1 - t) * ch.M(1))
    b = example1_table.beta_hat[1: vs.a.size + 1]
    mod = np.abs(1 - 2 * vs.frak_m[1:] - 1j * b) / np.abs(1 - 1j * b)
    assert np.allclose(mod, np.abs(vs.a), atol=1e-14)


def test_jump_changes_first_coefficient(example1_table):
    ch = chain_from_table(example1_table)
    a0 = [verblunsky(ch, example1_table.beta_hat, t).a[0] for t in (0.0, 0.3, 0.9)]
    assert abs(a0[0] - a0[1]) > 1e-3 and abs(a0[1] - a0[2]) > 1e-3


def test_t_range(example1_table):
    ch = chain_from_table(example1_table)
    for t in (-0.1, 1.0):
        with pytest.raises(ValueError):
            verblunsky(ch, example1_table.beta_hat, t)


def test_szego_zero_coefficients():
    polys = szego_polynomials(np.zeros(4), 4)
    for m, p in enumerate(polys):
        assert np.array_equal(p, np.eye(m + 1)[m])


@pytest.mark.parametrize("t", [0.0, 0.3, 0.9])
def test_szego_orthogonality_and_kernel(example1_table, one_minus_x, t):
    ch = chain_from_table(example1_table)
    vs = verblunsky(ch, example1_table.beta_hat, t)
    res = szego_verify(vs, one_minus_x, 5, example1_table)
    assert res["orthogonality"] <= 1e-8
    assert res["constant_term"] == 0.0
    assert res["cd_ratio"] <= 1e-7


def test_json_roundtrip(example1_table):
    ch = chain_from_table(example1_table)
    vs = verblunsky(ch, example1_table.beta_hat, 0.3)
    d = vs.to_dict()
    assert set(d) == {"t", "a"} and set(d["a"][0]) == {"re", "im"}
    back = VerblunskySeq.from_dict(d)
    assert back.t == 0.3 and np.array_equal(back.a, vs.a)
