import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import loggamma

from conftest import EXAMPLE1_ALPHA, EXAMPLE1_BETA
from omegaorth.measure import Measure, integrate
from omegaorth.recurrence import (MAX_ORDER, GenerationError, RecurrenceTable, complex_lgamma,
                                  eval_recurrence, example2_coeffs, example2_rho, example2_w_via_2f1,
                                  generate)


def geg(lam, eta):
    return Measure.builtin("gegenbauer_eta", **{"lambda": lam, "eta": eta})


def test_example1_table(example1_table):
    t = example1_table
    assert np.max(np.abs(t.beta_hat[1:7] - EXAMPLE1_BETA)) <= 5e-7
    assert np.max(np.abs(t.alpha_hat[2:7] - EXAMPLE1_ALPHA)) <= 5e-7


def test_symmetric_measure_has_zero_beta():
    t = generate(Measure.builtin("lebesgue"), 8)
    assert np.max(np.abs(t.beta_hat[1:])) < 1e-14


def test_chebyshev_u_alpha():
    t = generate(geg(1.0, 0.0), 8)
    assert np.allclose(t.alpha_hat[2:], 0.25, atol=1e-13)


def test_table_invariants(example1_table):
    t = example1_table
    assert np.all(t.alpha_hat[2:] > 0) and np.all(t.rho_hat > 0)
    ratio = (1 + t.beta_hat[2:] ** 2) / (1 + t.beta_hat[1:-1] ** 2) * t.rho_hat[1:-1] / t.rho_hat[:-2]
    assert np.allclose(ratio, t.alpha_hat[2:], rtol=1e-14)
    assert np.allclose(t.alpha_hat_direct[2:], t.alpha_hat[2:], rtol=1e-9)
    assert t.rho_hat[0] == pytest.approx(math.pi / 2, rel=1e-13)


def test_functions_match_recurrence_values(example1_table):
    theta = np.linspace(0, 2 * np.pi, 41)
    vals = example1_table.values_theta(theta, 8)
    for m in range(9):
        assert np.allclose(example1_table.function(m).eval_theta(theta), vals[m], atol=1e-12)
    x = np.cos(theta / 2)
    assert np.allclose(example1_table.evaluate(5, x), vals[5], atol=1e-13)


def test_lead_factor_product(example1_table):
    t = example1_table
    prod = np.cumprod(np.concatenate([[1.0], 1 + t.beta_hat[1:] ** 2]))
    lf = [lead.lambda_m for lead in t.leading]
    assert np.allclose(lf, prod, rtol=1e-13)


def test_eval_recurrence_first_orders():
    theta = np.array([0.3, 2.0, 5.0])
    w = eval_recurrence(np.array([np.nan, 0.2, 0.1]), np.array([np.nan, np.nan, 0.3]), 2, theta)
    x, s = np.cos(theta / 2), np.sin(theta / 2)
    assert np.allclose(w[1], x - 0.2 * s)
    assert np.allclose(w[2], (x - 0.1 * s) * (x - 0.2 * s) - 0.3)


def test_order_cap(one_minus_x):
    with pytest.raises(ValueError):
        generate(one_minus_x, MAX_ORDER + 1)
    with pytest.raises(ValueError):
        generate(one_minus_x, 0)


def test_generation_error_reports_order():
    err = GenerationError("lost positivity", 7)
    assert err.order == 7 and isinstance(err, ArithmeticError)


def test_csv_format(example1_table):
    t = generate(Measure.builtin("one_minus_x"), 3)
    lines = t.to_csv().splitlines()
    assert lines[0] == "m,beta_hat,alpha_hat,rho_hat"
    assert lines[1].startswith("0,,,1.5707963267949")
    assert lines[2].split(",")[2] == ""
    assert lines[3].split(",")[2] == "0.2229580705225"


def test_json_roundtrip(example1_table):
    t = RecurrenceTable.from_dict(example1_table.to_dict())
    assert t.N == example1_table.N
    for name in ("beta_hat", "alpha_hat", "rho_hat", "alpha_hat_direct"):
        assert np.array_equal(getattr(t, name), getattr(example1_table, name), equal_nan=True)
    assert t.measure == example1_table.measure


def test_rescale(example1_table):
    gamma = np.linspace(1.0, 2.0, example1_table.N + 1)
    r = example1_table.rescale(gamma)
    assert np.allclose(r["beta"][1:], gamma[1:] * example1_table.beta_hat[1:])
    prods = np.cumprod(gamma)
    assert np.allclose(r["rho"], prods**2 * example1_table.rho_hat)


# -- closed forms ------------------------------------------------------------------


def test_example2_coeffs_examples():
    assert example2_coeffs(1.0, 0.0, 3) == (0.0, 0.25)
    b, a = example2_coeffs(0.5, 0.0, 2)
    assert b == 0.0 and a == pytest.approx(4 / 15, rel=1e-15)
    b, a = example2_coeffs(0.75, 0.5, 1)
    assert b == pytest.approx(2 / 3) and a == pytest.approx(0.2857142857142857)
    with pytest.raises(ValueError):
        example2_coeffs(0.4, 0.0, 1)


def test_w_via_2f1_examples():
    theta = np.linspace(0, 2 * np.pi, 9)
    assert all(example2_w_via_2f1(0.9, 0.3, 0, th) == 1.0 for th in theta)
    assert example2_w_via_2f1(1.0, 0.0, 2, np.pi) == pytest.approx(-0.25, abs=1e-15)
    t = generate(geg(0.75, 0.5), 3)
    closed = [example2_w_via_2f1(0.75, 0.5, 3, th) for th in theta]
    assert np.allclose(closed, t.values_theta(theta, 3)[3], atol=1e-8)


def test_rho_examples():
    assert example2_rho(1.0, 0.0, 0) == pytest.approx(math.pi / 2, rel=1e-13)
    assert example2_rho(1.0, 0.0, 1) == pytest.approx(math.pi / 8, rel=1e-13)
    psi = geg(0.75, 0.5)
    t = generate(psi, 2)
    w2 = t.function(2)
    direct = integrate(psi, lambda x: w2(x) ** 2, True)
    assert example2_rho(0.75, 0.5, 2) == pytest.approx(direct, rel=1e-7)


@pytest.mark.parametrize("z", [0.3 + 0.2j, 1.5 - 4j, 10 + 0.5j, -2.3 + 0.7j, 0.01 + 0.01j, 25 + 30j])
def test_complex_lgamma_against_scipy(z):
    # branches may differ by multiples of 2 pi i; compare modulus and phase
    ours, ref = complex_lgamma(z), loggamma(z)
    assert abs(ours.real - ref.real) < 1e-12 * max(1.0, abs(ref.real))
    assert abs(np.exp(1j * (ours.imag - ref.imag)) - 1) < 1e-12 * max(1.0, abs(ref.imag))


@settings(max_examples=12)
@given(st.floats(0.55, 3.0), st.floats(-1.5, 1.5))
def test_closed_forms_property(lam, eta):
    t = generate(geg(lam, eta), 8)
    for m in range(1, 8):
        b, a = example2_coeffs(lam, eta, m)
        assert t.beta_hat[m] == pytest.approx(b, rel=1e-9, abs=1e-12)
        assert t.alpha_hat[m + 1] == pytest.approx(a, rel=1e-9)
    for m in range(9):
        assert t.rho_hat[m] == pytest.approx(example2_rho(lam, eta, m), rel=1e-9)
