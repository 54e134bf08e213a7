import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from omegaorth.omega import (DegreeError, LeadingData, OmegaFunction, expand_in_w_basis,
                             leading_step, mul_linear, reconstruct_from_w_basis, w_basis_elements)
from omegaorth.recurrence import example2_coeffs

X = np.linspace(-1.0, 1.0, 50)
S = np.sqrt(1.0 - X**2)


def random_omega(rng, m):
    return OmegaFunction(m, rng.uniform(-1, 1, m + 1), rng.uniform(-1, 1, m))


def test_parity_entries_forced_to_zero():
    f = OmegaFunction(3, [1, 2, 3, 4], [5, 6, 7])
    assert f.b0.tolist() == [0, 2, 0, 4]
    assert f.b1.tolist() == [5, 0, 7]


def test_eval_examples(example1_table):
    assert OmegaFunction.constant(1.0)(0.37) == 1.0
    w1 = example1_table.function(1)
    assert w1(0.0) == pytest.approx(0.4244132, abs=5e-8)
    f = OmegaFunction(2, [0.3, 0, 2.0], [0, 5.0])
    assert f(1.0) == pytest.approx(2.3)
    with pytest.raises(ValueError):
        f(1.5)


def test_eval_theta_agrees_with_eval(rng):
    f = random_omega(rng, 7)
    theta = np.linspace(0, 2 * np.pi, 33)
    assert np.allclose(f.eval_theta(theta), f(np.cos(theta / 2)), atol=1e-13)


def test_mul_linear_examples():
    one = OmegaFunction.constant()
    x = mul_linear(one, 1.0, 0.0)
    assert np.allclose(x(X), X)
    b = -0.4244132
    w1 = mul_linear(one, 1.0, b)
    assert w1.b0.tolist() == [0.0, 1.0] and w1.b1.tolist() == [-b]
    w2 = mul_linear(w1, 1.0, b)
    # (x - b s)^2 = (1 - b^2) x^2 + b^2 - 2 b x s
    assert np.allclose(w2.b0, [b * b, 0.0, 1.0 - b * b])
    assert np.allclose(w2.b1, [0.0, -2.0 * b])
    assert np.allclose(w2(X), (X - b * S) ** 2, atol=1e-14)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 8),
       st.integers(0, 2**32 - 1))
def test_mul_linear_bilinear(g1, b1, g2, b2, m, seed):
    f = random_omega(np.random.default_rng(seed), m)
    lhs = mul_linear(f, g1 + g2, b1 + b2)(X)
    rhs = mul_linear(f, g1, b1)(X) + mul_linear(f, g2, b2)(X)
    assert np.allclose(lhs, rhs, atol=1e-12 * (1 + np.max(np.abs(lhs))))
    assert np.allclose(mul_linear(f, g1, b1)(X), (g1 * X - b1 * S) * f(X), atol=1e-12)


def test_leading_step_examples():
    start = LeadingData(1.0, 0.0, 1.0)
    done, nxt = leading_step(start, 1.0, 0.0)
    assert (nxt.a0, nxt.a1, nxt.lambda_m, done.lambda_m1) == (1.0, 0.0, 1.0, 1.0)
    _, nxt = leading_step(start, 1.0, -0.4244132)
    assert nxt.a0 == 1.0 and nxt.a1 == pytest.approx(0.4244132)
    assert nxt.lambda_m == pytest.approx(1.18012656, rel=1e-8)
    cur = start
    for _ in range(10):
        _, cur = leading_step(cur, 1.0, 0.0)
    assert cur.lambda_m == 1.0


def test_leading_step_product_formula():
    lam, eta = 0.75, 0.5
    cur = LeadingData(1.0, 0.0, 1.0)
    prod = 1.0
    f = OmegaFunction.constant()
    prev = None
    for m in range(1, 10):
        beta, alpha = example2_coeffs(lam, eta, m)
        _, cur = leading_step(cur, 1.0, beta)
        prod *= 1 + beta * beta
        assert cur.lambda_m == pytest.approx(prod, rel=1e-14)
        nxt = mul_linear(f, 1.0, beta)
        if prev is not None:
            nxt = nxt - alpha_prev * prev.raise_degree(m)
        prev, f, alpha_prev = f, nxt, alpha
        assert (f.leading[0], f.leading[1]) == pytest.approx((cur.a0, cur.a1), rel=1e-13)


def test_times_sqrt_and_x(rng):
    f = random_omega(rng, 4)
    assert np.allclose(f.times_sqrt()(X), S * f(X), atol=1e-14)
    assert np.allclose(f.times_x()(X), X * f(X), atol=1e-14)
    assert f.times_sqrt().m == 5


def test_exact_degree_and_drop():
    f = OmegaFunction(3, [0, 1, 0, 0], [1, 0, 0])
    assert not f.is_exact_degree()
    assert f.drop_leading() == OmegaFunction(1, [0, 1], [1])
    assert OmegaFunction(2, [0, 0, 3.0], [0, 4.0]).lead_factor == 25.0


def test_serialization_roundtrip(rng):
    f = random_omega(rng, 6)
    assert OmegaFunction.from_dict(f.to_dict()) == f
    assert len(f.to_dict()["b0"]) == 7 and len(f.to_dict()["b1"]) == 6


def test_expand_basis_elements(example1_table):
    basis = example1_table.functions
    n = 6
    elems = w_basis_elements(basis, n)
    for j, e in enumerate(elems):
        c = expand_in_w_basis(e.raise_degree(n), basis)
        assert np.allclose(c, np.eye(n + 1)[j], atol=1e-12)


@given(st.integers(0, 12), st.integers(0, 2**32 - 1))
def test_expand_reconstruct_roundtrip(n, seed):
    basis = _BASIS
    f = random_omega(np.random.default_rng(seed), n)
    g = reconstruct_from_w_basis(expand_in_w_basis(f, basis), basis)
    scale = np.max(np.abs(f(X)))
    assert np.max(np.abs(g(X) - f(X))) <= 1e-11 * max(scale, 1.0)


def test_expand_rejects_degenerate_basis():
    basis = [OmegaFunction.constant(), OmegaFunction(1)]
    with pytest.raises(DegreeError):
        expand_in_w_basis(OmegaFunction(1, [0, 1]), basis)


@given(st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_sign_changes_bounded_by_degree(m, seed):
    f = random_omega(np.random.default_rng(seed), m)
    x = np.linspace(-1, 1, 10002)[1:-1]
    v = f(x)
    v = v[v != 0]
    assert np.count_nonzero(np.diff(np.sign(v))) <= m


def _make_basis():
    from omegaorth.measure import Measure
    from omegaorth.recurrence import generate
    return generate(Measure.builtin("one_minus_x"), 12).functions


_BASIS = _make_basis()
