import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from omegaorth.interp import LagrangeBasis, eval_basis, interpolate
from omegaorth.omega import OmegaFunction
from omegaorth.zeros import find_zeros

X = np.linspace(-1, 1, 100)


def random_omega(rng, m):
    return OmegaFunction(m, rng.uniform(-1, 1, m + 1), rng.uniform(-1, 1, m))


def distinct_nodes(rng, n):
    # jittered equispaced angles: well conditioned for polynomials on the circle
    theta = 2 * np.pi * (np.arange(n) + 0.5 + rng.uniform(-0.3, 0.3, n)) / n
    return np.sort(np.cos(theta / 2))


@given(st.integers(0, 10), st.integers(0, 2**32 - 1))
def test_reproduces_omega_elements(m, seed):
    rng = np.random.default_rng(seed)
    g = random_omega(rng, m)
    nodes = distinct_nodes(rng, m + 1)
    f = interpolate(zip(nodes, g(nodes)))
    assert f.m == m
    assert np.max(np.abs(f(X) - g(X))) <= 1e-11 * max(1.0, np.max(np.abs(g(X))))


def test_single_point_is_constant():
    f = interpolate([(0.3, 2.5)])
    assert f.m == 0 and np.allclose(f(X), 2.5)


def test_cardinal_property(rng):
    nodes = distinct_nodes(rng, 6)
    basis = LagrangeBasis(nodes)
    vals = basis.values(nodes)
    assert np.allclose(vals, np.eye(6), atol=1e-12)
    for k in range(6):
        f = interpolate(zip(nodes, np.eye(6)[k]))
        assert np.allclose(f(nodes), np.eye(6)[k], atol=1e-12)
        assert eval_basis(basis, k + 1, nodes[k]) == pytest.approx(1.0, abs=1e-12)


def test_single_node_basis_is_one():
    basis = LagrangeBasis([0.2])
    assert np.allclose(basis.values(X)[0], 1.0)


def test_partition_of_unity(rng):
    basis = LagrangeBasis(distinct_nodes(rng, 7))
    assert np.allclose(basis.values(X).sum(axis=0), 1.0, atol=1e-11)


def test_linear_in_data(rng):
    nodes = distinct_nodes(rng, 5)
    y1, y2 = rng.normal(size=5), rng.normal(size=5)
    f = interpolate(zip(nodes, 2 * y1 - 3 * y2))
    g = interpolate(zip(nodes, y1))
    h = interpolate(zip(nodes, y2))
    assert np.allclose(f(X), 2 * g(X) - 3 * h(X), atol=1e-11)


def test_reproduction_at_orthogonal_zeros(example1_table, rng):
    for m in range(1, 10):
        basis = LagrangeBasis(find_zeros(example1_table, m))
        g = random_omega(rng, m - 1)
        approx = g(basis.x) @ basis.values(X)
        assert np.max(np.abs(approx - g(X))) <= 1e-10 * max(1.0, np.max(np.abs(g(X))))


def test_imaginary_residual_small(example1_table):
    basis = LagrangeBasis(find_zeros(example1_table, 8))
    assert basis.imag_residual(np.linspace(0, 2 * np.pi, 77)) <= 1e-11


def test_functions_agree_with_product_form(rng):
    basis = LagrangeBasis(distinct_nodes(rng, 5))
    theta = np.linspace(0, 2 * np.pi, 31)
    vals = basis.values_theta(theta)
    for k, f in enumerate(basis.functions):
        assert np.allclose(f.eval_theta(theta), vals[k], atol=1e-11)


@pytest.mark.parametrize("nodes", [[0.1, 0.1], [1.0, 0.2], [-1.0], []])
def test_invalid_nodes(nodes):
    with pytest.raises(ValueError):
        LagrangeBasis(nodes)


def test_eval_basis_errors():
    basis = LagrangeBasis([0.1, 0.5])
    with pytest.raises(IndexError):
        eval_basis(basis, 3, 0.0)
    with pytest.raises(ValueError):
        eval_basis(basis, 1, 1.2)
