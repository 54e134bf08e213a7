"""Interpolation in Omega_{n-1} at n nodes of (-1, 1).

With ``z = exp(i theta)`` and ``x = cos(theta/2)`` the cardinal functions are

    L_k(x) = z^{-(n-1)/2} z_k^{(n-1)/2} prod_{l != k} (z - z_l) / (z_k - z_l).

Half-integer powers are always formed as ``exp(i (n-1) theta / 2)`` from the
angle itself, which fixes the branch so that ``sin(theta/2) >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .omega import OmegaFunction
from .selfinv import SelfInversivePoly, selfinv_to_omega
from .zeros import ZeroSet


def _as_nodes(nodes):
    if isinstance(nodes, ZeroSet):
        return nodes.x
    x = np.asarray(nodes, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("at least one node is required")
    if np.any(np.abs(x) >= 1.0):
        raise ValueError("nodes must lie strictly inside (-1, 1)")
    if np.unique(x).size != x.size:
        raise ValueError("nodes must be pairwise distinct")
    return x


@dataclass(frozen=True, eq=False)
class LagrangeBasis:
    """Cardinal functions at ``nodes`` (a :class:`ZeroSet` or an array)."""

    nodes: object

    def __post_init__(self):
        x = np.array(_as_nodes(self.nodes), dtype=float)
        theta = 2.0 * np.arccos(x)
        x.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "z", np.exp(1j * theta))
        object.__setattr__(self, "_functions", None)

    @property
    def m(self):
        return self.x.size

    def values_theta(self, theta):
        """Array ``L[k, ...]`` of all cardinal functions at the angles ``theta``."""
        theta = np.asarray(theta, dtype=float)
        z = np.exp(1j * theta)
        n = self.m
        out = np.empty((n,) + theta.shape, dtype=complex)
        for k in range(n):
            others = np.delete(np.arange(n), k)
            factors = [(z - self.z[l]) / (self.z[k] - self.z[l]) for l in others]
            if factors:
                stacked = np.stack(factors)
                # multiply small factors first
                order = np.argsort(np.abs(stacked), axis=0)
                stacked = np.take_along_axis(stacked, order, axis=0)
                prod = np.prod(stacked, axis=0)
            else:
                prod = np.ones_like(z)
            out[k] = np.exp(0.5j * (n - 1) * (self.theta[k] - theta)) * prod
        return out.real

    def values(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > 1.0):
            raise ValueError("x must lie in [-1, 1]")
        return self.values_theta(2.0 * np.arccos(x))

    def imag_residual(self, theta):
        """Largest imaginary part seen when evaluating at ``theta`` (should be ~0)."""
        theta = np.asarray(theta, dtype=float)
        z = np.exp(1j * theta)
        n = self.m
        worst = 0.0
        for k in range(n):
            prod = np.ones_like(z)
            for l in range(n):
                if l != k:
                    prod = prod * (z - self.z[l]) / (self.z[k] - self.z[l])
            val = np.exp(0.5j * (n - 1) * (self.theta[k] - theta)) * prod
            worst = max(worst, float(np.max(np.abs(val.imag))))
        return worst

    def selfinv_poly(self, k):
        """The scaled cardinal polynomial of degree ``n - 1`` (0-based ``k``)."""
        n = self.m
        coeffs = np.array([1.0 + 0j])
        for l in range(n):
            if l != k:
                coeffs = np.convolve(coeffs, [-self.z[l], 1.0]) / (self.z[k] - self.z[l])
        coeffs = coeffs * np.exp(0.5j * (n - 1) * self.theta[k])
        return SelfInversivePoly(n - 1, coeffs)

    @property
    def functions(self):
        """Cardinal functions as elements of Omega_{n-1}."""
        if self._functions is None:
            fs = tuple(selfinv_to_omega(self.selfinv_poly(k).symmetrized(), tol=np.inf)
                       for k in range(self.m))
            object.__setattr__(self, "_functions", fs)
        return self._functions


def eval_basis(basis: LagrangeBasis, k: int, x):
    """Evaluate the ``k``-th cardinal function (1-based) at ``x``."""
    if not 1 <= k <= basis.m:
        raise IndexError(f"k must be in 1..{basis.m}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("x must lie in [-1, 1]")
    return basis.values(x)[k - 1]


def interpolate(points) -> OmegaFunction:
    """The unique element of Omega_m through ``m + 1`` points ``(x_j, y_j)``."""
    pts = list(points)
    if not pts:
        raise ValueError("at least one point is required")
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    basis = LagrangeBasis(xs)
    out = OmegaFunction.zero(basis.m - 1)
    for y, f in zip(ys, basis.functions):
        out = out + y * f
    return out
