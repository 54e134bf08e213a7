"""Quadrature rules at the zeros of the normalized orthogonal functions.

For even order ``m`` the rule ``sum lambda_hat_k e(x_k)`` integrates
``e dpsi`` exactly for ``e`` in Omega_{2m-1}; for odd order ``m`` the rule
``sum lambda_tilde_k e(x_k)`` integrates ``e sqrt(1 - x^2) dpsi`` exactly for
``e`` in Omega_{2m-2}.  Here ``lambda_k = int L_k^2 sqrt(1 - x^2) dpsi`` and

    even m:  lambda_hat_k = lambda_k / sqrt(1 - x_k^2),
    odd m:   lambda_tilde_k = lambda_k.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .interp import LagrangeBasis
from .omega import OmegaFunction
from .recurrence import RecurrenceTable
from .zeros import ZeroSet, find_zeros

CROSS_CHECK_TOL = 1e-9


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    m: int
    nodes: ZeroSet
    lam: np.ndarray
    lambda_hat: np.ndarray
    lambda_tilde: np.ndarray
    lambda_hat_direct: np.ndarray
    lambda_tilde_direct: np.ndarray

    @property
    def parity(self):
        return "even" if self.m % 2 == 0 else "odd"

    @property
    def x(self):
        return self.nodes.x

    def identity_defect(self):
        """Relative mismatch between identity-based and directly integrated weights."""
        if self.parity == "even":
            a, b = self.lambda_hat, self.lambda_hat_direct
        else:
            a, b = self.lambda_tilde, self.lambda_tilde_direct
        return float(np.max(np.abs(a - b) / np.abs(a)))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "x", "lambda", "lambda_hat", "lambda_tilde"])
        for k in range(self.m):
            w.writerow([k + 1] + [f"{v:.15g}" for v in
                                  (self.x[k], self.lam[k], self.lambda_hat[k], self.lambda_tilde[k])])
        return buf.getvalue()

    def to_dict(self):
        return {
            "m": self.m,
            "x": self.x.tolist(),
            "lambda": self.lam.tolist(),
            "lambda_hat": self.lambda_hat.tolist(),
            "lambda_tilde": self.lambda_tilde.tolist(),
            "lambda_hat_direct": self.lambda_hat_direct.tolist(),
            "lambda_tilde_direct": self.lambda_tilde_direct.tolist(),
            "nodes": self.nodes.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        arr = lambda key: np.array(d[key], dtype=float)
        return cls(int(d["m"]), ZeroSet.from_dict(d["nodes"]), arr("lambda"), arr("lambda_hat"),
                   arr("lambda_tilde"), arr("lambda_hat_direct"), arr("lambda_tilde_direct"))


def build_rule(table: RecurrenceTable, m: int, check=True) -> QuadratureRule:
    """Nodes and weights of the order-``m`` rule for the table's measure."""
    if m < 1:
        raise ValueError("order must be at least 1")
    if m > table.N:
        raise ValueError(f"table depth {table.N} is below the requested order {m}")
    psi = table.measure
    if psi is None:
        raise ValueError("the table carries no measure")
    nodes = find_zeros(table, m)
    basis = LagrangeBasis(nodes)

    lam, _ = psi.quad_theta(lambda th: basis.values_theta(th) ** 2, mode="halfcircle")
    direct_hat, _ = psi.quad_theta(basis.values_theta, mode="psi")
    direct_tilde, _ = psi.quad_theta(basis.values_theta, mode="halfcircle")
    lam = np.atleast_1d(lam)
    direct_hat = np.atleast_1d(direct_hat)
    direct_tilde = np.atleast_1d(direct_tilde)
    if np.any(lam <= 0):
        raise QuadratureError("a weight lambda_k is not positive")

    s = np.sin(0.5 * nodes.theta)
    if m % 2 == 0:
        lam_hat, lam_tilde = lam / s, direct_tilde
    else:
        lam_hat, lam_tilde = direct_hat, lam.copy()
    rule = QuadratureRule(m, nodes, lam, lam_hat, lam_tilde, direct_hat, direct_tilde)
    if check and rule.identity_defect() > CROSS_CHECK_TOL:
        raise QuadratureError(
            f"weight identity check failed: relative defect {rule.identity_defect():.3g}")
    return rule


def _values_at_nodes(rule, e):
    if isinstance(e, OmegaFunction):
        return e.eval_theta(rule.nodes.theta)
    return np.asarray(e(rule.nodes.theta), dtype=float)


def apply_even(rule: QuadratureRule, e) -> float:
    """``sum lambda_hat_k e(x_k)``, exact for ``int e dpsi`` on the even class.

    ``e`` is an :class:`OmegaFunction` or a callable of ``theta``.
    """
    if rule.parity != "even":
        raise ValueError("apply_even needs an even-order rule")
    return float(rule.lambda_hat @ _values_at_nodes(rule, e))


def apply_odd(rule: QuadratureRule, e) -> float:
    """``sum lambda_tilde_k e(x_k)``, exact for ``int e sqrt(1-x^2) dpsi`` on the odd class."""
    if rule.parity != "odd":
        raise ValueError("apply_odd needs an odd-order rule")
    return float(rule.lambda_tilde @ _values_at_nodes(rule, e))


class MixedCombination:
    """``sum c_j s^(j mod 2) W_{n-j}`` evaluated through the table's recurrence.

    This is the general element of Omega_n written in the mixed basis
    ``W_n, s W_{n-1}, W_{n-2}, ...``.
    """

    def __init__(self, table: RecurrenceTable, coeffs):
        self.table = table
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.n = self.coeffs.size - 1
        if self.n > table.N:
            raise ValueError("table is too shallow for this combination")

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        w = self.table.values_theta(theta, self.n)
        s = np.sin(0.5 * theta)
        out = np.zeros_like(theta)
        for j, c in enumerate(self.coeffs):
            term = c * w[self.n - j]
            out = out + (term * s if j % 2 else term)
        return out

    def to_omega(self):
        fs = self.table.functions
        out = OmegaFunction.zero(self.n)
        for j, c in enumerate(self.coeffs):
            f = fs[self.n - j]
            out = out + c * (f.times_sqrt() if j % 2 else f)
        return out


def random_class_element(table: RecurrenceTable, degree: int, rng) -> MixedCombination:
    """Element of Omega_degree with mixed-basis coefficients uniform on [-1, 1]."""
    return MixedCombination(table, rng.uniform(-1.0, 1.0, degree + 1))


def exactness_degree(m: int) -> int:
    """Largest ``d`` with Omega_d integrated exactly by the order-``m`` rule."""
    return 2 * m - 1 if m % 2 == 0 else 2 * m - 2
