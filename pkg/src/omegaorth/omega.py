"""Functions ``F(x) = B0(x) + sqrt(1 - x^2) B1(x)`` of the space Omega_m.

For ``F`` in Omega_m, ``B0`` has degree <= m and the parity of ``m``, ``B1``
has degree <= m - 1 and the opposite parity.  Coefficients are stored in the
monomial basis in ascending order (``b0[k]`` multiplies ``x**k``); entries of
the wrong parity are held at exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegreeError(ValueError):
    """An operation needed a function of exact degree and did not get one."""


def _parity_mask(length, parity):
    return (np.arange(length) % 2) == (parity % 2)


class OmegaFunction:
    """Element of Omega_m with explicit degree bound ``m``."""

    __slots__ = ("m", "b0", "b1")

    def __init__(self, m, b0=None, b1=None):
        m = int(m)
        if m < 0:
            raise ValueError("degree bound must be nonnegative")
        c0 = np.zeros(m + 1)
        c1 = np.zeros(m)
        if b0 is not None:
            b0 = np.asarray(b0, dtype=float)
            if b0.size > m + 1:
                raise ValueError(f"b0 has {b0.size} entries, at most {m + 1} allowed")
            c0[: b0.size] = b0
        if b1 is not None:
            b1 = np.asarray(b1, dtype=float)
            if b1.size > m:
                raise ValueError(f"b1 has {b1.size} entries, at most {m} allowed")
            c1[: b1.size] = b1
        c0[~_parity_mask(m + 1, m)] = 0.0
        c1[~_parity_mask(m, m - 1)] = 0.0
        self.m = m
        self.b0 = c0
        self.b1 = c1

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, c=1.0):
        return cls(0, [c])

    @classmethod
    def zero(cls, m):
        return cls(m)

    @classmethod
    def from_dict(cls, d):
        return cls(d["m"], d["b0"], d["b1"])

    def to_dict(self):
        return {"m": self.m, "b0": self.b0.tolist(), "b1": self.b1.tolist()}

    # -- evaluation ------------------------------------------------------

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Evaluate at ``x`` in [-1, 1] (scalar or array)."""
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > 1.0):
            raise ValueError("x must lie in [-1, 1]")
        s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
        near = np.abs(x) > 0.99
        if np.any(near):
            s = np.where(near, np.sin(np.arccos(x)), s)
        out = np.polynomial.polynomial.polyval(x, self.b0)
        if self.m:
            out = out + s * np.polynomial.polynomial.polyval(x, self.b1)
        return out

    def eval_theta(self, theta):
        """Evaluate at ``x = cos(theta/2)`` using ``sqrt(1 - x^2) = sin(theta/2)``."""
        half = 0.5 * np.asarray(theta, dtype=float)
        x = np.cos(half)
        out = np.polynomial.polynomial.polyval(x, self.b0)
        if self.m:
            out = out + np.sin(half) * np.polynomial.polynomial.polyval(x, self.b1)
        return out

    # -- algebra ---------------------------------------------------------

    def raise_degree(self, m):
        """Embed into Omega_m; ``m - self.m`` must be a nonnegative even number."""
        if m < self.m or (m - self.m) % 2:
            raise ValueError(f"cannot embed Omega_{self.m} into Omega_{m}")
        return OmegaFunction(m, self.b0, self.b1)

    def _common(self, other):
        m = max(self.m, other.m)
        if (m - self.m) % 2 or (m - other.m) % 2:
            raise ValueError(f"Omega_{self.m} and Omega_{other.m} have different parity")
        return self.raise_degree(m), other.raise_degree(m)

    def __add__(self, other):
        a, b = self._common(other)
        return OmegaFunction(a.m, a.b0 + b.b0, a.b1 + b.b1)

    def __sub__(self, other):
        a, b = self._common(other)
        return OmegaFunction(a.m, a.b0 - b.b0, a.b1 - b.b1)

    def __neg__(self):
        return OmegaFunction(self.m, -self.b0, -self.b1)

    def __mul__(self, c):
        if isinstance(c, OmegaFunction):
            return NotImplemented
        return OmegaFunction(self.m, c * self.b0, c * self.b1)

    __rmul__ = __mul__

    def times_sqrt(self):
        """Multiply by ``sqrt(1 - x^2)``; the result lies in Omega_{m+1}."""
        # s (B0 + s B1) = (1 - x^2) B1 + s B0
        new_b0 = np.zeros(self.m + 2)
        new_b0[: self.m] += self.b1
        new_b0[2 : self.m + 2] -= self.b1
        return OmegaFunction(self.m + 1, new_b0, self.b0)

    def times_x(self):
        return mul_linear(self, 1.0, 0.0)

    # -- leading coefficients --------------------------------------------

    @property
    def leading(self):
        """First and second leading coefficients (of ``x^m`` and ``x^(m-1) s``)."""
        a1 = self.b1[self.m - 1] if self.m else 0.0
        return float(self.b0[self.m]), float(a1)

    @property
    def lead_factor(self):
        a0, a1 = self.leading
        return a0 * a0 + a1 * a1

    def is_exact_degree(self):
        return self.lead_factor > 0.0

    def drop_leading(self):
        """Return the same function viewed in Omega_{m-2}; leading terms must vanish."""
        if self.m < 2:
            raise ValueError("no lower space of the same parity")
        return OmegaFunction(self.m - 2, self.b0[: self.m - 1], self.b1[: self.m - 2])

    def __repr__(self):
        return f"OmegaFunction(m={self.m}, b0={self.b0.tolist()}, b1={self.b1.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, OmegaFunction):
            return NotImplemented
        return (self.m == other.m and np.array_equal(self.b0, other.b0)
                and np.array_equal(self.b1, other.b1))

    __hash__ = None


def mul_linear(f: OmegaFunction, gamma: float, beta: float) -> OmegaFunction:
    """Return ``[gamma x - beta sqrt(1 - x^2)] f``, an element of Omega_{m+1}."""
    m = f.m
    # (gamma x - beta s)(B0 + s B1)
    #   = gamma x B0 - beta (1 - x^2) B1 + s (gamma x B1 - beta B0)
    b0 = np.zeros(m + 2)
    b0[1:] += gamma * f.b0
    b0[:m] -= beta * f.b1
    b0[2 : m + 2] += beta * f.b1
    b1 = np.zeros(m + 1)
    b1[1:] += gamma * f.b1
    b1 -= beta * f.b0
    return OmegaFunction(m + 1, b0, b1)


@dataclass(frozen=True)
class LeadingData:
    """Leading pair ``(a0, a1)`` of an order-m function with its lead factor.

    ``lambda_m1`` is the cross product ``a0(m+1) a0(m) + a1(m+1) a1(m)`` with
    the next order; it stays ``None`` until that order is known.
    """

    a0: float
    a1: float
    lambda_m: float
    lambda_m1: float | None = None

    @classmethod
    def of(cls, f: OmegaFunction):
        a0, a1 = f.leading
        return cls(a0, a1, a0 * a0 + a1 * a1)


def leading_step(prev: LeadingData, gamma: float, beta: float):
    """Advance the leading pair one order by the rotation-scaling matrix.

    Returns ``(prev_completed, nxt)`` where ``prev_completed`` carries
    ``lambda_m1 = gamma * lambda_m`` and ``nxt`` has
    ``lambda_{m+1} = (gamma^2 + beta^2) lambda_m``.
    """
    a0 = gamma * prev.a0 + beta * prev.a1
    a1 = -beta * prev.a0 + gamma * prev.a1
    nxt = LeadingData(a0, a1, (gamma * gamma + beta * beta) * prev.lambda_m)
    done = LeadingData(prev.a0, prev.a1, prev.lambda_m, gamma * prev.lambda_m)
    return done, nxt


def w_basis_elements(basis, n):
    """The mixed basis ``W_n, s W_{n-1}, W_{n-2}, s W_{n-3}, ...`` of Omega_n."""
    out = []
    for j in range(n + 1):
        w = basis[n - j]
        out.append(w.times_sqrt() if j % 2 else w)
    return out


def expand_in_w_basis(f: OmegaFunction, basis) -> np.ndarray:
    """Coefficients of ``f`` in the mixed basis of :func:`w_basis_elements`.

    ``basis[k]`` must be an element of Omega_k of exact degree, with
    consecutive leading pairs that are not orthogonal.  Elimination peels
    off two leading coefficients per step.
    """
    n = f.m
    if len(basis) < n + 1:
        raise ValueError(f"basis has {len(basis)} elements, need {n + 1}")
    coeffs = np.zeros(n + 1)
    r = f
    k = n
    while k >= 1:
        r0, r1 = r.leading
        p0, p1 = basis[k].leading
        q0, q1 = basis[k - 1].leading
        # leading pair of s*W_{k-1} is (-q1, q0)
        det = p0 * q0 + p1 * q1
        if det == 0.0 or not np.isfinite(det):
            raise DegreeError(f"singular elimination step at order {k}")
        c0 = (r0 * q0 + r1 * q1) / det
        c1 = (p0 * r1 - p1 * r0) / det
        coeffs[n - k] = c0
        coeffs[n - k + 1] = c1
        r = r - c0 * basis[k] - c1 * basis[k - 1].times_sqrt()
        r.b0[k] = 0.0
        if k >= 1:
            r.b1[k - 1] = 0.0
        if k == 1:
            k = -1
            break
        r = r.drop_leading()
        k -= 2
    if k == 0:
        c = basis[0].b0[0]
        if c == 0.0:
            raise DegreeError("basis element of order 0 vanishes")
        coeffs[n] = r.b0[0] / c
    return coeffs


def reconstruct_from_w_basis(coeffs, basis) -> OmegaFunction:
    n = len(coeffs) - 1
    out = OmegaFunction.zero(n)
    for c, e in zip(coeffs, w_basis_elements(basis, n)):
        out = out + c * e
    return out
