"""Zeros of the orthogonal functions, located in the angle variable."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .omega import OmegaFunction
from .recurrence import RecurrenceTable

TWO_PI = 2.0 * np.pi


class ZeroSearchError(ArithmeticError):
    def __init__(self, message, found):
        super().__init__(message)
        self.found = found


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Zeros ``x_1 < ... < x_m`` with angles ``theta_k = 2 acos(x_k)``."""

    m: int
    x: np.ndarray
    theta: np.ndarray
    residuals: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        for name in ("x", "theta", "residuals"):
            v = np.array(getattr(self, name), dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def __len__(self):
        return self.x.size

    @property
    def z(self):
        return np.exp(1j * self.theta)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "x", "theta", "residual"])
        for k, (x, th, r) in enumerate(zip(self.x, self.theta, self.residuals), start=1):
            w.writerow([k, f"{x:.15g}", f"{th:.15g}", f"{r:.15g}"])
        return buf.getvalue()

    def to_dict(self):
        return {"m": self.m, "x": self.x.tolist(), "theta": self.theta.tolist(),
                "residuals": self.residuals.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["m"], d["x"], d["theta"], d["residuals"])


def _theta_function(source, m):
    if isinstance(source, RecurrenceTable):
        if m is None:
            raise ValueError("order m is required with a recurrence table")
        return m, lambda th: source.values_theta(th, m)[m]
    if isinstance(source, OmegaFunction):
        return source.m if m is None else m, source.eval_theta
    if callable(source):
        if m is None:
            raise ValueError("order m is required with a plain callable")
        return m, source
    raise TypeError("expected a RecurrenceTable, OmegaFunction or callable of theta")


def find_zeros(source, m=None, max_doublings=6) -> ZeroSet:
    """All ``m`` zeros in (-1, 1) of an order-``m`` orthogonal function.

    ``source`` is a :class:`RecurrenceTable` (with ``m``), an
    :class:`OmegaFunction`, or a callable of ``theta``.  Sign changes are
    bracketed on a uniform grid in ``theta`` which is doubled until exactly
    ``m`` are seen, then each bracket is refined with Brent's method.
    """
    m, f = _theta_function(source, m)
    if m < 1:
        raise ValueError("order must be at least 1")
    points = 20 * m + 40
    count = 0
    for _ in range(max_doublings + 1):
        grid = np.linspace(0.0, TWO_PI, points + 2)[1:-1]
        vals = f(grid)
        signs = np.sign(vals)
        exact = np.flatnonzero(signs == 0)
        changes = np.flatnonzero(signs[:-1] * signs[1:] < 0)
        count = changes.size + exact.size
        if count == m:
            break
        points *= 2
    else:
        raise ZeroSearchError(f"found {count} sign changes, expected {m}", count)

    scale = float(np.max(np.abs(vals)))
    roots = [grid[i] for i in exact]
    for i in changes:
        roots.append(brentq(lambda t: float(f(np.array(t))), grid[i], grid[i + 1],
                            xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    theta = np.sort(np.array(roots))[::-1]
    x = np.cos(0.5 * theta)
    residuals = np.abs(f(theta))
    return ZeroSet(m, x, theta, residuals, scale)


def check_interlacing(a: ZeroSet, b: ZeroSet) -> bool:
    """True iff each zero of ``a`` lies strictly between consecutive zeros of ``b``."""
    if len(b) != len(a) + 1:
        return False
    xa, xb = a.x, b.x
    if np.any(np.diff(xa) <= 0) or np.any(np.diff(xb) <= 0):
        return False
    return bool(np.all(xb[:-1] < xa) and np.all(xa < xb[1:]))
