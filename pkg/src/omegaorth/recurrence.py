"""Stieltjes-type generation of the normalized family and closed-form oracles.

The normalized functions satisfy

    W_0 = 1,  W_1 = x - beta_1 s,
    W_{m+1} = (x - beta_{m+1} s) W_m - alpha_{m+1} W_{m-1},

with ``s = sqrt(1 - x^2)``, where

    rho_m = int W_m^2 s dpsi,
    beta_{m+1} = int x W_m^2 dpsi / rho_m,
    alpha_{m+1} = (1 + beta_{m+1}^2) / (1 + beta_m^2) * rho_m / rho_{m-1}.

Integrands are evaluated by running the recurrence at the quadrature nodes,
which is far better conditioned than summing monomial coefficients.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .measure import IntegrationError, Measure
from .omega import LeadingData, OmegaFunction, leading_step, mul_linear

MAX_ORDER = 40


class GenerationError(ArithmeticError):
    """Coefficient generation stopped early; ``order`` is the last complete order."""

    def __init__(self, message, order):
        super().__init__(f"{message} (completed through order {order})")
        self.order = order


def eval_recurrence(beta, alpha, m, theta):
    """Values of W_0..W_m at ``x = cos(theta/2)`` from the coefficients.

    ``beta[k]`` holds beta_k (index 0 unused) and ``alpha[k]`` holds alpha_k
    (indices 0 and 1 unused).  Returns an array of shape ``(m + 1,) + theta.shape``.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    out = np.empty((m + 1,) + theta.shape)
    out[0] = 1.0
    if m >= 1:
        out[1] = x - beta[1] * s
    for k in range(1, m):
        out[k + 1] = (x - beta[k + 1] * s) * out[k] - alpha[k + 1] * out[k - 1]
    return out


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    """Normalized recurrence data up to order ``N``.

    Arrays are padded so that ``beta_hat[m]`` is beta_m (``m >= 1``),
    ``alpha_hat[m]`` is alpha_m (``m >= 2``) and ``rho_hat[m]`` is rho_m
    (``m >= 0``); unused slots hold NaN.
    """

    N: int
    beta_hat: np.ndarray
    alpha_hat: np.ndarray
    rho_hat: np.ndarray
    alpha_hat_direct: np.ndarray = field(default=None)
    measure: Measure | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("beta_hat", "alpha_hat", "rho_hat", "alpha_hat_direct"):
            v = getattr(self, name)
            if v is None:
                v = np.full(self.N + 1, np.nan)
            v = np.array(v, dtype=float)
            if v.shape != (self.N + 1,):
                raise ValueError(f"{name} must have length N + 1 = {self.N + 1}")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "_functions", None)

    # -- evaluation -------------------------------------------------------

    def values_theta(self, theta, m=None):
        """All of W_0..W_m at ``x = cos(theta/2)`` (default ``m = N``)."""
        m = self.N if m is None else m
        self._check_order(m)
        return eval_recurrence(self.beta_hat, self.alpha_hat, m, theta)

    def evaluate(self, m, x):
        """W_m at ``x`` in [-1, 1], via the recurrence."""
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > 1.0):
            raise ValueError("x must lie in [-1, 1]")
        return self.values_theta(2.0 * np.arccos(x), m)[m]

    def _check_order(self, m):
        if not 0 <= m <= self.N:
            raise ValueError(f"order {m} outside table depth 0..{self.N}")

    # -- coefficient-form functions --------------------------------------

    @property
    def functions(self):
        """W_0..W_N as :class:`OmegaFunction` values (built lazily)."""
        if self._functions is None:
            fs = [OmegaFunction.constant(1.0)]
            if self.N >= 1:
                fs.append(mul_linear(fs[0], 1.0, self.beta_hat[1]))
            for k in range(1, self.N):
                nxt = mul_linear(fs[k], 1.0, self.beta_hat[k + 1]) - self.alpha_hat[k + 1] * fs[k - 1]
                fs.append(nxt)
            object.__setattr__(self, "_functions", tuple(fs))
        return self._functions

    def function(self, m):
        self._check_order(m)
        return self.functions[m]

    @property
    def leading(self):
        """Leading data per order from the rotation-scaling recursion."""
        out = [LeadingData(1.0, 0.0, 1.0)]
        for k in range(1, self.N + 1):
            done, nxt = leading_step(out[-1], 1.0, self.beta_hat[k])
            out[-1] = done
            out.append(nxt)
        return tuple(out)

    # -- general normalization -------------------------------------------

    def rescale(self, gamma):
        """Coefficients for ``W_m = gamma_0 ... gamma_m * What_m``.

        Returns a dict with arrays ``beta``, ``alpha``, ``rho`` padded like
        the normalized arrays.
        """
        gamma = np.asarray(gamma, dtype=float)
        if gamma.shape != (self.N + 1,):
            raise ValueError(f"need gamma_0..gamma_{self.N}")
        if np.any(gamma == 0):
            raise ValueError("gamma values must be nonzero")
        prods = np.cumprod(gamma)
        beta = gamma * self.beta_hat
        alpha = np.full(self.N + 1, np.nan)
        alpha[2:] = gamma[2:] * gamma[1:-1] * self.alpha_hat[2:]
        return {"gamma": gamma, "beta": beta, "alpha": alpha, "rho": prods**2 * self.rho_hat}

    # -- serialization ----------------------------------------------------

    def rows(self):
        for m in range(self.N + 1):
            yield (m,
                   self.beta_hat[m] if m >= 1 else None,
                   self.alpha_hat[m] if m >= 2 else None,
                   self.rho_hat[m])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "beta_hat", "alpha_hat", "rho_hat"])
        for m, b, a, r in self.rows():
            w.writerow([m] + ["" if v is None else f"{v:.15g}" for v in (b, a, r)])
        return buf.getvalue()

    def to_dict(self):
        def clean(v):
            return [None if not np.isfinite(t) else float(t) for t in v]

        out = {
            "N": self.N,
            "beta_hat": clean(self.beta_hat),
            "alpha_hat": clean(self.alpha_hat),
            "rho_hat": clean(self.rho_hat),
            "alpha_hat_direct": clean(self.alpha_hat_direct),
        }
        if self.measure is not None:
            out["measure"] = self.measure.to_config()
        return out

    @classmethod
    def from_dict(cls, d):
        def arr(v):
            return np.array([np.nan if t is None else t for t in v], dtype=float)

        measure = Measure.from_config(d["measure"]) if d.get("measure") else None
        return cls(d["N"], arr(d["beta_hat"]), arr(d["alpha_hat"]), arr(d["rho_hat"]),
                   arr(d["alpha_hat_direct"]) if d.get("alpha_hat_direct") else None,
                   measure)


def generate(psi: Measure, N: int, max_order: int = MAX_ORDER) -> RecurrenceTable:
    """Run the Stieltjes procedure for ``psi`` through order ``N``."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > max_order:
        raise ValueError(f"N = {N} exceeds the cap of {max_order}")
    beta = np.full(N + 1, np.nan)
    alpha = np.full(N + 1, np.nan)
    alpha_direct = np.full(N + 1, np.nan)
    rho = np.full(N + 1, np.nan)

    for m in range(N + 1):
        def integrands(theta, m=m):
            w = eval_recurrence(beta, alpha, m, theta)
            x = np.cos(0.5 * theta)
            s = np.sin(0.5 * theta)
            sq = w[m] * w[m]
            rows = [sq * s, x * sq]
            if m >= 1:
                cross = w[m - 1] * w[m] * s
                rows += [x * cross, cross * s]
            return np.stack(rows)

        try:
            vals, _ = psi.quad_theta(integrands, mode="psi")
        except IntegrationError as exc:
            raise GenerationError(f"integration failed at order {m}: {exc}", m - 1) from exc
        if not vals[0] > 0:
            raise GenerationError(f"rho_{m} = {vals[0]:.3g} is not positive", m - 1)
        rho[m] = vals[0]
        if m == N:
            break
        beta[m + 1] = vals[1] / vals[0]
        if m >= 1:
            alpha[m + 1] = ((1.0 + beta[m + 1] ** 2) / (1.0 + beta[m] ** 2)) * rho[m] / rho[m - 1]
            alpha_direct[m + 1] = (vals[2] - beta[m + 1] * vals[3]) / rho[m - 1]
            if not alpha[m + 1] > 0:
                raise GenerationError(f"alpha_{m + 1} is not positive", m)
    return RecurrenceTable(N, beta, alpha, rho, alpha_direct, psi)


# -- closed forms for the weight exp(-2 eta acos x) (1 - x^2)^(lambda - 1) ------


def _check_lambda(lam):
    # lambda = 1/2 is the Legendre boundary case and is accepted
    if not lam >= 0.5:
        raise ValueError(f"lambda must be at least 1/2 (got {lam})")


def example2_coeffs(lam, eta, m):
    """Closed-form ``(beta_m, alpha_{m+1})`` for the weight family."""
    _check_lambda(lam)
    if m < 1:
        raise ValueError("m must be positive")
    beta = eta / (m + lam - 1.0)
    alpha = 0.25 * m * (m + 2.0 * lam - 1.0) / ((m + lam - 1.0) * (m + lam))
    return beta, alpha


def example2_w_via_2f1(lam, eta, m, theta, tol=1e-10):
    """W_m at ``x = cos(theta/2)`` from the terminating 2F1 representation."""
    _check_lambda(lam)
    b = complex(lam, eta)
    c = 2.0 * lam
    z = cmath.exp(1j * theta)
    u = 1.0 - z
    term = 1.0 + 0j
    total = term
    for k in range(m):
        term *= (k - m) * (b + k) / ((c + k) * (k + 1)) * u
        total += term
    scale = 2.0**-m
    for k in range(m):
        scale *= (c + k) / (lam + k)
    val = scale * cmath.exp(-0.5j * m * theta) * total
    size = max(abs(val), scale * 2.0**-m)
    if abs(val.imag) > tol * max(size, 1e-300):
        raise ArithmeticError(f"imaginary residual {abs(val.imag):.3g} exceeds tolerance")
    return val.real


# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_lgamma(z):
    """Principal-branch-free ``log Gamma(z)`` whose real part is ``log|Gamma(z)|``."""
    z = complex(z)
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - complex_lgamma(1.0 - z)
    z -= 1.0
    a = _LANCZOS[0]
    t = z + _LANCZOS_G + 0.5
    for i, c in enumerate(_LANCZOS[1:], start=1):
        a += c / (z + i)
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * cmath.log(t) - t + cmath.log(a)


def example2_rho(lam, eta, m):
    """Closed-form rho_m for the weight family, evaluated in logarithms."""
    _check_lambda(lam)
    b = complex(lam, eta)
    log_poch_b = sum(math.log(abs(b + k)) for k in range(m))
    log_poch_lam = math.lgamma(lam + m) - math.lgamma(lam)
    log_rho = (
        math.log(math.pi) + math.lgamma(m + 1.0) + math.log(lam + m) + math.lgamma(2.0 * lam + m)
        - (2.0 * lam + 2.0 * m - 1.0) * math.log(2.0) - eta * math.pi
        - 2.0 * complex_lgamma(b + m + 1.0).real
        - 2.0 * log_poch_lam + 2.0 * log_poch_b
    )
    return math.exp(log_rho)
