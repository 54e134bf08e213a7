"""Bridge between Omega_m and self-inversive polynomials of degree m.

A polynomial ``Q(z) = sum k_j z^j`` of degree at most m is self-inversive of
degree m when ``k_j = conj(k_{m-j})``.  With ``z = exp(i theta)`` and
``x = cos(theta/2)``, ``exp(-i m theta/2) Q(z)`` is then a real function in
Omega_m, and every element of Omega_m arises this way from exactly one Q.

The map goes through Chebyshev expansions: ``B0 = sum t_q T_q`` and
``B1 = sum u_q U_q``.  Frequency ``q`` of the trigonometric polynomial in
``theta/2`` sits at coefficient index ``(m - q)/2``, where
``k = (t_q + i u_{q-1}) / 2`` (and ``k = t_0`` in the middle for even m).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular

from .omega import DegreeError, OmegaFunction


class SymmetryError(ValueError):
    """Coefficients are not conjugate-reciprocal within tolerance."""


@lru_cache(maxsize=None)
def _cheb_matrix(kind, n):
    """Rows are ascending monomial coefficients of T_j (kind 'T') or U_j ('U')."""
    c = np.zeros((n + 1, n + 1))
    c[0, 0] = 1.0
    if n >= 1:
        c[1, 1] = 1.0 if kind == "T" else 2.0
    for j in range(1, n):
        c[j + 1, 1:] = 2.0 * c[j, :-1]
        c[j + 1] -= c[j - 1]
    c.setflags(write=False)
    return c


def poly_to_cheb(p, kind):
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        return p.copy()
    c = _cheb_matrix(kind, p.size - 1)
    return solve_triangular(c.T, p, lower=False)


def cheb_to_poly(t, kind):
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return t.copy()
    return t @ _cheb_matrix(kind, t.size - 1)


@dataclass(frozen=True, eq=False)
class SelfInversivePoly:
    """Coefficients ``k[0..m]`` of a conjugate-reciprocal polynomial."""

    m: int
    k: np.ndarray

    def __post_init__(self):
        k = np.array(self.k, dtype=complex)
        if k.size != self.m + 1:
            raise ValueError(f"expected {self.m + 1} coefficients, got {k.size}")
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z), self.k)

    def star(self):
        """``z^m conj(Q(1/conj(z)))`` as a coefficient array."""
        return np.conj(self.k[::-1])

    def symmetry_defect(self):
        scale = max(float(np.max(np.abs(self.k))), np.finfo(float).tiny)
        return float(np.max(np.abs(self.k - self.star()))) / scale

    def symmetrized(self):
        return SelfInversivePoly(self.m, 0.5 * (self.k + self.star()))

    def __mul__(self, other):
        if isinstance(other, SelfInversivePoly):
            return SelfInversivePoly(self.m + other.m, np.convolve(self.k, other.k))
        return SelfInversivePoly(self.m, other * self.k)

    __rmul__ = __mul__

    def __add__(self, other):
        if self.m != other.m:
            raise ValueError("degrees differ")
        return SelfInversivePoly(self.m, self.k + other.k)

    def __sub__(self, other):
        if self.m != other.m:
            raise ValueError("degrees differ")
        return SelfInversivePoly(self.m, self.k - other.k)

    def to_dict(self):
        return {"m": self.m, "re": self.k.real.tolist(), "im": self.k.imag.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["m"], np.asarray(d["re"]) + 1j * np.asarray(d["im"]))


def omega_to_selfinv(f: OmegaFunction) -> SelfInversivePoly:
    m = f.m
    t = poly_to_cheb(f.b0, "T")
    u = poly_to_cheb(f.b1, "U")
    k = np.zeros(m + 1, dtype=complex)
    for q in range(m, 0, -2):
        j = (m - q) // 2
        k[j] = 0.5 * (t[q] + 1j * u[q - 1])
        k[m - j] = np.conj(k[j])
    if m % 2 == 0:
        k[m // 2] = t[0]
    return SelfInversivePoly(m, k)


def selfinv_to_omega(q: SelfInversivePoly, tol=1e-13) -> OmegaFunction:
    m = q.m
    if q.symmetry_defect() > tol:
        raise SymmetryError(f"relative symmetry defect {q.symmetry_defect():.3g} exceeds {tol:g}")
    k = 0.5 * (q.k + q.star())
    t = np.zeros(m + 1)
    u = np.zeros(m)
    for freq in range(m, 0, -2):
        j = (m - freq) // 2
        t[freq] = 2.0 * k[j].real
        u[freq - 1] = 2.0 * k[j].imag
    if m % 2 == 0:
        t[0] = k[m // 2].real
    return OmegaFunction(m, cheb_to_poly(t, "T"), cheb_to_poly(u, "U"))


def omega_product(f: OmegaFunction, g: OmegaFunction, tol=1e-10) -> OmegaFunction:
    """Pointwise product ``f g`` in Omega_{m+n}, formed through the bridge."""
    return selfinv_to_omega(omega_to_selfinv(f) * omega_to_selfinv(g), tol=tol)


def divide(e: OmegaFunction, w: OmegaFunction, parity_case=None):
    """Split ``e = f w + g`` for ``w`` of exact degree n.

    Even case (n = 2m): ``e`` in Omega_{4m-1}, ``f, g`` in Omega_{2m-1}.
    Odd case (n = 2m+1): ``e`` in Omega_{4m}, ``f`` in Omega_{2m-1} and
    ``g`` in Omega_{2m}.  ``e`` of lower degree bound (same parity class) is
    embedded first.  The work happens on the self-inversive images,
    ``P = Q K + z^m R``.
    """
    n = w.m
    case = "even" if n % 2 == 0 else "odd"
    if parity_case is not None and parity_case != case:
        raise ValueError(f"w has degree {n}, which is the {case} case")
    m = n // 2
    if m < 1:
        raise ValueError("division needs w of degree at least 2")
    top = 4 * m - 1 if case == "even" else 4 * m
    g_deg = 2 * m - 1 if case == "even" else 2 * m
    if e.m > top or (top - e.m) % 2:
        raise ValueError(f"e must lie in Omega_{top} (got Omega_{e.m})")
    p = omega_to_selfinv(e.raise_degree(top)).k
    kk = omega_to_selfinv(w).k
    k0 = kk[0]
    if k0 == 0:
        raise DegreeError("w is not of exact degree: leading self-inversive coefficient is 0")

    q = np.zeros(2 * m, dtype=complex)
    for j in range(m):
        acc = p[j] - np.dot(q[:j], kk[j:0:-1]) if j else p[j]
        q[j] = acc / k0
        q[2 * m - 1 - j] = np.conj(q[j])
    rem = p - np.convolve(q, kk)
    r = rem[m : m + g_deg + 1]
    f = selfinv_to_omega(SelfInversivePoly(2 * m - 1, q))
    g = selfinv_to_omega(SelfInversivePoly(g_deg, r).symmetrized(), tol=np.inf)
    return f, g
