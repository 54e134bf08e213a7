"""Unit-circle side: the polynomials K_m, chain sequences and Verblunsky coefficients.

The circle measure is ``dmu = (1/2) w(cos(theta/2)) dtheta`` on ``[0, 2 pi]``
for ``dpsi = w(x) dx``; it is positive and carries the transported mass of
``psi`` (finite exactly when ``int (1 - x^2)^(-1/2) dpsi`` exists).

Chain sequences here are indexed ``c_1, c_2, ...`` with ``c_k = alpha_{k+1}``
from the recurrence table.  Parameter sequences ``g_0, g_1, ...`` satisfy
``c_k = (1 - g_{k-1}) g_k``; the minimal one starts at ``g_0 = 0`` and the
maximal one ``G_k`` is the largest admissible.  In the unit-circle formulas
the maximal parameters appear shifted, ``M_m = G_{m-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measure import Measure
from .recurrence import RecurrenceTable
from .selfinv import SelfInversivePoly, omega_to_selfinv

TAIL_MODES = ("constant", "truncate", "anchored")


class NotChainSequenceError(ValueError):
    def __init__(self, message, index):
        super().__init__(f"{message} (index {index})")
        self.index = index


class VerificationError(ArithmeticError):
    pass


# -- K_m polynomials -----------------------------------------------------------


def khat_from_recurrence(table: RecurrenceTable, N: int | None = None, verify=True,
                         samples=50, tol=1e-10, seed=0x5EED):
    """``K_0..K_N`` from the three-term recurrence on the circle.

    ``K_{m+1} = [(1 + i b_{m+1}) z + (1 - i b_{m+1})] K_m - 4 a_{m+1} z K_{m-1}``.
    With ``verify`` the result is checked against
    ``exp(-i m theta/2) K_m(exp(i theta)) = 2^m W_m(cos(theta/2))``.
    """
    N = table.N if N is None else N
    if N > table.N:
        raise ValueError(f"table depth {table.N} is below {N}")
    beta, alpha = table.beta_hat, table.alpha_hat
    ks = [np.array([1.0 + 0j])]
    if N >= 1:
        ks.append(np.array([1.0 - 1j * beta[1], 1.0 + 1j * beta[1]]))
    for m in range(1, N):
        lin = np.array([1.0 - 1j * beta[m + 1], 1.0 + 1j * beta[m + 1]])
        nxt = np.convolve(lin, ks[m])
        nxt[1:-1] -= 4.0 * alpha[m + 1] * ks[m - 1]
        ks.append(nxt)
    out = [SelfInversivePoly(m, k) for m, k in enumerate(ks)]
    if verify:
        theta = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, samples)
        w = table.values_theta(theta, N)
        for m, k in enumerate(out):
            lhs = np.exp(-0.5j * m * theta) * k(np.exp(1j * theta))
            scale = float(np.sum(np.abs(k.k)))
            defect = float(np.max(np.abs(lhs - 2.0**m * w[m]))) / scale
            if defect > tol:
                raise VerificationError(f"K_{m} disagrees with 2^m W_{m}: defect {defect:.3g}")
    return out


def khat_via_bridge(table: RecurrenceTable, m: int) -> SelfInversivePoly:
    """``2^m`` times the self-inversive image of ``W_m``."""
    return 2.0**m * omega_to_selfinv(table.function(m))


def _require_integrable(psi: Measure):
    if not psi.integrability_flag:
        raise ValueError("the measure does not integrate (1 - x^2)^(-1/2); "
                         "the circle measure would be infinite")


def khat_moment_residuals(khat: SelfInversivePoly, psi: Measure):
    """Scaled ``|int z^(s-m) K_m(z) (1 - z) dmu|`` for ``s = 0..m-1``.

    Each residual is divided by ``int |K_m(z)| |1 - z| dmu``.
    """
    _require_integrable(psi)
    m = khat.m
    if m < 1:
        return np.zeros(0)

    def integrand(theta):
        z = np.exp(1j * theta)
        base = khat(z) * (1.0 - z)
        rows = []
        for s in range(m):
            v = z ** (s - m) * base
            rows += [v.real, v.imag]
        rows.append(np.abs(base))
        return np.stack(rows)

    vals, _ = psi.quad_theta(integrand, mode="circle")
    scale = vals[-1]
    return np.hypot(vals[0:-1:2], vals[1:-1:2]) / scale


# -- chain sequences ---------------------------------------------------------------


def _maximal_backward(c, start):
    """Backward recursion ``G_{k-1} = 1 - c_k / G_k`` from ``G_n = start``."""
    n = c.size
    G = np.empty(n + 1)
    G[n] = start
    for k in range(n, 0, -1):
        G[k - 1] = 1.0 - c[k - 1] / G[k]
        if not G[k - 1] > 0:
            raise NotChainSequenceError("backward parameter is not positive", k - 1)
    return G


def _extend(c, length):
    if length <= c.size:
        return c[:length]
    return np.concatenate([c, np.full(length - c.size, c[-1])])


@dataclass(frozen=True, eq=False)
class ChainSeqData:
    """Parameter sequences of the chain sequence ``alpha = (c_1, ..., c_n)``.

    ``minimal[k]`` and ``maximal[k]`` are ``g_k`` and ``G_k`` for
    ``k = 0..n``.  ``tail`` records how the finite input was extended.
    """

    alpha: np.ndarray
    minimal: np.ndarray
    maximal: np.ndarray
    tail: str
    trunc_depth: int | None = None
    converged: bool = True
    history: tuple = field(default=(), repr=False)

    def M(self, m):
        """Maximal parameter in the unit-circle indexing, ``M_m = G_{m-1}``."""
        return float(self.maximal[m - 1])

    @property
    def gap(self):
        """``G_1 - g_1``, positive when the two sequences differ."""
        return float(self.maximal[1] - self.minimal[1])

    def identity_defect(self):
        c = self.alpha
        dmin = np.abs((1.0 - self.minimal[:-1]) * self.minimal[1:] - c)
        dmax = np.abs((1.0 - self.maximal[:-1]) * self.maximal[1:] - c)
        return float(max(dmin.max(), dmax.max()))

    def to_dict(self):
        return {"alpha": self.alpha.tolist(), "minimal": self.minimal.tolist(),
                "maximal": self.maximal.tolist(), "tail": self.tail,
                "trunc_depth": self.trunc_depth, "converged": self.converged}


def first_maximal_parameter(psi: Measure, beta1: float) -> float:
    """``M_1`` from the first moment ``c_1 = int z dmu / int dmu`` of the circle measure.

    Matching the first Verblunsky coefficient of the jump-free measure,
    ``conj(c_1)``, with ``1 - 2 M_1 / (1 - i beta_1)`` gives
    ``M_1 = (1 - i beta_1)(1 - conj(c_1)) / 2``, which is real.
    """
    _require_integrable(psi)
    vals, _ = psi.quad_theta(lambda th: np.stack([np.cos(th), np.sin(th), np.ones_like(th)]),
                             mode="circle")
    c1 = complex(vals[0], vals[1]) / vals[2]
    m1 = 0.5 * (1.0 - 1j * beta1) * (1.0 - c1.conjugate())
    if abs(m1.imag) > 1e-9 * max(1.0, abs(m1)):
        raise ArithmeticError(f"first maximal parameter is not real: {m1}")
    return m1.real


def chain_parameters(alpha, N=None, tol=1e-12, tail="constant", anchor=None, max_depth=2**16):
    """Minimal and maximal parameter sequences of a finite positive sequence.

    The maximal sequence needs information beyond the finite input:

    ``tail="constant"``
        repeat the last value forever and start the backward recursion at
        the exact maximal parameter ``(1 + sqrt(1 - 4c)) / 2`` of that tail;
    ``tail="truncate"``
        repeat the last value, start at ``1`` at depth ``T`` and double ``T``
        from ``N + 20`` until ``G_0`` settles to ``tol``;
    ``tail="anchored"``
        take ``G_0 = anchor`` (known independently, e.g. from
        :func:`first_maximal_parameter`) and recurse forward.
    """
    c = np.asarray(alpha, dtype=float).ravel()
    if N is not None:
        c = c[:N]
    if c.size < 1:
        raise ValueError("need at least one chain term")
    if np.any(~(c > 0)):
        raise ValueError("chain terms must be positive")
    if tail not in TAIL_MODES:
        raise ValueError(f"tail must be one of {TAIL_MODES}")
    n = c.size

    g = _forward(c, 0.0)

    if tail == "anchored":
        if anchor is None:
            raise ValueError("anchored tail needs the anchor value G_0")
        if not 0.0 <= anchor < 1.0:
            raise NotChainSequenceError(f"anchor {anchor} is outside [0, 1)", 0)
        return ChainSeqData(c, g, _forward(c, float(anchor)), tail)

    last = c[-1]
    if tail == "constant":
        if last > 0.25:
            raise NotChainSequenceError("constant tail above 1/4 is not a chain sequence", n)
        G = _maximal_backward(c, 0.5 * (1.0 + math.sqrt(1.0 - 4.0 * last)))
        return ChainSeqData(c, g, G, tail)

    T = n + 20
    prev = None
    history = []
    converged = False
    while True:
        G = _maximal_backward(_extend(c, T), 1.0)[: n + 1]
        history.append((T, float(G[0])))
        if prev is not None and abs(G[0] - prev) < tol:
            converged = True
            break
        if 2 * T > max_depth:
            break
        prev = G[0]
        T *= 2
    return ChainSeqData(c, g, G, tail, T, converged, tuple(history))


def _forward(c, start):
    g = np.empty(c.size + 1)
    g[0] = start
    for k in range(1, c.size + 1):
        g[k] = c[k - 1] / (1.0 - g[k - 1])
        if not 0.0 < g[k] < 1.0:
            raise NotChainSequenceError("parameter left (0, 1)", k)
    return g


def chain_from_table(table: RecurrenceTable, tail=None, **kw) -> ChainSeqData:
    """Chain data for ``alpha_2, alpha_3, ...`` of a table.

    By default the maximal sequence is anchored at the first moment of the
    table's measure when that measure is integrable, and otherwise uses the
    constant tail.
    """
    psi = table.measure
    if tail is None:
        tail = "anchored" if psi is not None and psi.integrability_flag else "constant"
    if tail == "anchored" and "anchor" not in kw:
        kw["anchor"] = first_maximal_parameter(psi, table.beta_hat[1])
    return chain_parameters(table.alpha_hat[2:], tail=tail, **kw)


# -- Verblunsky coefficients -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VerblunskySeq:
    t: float
    frak_m: np.ndarray
    tau: np.ndarray
    a: np.ndarray

    def to_dict(self):
        return {"t": self.t, "a": [{"re": float(v.real), "im": float(v.imag)} for v in self.a]}

    @classmethod
    def from_dict(cls, d):
        a = np.array([complex(v["re"], v["im"]) for v in d["a"]])
        return cls(float(d["t"]), np.full(a.size + 1, np.nan), np.full(a.size + 1, np.nan + 0j), a)


def verblunsky(chain: ChainSeqData, beta_hat, t: float, N: int | None = None) -> VerblunskySeq:
    """Verblunsky coefficients ``a_0..a_{N-1}`` of the measure with jump ``t`` at 1.

    ``beta_hat[m]`` is beta_m (index 0 unused), as in :class:`RecurrenceTable`.
    """
    if not 0.0 <= t < 1.0:
        raise ValueError("t must lie in [0, 1)")
    beta = np.asarray(beta_hat, dtype=float)
    limit = min(beta.size - 1, chain.alpha.size + 1)
    N = limit if N is None else N
    if N > limit:
        raise ValueError(f"at most {limit} coefficients are available")
    fm = np.zeros(N + 1)
    if N >= 1:
        fm[1] = (1.0 - t) * chain.M(1)
    for m in range(1, N):
        fm[m + 1] = chain.alpha[m - 1] / (1.0 - fm[m])
        if not fm[m + 1] < 1.0:
            raise ArithmeticError(f"parameter {m + 1} reached {fm[m + 1]:.3g} (precision failure)")
    tau = np.ones(N + 1, dtype=complex)
    a = np.zeros(N, dtype=complex)
    for m in range(1, N + 1):
        b = beta[m]
        a[m - 1] = (1.0 - 2.0 * fm[m] - 1j * b) / (1.0 - 1j * b) / tau[m - 1]
        tau[m] = (1.0 - 1j * b) / (1.0 + 1j * b) * tau[m - 1]
    return VerblunskySeq(float(t), fm, tau, a)


def szego_polynomials(a, N):
    """Monic ``S_0..S_N`` from ``S_{m+1} = z S_m - conj(a_m) S_m^*`` (ascending coefficients)."""
    polys = [np.array([1.0 + 0j])]
    for m in range(N):
        s = polys[-1]
        star = np.conj(s[::-1])
        nxt = np.zeros(m + 2, dtype=complex)
        nxt[1:] += s
        nxt[:-1] -= np.conj(a[m]) * star
        polys.append(nxt)
    return polys


def szego_verify(vs: VerblunskySeq, psi: Measure, N: int, table: RecurrenceTable | None = None,
                 samples=20, seed=0x5EED):
    """Check the coefficients against the jump measure on the circle.

    The probability measure is ``(1 - t) mu / |mu| + t delta_1``.  Returns a
    dict with the largest normalized Gram off-diagonal entry, the defect of
    ``-conj(S_m(0)) = a_{m-1}``, and (given a table) the largest relative
    spread of the ratio between the kernel ``sum conj(s_j(1)) s_j(z)`` and
    ``K_m(z)`` over random points of the circle.
    """
    _require_integrable(psi)
    if N > vs.a.size:
        raise ValueError(f"only {vs.a.size} coefficients available")
    t = vs.t
    polys = szego_polynomials(vs.a, N)
    const_defect = max((abs(-np.conj(polys[m][0]) - vs.a[m - 1]) for m in range(1, N + 1)), default=0.0)

    mass_mu, _ = psi.quad_theta(lambda th: np.ones_like(th), mode="circle")

    def integrand(theta):
        z = np.exp(1j * theta)
        vals = np.stack([np.polynomial.polynomial.polyval(z, p) for p in polys])
        gram = vals[:, None, :] * np.conj(vals[None, :, :])
        return np.concatenate([gram.real, gram.imag])

    raw, _ = psi.quad_theta(integrand, mode="circle")
    gram = (raw[: N + 1] + 1j * raw[N + 1:]) * (1.0 - t) / mass_mu
    at_one = np.array([np.sum(p) for p in polys])
    gram = gram + t * np.outer(at_one, np.conj(at_one))
    norms = np.sqrt(gram.diagonal().real)
    normalized = np.abs(gram) / np.outer(norms, norms)
    off = normalized[~np.eye(N + 1, dtype=bool)]
    result = {"orthogonality": float(off.max()) if off.size else 0.0,
              "constant_term": float(const_defect)}

    if table is not None:
        khat = khat_from_recurrence(table, N, verify=False)
        z = np.exp(1j * np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, samples))
        ortho = [p / n for p, n in zip(polys, norms)]
        worst = 0.0
        kernel = np.zeros_like(z)
        for m in range(N + 1):
            s1 = np.sum(ortho[m])
            kernel = kernel + np.conj(s1) * np.polynomial.polynomial.polyval(z, ortho[m])
            ratio = kernel / khat[m](z)
            spread = float(np.max(np.abs(ratio - ratio.mean())) / abs(ratio.mean()))
            worst = max(worst, spread)
        result["cd_ratio"] = worst
    return result
