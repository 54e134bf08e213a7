"""Positive measures on [-1, 1] and the integration engine used throughout.

All integrals are computed in the angle ``theta`` in ``[0, 2*pi]`` with
``x = cos(theta/2)``, so ``dx = -(1/2) sin(theta/2) dtheta``.  Weights are
evaluated as functions of ``theta`` where a closed form exists, which keeps
``1 - x**2 = sin(theta/2)**2`` accurate near the endpoints.

The rule is composite Gauss on fixed panels in ``theta`` with adaptive
bisection.  A panel touching ``theta = 0`` or ``theta = 2*pi`` uses a
Gauss-Jacobi rule carrying the algebraic endpoint exponent of the integrand,
so weights such as ``(1 - x**2)**(lambda - 1)`` do not stall the refinement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.special import roots_jacobi

from . import expr

TWO_PI = 2.0 * math.pi
BUILTINS = ("one_minus_x", "gegenbauer_eta", "lebesgue", "chebyshev1")

# Integrand modes: ``psi`` integrates against dpsi, ``halfcircle`` against
# sqrt(1 - x^2) dpsi and ``circle`` against the unit-circle measure
# dmu = (1/2) w(cos(theta/2)) dtheta defined by -sin(theta/2) dmu = dpsi.
MODES = ("psi", "halfcircle", "circle")


class IntegrationError(ArithmeticError):
    """Adaptive refinement did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadSettings:
    panel_count: int = 32
    tolerance: float = 1e-12
    max_refinements: int = 20
    nodes: int = 16

    def __post_init__(self):
        if self.panel_count < 1 or self.max_refinements < 1 or self.nodes < 2:
            raise ValueError("panel_count, max_refinements must be positive and nodes >= 2")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def from_config(cls, cfg):
        cfg = cfg or {}
        return cls(
            panel_count=int(cfg.get("panels", cls.panel_count)),
            tolerance=float(cfg.get("tolerance", cls.tolerance)),
            max_refinements=int(cfg.get("max_refinements", cls.max_refinements)),
            nodes=int(cfg.get("nodes", cls.nodes)),
        )

    def to_config(self):
        return {
            "tolerance": self.tolerance,
            "panels": self.panel_count,
            "max_refinements": self.max_refinements,
            "nodes": self.nodes,
        }


@lru_cache(maxsize=256)
def _gauss_jacobi(n, alpha, beta):
    # weight (1 - t)^alpha (1 + t)^beta on [-1, 1]
    t, w = roots_jacobi(n, alpha, beta)
    return t, w


def _snap_exponent(e):
    frac = Fraction(e).limit_denominator(12)
    if abs(float(frac) - e) < 1e-3:
        return float(frac)
    return e


def _is_smooth(e):
    return e >= -1e-12 and abs(e - round(e)) < 1e-12


@dataclass(frozen=True)
class Measure:
    """A positive measure ``dpsi = w(x) dx`` on [-1, 1].

    Use :meth:`builtin`, :meth:`expression` or :meth:`from_config` rather
    than the raw constructor.
    """

    kind: str
    name: str | None = None
    params: tuple = ()
    source: str | None = None
    integrability_flag: bool = True
    quad: QuadSettings = field(default_factory=QuadSettings)
    _tree: object = field(default=None, repr=False, compare=False)
    _exponents: tuple = field(default=(0.0, 0.0), repr=False, compare=False)
    _mass: float = field(default=float("nan"), repr=False, compare=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def builtin(cls, name, quad=None, **params):
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin measure {name!r}; choose from {BUILTINS}")
        quad = quad or QuadSettings()
        if name == "gegenbauer_eta":
            lam = float(params.get("lambda", params.get("lam", 1.0)))
            eta = float(params.get("eta", 0.0))
            if not lam > 0:
                raise ValueError("gegenbauer_eta needs lambda > 0 for a finite measure")
            params = {"lambda": lam, "eta": eta}
            # w ~ sin(theta/2)^(2 lambda - 2) at both ends
            exps = (2.0 * lam - 2.0, 2.0 * lam - 2.0)
            integrable = lam > 0.5
        elif params:
            raise ValueError(f"builtin {name!r} takes no parameters")
        elif name == "chebyshev1":
            exps = (-1.0, -1.0)
            integrable = False
        else:
            exps = (0.0, 0.0)
            integrable = True
        m = cls(kind="builtin", name=name, params=tuple(sorted(params.items())),
                integrability_flag=integrable, quad=quad, _exponents=exps)
        m._validate()
        return m

    @classmethod
    def expression(cls, source, integrable=None, quad=None):
        tree = expr.parse_weight(source)
        quad = quad or QuadSettings()
        probe = cls(kind="expression", source=source, quad=quad, _tree=tree)
        exps = probe._estimate_exponents()
        if integrable is None:
            # int (1-x^2)^(-1/2) dpsi = int w(cos phi) dphi exists iff e > -1
            integrable = min(exps) > -1.0 + 1e-9
        m = cls(kind="expression", source=source, integrability_flag=bool(integrable),
                quad=quad, _tree=tree, _exponents=exps)
        m._validate()
        return m

    @classmethod
    def from_config(cls, cfg):
        """Build from the JSON config object (dict, JSON text or file path)."""
        if isinstance(cfg, (str, Path)):
            text = str(cfg)
            if not text.lstrip().startswith("{"):
                text = Path(text).read_text()
            cfg = json.loads(text)
        cfg = dict(cfg)
        quad = QuadSettings.from_config(cfg.get("quad"))
        kind = cfg.get("kind", "builtin")
        if kind == "builtin":
            params = {k: v for k, v in cfg.items() if k not in ("kind", "name", "quad")}
            return cls.builtin(cfg["name"], quad=quad, **params)
        if kind == "expression":
            return cls.expression(cfg["weight"], integrable=cfg.get("integrable"), quad=quad)
        raise ValueError(f"unknown measure kind {kind!r}")

    def to_config(self):
        if self.kind == "builtin":
            cfg = {"kind": "builtin", "name": self.name, **dict(self.params)}
        else:
            cfg = {"kind": "expression", "weight": self.source,
                   "integrable": self.integrability_flag}
        cfg["quad"] = self.quad.to_config()
        return cfg

    def with_quad(self, **changes):
        quad = QuadSettings(**{**self.quad.__dict__, **changes})
        return Measure.from_config({**self.to_config(), "quad": quad.to_config()})

    def _validate(self):
        theta = self._panel_nodes()
        w = self.weight_theta(theta)
        if np.any(w < 0):
            bad = theta[np.argmin(w)]
            raise ValueError(f"weight is negative at x = {math.cos(bad / 2):.6g}")
        mass, _ = self.quad_theta(lambda th: np.ones_like(th))
        if not (np.isfinite(mass) and mass > 0):
            raise ValueError("measure must have finite positive mass")
        object.__setattr__(self, "_mass", float(mass))

    def _panel_nodes(self):
        q = self.quad
        edges = np.linspace(0.0, TWO_PI, q.panel_count + 1)
        t, _ = _gauss_jacobi(q.nodes, 0.0, 0.0)
        mids = 0.5 * (edges[:-1] + edges[1:])
        halves = 0.5 * np.diff(edges)
        return (mids[:, None] + halves[:, None] * t[None, :]).ravel()

    def _estimate_exponents(self):
        def exponent(d1, d2, at_right):
            th1, th2 = (TWO_PI - d1, TWO_PI - d2) if at_right else (d1, d2)
            w1, w2 = self.weight_theta(np.array([th1, th2]))
            if w1 <= 0 or w2 <= 0:
                return 0.0
            e = math.log(w1 / w2) / math.log(math.sin(d1 / 2) / math.sin(d2 / 2))
            return _snap_exponent(e)

        return exponent(1e-3, 1e-5, False), exponent(1e-3, 1e-5, True)

    # -- weight -----------------------------------------------------------

    @property
    def mass(self):
        return self._mass

    @property
    def endpoint_exponents(self):
        """Exponents ``e`` with ``w ~ sin(theta/2)**e`` at theta = 0 and 2*pi."""
        return self._exponents

    def weight_theta(self, theta, sin_half=None):
        """Weight ``w(cos(theta/2))`` evaluated from the angle.

        ``sin_half`` may carry an accurately computed ``sin(theta/2)``; near
        ``theta = 2*pi`` it should come from the distance to the endpoint.
        """
        theta = np.asarray(theta, dtype=float)
        half = 0.5 * theta
        s = np.sin(half) if sin_half is None else np.asarray(sin_half, dtype=float)
        if self.kind == "expression":
            return expr.evaluate(self._tree, np.cos(half))
        if self.name == "lebesgue":
            return np.ones_like(theta)
        if self.name == "one_minus_x":
            return 2.0 * np.sin(0.5 * half) ** 2
        if self.name == "chebyshev1":
            return 1.0 / s
        p = dict(self.params)
        # acos(x) = theta/2 on [0, pi]
        return np.exp(-2.0 * p["eta"] * half) * s ** (2.0 * p["lambda"] - 2.0)

    def weight(self, x):
        """Weight as a function of ``x`` in (-1, 1)."""
        x = np.asarray(x, dtype=float)
        return self.weight_theta(2.0 * np.arccos(x))

    # -- integration ------------------------------------------------------

    def _integrand_exponents(self, mode):
        shift = {"psi": 1.0, "halfcircle": 2.0, "circle": 0.0}[mode]
        out = []
        for e in self._exponents:
            a = e + shift
            if a <= -1.0 + 1e-12:
                raise IntegrationError(f"integrand is not integrable at an endpoint (exponent {a})")
            out.append(0.0 if _is_smooth(a) else a)
        return tuple(out)

    def quad_theta(self, g, mode="psi", tol=None):
        """Integrate ``g(theta)`` against the measure selected by ``mode``.

        ``g`` maps an array of angles to values of the same shape, or to an
        array with extra leading axes for several integrands at once.
        Returns ``(value, error_estimate)``.
        """
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        q = self.quad
        tol = q.tolerance if tol is None else tol
        left_exp, right_exp = self._integrand_exponents(mode)

        def integrand(theta, s):
            w = self.weight_theta(theta, s)
            if mode == "psi":
                factor = 0.5 * w * s
            elif mode == "halfcircle":
                factor = 0.5 * w * s * s
            else:
                factor = 0.5 * w
            vals = np.asarray(g(theta), dtype=float) * factor
            if not np.all(np.isfinite(vals)):
                raise IntegrationError("integrand evaluated to a non-finite value")
            return vals

        def panel_rules(los, his):
            """Per-panel estimates, shape ``(panels,) + leading axes of g``."""
            los = np.asarray(los, dtype=float)
            his = np.asarray(his, dtype=float)
            at_right = his >= TWO_PI
            at_left = los <= 0.0
            thetas, sins, corrs, slots = [], [], [], []
            for lf in (False, True):
                for rf in (False, True):
                    idx = np.flatnonzero((at_left == lf) & (at_right == rf))
                    if idx.size == 0:
                        continue
                    alpha = right_exp if rf else 0.0
                    beta = left_exp if lf else 0.0
                    t, w = _gauss_jacobi(q.nodes, alpha, beta)
                    lo = los[idx, None]
                    half = 0.5 * (his[idx, None] - lo)
                    if rf:
                        # measure from the right end to keep sin(theta/2) accurate
                        dist = (TWO_PI - lo) * 0.5 * (1.0 - t)
                        theta = TWO_PI - dist
                        sh = np.sin(0.5 * dist)
                    else:
                        theta = lo + half * (1.0 + t)
                        sh = np.sin(0.5 * theta)
                    corr = w * half
                    if alpha:
                        corr = corr / (1.0 - t) ** alpha
                    if beta:
                        corr = corr / (1.0 + t) ** beta
                    thetas.append(theta)
                    sins.append(sh)
                    corrs.append(corr)
                    slots.append(idx)
            theta = np.concatenate(thetas)
            vals = integrand(theta.ravel(), np.concatenate(sins).ravel())
            vals = vals.reshape(vals.shape[:-1] + theta.shape)
            est = np.sum(vals * np.concatenate(corrs), axis=-1)
            order = np.concatenate(slots)
            out = np.empty_like(est)
            out[..., order] = est
            return np.moveaxis(out, -1, 0)

        edges = np.linspace(0.0, TWO_PI, q.panel_count + 1)
        edges[-1] = TWO_PI
        lo, hi = edges[:-1], edges[1:]
        coarse = panel_rules(lo, hi)
        # panels whose halves still need evaluating
        pending = np.ones(lo.size, dtype=bool)
        fine = np.zeros_like(coarse)
        left = np.zeros_like(coarse)
        right = np.zeros_like(coarse)
        e = np.zeros(lo.size)
        tail = tuple(range(1, coarse.ndim))

        total = err = None
        for _ in range(q.max_refinements + 1):
            idx = np.flatnonzero(pending)
            if idx.size:
                mid = 0.5 * (lo[idx] + hi[idx])
                halves = panel_rules(np.concatenate([lo[idx], mid]), np.concatenate([mid, hi[idx]]))
                left[idx], right[idx] = halves[: idx.size], halves[idx.size:]
                fine[idx] = left[idx] + right[idx]
                e[idx] = np.max(np.abs(fine[idx] - coarse[idx]), axis=tail) if tail else \
                    np.abs(fine[idx] - coarse[idx])
                pending[idx] = False
            total = fine.sum(axis=0)
            magnitude = float(np.sum(np.max(np.abs(fine), axis=tail) if tail else np.abs(fine)))
            diff = float(e.sum())
            floor = 64 * np.finfo(float).eps * magnitude
            err = diff + floor
            # stop at the tolerance, or once refinement only moves roundoff
            if err <= tol or diff <= floor:
                return total, err
            split = (e > tol / lo.size) | (e == e.max())
            keep = ~split
            mid = 0.5 * (lo[split] + hi[split])
            lo = np.concatenate([lo[keep], lo[split], mid])
            hi = np.concatenate([hi[keep], mid, hi[split]])
            coarse = np.concatenate([coarse[keep], left[split], right[split]])
            blank = np.zeros_like(left[split])
            fine = np.concatenate([fine[keep], blank, blank])
            left = np.concatenate([left[keep], blank, blank])
            right = np.concatenate([right[keep], blank, blank])
            e = np.concatenate([e[keep], np.zeros(2 * int(split.sum()))])
            pending = np.concatenate([np.zeros(int(keep.sum()), dtype=bool),
                                      np.ones(2 * int(split.sum()), dtype=bool)])
        raise IntegrationError(
            f"no convergence after {q.max_refinements} refinements: "
            f"estimate {total!r}, error bound {err:.3g}",
            estimate=total, error=err,
        )


def integrate(psi: Measure, f, with_halfcircle_weight=False):
    """Integrate ``f(x)`` against ``dpsi`` or ``sqrt(1 - x^2) dpsi``."""
    mode = "halfcircle" if with_halfcircle_weight else "psi"
    value, _ = psi.quad_theta(lambda theta: f(np.cos(0.5 * theta)), mode=mode)
    return value
