"""Invariant suites used by the ``verify`` command and the acceptance tests.

Each suite returns a :class:`Report` of named checks, every one a measured
residual compared against a tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_gegenbauer

from .measure import Measure
from .omega import OmegaFunction
from .opuc import (chain_from_table, chain_parameters, khat_from_recurrence,
                   khat_moment_residuals, khat_via_bridge, szego_verify, verblunsky)
from .quadrature import (apply_even, apply_odd, build_rule, exactness_degree,
                         random_class_element)
from .recurrence import example2_coeffs, example2_rho, generate
from .selfinv import SelfInversivePoly, divide, omega_to_selfinv, selfinv_to_omega
from .zeros import check_interlacing, find_zeros

DEFAULT_SEED = 0x5EED
SUITES = ("orthogonality", "quadrature", "chain", "opuc", "bridge", "zeros")


@dataclass
class Check:
    name: str
    value: float
    tol: float
    # "le": value <= tol, "gt": value > tol
    kind: str = "le"

    @property
    def passed(self):
        v = float(self.value)
        if not np.isfinite(v):
            return False
        return v <= self.tol if self.kind == "le" else v > self.tol

    def to_dict(self):
        return {"name": self.name, "value": float(self.value), "tol": self.tol,
                "kind": self.kind, "passed": self.passed}


@dataclass
class Report:
    suite: str
    params: dict
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name, value, tol, kind="le"):
        self.checks.append(Check(name, float(value), tol, kind))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {"suite": self.suite, "params": self.params, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks], "notes": self.notes}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            op = "<=" if c.kind == "le" else ">"
            lines.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.name}: {c.value:.3e} {op} {c.tol:.1e}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def _params(psi, **kw):
    return {"measure": psi.to_config() if psi is not None else None, **kw}


def _gegenbauer_params(psi: Measure):
    """``(lambda, eta)`` when the measure belongs to the closed-form family."""
    if psi.kind != "builtin":
        return None
    if psi.name == "gegenbauer_eta":
        p = dict(psi.params)
        return (p["lambda"], p["eta"]) if p["lambda"] >= 0.5 else None
    if psi.name == "lebesgue":
        return 1.0, 0.0
    if psi.name == "chebyshev1":
        return 0.5, 0.0
    return None


# -- orthogonality ---------------------------------------------------------------


def orthogonality_suite(psi: Measure, N=12, tol=1e-8, seed=DEFAULT_SEED):
    rep = Report("orthogonality", _params(psi, N=N, tol=tol, seed=seed))
    table = generate(psi, N)
    beta, alpha, rho = table.beta_hat, table.alpha_hat, table.rho_hat
    n = N + 1

    def grams(theta):
        w = table.values_theta(theta, N)
        x = np.cos(0.5 * theta)
        s = np.sin(0.5 * theta)
        outer = w[:, None, :] * w[None, :, :]
        return np.stack([outer, outer * s, outer * x * s, outer * s * s])

    g, _ = psi.quad_theta(grams, mode="psi")
    g_psi, g_half, g_xs, g_ss = g
    d_psi = np.sqrt(np.diag(g_psi))
    d_half = np.sqrt(np.diag(g_half))

    even_worst = odd_worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if (j - i) % 2 == 0:
                even_worst = max(even_worst, abs(g_half[i, j]) / (d_half[i] * d_half[j]))
            else:
                odd_worst = max(odd_worst, abs(g_psi[i, j]) / (d_psi[i] * d_psi[j]))
    rep.add("same-parity orthogonality against sqrt(1-x^2) dpsi", even_worst, tol)
    rep.add("opposite-parity orthogonality against dpsi", odd_worst, tol)
    rep.add("rho matches the Gram diagonal", np.max(np.abs(np.diag(g_half) - rho) / rho), tol)
    rep.add("rho positive (min)", float(np.min(rho)), 0.0, "gt")
    rep.add("alpha positive (min)", float(np.min(alpha[2:])), 0.0, "gt")
    rep.add("alpha: ratio formula vs direct integral",
            np.max(np.abs(alpha[2:] - table.alpha_hat_direct[2:]) / alpha[2:]), tol)

    # further orthogonality values (k = 0) and vanishing (k >= 1)
    val_worst = van_worst = 0.0
    for m in range(2, N):
        sc = np.sqrt(rho[m - 1] * rho[m])
        den = 1.0 + beta[m] ** 2
        exp_xs = rho[m] * (1.0 - beta[m] * beta[m + 1]) / den
        exp_ss = -rho[m] * (beta[m] + beta[m + 1]) / den
        val_worst = max(val_worst, abs(g_xs[m - 1, m] - exp_xs) / sc, abs(g_ss[m - 1, m] - exp_ss) / sc)
        for k in range(1, (m - 1) // 2 + 1):
            j = m - 1 - 2 * k
            sc = np.sqrt(rho[j] * rho[m])
            van_worst = max(van_worst, abs(g_xs[j, m]) / sc, abs(g_ss[j, m]) / sc)
    rep.add("x s and (1-x^2) products with the previous order", val_worst, tol)
    rep.add("x s and (1-x^2) products with lower orders vanish", van_worst, tol)

    # parity-constrained polynomial moments
    def poly_moments(theta):
        w = table.values_theta(theta, N)
        x = np.cos(0.5 * theta)
        s = np.sin(0.5 * theta)
        rows = []
        for m in range(1, n):
            for p in range(m - 1, -1, -2):
                rows += [x**p * w[m], x**p * x**p, w[m] * w[m]]
            for p in range(m - 2, -1, -2):
                rows += [x**p * w[m] * s, x**p * x**p * s, w[m] * w[m] * s]
        return np.stack(rows)

    pm, _ = psi.quad_theta(poly_moments, mode="psi")
    trip = pm.reshape(-1, 3)
    rep.add("moments of W_m against lower parity-matched monomials",
            np.max(np.abs(trip[:, 0]) / np.sqrt(trip[:, 1] * trip[:, 2])), tol)

    # unimodular moments
    def unimodular(theta):
        w = table.values_theta(theta, N)
        rows = []
        for m in range(1, n):
            for s in range(m):
                e = np.exp(0.5j * (-m + 1 + 2 * s) * theta) * w[m]
                rows += [e.real, e.imag]
            rows.append(np.abs(w[m]))
        return np.stack(rows)

    um, _ = psi.quad_theta(unimodular, mode="psi")
    worst = 0.0
    pos = 0
    for m in range(1, n):
        vals = um[pos: pos + 2 * m]
        scale = um[pos + 2 * m]
        pos += 2 * m + 1
        worst = max(worst, float(np.max(np.hypot(vals[0::2], vals[1::2]))) / scale)
    rep.add("unimodular power moments vanish", worst, tol)

    lead = np.array([f.lead_factor for f in table.functions])
    prod = np.cumprod(np.concatenate([[1.0], 1.0 + beta[1:] ** 2]))
    rep.add("lead factor equals the product of (1 + beta^2)", np.max(np.abs(lead - prod) / prod), tol)

    gp = _gegenbauer_params(psi)
    if gp is not None:
        lam, eta = gp
        cb = np.array([example2_coeffs(lam, eta, m)[0] for m in range(1, N + 1)])
        ca = np.array([example2_coeffs(lam, eta, m)[1] for m in range(1, N)])
        cr = np.array([example2_rho(lam, eta, m) for m in range(N + 1)])
        bscale = np.maximum(np.abs(cb), 1.0) if eta == 0 else np.abs(cb)
        rep.add("beta matches the closed form", np.max(np.abs(beta[1:] - cb) / bscale), tol)
        rep.add("alpha matches the closed form", np.max(np.abs(alpha[2:] - ca) / ca), tol)
        rep.add("rho matches the closed form", np.max(np.abs(rho - cr) / cr), tol)
    return rep


# -- quadrature -------------------------------------------------------------------


def quadrature_suite(psi: Measure, N=3, tol=1e-9, weight_tol=1e-10, samples=50, seed=DEFAULT_SEED):
    """Rules of order ``1..2N+1`` against direct integration of random class elements."""
    rep = Report("quadrature", _params(psi, N=N, tol=tol, weight_tol=weight_tol,
                                       samples=samples, seed=seed))
    rng = np.random.default_rng(seed)
    top = 2 * N + 1
    table = generate(psi, max(2 * top, 2))
    worst_even = worst_odd = worst_weights = worst_const = 0.0
    min_weight = np.inf
    sharp = []
    for m in range(1, top + 1):
        rule = build_rule(table, m, check=False)
        worst_weights = max(worst_weights, rule.identity_defect())
        min_weight = min(min_weight, float(rule.lam.min()))
        mode = "psi" if m % 2 == 0 else "halfcircle"
        apply = apply_even if m % 2 == 0 else apply_odd
        if m % 2 == 1:
            # constants lie in Omega_d only for even d
            total, _ = psi.quad_theta(lambda th: np.ones_like(th), mode=mode)
            worst_const = max(worst_const, abs(apply(rule, lambda th: np.ones_like(th)) - total) / total)
        d = exactness_degree(m)
        for _ in range(samples):
            e = random_class_element(table, d, rng)
            vals, _ = psi.quad_theta(lambda th: np.stack([e(th), np.abs(e(th))]), mode=mode)
            r = abs(apply(rule, e) - vals[0]) / vals[1]
            if m % 2 == 0:
                worst_even = max(worst_even, r)
            else:
                worst_odd = max(worst_odd, r)
        e = random_class_element(table, d + 1, rng)
        vals, _ = psi.quad_theta(lambda th: np.stack([e(th), np.abs(e(th))]), mode=mode)
        sharp.append(abs(apply(rule, e) - vals[0]) / vals[1])
    rep.add("even rules on their exactness class", worst_even, tol)
    rep.add("odd rules on their exactness class", worst_odd, tol)
    rep.add("constants integrated exactly by odd rules", worst_const, tol)
    rep.add("weight identities vs direct integrals", worst_weights, weight_tol)
    rep.add("smallest weight lambda_k", min_weight, 0.0, "gt")
    rep.notes.append("one degree beyond the class, largest relative deviation "
                     f"{max(sharp):.3e} (the class is sharp when this exceeds 1e-6)")
    return rep


# -- chain sequences --------------------------------------------------------------


def chain_suite(psi: Measure, N=12, tol=1e-10, seed=DEFAULT_SEED):
    if not psi.integrability_flag:
        raise ValueError("the chain-sequence suite needs int (1-x^2)^(-1/2) dpsi to be finite")
    rep = Report("chain", _params(psi, N=N, tol=tol, seed=seed))
    table = generate(psi, N)
    ch = chain_from_table(table)
    rep.add("chain identities for both parameter sequences", ch.identity_defect(), tol)
    inner = np.concatenate([ch.minimal[1:], ch.maximal])
    rep.add("parameters inside (0, 1): distance to the boundary",
            float(min(inner.min(), 1.0 - inner.max())), 0.0, "gt")
    rep.add("minimal below maximal (min of G_k - g_k)",
            float(np.min(ch.maximal - ch.minimal)), -tol, "gt")
    rep.add("maximal and minimal differ (G_1 - g_1)", ch.gap, 1e-6, "gt")
    if np.max(np.abs(ch.alpha - 0.25)) < 1e-12:
        rep.notes.append("alpha is the constant 1/4 chain sequence")
    rep.notes.append(f"M_1 = {ch.M(1):.15g} (maximal sequence anchored at the first circle moment)")
    c = ch.alpha
    if c[-1] <= 0.25:
        tr = chain_parameters(c, tail="truncate")
        est = np.array([h[1] for h in tr.history])
        rep.add("truncated estimates of M_1 do not increase with depth",
                float(np.max(np.diff(est), initial=0.0)), 1e-12)
        rep.notes.append(f"truncated estimate of M_1 at depth {tr.trunc_depth}: {tr.maximal[0]:.15g}")
    else:
        rep.notes.append("last alpha exceeds 1/4; a constant tail is not a chain sequence, "
                         "so the truncation check is skipped")
    gp = _gegenbauer_params(psi)
    if gp is not None:
        lam = gp[0]
        closed = np.array([(m + 2 * lam - 2) / (2 * (m + lam - 1)) for m in range(1, ch.maximal.size + 1)])
        rep.add("maximal parameters match the closed form", np.max(np.abs(ch.maximal - closed)), 1e3 * tol)
    return rep


# -- unit circle ---------------------------------------------------------------------


def opuc_suite(psi: Measure, N=6, tol=1e-10, moment_tol=1e-9, szego_N=5, szego_tol=1e-8,
               cd_tol=1e-7, ts=(0.0, 0.3, 0.9), seed=DEFAULT_SEED):
    if not psi.integrability_flag:
        raise ValueError("the unit-circle suite needs int (1-x^2)^(-1/2) dpsi to be finite")
    rep = Report("opuc", _params(psi, N=N, ts=list(ts), seed=seed))
    table = generate(psi, max(N, szego_N, 12))
    ks = khat_from_recurrence(table, table.N, verify=False, seed=seed)
    worst = max(float(np.max(np.abs(ks[m].k - khat_via_bridge(table, m).k)) / np.max(np.abs(ks[m].k)))
                for m in range(table.N + 1))
    rep.add("K_m recurrence vs 2^m times the bridge image", worst, tol)

    worst = max(float(np.max(khat_moment_residuals(ks[m], psi))) for m in range(1, N + 1))
    rep.add("circle moments of K_m (1 - z) vanish", worst, moment_tol)
    k = ks[min(3, N)]
    bumped = SelfInversivePoly(k.m, k.k + np.eye(k.m + 1)[0] * 1e-3)
    rep.add("perturbed K_m gives a visible moment residual",
            float(np.max(khat_moment_residuals(bumped, psi))), 1e-5, "gt")

    ch = chain_from_table(table)
    rep.add("chain identities", ch.identity_defect(), tol)
    rep.add("maximal and minimal differ (G_1 - g_1)", ch.gap, 1e-6, "gt")

    a0 = []
    for t in ts:
        vs = verblunsky(ch, table.beta_hat, t)
        a0.append(vs.a[0])
        rep.add(f"t={t}: largest |a_m| below 1", float(np.max(np.abs(vs.a))), 1.0 - 1e-15)
        rep.add(f"t={t}: |tau_m| = 1", float(np.max(np.abs(np.abs(vs.tau) - 1.0))), tol)
        b = table.beta_hat[1: vs.a.size + 1]
        mod = np.abs(1.0 - 2.0 * vs.frak_m[1:] - 1j * b) / np.abs(1.0 - 1j * b)
        rep.add(f"t={t}: |a_m| from the unimodular factorization", float(np.max(np.abs(mod - np.abs(vs.a)))), tol)
        res = szego_verify(vs, psi, szego_N, table, seed=seed)
        rep.add(f"t={t}: Szego orthogonality (N={szego_N})", res["orthogonality"], szego_tol)
        rep.add(f"t={t}: -conj(S_m(0)) reproduces a_(m-1)", res["constant_term"], tol)
        rep.add(f"t={t}: kernel/K_m ratio spread", res["cd_ratio"], cd_tol)
    rep.add("jump changes a_0 (min gap between t values)",
            float(min(abs(a0[i + 1] - a0[i]) for i in range(len(a0) - 1))) if len(a0) > 1 else 1.0,
            0.0, "gt")
    return rep


# -- bridge and division -------------------------------------------------------------


def _random_omega(rng, m):
    return OmegaFunction(m, rng.uniform(-1, 1, m + 1), rng.uniform(-1, 1, m))


def bridge_suite(psi=None, N=20, tol=1e-12, samples=100, seed=DEFAULT_SEED, division_tol=1e-10):
    rep = Report("bridge", _params(psi, N=N, tol=tol, samples=samples, seed=seed))
    rng = np.random.default_rng(seed)
    rt = sq = k0 = 0.0
    theta = rng.uniform(0.0, 2.0 * np.pi, 100)
    z = np.exp(1j * theta)
    for _ in range(samples):
        m = int(rng.integers(0, N + 1))
        f = _random_omega(rng, m)
        q = omega_to_selfinv(f)
        back = selfinv_to_omega(q)
        scale = max(np.max(np.abs(f.b0)), np.max(np.abs(f.b1), initial=0.0))
        rt = max(rt, max(np.max(np.abs(back.b0 - f.b0)), np.max(np.abs(back.b1 - f.b1), initial=0.0)) / scale)
        q2 = q.symmetrized()
        back2 = omega_to_selfinv(selfinv_to_omega(q2))
        rt = max(rt, float(np.max(np.abs(back2.k - q2.k))) / float(np.max(np.abs(q2.k))))
        fx = f.eval_theta(theta)
        sq = max(sq, float(np.max(np.abs(np.abs(q(z)) ** 2 - fx**2))) / max(float(np.max(fx**2)), 1e-300))
        a0, a1 = f.leading
        k0 = max(k0, abs(q.k[0] - 2.0**-m * complex(a0, a1)) / max(2.0**-m * np.hypot(a0, a1), 1e-300))
    rep.add(f"round trip on {samples} random functions of degree <= {N}", rt, tol)
    rep.add("|Q(exp(i theta))|^2 = f(x)^2", sq, 1e-10)
    rep.add("leading self-inversive coefficient", k0, tol)

    x = np.linspace(-1.0, 1.0, 200)
    for case in ("even", "odd"):
        worst = 0.0
        degree_ok = True
        for m in (1, 2, 3):
            n = 2 * m if case == "even" else 2 * m + 1
            top = 4 * m - 1 if case == "even" else 4 * m
            for _ in range(samples):
                e = _random_omega(rng, top)
                w = _random_omega(rng, n)
                f, g = divide(e, w, case)
                degree_ok &= f.m == 2 * m - 1 and g.m == (2 * m - 1 if case == "even" else 2 * m)
                ex = e(x)
                worst = max(worst, float(np.max(np.abs(ex - f(x) * w(x) - g(x)))) / float(np.max(np.abs(ex))))
        rep.add(f"division residual ({case} case)", worst, division_tol)
        rep.add(f"division degree bounds ({case} case), 0 = ok", 0.0 if degree_ok else 1.0, 0.0)
    return rep


# -- zeros ----------------------------------------------------------------------------


def zeros_suite(psi: Measure, N=12, tol=1e-9, seed=DEFAULT_SEED):
    rep = Report("zeros", _params(psi, N=N, tol=tol, seed=seed))
    table = generate(psi, N + 1)
    sets = [find_zeros(table, m) for m in range(1, N + 2)]
    rep.add("orders with a wrong zero count", sum(len(z) != z.m for z in sets), 0.0)
    inside = min(float(min(1.0 - z.x.max(), z.x.min() + 1.0)) for z in sets)
    rep.add("distance of zeros from the endpoints", inside, 0.0, "gt")
    rep.add("largest scaled residual at a zero", max(float(np.max(z.residuals)) / z.scale for z in sets), 1e-12)
    bad = sum(not check_interlacing(sets[i], sets[i + 1]) for i in range(N))
    rep.add("consecutive orders failing to interlace", bad, 0.0)
    rep.add("W_1 zero vs beta_1/sqrt(1+beta_1^2)",
            abs(sets[0].x[0] - table.beta_hat[1] / np.sqrt(1.0 + table.beta_hat[1] ** 2)), 1e-13)
    gp = _gegenbauer_params(psi)
    if gp is not None and gp[1] == 0.0:
        lam = gp[0]
        worst = 0.0
        for z in sets:
            ref = np.sort(roots_gegenbauer(z.m, lam)[0])
            worst = max(worst, float(np.max(np.abs(z.x - ref))))
        rep.add(f"zeros vs classical Gegenbauer C^({lam:g}) zeros", worst, tol)
    return rep


RUNNERS = {
    "orthogonality": orthogonality_suite,
    "quadrature": quadrature_suite,
    "chain": chain_suite,
    "opuc": opuc_suite,
    "bridge": bridge_suite,
    "zeros": zeros_suite,
}


def run_suite(name, psi=None, N=None, tol=None, seed=DEFAULT_SEED):
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    kw = {"seed": seed}
    if N is not None:
        kw["N"] = N
    if tol is not None:
        kw["tol"] = tol
    if name != "bridge" and psi is None:
        raise ValueError(f"suite {name!r} needs a measure")
    return RUNNERS[name](psi, **kw)
