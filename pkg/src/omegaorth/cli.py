"""Command-line front end.

Exit status: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .measure import Measure
from .opuc import NotChainSequenceError, chain_from_table, verblunsky
from .plot import svg_plot
from .quadrature import build_rule
from .recurrence import generate
from .verify import DEFAULT_SEED, SUITES, run_suite
from .zeros import find_zeros

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("coeffs", "eval", "zeros", "quad", "verblunsky", "verify", "plot")
DEFAULT_MEASURE = {"kind": "builtin", "name": "one_minus_x"}


class UsageError(Exception):
    pass


def parse_seed(text):
    try:
        return int(str(text), 0)
    except ValueError:
        try:
            return int(str(text), 16)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None


def parse_list(text, kind=float):
    if isinstance(text, (list, tuple)):
        return [kind(v) for v in text]
    return [kind(v) for v in str(text).replace(",", " ").split()]


def load_measure(spec):
    """Measure from a dict, inline JSON, a JSON file path, or a builtin name."""
    if spec is None:
        spec = DEFAULT_MEASURE
    if isinstance(spec, str):
        text = spec.strip()
        if not text.startswith("{") and not Path(text).exists():
            return Measure.builtin(text)
    return Measure.from_config(spec)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--measure", help="measure as inline JSON, a JSON file, or a builtin name")
    common.add_argument("--config", help="JSON file with run settings; flags override it")
    common.add_argument("--n", type=int, help="order or table depth")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json", "svg"))
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("--seed", type=parse_seed, help="random seed, hex or decimal (default 0x5EED)")

    parser = argparse.ArgumentParser(prog="omegaorth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("coeffs", parents=[common], help="recurrence coefficient table")

    p = sub.add_parser("eval", parents=[common], help="evaluate W_n at points of [-1, 1]")
    p.add_argument("--x", action="append", help="evaluation points (repeatable or comma separated)")
    p.add_argument("--points", type=int, help="number of equally spaced points (default 11)")

    sub.add_parser("zeros", parents=[common], help="zeros of W_n")
    sub.add_parser("quad", parents=[common], help="order-n quadrature rule")

    p = sub.add_parser("verblunsky", parents=[common], help="Verblunsky coefficients a_0..a_(n-1)")
    p.add_argument("--t", action="append", help="jump sizes in [0, 1) (default 0, 0.3, 0.9)")
    p.add_argument("--tail", choices=("anchored", "constant", "truncate"))

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", nargs="?", choices=SUITES)

    p = sub.add_parser("plot", parents=[common], help="SVG plot of selected orders")
    p.add_argument("--orders", help="comma separated orders (default 3,4,5)")
    p.add_argument("--samples", type=int, help="points per curve (default 800)")
    p.add_argument("--zeros", action="store_true", default=None, help="mark zeros")
    return parser


def resolve(args):
    """Merge flags over the config file; returns a plain dict of settings."""
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        if cfg.get("command", args.command) != args.command:
            raise UsageError(f"config is for command {cfg['command']!r}, not {args.command!r}")
    out = dict(cfg)
    for key, val in vars(args).items():
        if key != "config" and val is not None:
            out[key] = val
    if "seed" in out:
        out["seed"] = parse_seed(out["seed"])
    else:
        out["seed"] = DEFAULT_SEED
    return out


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, str)) else f"{v:.15g}" for v in row])
    return buf.getvalue()


def _fmt(cfg, allowed, default):
    fmt = cfg.get("format", default)
    if fmt not in allowed:
        raise UsageError(f"format {fmt!r} is not available here; use one of {allowed}")
    return fmt


def _order(cfg, default, low=0):
    n = int(cfg.get("n", default))
    if n < low:
        raise UsageError(f"--n must be at least {low}")
    return n


def cmd_coeffs(cfg):
    psi = load_measure(cfg.get("measure"))
    table = generate(psi, _order(cfg, 6, 1))
    if _fmt(cfg, ("csv", "json"), "csv") == "json":
        return json.dumps(table.to_dict(), indent=2), EXIT_OK
    return table.to_csv(), EXIT_OK


def cmd_eval(cfg):
    psi = load_measure(cfg.get("measure"))
    m = _order(cfg, 3)
    if cfg.get("x"):
        xs = []
        for item in cfg["x"] if isinstance(cfg["x"], list) else [cfg["x"]]:
            xs += parse_list(item)
        x = np.array(xs)
    else:
        x = np.linspace(-1.0, 1.0, int(cfg.get("points", 11)))
    if np.any(np.abs(x) > 1.0):
        raise UsageError("evaluation points must lie in [-1, 1]")
    table = generate(psi, max(m, 1))
    values = table.evaluate(m, x)
    if _fmt(cfg, ("csv", "json"), "csv") == "json":
        doc = {"m": m, "x": x.tolist(), "values": np.asarray(values).tolist(),
               "function": table.function(m).to_dict(), "measure": psi.to_config()}
        return json.dumps(doc, indent=2), EXIT_OK
    return _csv(["x", "value"], zip(x, values)), EXIT_OK


def cmd_zeros(cfg):
    psi = load_measure(cfg.get("measure"))
    m = _order(cfg, 4, 1)
    zs = find_zeros(generate(psi, m), m)
    if _fmt(cfg, ("csv", "json"), "csv") == "json":
        return json.dumps(zs.to_dict(), indent=2), EXIT_OK
    return zs.to_csv(), EXIT_OK


def cmd_quad(cfg):
    psi = load_measure(cfg.get("measure"))
    m = _order(cfg, 4, 1)
    rule = build_rule(generate(psi, m), m)
    if _fmt(cfg, ("csv", "json"), "csv") == "json":
        return json.dumps(rule.to_dict(), indent=2), EXIT_OK
    return rule.to_csv(), EXIT_OK


def cmd_verblunsky(cfg):
    psi = load_measure(cfg.get("measure"))
    n = _order(cfg, 5, 1)
    ts = []
    for item in cfg.get("t") or ["0,0.3,0.9"]:
        ts += parse_list(item)
    if not psi.integrability_flag:
        raise UsageError("the measure does not integrate (1 - x^2)^(-1/2); Verblunsky data is unavailable")
    table = generate(psi, max(n, 2))
    chain = chain_from_table(table, tail=cfg.get("tail"))
    seqs = [verblunsky(chain, table.beta_hat, t, n) for t in ts]
    if _fmt(cfg, ("csv", "json"), "csv") == "json":
        doc = {"measure": psi.to_config(), "tail": chain.tail, "M1": chain.M(1),
               "sequences": [s.to_dict() for s in seqs]}
        return json.dumps(doc, indent=2), EXIT_OK
    rows = [(s.t, m, a.real, a.imag) for s in seqs for m, a in enumerate(s.a)]
    return _csv(["t", "m", "re", "im"], rows), EXIT_OK


def cmd_verify(cfg):
    suite = cfg.get("suite")
    if suite not in SUITES:
        raise UsageError(f"choose a suite from {SUITES}")
    psi = None if suite == "bridge" and "measure" not in cfg else load_measure(cfg.get("measure"))
    if psi is not None and suite in ("chain", "opuc") and not psi.integrability_flag:
        raise UsageError(f"suite {suite!r} needs a measure that integrates (1 - x^2)^(-1/2)")
    report = run_suite(suite, psi, N=cfg.get("n"), tol=cfg.get("tol"), seed=cfg["seed"])
    code = EXIT_OK if report.passed else EXIT_VERIFY
    if _fmt(cfg, ("csv", "json"), "json") == "csv":
        rows = [(c.name, c.value, c.tol, c.kind, "pass" if c.passed else "fail") for c in report.checks]
        return _csv(["check", "value", "tol", "kind", "result"], rows), code, report.to_text()
    return report.to_json(), code, report.to_text()


def cmd_plot(cfg):
    psi = load_measure(cfg.get("measure"))
    orders = parse_list(cfg.get("orders", "3,4,5"), int)
    _fmt(cfg, ("svg",), "svg")
    table = generate(psi, max(max(orders), 1))
    svg = svg_plot(table, orders, samples=int(cfg.get("samples", 800)), zeros=bool(cfg.get("zeros")))
    return svg, EXIT_OK


HANDLERS = {"coeffs": cmd_coeffs, "eval": cmd_eval, "zeros": cmd_zeros, "quad": cmd_quad,
            "verblunsky": cmd_verblunsky, "verify": cmd_verify, "plot": cmd_plot}


def run(cfg, stdout=None, stderr=None):
    """Execute one command from a resolved settings dict; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        result = HANDLERS[cfg["command"]](cfg)
    except (UsageError, NotChainSequenceError) as exc:
        code = EXIT_NUMERIC if isinstance(exc, NotChainSequenceError) else EXIT_USAGE
        print(f"error: {exc}", file=stderr)
        return code
    except ArithmeticError as exc:
        print(f"numeric failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    text, code = result[0], result[1]
    out = cfg.get("out")
    if out:
        Path(out).write_text(text)
        if len(result) > 2:
            print(result[2], file=stdout)
    elif len(result) > 2 and cfg.get("format") is None:
        # verify: human-readable report on stdout unless a format was requested
        print(result[2], file=stdout)
    else:
        stdout.write(text)
    return code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
