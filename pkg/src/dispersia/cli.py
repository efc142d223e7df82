"""``dispersia`` command line.

Every subcommand writes CSV, JSON or plain text to ``--out`` (stdout by
default) and echoes one provenance comment line to stderr. Exit status is 1
for an invalid configuration and 2 when an enumeration budget is exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

from . import __version__
from ._errors import BudgetExceeded


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _range(text: str) -> list[int]:
    """``6:14`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _q(text: str) -> float:
    if text in ("inf", "infinity", "oo"):
        return math.inf
    q = float(text)
    if q < 1:
        raise argparse.ArgumentTypeError("q must be >= 1")
    return q


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dispersia", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"dispersia {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="-", help="output path ('-' for stdout)")
        return sp

    g = common(sub.add_parser("gen", help="write a point set"))
    g.add_argument("--family", choices=("fibonacci", "frolov"), required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--a", type=float)
    g.add_argument("--d", type=int, default=2)

    g = common(sub.add_parser("disp", help="dispersion decay table"))
    g.add_argument("--family", choices=("fibonacci", "frolov"), required=True)
    g.add_argument("--n-range", type=_range)
    g.add_argument("--a-list", type=_floats)
    g.add_argument("--d", type=int, default=2)
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--sampled", action="store_true")
    g.add_argument("--trials", type=int, default=100_000)

    g = common(sub.add_parser("gamma", help="certified gamma_n"))
    g.add_argument("--n-range", type=_range, required=True)
    g.add_argument("--search-bound", type=int)

    g = common(sub.add_parser("sigma", help="sigma-sum bound ratios"))
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--trials", type=int, default=500)
    g.add_argument("--v-max", type=int, default=24)

    g = common(sub.add_parser("discrepancy", help="smooth fixed-volume discrepancy sweep"))
    g.add_argument("--family", choices=("fibonacci", "frolov"), required=True)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--n-range", type=_range)
    g.add_argument("--a-list", type=_floats)
    g.add_argument("--multipliers", type=_range, default=list(range(6)))
    g.add_argument("--grid", type=int, default=24)
    g.add_argument("--aspects", type=int, default=17)

    g = common(sub.add_parser("cubature-error", help="Frolov error series on random hats"))
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--a", type=float, required=True)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--boxes", type=int, default=20)
    g.add_argument("--v-max", type=int, help="defaults to first active level + 10")

    g = common(sub.add_parser("discretize", help="Marcinkiewicz ratio sweep"))
    g.add_argument("--nodes", required=True,
                   help="fibonacci:N or frolov:D:A")
    g.add_argument("--q", type=_q, action="append",
                   help="norm index (repeatable; 'inf' allowed)")
    g.add_argument("--r-total", type=int, required=True)
    g.add_argument("--trials", type=int, default=200)
    g.add_argument("--waive", action="store_true",
                   help="evaluate rectangles that fail exactness as well")
    return p


# ---------------------------------------------------------------------------

def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise ConfigError(f"--{n.replace('_', '-')} is required here")


def _params(args):
    if args.family == "fibonacci":
        _need(args, "n_range")
        return args.n_range
    _need(args, "a_list")
    return args.a_list


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def cmd_gen(args) -> str:
    from .geometry import fibonacci_set, frolov_matrix, frolov_set
    if args.family == "fibonacci":
        _need(args, "n")
        return fibonacci_set(args.n).to_text()
    _need(args, "a")
    return frolov_set(frolov_matrix(args.d), args.a).to_text()


def cmd_disp(args) -> str:
    from .dispersion import DECAY_COLUMNS, decay_report, rows_to_csv
    mode = "sampled" if args.sampled else "exact"
    rows = decay_report(args.family, _params(args), d=args.d, mode=mode,
                        trials=args.trials, seed=args.seed)
    return rows_to_csv(rows, DECAY_COLUMNS)


def cmd_gamma(args) -> str:
    from .cubature import estimate_gamma
    from .geometry import fibonacci_number
    lines = ["n,b_n,min_product,gamma,gamma_float"]
    for n in args.n_range:
        g = estimate_gamma(n, args.search_bound)
        bn = fibonacci_number(n)
        lines.append(f"{n},{bn},{g.numerator * bn // g.denominator},{g},{float(g):.17g}")
    return "\n".join(lines) + "\n"


def cmd_sigma(args) -> str:
    from .hatfun import sigma_reports_csv, verify_sigma_lemma
    reps = verify_sigma_lemma(args.r, args.d, args.trials, args.seed, v_max=args.v_max)
    return sigma_reports_csv(reps)


def cmd_discrepancy(args) -> str:
    from .discrepancy import discrepancy_decay_report, rows_to_csv
    rows = discrepancy_decay_report(args.family, args.r, _params(args), args.multipliers,
                                    grid=args.grid, aspects=args.aspects, seed=args.seed)
    return rows_to_csv(rows)


def cmd_cubature_error(args) -> str:
    from .cubature import first_active_level, frolov_error_series, random_hat_boxes
    from .geometry import frolov_matrix, frolov_set
    lat = frolov_matrix(args.d)
    v_max = args.v_max if args.v_max is not None else first_active_level(args.a, args.d) + 10
    pts = frolov_set(lat, args.a)
    recs = [frolov_error_series(lat, args.a, sp, v_max, points=pts).to_record()
            for sp in random_hat_boxes(args.d, args.r, args.boxes, args.seed)]
    return _json(recs)


def _nodes(spec: str):
    from .cubature import fibonacci_rule, frolov_rule
    from .geometry import frolov_matrix
    parts = spec.split(":")
    try:
        if parts[0] == "fibonacci" and len(parts) == 2:
            return fibonacci_rule(int(parts[1]))
        if parts[0] == "frolov" and len(parts) == 3:
            return frolov_rule(frolov_matrix(int(parts[1])), float(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"bad --nodes {spec!r}: {exc}") from exc
    raise ConfigError(f"bad --nodes {spec!r}; use fibonacci:N or frolov:D:A")


def cmd_discretize(args) -> str:
    from .discretization import universality_sweep
    rule = _nodes(args.nodes)
    w = rule.weights
    if rule.convention == "line":
        w = w / w.sum()   # probability weights on the torus
    qs = args.q or [1.0, 2.0, math.inf]
    sums = universality_sweep(rule.nodes, w, args.r_total, rule.nodes.d, qs,
                              args.trials, args.seed, waive=args.waive)
    return _json([s.to_record() for s in sums])


COMMANDS = {"gen": cmd_gen, "disp": cmd_disp, "gamma": cmd_gamma, "sigma": cmd_sigma,
            "discrepancy": cmd_discrepancy, "cubature-error": cmd_cubature_error,
            "discretize": cmd_discretize}


def config_hash(args) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _threads():
    raw = os.environ.get("DISPERSIA_THREADS")
    if raw is None:
        return None
    try:
        val = int(raw)
    except ValueError:
        val = 0
    if val < 1:
        raise ConfigError("DISPERSIA_THREADS must be a positive integer")
    return val


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _threads()
        text = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"dispersia: error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"dispersia: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OverflowError) as exc:
        print(f"dispersia: error: {exc}", file=sys.stderr)
        return 1
    print(f"# dispersia {__version__} config={config_hash(args)}", file=sys.stderr)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
