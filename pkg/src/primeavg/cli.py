"""Command-line surface: experiment sweeps with deterministic reports.

Every subcommand validates its flags, computes a report, and writes it as
CSV or JSON.  Reports are byte-identical across reruns and thread counts:
work units are mapped in a fixed order, floats are printed with 17
significant digits, and JSON keys are sorted.  Exit codes: 0 success,
1 usage or input error, 2 measured-constant drift or verification failure.

Frozen constants live in a JSON fixture (--fixtures); a measured value
drifting more than 25% from its frozen counterpart fails the run, and
--refreeze rewrites the stored values instead.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import ergodic, maximal, orlicz
from .characters import synthetic_exceptional
from .gauss import verify_quadratic_rows
from .multipliers import DEFAULT_S_MAX, approximation_error
from .ntheory import CapacityError, DomainError, sieve_primes

FLOAT_FMT = "%.17g"
DRIFT_TOLERANCE = 0.25


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % float(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return (FLOAT_FMT % z.real) + ("+" if z.imag >= 0 else "-") \
            + (FLOAT_FMT % abs(z.imag)) + "j"
    return str(x)


class _Parser(argparse.ArgumentParser):
    """argparse with the exit-code contract: usage errors exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parallel(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _write_report(args, meta: dict, columns: list[str], rows: list[list],
                  summary: dict) -> None:
    srows = [[_fmt(c) for c in row] for row in rows]
    smeta = {k: _fmt(v) for k, v in sorted(meta.items())}
    ssum = {k: _fmt(v) for k, v in sorted(summary.items())}
    if args.format == "json":
        doc = {"meta": smeta, "columns": columns, "rows": srows,
               "summary": ssum}
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for k, v in smeta.items():
            w.writerow([f"# {k}", v])
        w.writerow(columns)
        w.writerows(srows)
        for k, v in ssum.items():
            w.writerow([f"# {k}", v])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _check_frozen(args, key: str, value: float) -> int:
    """Compare a measured constant against the fixture; 0 ok, 2 on drift."""
    if not args.fixtures:
        if args.refreeze:
            sys.stderr.write("--refreeze needs --fixtures\n")
            return 1
        return 0
    path = Path(args.fixtures)
    data = {}
    if path.exists():
        data = json.loads(path.read_text())
    if args.refreeze:
        data[key] = FLOAT_FMT % value
        path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
        return 0
    if key not in data:
        sys.stderr.write(f"no frozen value for {key}; run with --refreeze to record\n")
        return 0
    old = float(data[key])
    drift = abs(value - old) / abs(old) if old != 0 else (0.0 if value == 0 else np.inf)
    if drift > DRIFT_TOLERANCE:
        sys.stderr.write(
            f"frozen-constant drift for {key}: stored {old:.6g}, "
            f"measured {value:.6g} ({drift:.1%} > {DRIFT_TOLERANCE:.0%})\n")
        return 2
    return 0


def _table(limit: int, args):
    return sieve_primes(limit, cache_dir=args.cache_dir)


# --- subcommands ---


def _cmd_gauss_verify(args) -> int:
    qs = list(range(1, args.q_max + 1))
    parts = _parallel(lambda q: list(verify_quadratic_rows(q, q_min=q)), qs,
                      args.threads)
    rows = [row for part in parts for row in part]
    failures = sum(1 for row in rows if not row[4])
    summary = {"checks": len(rows), "failures": failures,
               "max_err": max((row[3] for row in rows), default=0.0)}
    meta = {"command": "gauss-verify", "q_max": args.q_max, "seed": args.seed}
    _write_report(args, meta, ["q", "q0", "point", "abs_err", "pass"],
                  rows, summary)
    return 0 if failures == 0 else 2


def _cmd_multiplier_error(args) -> int:
    if args.n_min > args.n_max:
        raise DomainError("need n-min <= n-max")
    ns = list(range(args.n_min, args.n_max + 1))
    injection = None
    if args.inject_beta is not None:
        chi, beta = synthetic_exceptional(args.inject_q, args.inject_beta)
        injection = {args.inject_q: (chi, beta)}
    table = _table((1 << args.n_max) + 1, args)
    vals = _parallel(
        lambda n: approximation_error(n, args.grid, table, s_max=args.s_max,
                                      injection=injection),
        ns, args.threads)
    columns = ["n", "grid", "s_max", "sup_error"]
    rows = [[n, args.grid, args.s_max, v] for n, v in zip(ns, vals)]
    by_n = dict(zip(ns, vals))
    trend_ok = all(by_n[n + 4] < by_n[n] for n in ns if n + 4 in by_n)
    summary = {"trend_decreasing_by_4": trend_ok,
               "max_error": max(vals), "min_error": min(vals)}
    meta = {"command": "multiplier-error", "grid": args.grid,
            "n_min": args.n_min, "n_max": args.n_max, "seed": args.seed,
            "injected_beta": np.nan if args.inject_beta is None else args.inject_beta}
    _write_report(args, meta, columns, rows, summary)
    return 0


def _build_set(family: str, size: int, seed: int) -> maximal.Signal:
    if family == "interval":
        return maximal.Signal.interval(0, size)
    if family == "random":
        rng = np.random.default_rng(seed)
        vals = (rng.random(8 * size) < 0.125).astype(np.float64)
        if vals.sum() == 0:
            vals[0] = 1.0
        return maximal.Signal(offset=0, values=vals)
    if family == "primes":
        table = sieve_primes(max(size, 8))
        return maximal.Signal.indicator(table.primes_upto(size))
    if family == "ap":
        return maximal.Signal.indicator(1 + 3 * np.arange(size))
    raise DomainError(f"unknown set family: {family}")


def _cmd_weak_type(args) -> int:
    F = _build_set(args.family, args.size, args.seed)
    table = _table((1 << args.n_max) + 1, args)
    lam = np.asarray(args.lambda_grid, dtype=np.float64)
    report = maximal.weak_type_sweep(F, lam, args.n_max, table)
    columns = ["lambda", "count", "normalized"]
    rows = [[l, c, z] for l, c, z in
            zip(report.lambda_grid, report.counts, report.normalized)]
    summary = {"set_size": report.set_size,
               "max_normalized": report.max_normalized}
    meta = {"command": "weak-type-sweep", "family": args.family,
            "size": args.size, "n_max": args.n_max, "seed": args.seed,
            "grid": ",".join(_fmt(l) for l in lam)}
    _write_report(args, meta, columns, rows, summary)
    return _check_frozen(args, f"weak_type/{args.family}/{args.size}",
                         report.max_normalized)


def _cmd_lp_sweep(args) -> int:
    table = _table((1 << args.n_max) + 1, args)

    def unit(seed: int):
        rng = np.random.default_rng(seed)
        f = maximal.random_signal(rng, args.support)
        return [(seed, p, maximal.lp_maximal_ratio(f, p, args.n_max, table))
                for p in args.p_list]

    results = _parallel(unit, list(range(args.seed, args.seed + args.seeds)),
                        args.threads)
    rows = [list(r) for part in results for r in part]
    worst: dict[float, float] = {}
    for _, p, ratio in rows:
        worst[p] = max(worst.get(p, 0.0), ratio)
    summary = {f"max_ratio_p={_fmt(p)}": v for p, v in sorted(worst.items())}
    meta = {"command": "lp-sweep", "seed": args.seed, "seeds": args.seeds,
            "support": args.support, "n_max": args.n_max,
            "grid": ",".join(_fmt(p) for p in args.p_list)}
    _write_report(args, meta, ["seed", "p", "ratio"], rows, summary)
    return 0


def _cmd_residue(args) -> int:
    rng = np.random.default_rng(args.seed)
    f = maximal.random_signal(rng, args.support)

    def unit(r: int):
        out = maximal.residue_equidistribution(
            f, args.q, r, args.s, args.beta, args.n_max,
            resolution=args.resolution)
        return [out["r"], out["weak_norm"], out["l1_norm"], out["ratio"]]

    rows = _parallel(unit, list(range(1, args.q + 1)), args.threads)
    ratios = [row[3] for row in rows]
    summary = {"max_ratio": max(ratios), "min_ratio": min(ratios),
               "spread": max(ratios) / min(ratios) if min(ratios) > 0 else np.inf}
    meta = {"command": "residue-equidist", "Q": args.q, "s": args.s,
            "beta": args.beta, "n_max": args.n_max, "seed": args.seed,
            "grid": args.resolution, "support": args.support}
    _write_report(args, meta, ["r", "weak_norm", "l1_norm", "ratio"],
                  rows, summary)
    return _check_frozen(args, f"residue/{args.q}/{args.s}/{_fmt(args.beta)}",
                         max(ratios))


def _cmd_ergodic(args) -> int:
    if args.system == "rotation":
        system = ergodic.DynamicalSystem.rotation(args.alpha, args.alpha_cf_depth)
    else:
        system = ergodic.DynamicalSystem.shift(args.modulus)
    a, b = args.set
    f = ergodic.interval_indicator(a, b)
    if args.system == "shift":
        m = args.modulus
        circle_f = f

        def f(x):
            return circle_f(np.asarray(x, dtype=np.float64) / m)

    reference = (b - a) % 1.0 if args.system == "rotation" else None
    table = _table((1 << args.n_max) + 1, args)
    if args.seeds > 0:
        rng = np.random.default_rng(args.seed)
        starts = list(rng.random(args.seeds)) if args.system == "rotation" \
            else [int(v) for v in rng.integers(0, args.modulus, args.seeds)]
    else:
        starts = [args.x0]

    def unit(x0):
        tr = ergodic.convergence_diagnostic(system, f, x0, args.n_max, table,
                                            reference=reference)
        dist = tr.distances if tr.distances is not None \
            else np.full(len(tr.scales), np.nan)
        return [[x0, n, int(N), v, d, dd]
                for n, (N, v, d, dd) in enumerate(
                    zip(tr.scales, tr.values, tr.diffs, dist), start=1)]

    results = _parallel(unit, starts, args.threads)
    rows = [r for part in results for r in part]
    finals = [part[-1][5] for part in results]
    summary = {"starts": len(starts),
               "median_final_distance": float(np.median(finals))}
    meta = {"command": "ergodic-demo", "system": args.system,
            "n_max": args.n_max, "seed": args.seed,
            "set": f"{_fmt(a)},{_fmt(b)}"}
    if args.system == "rotation":
        meta["alpha_num"] = system.num
        meta["alpha_den"] = system.den
    else:
        meta["modulus"] = args.modulus
    _write_report(args, meta, ["x0", "n", "scale", "value", "diff", "distance"],
                  rows, summary)
    return 0


def _cmd_orlicz(args) -> int:
    pairs = []
    text = Path(args.input).read_text()
    for line in csv.reader(io.StringIO(text)):
        if not line:
            continue
        try:
            pairs.append((float(line[0]), float(line[1])))
        except (ValueError, IndexError):
            continue  # header or malformed line
    r = orlicz.decreasing_rearrangement(pairs)
    norm = orlicz.orlicz_norm(r)
    layers = orlicz.dyadic_layers(r, args.j_max)
    rows = [[j, a, m] for j, (a, m) in enumerate(layers, start=1)]
    summary = {"norm": norm,
               "layer_lower_bound": orlicz.layer_lower_bound(r, args.j_max),
               "steps": int(r.values.size),
               "total_measure": r.total_measure}
    meta = {"command": "orlicz-norm", "input": args.input,
            "j_max": args.j_max, "seed": args.seed}
    _write_report(args, meta, ["j", "layer_value", "layer_measure"],
                  rows, summary)
    return 0


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _float_pair(text: str) -> tuple[float, float]:
    parts = _float_list(text)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers")
    return parts[0], parts[1]


def build_parser() -> _Parser:
    parser = _Parser(prog="primeavg",
                     description="Prime-average multiplier and maximal-operator experiments")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--fixtures", help="frozen-constants JSON path")
    common.add_argument("--refreeze", action="store_true",
                        help="record measured constants into --fixtures")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache-dir", help="sieve disk cache directory")

    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("gauss-verify", parents=[common],
                       help="exhaustive closed-form vs brute-force character sums")
    p.add_argument("--q-max", type=int, default=200)
    p.set_defaults(fn=_cmd_gauss_verify)

    p = sub.add_parser("multiplier-error", parents=[common],
                       help="sup-norm error of the glued approximant")
    p.add_argument("--n-min", type=int, default=8)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--grid", type=int, default=1 << 14)
    p.add_argument("--s-max", type=int, default=DEFAULT_S_MAX)
    p.add_argument("--inject-beta", type=float, default=None,
                   help="synthetic real-zero location in [1/2, 1)")
    p.add_argument("--inject-q", type=int, default=5,
                   help="modulus receiving the synthetic zero")
    p.set_defaults(fn=_cmd_multiplier_error)

    p = sub.add_parser("weak-type-sweep", parents=[common],
                       help="superlevel counts of the dyadic maximal average")
    p.add_argument("--family", choices=("interval", "random", "primes", "ap"),
                   default="interval")
    p.add_argument("--size", type=int, default=1024)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--lambda-grid", type=_float_list,
                   default=list(maximal.default_lambda_grid(10)))
    p.set_defaults(fn=_cmd_weak_type)

    p = sub.add_parser("lp-sweep", parents=[common],
                       help="maximal-operator norm ratios on random signals")
    p.add_argument("--p-list", type=_float_list, default=[1.25, 1.5, 2.0])
    p.add_argument("--seeds", type=int, default=8)
    p.add_argument("--support", type=int, default=256)
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(fn=_cmd_lp_sweep)

    p = sub.add_parser("residue-equidist", parents=[common],
                       help="weak norms of filtered maximal averages on residue classes")
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--beta", type=float, default=0.75)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--support", type=int, default=512)
    p.add_argument("--resolution", type=int, default=1 << 14)
    p.set_defaults(fn=_cmd_residue)

    p = sub.add_parser("ergodic-demo", parents=[common],
                       help="prime orbit averages on a rotation or cyclic shift")
    p.add_argument("--system", choices=("rotation", "shift"), default="rotation")
    p.add_argument("--alpha", default="golden",
                   help="rotation angle: float in [0,1), 'golden', or 'silver'")
    p.add_argument("--alpha-cf-depth", type=int, default=None)
    p.add_argument("--modulus", type=int, default=97)
    p.add_argument("--set", type=_float_pair, default=(0.0, 0.5),
                   help="half-open indicator interval 'a,b'")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--seeds", type=int, default=0,
                   help="number of random starting points (0: use --x0)")
    p.set_defaults(fn=_cmd_ergodic)

    p = sub.add_parser("orlicz-norm", parents=[common],
                       help="rearrangement norm of a (value,measure) CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--j-max", type=int, default=30)
    p.set_defaults(fn=_cmd_orlicz)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (DomainError, CapacityError, OSError, ValueError) as e:
        sys.stderr.write(f"primeavg: error: {e}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
