"""Command-line interface.

Subcommands::

    permcycles exact    --n 1000 --r 5 [--exact-mode bigint]
    permcycles saddle   --n-list 1000 10000 --r-list 10 sqrt
    permcycles dickman  --n 10000 --r 1000        (or --u 2.5 10)
    permcycles coeffs   --r 3 [--nmax 12]
    permcycles estimate --n 1000000 --r 5
    permcycles compare  --n-list 100 1000 10000 [--r-list ...] --format json --out grid.json

``--r``/``--r-list`` accept integers and the grid tokens ``log``, ``sqrt``,
``sqrtnlogn``, ``half``, ``n`` and fractions such as ``1/4``. Lists may be
space or comma separated. Exit status: 0 on success, 1 if any cell failed
numerically (the failing rows are still written, with empty fields), 2 on a
usage error.
"""

import argparse
import math
import sys

from . import dickman, exactcount, harness, saddle, series
from ._validation import check_int, check_tol
from .exceptions import ConfigError, PermCyclesError, RangeError

EXIT_OK, EXIT_CELL_FAILURE, EXIT_USAGE = 0, 1, 2

_NUMERIC_ERRORS = (PermCyclesError, ArithmeticError, ValueError, MemoryError)


class _UsageError(Exception):
    pass


def _split(values):
    out = []
    for v in values or ():
        out.extend(p for p in str(v).split(",") if p.strip())
    return out


def _int(text, what):
    try:
        return check_int(int(text), what)
    except ValueError:
        raise _UsageError(f"{what} must be an integer, got {text!r}") from None


def _n_values(args, required=True):
    if args.n is not None and args.n_list:
        raise _UsageError("give either --n or --n-list, not both")
    raw = [args.n] if args.n is not None else _split(args.n_list)
    if not raw:
        if required:
            raise _UsageError("one of --n or --n-list is required")
        return []
    values = [_int(v, "n") for v in raw]
    if any(v < 1 for v in values):
        raise _UsageError("n must be >= 1")
    return values


def _r_items(args, default=None):
    if args.r is not None and args.r_list:
        raise _UsageError("give either --r or --r-list, not both")
    items = [args.r] if args.r is not None else _split(args.r_list)
    if not items:
        if default is None:
            raise _UsageError("one of --r or --r-list is required")
        return list(default)
    return items


def _cells(args):
    """Cells for the single-module subcommands; an explicit ``r > n`` is a usage error."""
    cells = []
    for n in _n_values(args):
        for item in _r_items(args):
            try:
                r = harness.resolve_r(n, item)
            except ConfigError as exc:
                raise _UsageError(str(exc)) from None
            if not 1 <= r <= n:
                raise _UsageError(f"r={r} outside [1, n={n}]")
            if (n, r) not in cells:
                cells.append((n, r))
    return cells


def _check_tol(args):
    try:
        return check_tol(args.tol)
    except ConfigError as exc:
        raise _UsageError(str(exc)) from None


def _rows(cells, columns, compute):
    """Evaluate ``compute(n, r)`` per cell, turning numerical failures into blank rows."""
    rows, failures = [], []
    for n, r in cells:
        try:
            row = compute(n, r)
        except _NUMERIC_ERRORS as exc:
            failures.append(f"n={n} r={r}: {type(exc).__name__}: {exc}")
            row = {"n": n, "r": r}
        rows.append({c: row.get(c) for c in columns})
    return rows, failures


def _cmd_exact(args):
    mode = args.exact_mode
    if mode == "off":
        raise _UsageError("exact needs --exact-mode bigint or float")
    cap = exactcount.BIGINT_MAX_N if mode == "bigint" else exactcount.FLOAT_MAX_N
    cells = _cells(args)
    for n, _ in cells:
        if n > cap:
            raise _UsageError(f"n={n} exceeds the {mode} limit {cap}")
    columns = ("n", "r", "mode", "log_nu", "log_prob", "count")

    def compute(n, r):
        if mode == "bigint":
            c = exactcount.exact_count(n, r)
            return {"n": n, "r": r, "mode": mode, "log_nu": c.log_nu,
                    "log_prob": c.log_prob, "count": c.count}
        log_nu = exactcount.nu_log(n, r)
        return {"n": n, "r": r, "mode": mode, "log_nu": log_nu,
                "log_prob": log_nu - exactcount.harmonic(r)}

    return columns, *_rows(cells, columns, compute)


def _cmd_saddle(args):
    tol = _check_tol(args)
    columns = ("n", "r", "u", "x", "log_x", "residual", "lambda1", "lambda2",
               "lambda3", "lambda4", "log_Q", "t2_log")

    def compute(n, r):
        s = saddle.solve_saddle(n, r, tol=tol)
        row = {"n": n, "r": r, "u": s.u, "x": s.x, "log_x": s.log_x,
               "residual": s.residual, "log_Q": s.log_Q,
               "t2_log": s.log_Q - 0.5 * math.log(2.0 * math.pi * s.lambda2)}
        row.update({f"lambda{k + 1}": v for k, v in enumerate(s.lambdas)})
        return row

    return columns, *_rows(_cells(args), columns, compute)


def _cmd_dickman(args):
    columns = ("n", "r", "u", "xi", "xi_prime", "I_xi", "log_rho", "log_rho_alladi",
               "t3_log", "c1_log")

    def for_u(u):
        xv = dickman.solve_xi(u)
        log_rho = dickman.rho(u).log_rho if u <= dickman.RHO_MAX_U else None
        return {"u": u, "xi": xv.xi, "xi_prime": xv.xi_prime,
                "I_xi": dickman.I_integral(xv.xi), "log_rho": log_rho,
                "log_rho_alladi": dickman.rho_alladi(u).log_rho}

    if args.u:
        if args.n is not None or args.n_list:
            raise _UsageError("give either --u or --n/--r, not both")
        us = []
        for text in _split(args.u):
            try:
                us.append(float(text))
            except ValueError:
                raise _UsageError(f"u must be a number, got {text!r}") from None
        if any(not u >= 1.0 for u in us):
            raise _UsageError("u must be >= 1")
        return columns, *_rows([(None, u) for u in us], columns, lambda _n, u: for_u(u))

    def compute(n, r):
        row = {"n": n, "r": r}
        row.update(for_u(n / r))
        row["t3_log"] = dickman.theorem3_estimate(n, r)
        if r >= 2 and n > r:
            row["c1_log"] = dickman.corollary1_estimate(n, r)
        return row

    return columns, *_rows(_cells(args), columns, compute)


def _cmd_coeffs(args):
    if args.r is None or args.r_list:
        raise _UsageError("coeffs needs a single integer --r")
    r = _int(args.r, "r")
    if r < 2:
        raise _UsageError("coeffs needs r >= 2")
    nmax = 4 * r if args.nmax is None else args.nmax
    if nmax < r:
        raise _UsageError(f"--nmax must be >= r={r}")
    columns = ("r", "N", "g", "b", "h", "Lambda", "d")
    try:
        table = series.build_coeff_table(r, nmax)
    except _NUMERIC_ERRORS as exc:
        return columns, [{"r": r}], [f"r={r}: {type(exc).__name__}: {exc}"]
    rows = []
    for N in range(-r, nmax + 1):
        rows.append({
            "r": r,
            "N": N,
            "g": float(table.g[N]) if N >= 0 else None,
            "b": float(table.b[N]) if N >= 1 else None,
            "h": table.h_at(N),
            "Lambda": float(table.Lambda[N]) if N >= 0 else None,
            "d": float(table.d[N]) if 0 <= N <= r else None,
        })
    return columns, rows, []


def _cmd_estimate(args):
    tol = _check_tol(args)
    columns = ("n", "r", "u", "regime", "log_prob", "log_nu")

    def compute(n, r):
        log_prob = harness.best_estimate(n, r, tol=tol)
        return {"n": n, "r": r, "u": n / r, "regime": harness.regime(n, r),
                "log_prob": log_prob, "log_nu": log_prob + exactcount.harmonic(r)}

    return columns, *_rows(_cells(args), columns, compute)


def _cmd_compare(args):
    tol = _check_tol(args)
    try:
        spec = harness.GridSpec(
            n_values=tuple(sorted(set(_n_values(args)))),
            r_rule=tuple(_r_items(args, default=harness.STRESS_RULE)),
            exact_mode=args.exact_mode,
            tol=tol,
        )
    except (ConfigError, RangeError) as exc:
        raise _UsageError(str(exc)) from None
    if not spec.cells():
        raise _UsageError("no cell with 1 <= r <= n in the requested grid")
    records = harness.run_grid(spec, workers=args.workers)
    failures = [f"n={rec.n} r={rec.r}: {msg}" for rec in records for msg in rec.errors]
    return harness.CSV_COLUMNS, records, failures


_COMMANDS = {
    "exact": (_cmd_exact, "exact log nu(n, r) from the big-integer or float recurrence"),
    "saddle": (_cmd_saddle, "saddle point, lambda sums, log Q and the saddle estimate"),
    "dickman": (_cmd_dickman, "xi(u), log rho(u) and the large-r estimates"),
    "coeffs": (_cmd_coeffs, "Lagrange-Buermann coefficient table for one r"),
    "estimate": (_cmd_estimate, "best available estimate of log P for each cell"),
    "compare": (_cmd_compare, "grid comparison of all estimates against exact values"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="permutation size")
    common.add_argument("--r", help="cycle bound: integer or token (log, sqrt, sqrtnlogn, half, n, p/q)")
    common.add_argument("--n-list", nargs="+", metavar="N", help="several sizes")
    common.add_argument("--r-list", nargs="+", metavar="R", help="several cycle bounds or tokens")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--tol", type=float, default=saddle.DEFAULT_TOL,
                        help="relative tolerance of the saddle solver (1e-15..1e-6)")
    common.add_argument("--exact-mode", choices=harness.EXACT_MODES, default="float",
                        help="bigint (n <= 2000), float (n <= 10^6) or off")

    parser = argparse.ArgumentParser(
        prog="permcycles",
        description="Probability that a random permutation has no cycle longer than r.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in _COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "dickman":
            p.add_argument("--u", nargs="+", help="evaluate at these u instead of n/r")
        if name == "coeffs":
            p.add_argument("--nmax", type=int, help="highest coefficient index (default 4r)")
        if name == "compare":
            p.add_argument("--workers", type=int, default=1, help="threads for grid cells")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad syntax
    handler = _COMMANDS[args.command][0]
    try:
        columns, rows, failures = handler(args)
    except _UsageError as exc:
        parser.error(str(exc))
    writer = harness.to_csv if args.format == "csv" else harness.to_json
    text = writer(rows, columns)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"permcycles: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    for msg in failures:
        print(f"permcycles: cell failed: {msg}", file=sys.stderr)
    return EXIT_CELL_FAILURE if failures else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
