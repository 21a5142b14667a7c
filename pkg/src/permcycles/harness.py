"""Regime selection, grid comparison of the estimates, and CSV/JSON output.

Every estimate column is a value of ``log P(l_r(Z) = n)`` where the ``Z_j``
are independent Poisson with mean ``1/j``; this equals ``log nu(n, r) - H_r``.
The small-``r`` formula natively gives ``log(n! nu(n, r))`` and is shifted by
``log n! + H_r`` to share that unit.
"""

import csv
import io
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

from ._validation import check_int, check_n_r, check_tol
from .dickman import corollary1_estimate, prebuild_table, theorem3_estimate
from .exactcount import (
    BIGINT_MAX_N,
    FLOAT_MAX_N,
    exact_count,
    harmonic,
    poisson_local_prob_log,
)
from .exceptions import ConfigError, PermCyclesError
from .saddle import DEFAULT_TOL, theorem2_estimate
from .series import theorem1_estimate

__all__ = [
    "ComparisonRecord",
    "GridSpec",
    "CSV_COLUMNS",
    "EXACT_MODES",
    "regime",
    "best_estimate",
    "theorem1_log_prob",
    "resolve_r",
    "compare_cell",
    "run_grid",
    "emit",
    "to_csv",
    "to_json",
    "parse_csv",
    "parse_json",
]

CSV_COLUMNS = (
    "n", "r", "u", "regime", "exact_log",
    "t1_log", "t2_log", "t3_log", "c1_log",
    "rel_err_t1", "rel_err_t2", "rel_err_t3", "rel_err_c1",
)
EXACT_MODES = ("bigint", "float", "off")
REGIMES = ("small_r", "saddle", "dickman")
STRESS_RULE = ("1", "2", "3", "log", "sqrt", "half", "n")

# failures that belong to one cell; anything else is a programming error
_CELL_ERRORS = (PermCyclesError, ArithmeticError, ValueError, MemoryError)


@dataclass(frozen=True)
class ComparisonRecord:
    n: int
    r: int
    u: float
    regime: str
    exact_log: float = None
    t1_log: float = None
    t2_log: float = None
    t3_log: float = None
    c1_log: float = None
    rel_err_t1: float = None
    rel_err_t2: float = None
    rel_err_t3: float = None
    rel_err_c1: float = None
    # per-cell failure messages; reported by the CLI, not serialized
    errors: tuple = field(default=(), compare=False)

    def as_row(self):
        return {name: getattr(self, name) for name in CSV_COLUMNS}


@dataclass(frozen=True)
class GridSpec:
    """A grid of ``(n, r)`` cells.

    ``r_rule`` items are integers or tokens resolved per ``n`` by
    :func:`resolve_r`. Cells with ``r`` outside ``[1, n]`` are dropped and
    duplicates collapse.
    """

    n_values: tuple
    r_rule: tuple = STRESS_RULE
    exact_mode: str = "float"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        n_values = tuple(check_int(n, "n") for n in self.n_values)
        if not n_values:
            raise ConfigError("n_values must be nonempty")
        if list(n_values) != sorted(n_values) or any(n < 1 for n in n_values):
            raise ConfigError(f"n_values must be positive and ascending, got {n_values}")
        if self.exact_mode not in EXACT_MODES:
            raise ConfigError(f"exact_mode must be one of {EXACT_MODES}, got {self.exact_mode!r}")
        if isinstance(self.r_rule, (str, int)):
            object.__setattr__(self, "r_rule", (self.r_rule,))
        if not self.r_rule:
            raise ConfigError("r_rule must be nonempty")
        for item in self.r_rule:
            resolve_r(max(n_values), item)  # syntax check
        object.__setattr__(self, "n_values", n_values)
        object.__setattr__(self, "r_rule", tuple(self.r_rule))
        object.__setattr__(self, "tol", check_tol(self.tol))

    def cells(self):
        out = []
        for n in self.n_values:
            rs = {resolve_r(n, item) for item in self.r_rule}
            out.extend((n, r) for r in sorted(rs) if 1 <= r <= n)
        return out


_FRACTION = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*$")


def resolve_r(n, item):
    """Turn one ``r_rule`` item into a cycle bound for size ``n``.

    Integers are taken literally. Tokens: ``log`` -> ceil(log n),
    ``sqrt`` -> ceil(sqrt n), ``sqrtnlogn`` -> ceil(sqrt(n log n)),
    ``half`` -> ceil(n/2), ``n`` -> n. A fraction ``p/q`` or a decimal in
    (0, 1] gives ceil(f n).
    """
    if isinstance(item, bool):
        raise ConfigError(f"bad r rule item {item!r}")
    if isinstance(item, int):
        return item
    token = str(item).strip().lower()
    if re.fullmatch(r"[+-]?\d+", token):
        return int(token)
    if token == "log":
        return max(1, math.ceil(math.log(n)))
    if token == "sqrt":
        return math.ceil(math.sqrt(n))
    if token == "sqrtnlogn":
        return max(1, math.ceil(math.sqrt(n * math.log(n))))
    if token == "half":
        return math.ceil(n / 2)
    if token == "n":
        return n
    m = _FRACTION.match(token)
    if m:
        frac = int(m.group(1)) / int(m.group(2))
    else:
        try:
            frac = float(token)
        except ValueError:
            raise ConfigError(f"unknown r rule item {item!r}") from None
    if not 0.0 < frac <= 1.0:
        raise ConfigError(f"r fraction must lie in (0, 1], got {item!r}")
    return max(1, math.ceil(frac * n))


def regime(n, r):
    """Which estimate is proven in this range.

    ``small_r`` when ``r <= ceil(log n)``, else ``dickman`` when
    ``r >= sqrt(n log n)``, else ``saddle``.
    """
    n, r = check_n_r(n, r)
    if r <= math.ceil(math.log(n)):
        return "small_r"
    if r >= math.sqrt(n * math.log(n)):
        return "dickman"
    return "saddle"


def _t1_applicable(n, r):
    return 2 <= r <= max(2, math.ceil(math.log(n)))


def theorem1_log_prob(n, r):
    """Small-``r`` estimate converted from ``log(n! nu)`` to ``log P``."""
    return theorem1_estimate(n, r) - math.lgamma(n + 1.0) - harmonic(r)


def best_estimate(n, r, tol=DEFAULT_TOL):
    """The estimate proven for ``(n, r)``; the saddle estimate stands in elsewhere.

    ``r = 1`` falls in the small-``r`` regime but the small-``r`` formula needs
    ``r >= 2``, so the saddle estimate is used there.
    """
    which = regime(n, r)
    if which == "small_r" and r >= 2:
        return theorem1_log_prob(n, r)
    if which == "dickman":
        return theorem3_estimate(n, r)
    return theorem2_estimate(n, r, tol=tol)


def _exact_log(n, r, exact_mode):
    if exact_mode == "bigint" and n <= BIGINT_MAX_N:
        return exact_count(n, r).log_prob
    if exact_mode == "float" and n <= FLOAT_MAX_N:
        return poisson_local_prob_log(n, r)
    return None


def compare_cell(n, r, exact_mode="float", tol=DEFAULT_TOL):
    """One grid cell: exact value, every applicable estimate and relative errors.

    A failure in any single computation leaves that field empty and is
    recorded in ``errors``; it never propagates.
    """
    n, r = check_n_r(n, r)
    errors = []

    def attempt(label, fn, *args, **kwargs):
        try:
            val = fn(*args, **kwargs)
        except _CELL_ERRORS as exc:
            errors.append(f"{label}: {type(exc).__name__}: {exc}")
            return None
        if val is None:
            return None
        val = float(val)
        if not math.isfinite(val):
            errors.append(f"{label}: non-finite result {val!r}")
            return None
        return val

    exact = attempt("exact", _exact_log, n, r, exact_mode)
    est = {
        "t1": attempt("t1", theorem1_log_prob, n, r) if _t1_applicable(n, r) else None,
        "t2": attempt("t2", theorem2_estimate, n, r, tol=tol),
        "t3": attempt("t3", theorem3_estimate, n, r),
        "c1": attempt("c1", corollary1_estimate, n, r) if r >= 2 and n > r else None,
    }
    rel = {}
    for key, val in est.items():
        rel[key] = None if exact is None or val is None else abs(math.expm1(val - exact))
    return ComparisonRecord(
        n=n,
        r=r,
        u=n / r,
        regime=regime(n, r),
        exact_log=exact,
        t1_log=est["t1"],
        t2_log=est["t2"],
        t3_log=est["t3"],
        c1_log=est["c1"],
        rel_err_t1=rel["t1"],
        rel_err_t2=rel["t2"],
        rel_err_t3=rel["t3"],
        rel_err_c1=rel["c1"],
        errors=tuple(errors),
    )


def run_grid(spec, workers=1):
    """Evaluate every cell of ``spec``; output is ordered by ``n`` then ``r``."""
    cells = spec.cells()
    if not cells:
        return []
    prebuild_table(max(n / r for n, r in cells))

    def one(cell):
        return compare_cell(cell[0], cell[1], spec.exact_mode, spec.tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, cells))
    else:
        records = [one(c) for c in cells]
    return sorted(records, key=lambda rec: (rec.n, rec.r))


def _fmt(val):
    if val is None:
        return ""
    if isinstance(val, float):
        return "%.17g" % val
    return str(val)


def to_csv(records, columns=CSV_COLUMNS):
    """CSV text with reals at 17 significant digits and empty cells for absent values."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        row = rec.as_row() if hasattr(rec, "as_row") else rec
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _json_value(val):
    if val is None:
        return "null"
    if isinstance(val, float):
        if not math.isfinite(val):
            return "null"
        return "%.17g" % val
    if isinstance(val, int):
        return str(val)
    return json.dumps(val)


def to_json(records, columns=CSV_COLUMNS):
    """JSON array of objects keyed like the CSV header; reals at 17 significant digits.

    Written by hand because :mod:`json` emits shortest-repr floats.
    """
    lines = []
    for rec in records:
        row = rec.as_row() if hasattr(rec, "as_row") else rec
        body = ", ".join(f"{json.dumps(c)}: {_json_value(row.get(c))}" for c in columns)
        lines.append("  {" + body + "}")
    return "[\n" + ",\n".join(lines) + "\n]\n"


def emit(records, fmt="csv", path=None, columns=CSV_COLUMNS):
    """Serialize ``records`` as CSV or JSON; write to ``path`` or return the text."""
    if not records:
        raise ConfigError("emit needs at least one record")
    if fmt == "csv":
        text = to_csv(records, columns)
    elif fmt == "json":
        text = to_json(records, columns)
    else:
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    if path is None:
        return text
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


_INT_FIELDS = {"n", "r"}
_STR_FIELDS = {"regime"}


def _record_from_row(row):
    kwargs = {}
    for name in CSV_COLUMNS:
        val = row.get(name)
        if val is None or val == "":
            kwargs[name] = None
        elif name in _INT_FIELDS:
            kwargs[name] = int(val)
        elif name in _STR_FIELDS:
            kwargs[name] = str(val)
        else:
            kwargs[name] = float(val)
    return ComparisonRecord(**kwargs)


def parse_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [_record_from_row(row) for row in reader]


def parse_json(text):
    return [_record_from_row(row) for row in json.loads(text)]


assert tuple(f.name for f in fields(ComparisonRecord))[: len(CSV_COLUMNS)] == CSV_COLUMNS
