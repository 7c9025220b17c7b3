"""Comparison tables, their text/CSV/JSON renderings, and the invariant check suite."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .bounds import (
    BoundMethod,
    MethodKind,
    SeriesId,
    bound_for,
    certify_bound_pair,
    dalzell_bounds,
    forward_difference,
    get_series,
    johnsonbaugh_bounds,
    leibniz_bound,
    methods_for,
    partial_sum,
    proposition_bounds,
    true_error,
)
from .dalzell import (
    BackhouseClass,
    CIRCLE,
    Polynomial,
    classify,
    constant_approximation,
    dalzell_integral,
    divide_by_circle,
    expand_integrand,
)
from .exactnum import Sign, certified_sign, format_rational, parse_decimal, to_decimal

log = logging.getLogger(__name__)

FORMATS = ("text", "csv", "json")
CSV_HEADER = ["method", "k", "value_decimal", "value_rational"]
TRUE_ERROR_LABEL = "True error"


@dataclass(frozen=True)
class TableSpec:
    series: SeriesId
    ks: tuple[int, ...]
    methods: tuple[BoundMethod, ...]
    side: str = "upper"
    digits: int = 12

    def __post_init__(self):
        if not self.ks or not self.methods:
            raise ValueError("a table needs at least one k and one method")
        if self.side not in ("upper", "lower"):
            raise ValueError("side must be 'upper' or 'lower'")
        if self.digits < 1 or any(k < 1 for k in self.ks):
            raise ValueError("digits and every k must be positive")


@dataclass(frozen=True)
class TableRow:
    label: str
    cells: tuple[str, ...]
    values: tuple[Fraction | None, ...]


@dataclass(frozen=True)
class TableResult:
    spec: TableSpec
    rows: tuple[TableRow, ...]
    footer: TableRow

    def all_rows(self) -> tuple[TableRow, ...]:
        return self.rows + (self.footer,)

    def records(self) -> list[dict]:
        out = []
        for row in self.all_rows():
            for k, cell, value in zip(self.spec.ks, row.cells, row.values):
                out.append({
                    "method": row.label,
                    "k": k,
                    "decimal": cell,
                    "rational": "" if value is None else format_rational(value),
                })
        return out


def _m(token: str) -> BoundMethod:
    return BoundMethod.parse(token)


PRESETS: dict[str, TableSpec] = {
    "table1": TableSpec(
        SeriesId.GLS,
        (10, 20),
        tuple(map(_m, [
            "leibniz", "calabrese", "johnsonbaugh:1", "prop:1", "johnsonbaugh:2",
            "johnsonbaugh:3", "prop:2", "johnsonbaugh:4", "johnsonbaugh:5", "prop:3", "prop:4",
        ])),
        "upper",
    ),
    "table2": TableSpec(
        SeriesId.GLS,
        (10, 20),
        tuple(map(_m, [
            "calabrese", "johnsonbaugh:1", "prop:1", "johnsonbaugh:2", "johnsonbaugh:3",
            "prop:2", "johnsonbaugh:4", "johnsonbaugh:5", "prop:3", "prop:4",
        ])),
        "lower",
    ),
}

# Published 12-digit values for k = 10 and k = 20.
REFERENCE_TABLES: dict[str, dict[str, tuple[str, str]]] = {
    "table1": {
        "Leibniz": ("0.047619047619", "0.024390243902"),
        "Calabrese": ("0.026315789474", "0.012820512821"),
        "Johnsonbaugh (j=1)": ("0.025062656642", "0.012507817386"),
        "Proposition 1": ("0.025000000000", "0.012500000000"),
        "Johnsonbaugh (j=2)": ("0.024953688569", "0.012493273412"),
        "Johnsonbaugh (j=3)": ("0.024940612401", "0.012492303814"),
        "Proposition 2": ("0.024938829287", "0.012492234557"),
        "Johnsonbaugh (j=4)": ("0.024938675190", "0.012492221295"),
        "Johnsonbaugh (j=5)": ("0.024938341189", "0.012492212875"),
        "Proposition 3": ("0.024938268253", "0.012492211870"),
        "Proposition 4": ("0.024938258893", "0.012492211732"),
        TRUE_ERROR_LABEL: ("0.024938258665", "0.012492211731"),
    },
    "table2": {
        "Calabrese": ("0.023809523810", "0.012195121951"),
        "Johnsonbaugh (j=1)": ("0.024844720497", "0.012478729438"),
        "Proposition 1": ("0.024891774892", "0.012485481998"),
        "Johnsonbaugh (j=2)": ("0.024927536232", "0.012491334216"),
        "Johnsonbaugh (j=3)": ("0.024936737980", "0.012492138776"),
        "Proposition 2": ("0.024937888199", "0.012492193632"),
        "Johnsonbaugh (j=4)": ("0.024938007187", "0.012492204454"),
        "Johnsonbaugh (j=5)": ("0.024938211898", "0.012492210893"),
        "Proposition 3": ("0.024938241107", "0.012492211537"),
        "Proposition 4": ("0.024938258199", "0.012492211728"),
        TRUE_ERROR_LABEL: ("0.024938258665", "0.012492211731"),
    },
}


def _cell(method: BoundMethod, spec: TableSpec, k: int) -> tuple[str, Fraction | None]:
    try:
        pair = bound_for(method, spec.series, k)
    except Exception as exc:  # a bad cell must not sink the table
        return f"ERR({exc})", None
    value = pair.upper if spec.side == "upper" else pair.lower
    if value is None:
        return "ERR(no lower bound)", None
    return to_decimal(value, spec.digits), value


def build_table(spec: TableSpec) -> TableResult:
    rows = []
    for method in spec.methods:
        cells = [_cell(method, spec, k) for k in spec.ks]
        rows.append(TableRow(method.label, tuple(c for c, _ in cells), tuple(v for _, v in cells)))
    footer = TableRow(
        TRUE_ERROR_LABEL,
        tuple(true_error(spec.series, k, spec.digits) for k in spec.ks),
        (None,) * len(spec.ks),
    )
    return TableResult(spec, tuple(rows), footer)


def render_text(table: TableResult) -> str:
    spec = table.spec
    title = f"{spec.side.capitalize()} bounds, {get_series(spec.series).name} series"
    header = ["method"] + [f"k={k}" for k in spec.ks]
    body = [[row.label, *row.cells] for row in table.all_rows()]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]

    def line(cols):
        return " | ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()

    out = [title, line(header), "-+-".join("-" * w for w in widths)]
    out += [line(r) for r in body]
    return "\n".join(out) + "\n"


def render_records(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r["method"], r["k"], r["decimal"], r["rational"]])
        return buf.getvalue()
    raise ValueError(f"records cannot be rendered as {fmt!r}")


def parse_records(text: str, fmt: str) -> list[dict]:
    if fmt == "json":
        return json.loads(text)
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != CSV_HEADER:
            raise ValueError("missing CSV header")
        return [
            {"method": m, "k": int(k), "decimal": d, "rational": r}
            for m, k, d, r in rows[1:]
        ]
    raise ValueError(f"cannot parse {fmt!r}")


def render(table: TableResult, fmt: str = "text") -> str:
    if fmt == "text":
        return render_text(table)
    return render_records(table.records(), fmt)


def reference_mismatches(table: TableResult, reference: dict[str, tuple[str, ...]], ulps: int = 1) -> list[str]:
    """Cells differing from ``reference`` by more than ``ulps`` in the last digit."""
    ulp = Fraction(1, 10**table.spec.digits)
    problems = []
    labels = {row.label for row in table.all_rows()}
    for missing in sorted(set(reference) - labels):
        problems.append(f"{missing}: row missing")
    for row in table.all_rows():
        if row.label not in reference:
            problems.append(f"{row.label}: unexpected row")
            continue
        for k, cell, want in zip(table.spec.ks, row.cells, reference[row.label]):
            if cell.startswith("ERR") or abs(parse_decimal(cell) - parse_decimal(want)) > ulps * ulp:
                problems.append(f"{row.label} k={k}: got {cell}, expected {want}")
    return problems


# ---------------------------------------------------------------------------
# check suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckLimits:
    m_max: int = 40
    n_max: int = 8
    k_max: int = 50
    digits: int = 30

    def __post_init__(self):
        if min(self.m_max, self.n_max, self.k_max, self.digits) < 1:
            raise ValueError("check limits must be positive")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class CheckReport:
    limits: CheckLimits
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_status(self) -> int:
        return 0 if self.ok else 2

    def render(self) -> str:
        lines = [
            f"[{'PASS' if r.passed else 'FAIL'}] {r.name} ({r.seconds:.2f}s){': ' + r.detail if r.detail else ''}"
            for r in self.results
        ]
        failed = sum(not r.passed for r in self.results)
        lines.append(f"{len(self.results) - failed} passed, {failed} failed")
        return "\n".join(lines) + "\n"


# Two-sided closed forms of the Johnsonbaugh bound on the Gregory-Leibniz series,
# as (lower, upper) callables of k.
JOHNSONBAUGH_GLS_CLOSED_FORMS: dict[int, tuple[Callable[[int], Fraction], Callable[[int], Fraction]]] = {
    1: (lambda k: Fraction(k + 2, 4 * k**2 + 8 * k + 3),
        lambda k: Fraction(k, 4 * k**2 - 1)),
    2: (lambda k: Fraction(2 * k**2 + 9 * k + 11, 8 * k**3 + 36 * k**2 + 46 * k + 15),
        lambda k: Fraction(2 * k**2 + 3 * k - 1, 8 * k**3 + 12 * k**2 - 2 * k - 3)),
}

DIFFERENCE_GLS_CLOSED_FORMS: dict[int, Callable[[int], Fraction]] = {
    1: lambda k: Fraction(2, 4 * k**2 - 1),
    2: lambda k: Fraction(8, 8 * k**3 + 12 * k**2 - 2 * k - 3),
}

UPPER_ORDER = [
    "leibniz", "calabrese", "johnsonbaugh:1", "prop:1", "johnsonbaugh:2", "johnsonbaugh:3",
    "prop:2", "johnsonbaugh:4", "johnsonbaugh:5", "prop:3", "prop:4",
]
LOWER_ORDER = UPPER_ORDER[1:]


def _fail(items: list[str], limit: int = 3) -> tuple[bool, str]:
    if not items:
        return True, ""
    more = f" (+{len(items) - limit} more)" if len(items) > limit else ""
    return False, "; ".join(items[:limit]) + more


def _check_reconstruction(lim: CheckLimits):
    bad = []
    for m in range(lim.m_max + 1):
        for n in range(lim.m_max + 1):
            p = expand_integrand(m, n)
            q, r = divide_by_circle(p)
            if r.degree > 1 or q * CIRCLE + r != p:
                bad.append(f"({m},{n})")
    return _fail(bad)


def _check_positivity(lim: CheckLimits):
    bad = [
        f"({m},{n})"
        for m in range(lim.m_max + 1)
        for n in range(lim.m_max + 1)
        if certified_sign(dalzell_integral(m, n), digits=lim.digits) is not Sign.POSITIVE
    ]
    return _fail(bad)


def _check_classification(lim: CheckLimits):
    bad = []
    for m in range(lim.m_max + 1):
        for n in range(lim.m_max + 1):
            v = dalzell_integral(m, n)
            cls = classify(m, n)
            if (cls is BackhouseClass.MIXED) != (n % 2 == 1):
                bad.append(f"({m},{n}) class {cls}")
            if cls is BackhouseClass.PI and not (v.l == 0 and v.p != 0):
                bad.append(f"({m},{n}) expected pi only")
            if cls is BackhouseClass.LN2 and not (v.p == 0 and v.l != 0):
                bad.append(f"({m},{n}) expected ln2 only")
            if cls is BackhouseClass.MIXED and (v.p == 0 or v.l == 0):
                bad.append(f"({m},{n}) expected both constants")
    return _fail(bad)


def _check_headline(lim: CheckLimits):
    bad = []
    v = dalzell_integral(4, 4)
    if (v.q, v.p, v.l) != (Fraction(22, 7), -1, 0):
        bad.append(f"I(4,4) = {v}")
    a = constant_approximation(32, 32)
    if a.value != Fraction(19809071774292917047896724979, 6305423381881718760060595200):
        bad.append(f"I(32,32) approximation {a.value}")
    v = dalzell_integral(32, 32)
    if v.p != 16384:
        bad.append(f"I(32,32) pi coefficient {v.p}")
    return _fail(bad)


def _check_equivalence_gls(lim: CheckLimits):
    bad = []
    for n, prop in ((2, 1), (4, 2), (6, 3), (8, 4)):
        if n > lim.n_max:
            continue
        for k in range(1, lim.k_max + 1):
            d, p = dalzell_bounds("gls", k, n), proposition_bounds("gls", k, prop)
            if (d.lower, d.upper) != (p.lower, p.upper):
                bad.append(f"n={n} vs prop {prop} at k={k}")
    return _fail(bad)


def _check_equivalence_ahs(lim: CheckLimits):
    bad = []
    for k in range(1, lim.k_max + 1):
        if dalzell_bounds("ahs", k, 2).upper != proposition_bounds("ahs", k, 5).upper:
            bad.append(f"n=2 upper vs prop 5 at k={k}")
        if lim.n_max >= 4:
            d, p = dalzell_bounds("ahs", k, 4), proposition_bounds("ahs", k, 6)
            if (d.lower, d.upper) != (p.lower, p.upper):
                bad.append(f"n=4 vs prop 6 at k={k}")
    return _fail(bad)


def _check_prop5_lower(lim: CheckLimits):
    """The generic n=2 lower bound for the alternating harmonic series beats the printed one."""
    bad = []
    for k in range(1, lim.k_max + 1):
        generic = dalzell_bounds("ahs", k, 2)
        printed = proposition_bounds("ahs", k, 5)
        if generic.lower != Fraction(k + 2, (k + 1) * (2 * k + 3)):
            bad.append(f"generic lower at k={k} is {generic.lower}")
        if generic.lower < printed.lower:
            bad.append(f"generic lower below printed at k={k}")
        if not (certify_bound_pair(generic, lim.digits) and certify_bound_pair(printed, lim.digits)):
            bad.append(f"certification failed at k={k}")
    ok, detail = _fail(bad)
    if ok:
        detail = "generic (k+2)/((k+1)(2k+3)) differs from printed (2k+3)/(4k^2+9k+5); both certified, generic tighter"
    return ok, detail


def _check_scaling(lim: CheckLimits):
    bad = []
    for k in range(1, lim.k_max + 1):
        if partial_sum("ahs", k) != 2 * partial_sum("lnsqrt2", k):
            bad.append(f"partial sum k={k}")
        for method in methods_for("ahs", lim.n_max):
            if method.kind is MethodKind.PROPOSITION:
                continue
            a, h = bound_for(method, "ahs", k), bound_for(method, "lnsqrt2", k)
            if a.upper != 2 * h.upper or (a.lower is not None and a.lower != 2 * h.lower):
                bad.append(f"{method.label} k={k}")
    return _fail(bad)


def _check_sandwich(lim: CheckLimits):
    bad = []
    for series in SeriesId:
        for method in methods_for(series, lim.n_max):
            for k in range(1, lim.k_max + 1):
                try:
                    pair = bound_for(method, series, k)
                except Exception as exc:
                    bad.append(f"{series.value} {method.label} k={k}: {exc}")
                    continue
                if not certify_bound_pair(pair, lim.digits):
                    bad.append(f"{series.value} {method.label} k={k}")
    return _fail(bad)


def _check_dominance(lim: CheckLimits):
    bad = []
    for k in (10, 20):
        exact = {t: bound_for(BoundMethod.parse(t), "gls", k) for t in UPPER_ORDER}
        uppers = [exact[t].upper for t in UPPER_ORDER]
        lowers = [exact[t].lower for t in LOWER_ORDER]
        if any(a < b for a, b in zip(uppers, uppers[1:])):
            bad.append(f"upper ordering at k={k}")
        if any(a > b for a, b in zip(lowers, lowers[1:])):
            bad.append(f"lower ordering at k={k}")
        for t in UPPER_ORDER:
            if not certify_bound_pair(exact[t], lim.digits):
                bad.append(f"{t} does not bracket the true error at k={k}")
    return _fail(bad)


def _check_polynomial_identity(lim: CheckLimits):
    P = Polynomial.from_coeffs
    lhs = P([-1, 3, 2]) * P([6, 22, 24, 8]) - P([5, 6, 2]) * P([-3, -2, 12, 8])
    bad = [] if lhs == P([9, 24, 12]) else [f"difference is {lhs}"]
    for k in range(1, max(lim.k_max, 1000) + 1):
        if not proposition_bounds("gls", k, 2).upper < johnsonbaugh_bounds("gls", k, 2).upper:
            bad.append(f"prop 2 upper not below Johnsonbaugh j=2 at k={k}")
    return _fail(bad)


def _check_difference_closed_forms(lim: CheckLimits):
    bad = []
    for k in range(1, lim.k_max + 1):
        for r, form in DIFFERENCE_GLS_CLOSED_FORMS.items():
            if forward_difference("gls", r, k) != form(k):
                bad.append(f"difference r={r} k={k}")
        for j, (lo, up) in JOHNSONBAUGH_GLS_CLOSED_FORMS.items():
            pair = johnsonbaugh_bounds("gls", k, j)
            if (pair.lower, pair.upper) != (lo(k), up(k)):
                bad.append(f"Johnsonbaugh j={j} k={k}")
            if pair.warnings:
                bad.append(f"hypothesis warning j={j} k={k}")
    return _fail(bad)


def _check_leibniz(lim: CheckLimits):
    bad = [
        f"{s.value} k={k}"
        for s in SeriesId
        for k in range(1, lim.k_max + 1)
        if leibniz_bound(s, k) != get_series(s).term(k + 1)
    ]
    return _fail(bad)


def _check_reference_tables(lim: CheckLimits):
    bad = []
    for name, spec in PRESETS.items():
        bad += [f"{name}: {p}" for p in reference_mismatches(build_table(spec), REFERENCE_TABLES[name])]
    return _fail(bad)


CHECKS: list[tuple[str, Callable[[CheckLimits], tuple[bool, str]]]] = [
    ("polynomial reconstruction", _check_reconstruction),
    ("integral positivity", _check_positivity),
    ("classification and coefficient pattern", _check_classification),
    ("headline integrals", _check_headline),
    ("closed-form equivalence (gls)", _check_equivalence_gls),
    ("closed-form equivalence (ahs)", _check_equivalence_ahs),
    ("ahs n=2 lower bound discrepancy", _check_prop5_lower),
    ("ahs/lnsqrt2 scaling", _check_scaling),
    ("sandwich certification", _check_sandwich),
    ("dominance ordering", _check_dominance),
    ("polynomial identity and prop 2 vs johnsonbaugh", _check_polynomial_identity),
    ("forward difference closed forms", _check_difference_closed_forms),
    ("leibniz next term", _check_leibniz),
    ("reference tables", _check_reference_tables),
]


def run_check_suite(limits: CheckLimits | None = None, checks: Iterable[str] | None = None) -> CheckReport:
    limits = limits or CheckLimits()
    report = CheckReport(limits)
    wanted = set(checks) if checks is not None else None
    for name, fn in CHECKS:
        if wanted is not None and name not in wanted:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(limits)
        except Exception as exc:
            log.exception("check %s crashed", name)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        report.results.append(CheckResult(name, passed, detail, time.perf_counter() - t0))
    return report
