"""Preference-reversal thresholds along one-parameter evaluator families.

Given two distributions and a family with one free parameter, the signed
difference of their evaluations is scanned on an even grid; each sign
change is sharpened by bisection. The scan also recognises degenerate
stretches where the two distributions are scored identically for every
parameter value.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .evaluators import (
    EvaluatorSpec,
    INDIFFERENT,
    PREFER_FIRST,
    PREFER_SECOND,
    ProductivityValueCurve,
    QualityWeightTable,
    compare,
    evaluate,
)
from .model import Distribution, reference_distributions

_IDENTICAL_EPS = 1e-12


class ParameterOutOfRangeError(ValueError):
    pass


@dataclass(frozen=True)
class ParametricFamily:
    """An evaluator template with one scalar degree of freedom.

    ``parameter`` is ``alpha``, ``delta``, ``sigma`` or ``gamma``, or a
    single table entry written ``q:<state>`` or ``r:<state>``; None makes
    the family constant (the template is used unchanged at every point).
    """

    base: EvaluatorSpec
    parameter: str | None
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError("parameter range must satisfy lo < hi")
        self.spec_at(self.lo)  # surfaces bad parameter names and bounds early

    def spec_at(self, theta: float) -> EvaluatorSpec:
        if not self.lo <= theta <= self.hi:
            raise ParameterOutOfRangeError(
                f"parameter value {theta} outside [{self.lo}, {self.hi}]"
            )
        name = self.parameter
        if name is None:
            return self.base
        if name in ("alpha", "delta", "sigma", "gamma"):
            if not hasattr(self.base, name):
                raise ValueError(f"family {self.base.family} has no parameter {name!r}")
            return dataclasses.replace(self.base, **{name: theta})
        if ":" in name:
            table_name, state = name.split(":", 1)
            if table_name not in ("q", "r") or not hasattr(self.base, table_name):
                raise ValueError(f"family {self.base.family} has no table {table_name!r}")
            table: QualityWeightTable = getattr(self.base, table_name)
            if state not in table.weights:
                raise ValueError(f"table {table_name!r} has no state {state!r}")
            weights = dict(table.weights)
            weights[state] = theta
            return dataclasses.replace(self.base, **{table_name: QualityWeightTable(weights)})
        raise ValueError(f"unrecognised parameter {name!r}")


def difference(
    fam: ParametricFamily, theta: float, d_first: Distribution, d_second: Distribution
) -> float:
    """Evaluation of the first distribution minus that of the second."""
    spec = fam.spec_at(theta)
    return evaluate(spec, d_first) - evaluate(spec, d_second)


@dataclass(frozen=True)
class ThresholdReport:
    """Sign structure of the difference over the parameter range.

    ``crossings`` are the bisected sign-change locations in increasing
    order. ``signs`` has one entry per stretch between consecutive
    crossings (so ``len(signs) == len(crossings) + 1``): +1 where the
    first distribution is preferred, -1 where the second is, 0 for an
    identically indifferent stretch. ``degenerate`` flags a difference
    below 1e-12 across the whole grid.
    """

    lo: float
    hi: float
    grid_n: int
    tolerance: float
    crossings: tuple[float, ...]
    signs: tuple[int, ...]
    degenerate: bool

    def prefer_first_on(self) -> list[tuple[float, float]]:
        """Closed parameter intervals on which the first distribution wins."""
        bounds = [self.lo, *self.crossings, self.hi]
        return [
            (bounds[i], bounds[i + 1])
            for i, s in enumerate(self.signs)
            if s > 0
        ]

    def to_json_dict(self) -> dict:
        return {
            "range": [self.lo, self.hi],
            "grid_n": self.grid_n,
            "tolerance": self.tolerance,
            "crossings": list(self.crossings),
            "signs": list(self.signs),
            "degenerate": self.degenerate,
            "prefer_first_on": [list(iv) for iv in self.prefer_first_on()],
        }


def _bisect(f, lo: float, hi: float, f_lo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo > 0) == (f_mid > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_thresholds(
    fam: ParametricFamily,
    d_first: Distribution,
    d_second: Distribution,
    grid_n: int = 1024,
    tol: float = 1e-9,
) -> ThresholdReport:
    """Locate every preference reversal of the pair along the parameter.

    Scans ``grid_n + 1`` evenly spaced values, then sharpens each sign
    change to a bracket of width at most ``tol`` by bisection.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lo, hi = fam.lo, fam.hi
    step = (hi - lo) / grid_n
    thetas = [lo + k * step for k in range(grid_n + 1)]
    thetas[-1] = hi
    f = lambda th: difference(fam, th, d_first, d_second)
    values = [f(th) for th in thetas]

    def classify(v: float) -> int:
        if abs(v) <= _IDENTICAL_EPS:
            return 0
        return 1 if v > 0 else -1

    classes = [classify(v) for v in values]
    if all(c == 0 for c in classes):
        return ThresholdReport(lo, hi, grid_n, tol, (), (0,), True)

    crossings: list[float] = []
    signs: list[int] = []
    prev_sign = 0
    prev_idx = None
    for idx, c in enumerate(classes):
        if c == 0:
            continue
        if prev_sign == 0:
            signs.append(c)
        elif c != prev_sign:
            root = _bisect(f, thetas[prev_idx], thetas[idx], values[prev_idx], tol)
            crossings.append(root)
            signs.append(c)
        prev_sign = c
        prev_idx = idx
    return ThresholdReport(
        lo, hi, grid_n, tol, tuple(crossings), tuple(signs), False
    )


def brute_force_crossings(
    fam: ParametricFamily,
    d_first: Distribution,
    d_second: Distribution,
    points: int = 100_000,
) -> list[float]:
    """Independent dense sign scan; each crossing located at the midpoint
    of the bracketing grid cell. Used to cross-check ``find_thresholds``.
    """
    lo, hi = fam.lo, fam.hi
    step = (hi - lo) / points
    found = []
    prev_theta = lo
    prev_value = difference(fam, lo, d_first, d_second)
    for k in range(1, points + 1):
        theta = lo + k * step if k < points else hi
        value = difference(fam, theta, d_first, d_second)
        if abs(prev_value) > _IDENTICAL_EPS and abs(value) > _IDENTICAL_EPS:
            if (prev_value > 0) != (value > 0):
                found.append(0.5 * (prev_theta + theta))
        if abs(value) > _IDENTICAL_EPS:
            prev_theta, prev_value = theta, value
    return found


# ---------------------------------------------------------------------------
# fixture comparison tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    label: str
    first: float
    second: float
    preference: str


def _rows_to_text(rows: list[TableRow], first_name: str, second_name: str) -> str:
    arrow = {PREFER_FIRST: f"{first_name} preferred", PREFER_SECOND: f"{second_name} preferred", INDIFFERENT: "indifferent"}
    header = f"{'evaluator':14} {first_name:>14} {second_name:>14}  ranking"
    lines = [header]
    for row in rows:
        lines.append(
            f"{row.label:14} {row.first:14.9g} {row.second:14.9g}  {arrow[row.preference]}"
        )
    return "\n".join(lines)


def single_attribute_table(
    q_a: float, alpha: float, v: ProductivityValueCurve
) -> list[TableRow]:
    """Score the worked fixture pair under the four one-attribute families.

    Rows: quality-weighted years at impaired weight ``q_a``; plain
    productivity-weighted years; the affine productivity family at
    ``alpha``; and the general productivity family under curve ``v``.
    """
    from .evaluators import AffinePaly, GenPaly, LinearPaly, Qaly
    from .model import FULL_HEALTH, IMPAIRED

    healthy, impaired = reference_distributions()
    q = QualityWeightTable({FULL_HEALTH: 1.0, IMPAIRED: q_a})
    rows = []
    for label, spec in [
        ("qaly", Qaly(q)),
        ("linear_paly", LinearPaly()),
        ("affine_paly", AffinePaly(alpha)),
        ("gen_paly", GenPaly(v)),
    ]:
        first = evaluate(spec, healthy)
        second = evaluate(spec, impaired)
        rows.append(TableRow(label, first, second, compare(spec, healthy, impaired)))
    return rows


def hybrid_table(q_a: float, r_a: float, delta: float, sigma: float) -> list[TableRow]:
    """Score the fixture pair under the three hybrid families."""
    from .evaluators import Pqaly, QalyPaly, QalyPqaly
    from .model import FULL_HEALTH, IMPAIRED

    healthy, impaired = reference_distributions()
    q = QualityWeightTable({FULL_HEALTH: 1.0, IMPAIRED: q_a})
    r = QualityWeightTable({FULL_HEALTH: 1.0, IMPAIRED: r_a})
    rows = []
    for label, spec in [
        ("pqaly", Pqaly(q)),
        ("qaly_pqaly", QalyPqaly(delta, q, r)),
        ("qaly_paly", QalyPaly(sigma, q)),
    ]:
        first = evaluate(spec, healthy)
        second = evaluate(spec, impaired)
        rows.append(TableRow(label, first, second, compare(spec, healthy, impaired)))
    return rows


def render_table(rows: list[TableRow]) -> str:
    return _rows_to_text(rows, "all_healthy", "impaired_mix")


def difference_svg(
    fam: ParametricFamily,
    d_first: Distribution,
    d_second: Distribution,
    points: int = 256,
    width: int = 640,
    height: int = 360,
) -> str:
    """Plot of the evaluation difference against the parameter, as SVG."""
    lo, hi = fam.lo, fam.hi
    thetas = [lo + (hi - lo) * k / points for k in range(points + 1)]
    values = [difference(fam, th, d_first, d_second) for th in thetas]
    v_lo, v_hi = min(values), max(values)
    if v_hi - v_lo < 1e-15:
        v_lo, v_hi = v_lo - 1.0, v_hi + 1.0
    pad = 40

    def sx(th: float) -> float:
        return pad + (th - lo) / (hi - lo) * (width - 2 * pad)

    def sy(v: float) -> float:
        return height - pad - (v - v_lo) / (v_hi - v_lo) * (height - 2 * pad)

    pts = " ".join(f"{sx(th):.2f},{sy(v):.2f}" for th, v in zip(thetas, values))
    zero_y = sy(0.0) if v_lo <= 0.0 <= v_hi else None
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if zero_y is not None:
        parts.append(
            f'<line x1="{pad}" y1="{zero_y:.2f}" x2="{width - pad}" y2="{zero_y:.2f}"'
            ' stroke="#999" stroke-dasharray="4 3"/>'
        )
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    parts.append(
        f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" font-size="12">'
        f"parameter {fam.parameter or '(fixed)'} in [{lo:g}, {hi:g}]</text>"
    )
    parts.append(
        f'<text x="12" y="16" font-size="12">evaluation difference (first minus second)</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)
