"""Person-trade-off elicitation of evaluator parameters.

Two interview kinds are supported, each an adaptive bisection driven by
which of two hypothetical interventions the respondent finds more
desirable for society.

Quality-weight interview. Intervention A gives a fixed group (1000
people by default) one year at full health with zero productivity;
intervention B gives x people one year in the probe state, also at zero
productivity. The search adjusts x; at indifference the state's quality
weight is the group-size ratio, base_count / x. Because both sides have
zero productivity, the answer pattern is the same for any health-versus-
productivity mixing weight.

Mixing-weight interview. Intervention C gives one person one year at
full health and zero productivity; intervention D gives one person y
years in the probe state at maximum productivity. At indifference the
health-versus-productivity weight solves sigma = sigma*q*y + (1-sigma)*y,
so sigma = y / (1 + y - q*y). Keeping y at most 1/q keeps the estimate
inside [0, 1] by construction.

Sessions are immutable: ``submit_answer`` returns the advanced state.
Quality searches bisect geometrically (x spans decades), duration
searches arithmetically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

from .elicitation_errors import (
    BadBracketError,
    EmptyInputError,
    InvalidQualityWeightError,
    NotConvergedError,
    SessionFinishedError,
    UnsupportedTruthFamilyError,
)
from .evaluators import EvaluatorSpec, profile_weight

PREFER_A = "prefer_a"
PREFER_B = "prefer_b"
INDIFFERENT = "indifferent"
ANSWERS = (PREFER_A, PREFER_B, INDIFFERENT)

KIND_QUALITY = "quality"
KIND_SIGMA = "sigma"

ACTIVE = "active"
CONVERGED = "converged"
INCONSISTENT = "inconsistent"

DEFAULT_BASE_COUNT = 1000.0


@dataclass(frozen=True)
class Intervention:
    """One side of a trade-off question."""

    count: float
    state: str
    productivity: float
    duration_years: float


@dataclass(frozen=True)
class TradeOffQuestion:
    left: Intervention
    right: Intervention
    adjustable: str  # "count" or "duration_years", always on the right side
    current_value: float


@dataclass(frozen=True)
class SessionState:
    kind: str
    state: str  # probe health state shown in intervention B / D
    lo: float
    hi: float
    tolerance: float
    history: tuple[tuple[float, str], ...] = ()
    status: str = ACTIVE
    converged_value: float | None = None
    inconsistency: str | None = None
    base_count: float = DEFAULT_BASE_COUNT
    q_a: float | None = None  # only for sigma sessions

    @property
    def questions_asked(self) -> int:
        return len(self.history)

    def bracket_width(self) -> float:
        return self.hi - self.lo

    def midpoint(self) -> float:
        if self.kind == KIND_QUALITY:
            return math.sqrt(self.lo * self.hi)
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class ParameterEstimate:
    value: float
    clamped: bool


@dataclass(frozen=True)
class EstimateSummary:
    estimates: tuple[float, ...]
    median: float
    iqr: float

    @property
    def n(self) -> int:
        return len(self.estimates)


def start_quality_session(
    state: str,
    lo: float = DEFAULT_BASE_COUNT,
    hi: float = 64_000.0,
    tolerance: float = 1e-3,
    base_count: float = DEFAULT_BASE_COUNT,
) -> SessionState:
    """Begin a quality-weight interview searching the group size x."""
    if not (base_count <= lo < hi):
        raise BadBracketError(
            f"need base_count <= lo < hi, got base_count={base_count}, lo={lo}, hi={hi}"
        )
    if tolerance <= 0.0:
        raise BadBracketError("tolerance must be positive")
    return SessionState(KIND_QUALITY, state, float(lo), float(hi), tolerance, base_count=float(base_count))


def start_sigma_session(
    q_a: float,
    lo: float = 0.01,
    hi: float | None = None,
    tolerance: float = 1e-3,
    state: str = "impaired",
) -> SessionState:
    """Begin a mixing-weight interview searching the duration y.

    ``q_a`` is the probe state's quality weight, normally elicited first.
    The bracket must stay within (0, 1/q_a] so the resulting estimate is
    a legal weight.
    """
    if not 0.0 < q_a <= 1.0:
        raise InvalidQualityWeightError(f"quality weight must be in (0, 1], got {q_a}")
    if hi is None:
        hi = 1.0 / q_a
    if not (0.0 < lo < hi):
        raise BadBracketError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    if hi > 1.0 / q_a + 1e-12:
        raise BadBracketError(
            f"upper bound {hi} exceeds 1/q = {1.0 / q_a:g}; the estimate could leave [0, 1]"
        )
    if tolerance <= 0.0:
        raise BadBracketError("tolerance must be positive")
    return SessionState(KIND_SIGMA, state, float(lo), float(hi), tolerance, q_a=float(q_a))


def next_question(s: SessionState) -> TradeOffQuestion:
    """The current trade-off question; only valid while the session is active."""
    if s.status != ACTIVE:
        raise SessionFinishedError(f"session is {s.status}")
    value = s.midpoint()
    if s.kind == KIND_QUALITY:
        left = Intervention(s.base_count, "full_health", 0.0, 1.0)
        right = Intervention(value, s.state, 0.0, 1.0)
        return TradeOffQuestion(left, right, "count", value)
    left = Intervention(1.0, "full_health", 0.0, 1.0)
    right = Intervention(1.0, s.state, 1.0, value)
    return TradeOffQuestion(left, right, "duration_years", value)


def _converged(s: SessionState, value: float) -> SessionState:
    return replace(s, status=CONVERGED, converged_value=float(value))


def submit_answer(s: SessionState, answer: str) -> SessionState:
    """Fold one answer into the session.

    Preferring A means the right-hand offer is still too small, so the
    midpoint becomes the new lower bound; preferring B caps the upper
    bound. Indifference ends the session at the asked value. The session
    also ends once the bracket's relative width reaches the tolerance.
    """
    if s.status != ACTIVE:
        raise SessionFinishedError(f"session is {s.status}")
    if answer not in ANSWERS:
        raise ValueError(f"answer must be one of {ANSWERS}, got {answer!r}")
    asked = s.midpoint()
    history = s.history + ((asked, answer),)
    s = replace(s, history=history)
    if answer == INDIFFERENT:
        return _converged(s, asked)
    if answer == PREFER_A:
        lo, hi = asked, s.hi
    else:
        lo, hi = s.lo, asked
    if not lo < hi or (lo == s.lo and hi == s.hi):
        return replace(
            s,
            status=INCONSISTENT,
            inconsistency="answers imply an empty search bracket",
        )
    s = replace(s, lo=lo, hi=hi)
    if s.bracket_width() <= s.tolerance * s.midpoint():
        return _converged(s, s.midpoint())
    return s


def estimate(s: SessionState) -> ParameterEstimate:
    """Parameter implied by the converged value, clamped into [0, 1]."""
    if s.status != CONVERGED:
        raise NotConvergedError(f"session is {s.status}, not converged")
    x = s.converged_value
    if s.kind == KIND_QUALITY:
        raw = s.base_count / x
    else:
        raw = x / (1.0 + x - s.q_a * x)
    clamped = not 0.0 <= raw <= 1.0
    return ParameterEstimate(min(1.0, max(0.0, raw)), clamped)


# ---------------------------------------------------------------------------
# simulated respondents
# ---------------------------------------------------------------------------


def intervention_value(truth: EvaluatorSpec, side: Intervention) -> float:
    """Social value of an intervention under a time-linear evaluator:
    head count times the per-person weight times the duration."""
    weight = profile_weight(truth, side.state, side.productivity)
    return side.count * weight * side.duration_years


def _preference(value_a: float, value_b: float, rel_tol: float = 1e-12) -> str:
    # relative indifference band, so the answer pattern is invariant to
    # rescaling both values by a positive constant
    scale = max(abs(value_a), abs(value_b), 1e-300)
    if abs(value_a - value_b) <= rel_tol * scale:
        return INDIFFERENT
    return PREFER_A if value_a > value_b else PREFER_B


def simulate_respondent(truth: EvaluatorSpec, s: SessionState) -> str:
    """Answer the session's current question as a planner holding ``truth``.

    The truth must be a QALY-PALY mix, the family whose parameters these
    interviews identify.
    """
    if truth.family != "qaly_paly":
        raise UnsupportedTruthFamilyError(
            f"simulated respondents require a qaly_paly truth, got {truth.family}"
        )
    q = next_question(s)
    return _preference(intervention_value(truth, q.left), intervention_value(truth, q.right))


def run_simulated_session(truth: EvaluatorSpec, s: SessionState, max_steps: int = 200) -> SessionState:
    """Drive a session to completion with a simulated respondent."""
    steps = 0
    while s.status == ACTIVE:
        if steps >= max_steps:
            raise RuntimeError("session did not converge within the step budget")
        s = submit_answer(s, simulate_respondent(truth, s))
        steps += 1
    return s


def aggregate(estimates: Iterable[float]) -> EstimateSummary:
    """Median and interquartile range of per-respondent estimates."""
    values = sorted(float(e) for e in estimates)
    if not values:
        raise EmptyInputError("no estimates to aggregate")

    def quantile(q: float) -> float:
        # linear interpolation between order statistics
        pos = q * (len(values) - 1)
        lo = int(math.floor(pos))
        hi = int(math.ceil(pos))
        frac = pos - lo
        return values[lo] + frac * (values[hi] - values[lo])

    return EstimateSummary(
        tuple(values),
        median=quantile(0.5),
        iqr=quantile(0.75) - quantile(0.25),
    )
