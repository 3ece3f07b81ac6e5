"""Evaluation functions over population distributions.

Eleven families are supported, all additive across individuals:

==============  =====================================================
family          per-individual term
==============  =====================================================
qaly            q(a) * t
gen_paly        v(p) * t            (v continuous, v(1) = 1)
affine_paly     (alpha * p + 1 - alpha) * t
linear_paly     p * t
pqaly           q(a) * p * t
qaly_pqaly      delta * q(a) * t + (1 - delta) * r(a) * p * t
qaly_paly       sigma * q(a) * t + (1 - sigma) * p * t
power_pqaly     q(a) * p**gamma * t (gamma in (0, 1))
weighted        w(a, p) * t         (w continuous in p, w(a*, 1) = 1)
hpye            f(a, p, t)          (0 <= f <= t, dominance in a and p)
gen_hpye        g(f(a, p, t))       (g strictly increasing, continuous)
==============  =====================================================

The first nine are "time linear": the individual term is a weight in
[0, 1], depending only on the health state and productivity, times the
lifetime. Those weights are also the healthy-productive-year rates used
by ``hpye_of_profile``.

``BatchEvaluator`` provides the same arithmetic over numpy arrays for
callers that need to score many sampled populations at once (the axiom
engine). Scalar and batch paths are checked against each other in the
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .model import Distribution, HealthRegistry, HealthState, Profile


class MissingWeightError(LookupError):
    """A weight table has no entry for a health state in the population."""

    def __init__(self, state: str):
        super().__init__(f"no weight entry for health state {state!r}")
        self.state = state


class UnsupportedFamilyError(ValueError):
    """The operation is not defined for this evaluation family."""


# ---------------------------------------------------------------------------
# weight tables and curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QualityWeightTable:
    """Health-state quality weights in [0, 1].

    The full-health state must carry weight 1; checked against a registry
    via ``check_registry`` since the table itself does not know which
    label is full health.
    """

    weights: dict[str, float]

    def __post_init__(self) -> None:
        for state, w in self.weights.items():
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"quality weight for {state!r} is {w}, outside [0, 1]")

    def weight(self, state: HealthState) -> float:
        try:
            return self.weights[state]
        except KeyError:
            raise MissingWeightError(state) from None

    def check_registry(self, registry: HealthRegistry) -> None:
        missing = registry.states - self.weights.keys()
        if missing:
            raise MissingWeightError(sorted(missing)[0])
        if self.weights[registry.full_health] != 1.0:
            raise ValueError("full-health state must have quality weight 1")

    def states(self) -> set[str]:
        return set(self.weights)


def _check_nodes(ps: Sequence[float]) -> None:
    if len(ps) < 2 or ps[0] != 0.0 or ps[-1] != 1.0:
        raise ValueError("productivity nodes must start at 0 and end at 1")
    if any(b <= a for a, b in zip(ps, ps[1:])):
        raise ValueError("productivity nodes must be strictly increasing")


@dataclass(frozen=True)
class ProductivityValueCurve:
    """Piecewise-linear value of productivity, v: [0, 1] -> [0, 1], v(1) = 1."""

    nodes: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        ps = [p for p, _ in self.nodes]
        vs = [v for _, v in self.nodes]
        _check_nodes(ps)
        if any(not 0.0 <= v <= 1.0 for v in vs):
            raise ValueError("curve values must lie in [0, 1]")
        if vs[-1] != 1.0:
            raise ValueError("value at p = 1 must be 1")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "ProductivityValueCurve":
        return cls(tuple((float(p), float(v)) for p, v in pairs))

    def value(self, p: float) -> float:
        ps = [x for x, _ in self.nodes]
        vs = [y for _, y in self.nodes]
        return _interp(p, ps, vs)


def _interp(x: float, xs: Sequence[float], ys: Sequence[float]) -> float:
    """Linear interpolation on sorted nodes; linear continuation past the end."""
    if x <= xs[0]:
        j = 0
    elif x >= xs[-1]:
        j = len(xs) - 2
    else:
        j = 0
        while xs[j + 1] < x:
            j += 1
    span = xs[j + 1] - xs[j]
    frac = (x - xs[j]) / span
    return ys[j] + frac * (ys[j + 1] - ys[j])


@dataclass(frozen=True)
class WeightSurface:
    """Per-state piecewise-linear weight rows over a shared productivity grid.

    All rows share ``p_nodes`` so the dominance requirements (no state
    beats full health at equal productivity, no productivity level beats
    p = 1 within a state) are checked node by node and survive linear
    interpolation between nodes.
    """

    p_nodes: tuple[float, ...]
    rows: dict[str, tuple[float, ...]]
    full_health: str

    def __post_init__(self) -> None:
        _check_nodes(self.p_nodes)
        if self.full_health not in self.rows:
            raise ValueError(f"missing full-health row {self.full_health!r}")
        n = len(self.p_nodes)
        star = self.rows[self.full_health]
        for state, row in self.rows.items():
            if len(row) != n:
                raise ValueError(f"row for {state!r} has {len(row)} values, expected {n}")
            if any(not 0.0 <= v <= 1.0 for v in row):
                raise ValueError(f"row for {state!r} has values outside [0, 1]")
            top = row[-1]
            if any(v > top for v in row):
                raise ValueError(f"row for {state!r} exceeds its own value at p = 1")
            if any(v > s for v, s in zip(row, star)):
                raise ValueError(f"row for {state!r} exceeds the full-health row")
        if star[-1] != 1.0:
            raise ValueError("weight at (full health, p = 1) must be 1")

    def weight(self, state: HealthState, p: float) -> float:
        try:
            row = self.rows[state]
        except KeyError:
            raise MissingWeightError(state) from None
        return _interp(p, self.p_nodes, row)

    def states(self) -> set[str]:
        return set(self.rows)


@dataclass(frozen=True)
class HpyeTable:
    """Healthy-productive-year equivalents on a shared (p, t) grid.

    ``values[state]`` has shape (len(p_nodes), len(t_nodes)), bilinearly
    interpolated; beyond the last time node the continuation is linear in
    t. The first time node must be 0 with value 0. Bounds and dominance
    (0 <= f <= t, f below the p = 1 row and below the full-health rows)
    are enforced at the nodes, which interpolation preserves.
    """

    p_nodes: tuple[float, ...]
    t_nodes: tuple[float, ...]
    values: dict[str, tuple[tuple[float, ...], ...]]
    full_health: str

    def __post_init__(self) -> None:
        _check_nodes(self.p_nodes)
        ts = self.t_nodes
        if len(ts) < 2 or ts[0] != 0.0 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("time nodes must be strictly increasing from 0")
        if self.full_health not in self.values:
            raise ValueError(f"missing full-health grid {self.full_health!r}")
        star = self.values[self.full_health]
        for state, grid in self.values.items():
            if len(grid) != len(self.p_nodes) or any(len(r) != len(ts) for r in grid):
                raise ValueError(f"grid for {state!r} does not match the node lattice")
            for j, row in enumerate(grid):
                if row[0] != 0.0:
                    raise ValueError(f"grid for {state!r} must be 0 at t = 0")
                for k, v in enumerate(row):
                    if not 0.0 <= v <= ts[k]:
                        raise ValueError(
                            f"grid for {state!r} violates 0 <= value <= t at node ({j}, {k})"
                        )
                    if v > grid[-1][k]:
                        raise ValueError(
                            f"grid for {state!r} exceeds its p = 1 row at node ({j}, {k})"
                        )
                    if v > star[j][k]:
                        raise ValueError(
                            f"grid for {state!r} exceeds the full-health grid at node ({j}, {k})"
                        )

    def equivalent_years(self, state: HealthState, p: float, t: float) -> float:
        try:
            grid = self.values[state]
        except KeyError:
            raise MissingWeightError(state) from None
        ts = self.t_nodes
        # interpolate in t within each bracketing p row, then blend in p;
        # an unclamped fraction past the last t node extends linearly.
        ps = self.p_nodes
        if p <= ps[0]:
            j = 0
        elif p >= ps[-1]:
            j = len(ps) - 2
        else:
            j = 0
            while ps[j + 1] < p:
                j += 1
        frac_p = (p - ps[j]) / (ps[j + 1] - ps[j])
        lo = _interp(t, ts, grid[j])
        hi = _interp(t, ts, grid[j + 1])
        return lo + frac_p * (hi - lo)

    def states(self) -> set[str]:
        return set(self.values)


@dataclass(frozen=True)
class GainTransform:
    """Strictly increasing continuous transform of equivalent years.

    One of ``identity``, ``power`` (exponent > 0) or ``affine`` (slope > 0,
    intercept >= 0 so evaluations stay non-negative).
    """

    kind: str
    exponent: float = 1.0
    slope: float = 1.0
    intercept: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "power", "affine"):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.kind == "power" and self.exponent <= 0.0:
            raise ValueError("power exponent must be positive")
        if self.kind == "affine" and self.slope <= 0.0:
            raise ValueError("affine slope must be positive")
        if self.kind == "affine" and self.intercept < 0.0:
            raise ValueError("affine intercept must be non-negative")

    def apply(self, x: float) -> float:
        if self.kind == "identity":
            return x
        if self.kind == "power":
            return x**self.exponent
        return self.slope * x + self.intercept

    def apply_array(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return x
        if self.kind == "power":
            return x**self.exponent
        return self.slope * x + self.intercept


# ---------------------------------------------------------------------------
# evaluator specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Qaly:
    q: QualityWeightTable
    family = "qaly"


@dataclass(frozen=True)
class GenPaly:
    v: ProductivityValueCurve
    family = "gen_paly"


@dataclass(frozen=True)
class AffinePaly:
    alpha: float
    family = "affine_paly"

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


@dataclass(frozen=True)
class LinearPaly:
    family = "linear_paly"


@dataclass(frozen=True)
class Pqaly:
    q: QualityWeightTable
    family = "pqaly"


@dataclass(frozen=True)
class QalyPqaly:
    delta: float
    q: QualityWeightTable
    r: QualityWeightTable
    family = "qaly_pqaly"

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")


@dataclass(frozen=True)
class QalyPaly:
    sigma: float
    q: QualityWeightTable
    family = "qaly_paly"

    def __post_init__(self) -> None:
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError("sigma must lie in [0, 1]")


@dataclass(frozen=True)
class PowerPqaly:
    gamma: float
    q: QualityWeightTable
    family = "power_pqaly"

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")


@dataclass(frozen=True)
class Weighted:
    w: WeightSurface
    family = "weighted"


@dataclass(frozen=True)
class Hpye:
    f: HpyeTable
    family = "hpye"


@dataclass(frozen=True)
class GenHpye:
    g: GainTransform
    f: HpyeTable
    family = "gen_hpye"


EvaluatorSpec = Union[
    Qaly,
    GenPaly,
    AffinePaly,
    LinearPaly,
    Pqaly,
    QalyPqaly,
    QalyPaly,
    PowerPqaly,
    Weighted,
    Hpye,
    GenHpye,
]

TIME_LINEAR_FAMILIES = (
    "qaly",
    "gen_paly",
    "affine_paly",
    "linear_paly",
    "pqaly",
    "qaly_pqaly",
    "qaly_paly",
    "power_pqaly",
    "weighted",
)

ALL_FAMILIES = TIME_LINEAR_FAMILIES + ("hpye", "gen_hpye")


def profile_weight(spec: EvaluatorSpec, state: HealthState, p: float) -> float:
    """Weight multiplying the lifetime, for the time-linear families."""
    fam = spec.family
    if fam == "qaly":
        return spec.q.weight(state)
    if fam == "gen_paly":
        return spec.v.value(p)
    if fam == "affine_paly":
        return spec.alpha * p + (1.0 - spec.alpha)
    if fam == "linear_paly":
        return p
    if fam == "pqaly":
        return spec.q.weight(state) * p
    if fam == "qaly_pqaly":
        return spec.delta * spec.q.weight(state) + (1.0 - spec.delta) * spec.r.weight(state) * p
    if fam == "qaly_paly":
        return spec.sigma * spec.q.weight(state) + (1.0 - spec.sigma) * p
    if fam == "power_pqaly":
        # 0**gamma = 0: the continuous extension at p = 0.
        return spec.q.weight(state) * (p**spec.gamma if p > 0.0 else 0.0)
    if fam == "weighted":
        return spec.w.weight(state, p)
    raise UnsupportedFamilyError(f"{fam} has no per-profile weight")


def profile_contribution(spec: EvaluatorSpec, prof: Profile) -> float:
    """The individual's summand in the evaluation."""
    fam = spec.family
    if fam == "hpye":
        return spec.f.equivalent_years(prof.state, prof.productivity, prof.lifetime)
    if fam == "gen_hpye":
        return spec.g.apply(
            spec.f.equivalent_years(prof.state, prof.productivity, prof.lifetime)
        )
    return profile_weight(spec, prof.state, prof.productivity) * prof.lifetime


def per_profile_contributions(spec: EvaluatorSpec, d: Distribution) -> list[float]:
    """Per-individual summands; they add up to ``evaluate(spec, d)``."""
    return [profile_contribution(spec, prof) for prof in d]


def evaluate(spec: EvaluatorSpec, d: Distribution) -> float:
    """Total evaluation of a distribution under the given family.

    The sum is exactly rounded (math.fsum), so reordering individuals
    cannot change the result.
    """
    return math.fsum(profile_contribution(spec, prof) for prof in d)


PREFER_FIRST = "prefer_first"
INDIFFERENT = "indifferent"
PREFER_SECOND = "prefer_second"


def compare(
    spec: EvaluatorSpec,
    d: Distribution,
    d2: Distribution,
    tolerance: float = 1e-9,
) -> str:
    """Rank two distributions; equal within ``tolerance`` means indifferent."""
    a = evaluate(spec, d)
    b = evaluate(spec, d2)
    if abs(a - b) <= tolerance:
        return INDIFFERENT
    return PREFER_FIRST if a > b else PREFER_SECOND


def hpye_of_profile(spec: EvaluatorSpec, prof: Profile) -> float:
    """Lifetime at full health and full productivity worth the same as ``prof``.

    Defined for the time-linear families, where it is the profile weight
    times the lifetime. For table-backed equivalent-year families the
    equivalence is supplied directly, not derived, so this raises.
    """
    if spec.family not in TIME_LINEAR_FAMILIES:
        raise UnsupportedFamilyError(
            f"{spec.family} supplies equivalent years directly; none can be derived"
        )
    return profile_weight(spec, prof.state, prof.productivity) * prof.lifetime


def required_states(spec: EvaluatorSpec) -> set[str] | None:
    """States the spec's tables cover, or None if any label is accepted."""
    fam = spec.family
    if fam in ("qaly", "pqaly", "qaly_paly", "power_pqaly"):
        return spec.q.states()
    if fam == "qaly_pqaly":
        return spec.q.states() & spec.r.states()
    if fam == "weighted":
        return spec.w.states()
    if fam in ("hpye", "gen_hpye"):
        return spec.f.states()
    return None


def check_spec_registry(spec: EvaluatorSpec, registry: HealthRegistry) -> None:
    """Verify the spec's tables cover the registry and honour full health."""
    fam = spec.family
    if fam in ("qaly", "pqaly", "qaly_paly", "power_pqaly"):
        spec.q.check_registry(registry)
    elif fam == "qaly_pqaly":
        spec.q.check_registry(registry)
        spec.r.check_registry(registry)
    elif fam == "weighted":
        missing = registry.states - spec.w.states()
        if missing:
            raise MissingWeightError(sorted(missing)[0])
        if spec.w.full_health != registry.full_health:
            raise ValueError("weight surface and registry disagree on full health")
    elif fam in ("hpye", "gen_hpye"):
        missing = registry.states - spec.f.states()
        if missing:
            raise MissingWeightError(sorted(missing)[0])
        if spec.f.full_health != registry.full_health:
            raise ValueError("equivalent-years table and registry disagree on full health")


# ---------------------------------------------------------------------------
# vectorised evaluation
# ---------------------------------------------------------------------------


class BatchEvaluator:
    """Evaluate many sampled populations at once.

    Individuals are encoded as three (trials, n) arrays: integer state
    indices into ``state_order``, productivities and lifetimes, plus a
    boolean mask selecting the live columns of each row (rows may describe
    populations of different sizes).
    """

    def __init__(self, spec: EvaluatorSpec, state_order: Sequence[str]):
        self.spec = spec
        self.state_order = list(state_order)
        fam = spec.family
        if fam in ("qaly", "pqaly", "qaly_paly", "power_pqaly", "qaly_pqaly"):
            self._qvec = np.array([spec.q.weight(s) for s in self.state_order])
        if fam == "qaly_pqaly":
            self._rvec = np.array([spec.r.weight(s) for s in self.state_order])
        if fam == "gen_paly":
            self._vx = np.array([p for p, _ in spec.v.nodes])
            self._vy = np.array([v for _, v in spec.v.nodes])
        if fam == "weighted":
            self._wp = np.array(spec.w.p_nodes)
            self._wrows = np.array([spec.w.rows[s] for s in self.state_order])
        if fam in ("hpye", "gen_hpye"):
            self._fp = np.array(spec.f.p_nodes)
            self._ft = np.array(spec.f.t_nodes)
            self._fgrid = np.array([spec.f.values[s] for s in self.state_order])

    def _weights(self, states: np.ndarray, p: np.ndarray) -> np.ndarray:
        spec = self.spec
        fam = spec.family
        if fam == "qaly":
            return self._qvec[states]
        if fam == "gen_paly":
            return np.interp(p, self._vx, self._vy)
        if fam == "affine_paly":
            return spec.alpha * p + (1.0 - spec.alpha)
        if fam == "linear_paly":
            return p
        if fam == "pqaly":
            return self._qvec[states] * p
        if fam == "qaly_pqaly":
            return spec.delta * self._qvec[states] + (1.0 - spec.delta) * self._rvec[
                states
            ] * p
        if fam == "qaly_paly":
            return spec.sigma * self._qvec[states] + (1.0 - spec.sigma) * p
        if fam == "power_pqaly":
            return self._qvec[states] * p**spec.gamma
        if fam == "weighted":
            j = np.clip(np.searchsorted(self._wp, p, side="right") - 1, 0, len(self._wp) - 2)
            frac = (p - self._wp[j]) / (self._wp[j + 1] - self._wp[j])
            lo = self._wrows[states, j]
            hi = self._wrows[states, j + 1]
            return lo + frac * (hi - lo)
        raise UnsupportedFamilyError(fam)

    def _equivalent_years(
        self, states: np.ndarray, p: np.ndarray, t: np.ndarray
    ) -> np.ndarray:
        jp = np.clip(np.searchsorted(self._fp, p, side="right") - 1, 0, len(self._fp) - 2)
        fp = (p - self._fp[jp]) / (self._fp[jp + 1] - self._fp[jp])
        jt = np.clip(np.searchsorted(self._ft, t, side="right") - 1, 0, len(self._ft) - 2)
        # an unclamped time fraction (> 1) continues the last segment linearly
        ft = (t - self._ft[jt]) / (self._ft[jt + 1] - self._ft[jt])
        g = self._fgrid
        v00 = g[states, jp, jt]
        v01 = g[states, jp, jt + 1]
        v10 = g[states, jp + 1, jt]
        v11 = g[states, jp + 1, jt + 1]
        lo = v00 + ft * (v01 - v00)
        hi = v10 + ft * (v11 - v10)
        return lo + fp * (hi - lo)

    def contributions(
        self, states: np.ndarray, p: np.ndarray, t: np.ndarray
    ) -> np.ndarray:
        fam = self.spec.family
        if fam == "hpye":
            return self._equivalent_years(states, p, t)
        if fam == "gen_hpye":
            return self.spec.g.apply_array(self._equivalent_years(states, p, t))
        return self._weights(states, p) * t

    def totals(
        self,
        states: np.ndarray,
        p: np.ndarray,
        t: np.ndarray,
        mask: np.ndarray,
    ) -> np.ndarray:
        """Row-wise evaluations; masked-out columns contribute nothing."""
        contrib = self.contributions(states, p, t)
        return np.where(mask, contrib, 0.0).sum(axis=1)
