"""Empirical conformance checking of preference axioms.

Each axiom is operationalised as a sampled numeric property of an
evaluator: quantified objects (populations, indices, shift constants,
replacement attributes) are drawn at random, both sides of the axiom's
conclusion are scored, and the conclusion is asserted as an equality
within tolerance, a weak or strict inequality, or (for separability) a
biconditional of comparison outcomes. Continuity is tested through a
sequential surrogate: along a geometrically shrinking approach to a
limit point, the gap to the limit value must decay like the step size;
a jump larger than the tolerance cannot pass. Full topological
continuity is not falsifiable by sampling.

Sampling is deterministic: every axiom draws from its own stream seeded
by (seed, axiom index), with a fixed draw plan, so trial k's data is a
pure function of (seed, axiom, k) and results do not depend on execution
order. Lifetimes are uniform on [0, max_lifetime], productivities
uniform on [0, 1], states uniform over the registry; a zero-lifetime and
a zero-productivity individual are force-included in the first trial of
every batch.

A failed check carries a witness holding the concrete distributions and
both evaluation values; replaying it through the scalar ``evaluate``
must reproduce the violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .evaluators import (
    ALL_FAMILIES,
    BatchEvaluator,
    EvaluatorSpec,
    GainTransform,
    GenHpye,
    GenPaly,
    Hpye,
    HpyeTable,
    LinearPaly,
    AffinePaly,
    PowerPqaly,
    Pqaly,
    Qaly,
    QalyPaly,
    QalyPqaly,
    QualityWeightTable,
    Weighted,
    WeightSurface,
    ProductivityValueCurve,
    evaluate,
)
from .model import Distribution, HealthRegistry, Profile


class Axiom(Enum):
    ANON = "ANON"
    SEP = "SEP"
    CONT = "CONT"
    ZERO = "ZERO"
    FHPS = "FHPS"
    LMFHP = "LMFHP"
    PLD = "PLD"
    PI = "PI"
    TICHFP = "TICHFP"
    HI = "HI"
    TIFHCP = "TIFHCP"
    PIFHCT = "PIFHCT"
    TIUP = "TIUP"
    TICHP = "TICHP"
    PICHT = "PICHT"
    PICT = "PICT"
    TIFHP = "TIFHP"


COMMON_AXIOMS = (
    Axiom.ANON,
    Axiom.SEP,
    Axiom.CONT,
    Axiom.ZERO,
    Axiom.FHPS,
    Axiom.LMFHP,
    Axiom.PLD,
)

AXIOM_DESCRIPTIONS = {
    Axiom.ANON: "reordering individuals leaves the evaluation unchanged",
    Axiom.SEP: "the ranking of two scenarios depends only on the individuals who differ",
    Axiom.CONT: "small changes in productivity or lifetime move the evaluation only slightly",
    Axiom.ZERO: "health and productivity are irrelevant for an individual with zero lifetime",
    Axiom.FHPS: "moving anyone to full health, or to full productivity, never hurts",
    Axiom.LMFHP: "at full health and productivity, more lifetime is strictly better",
    Axiom.PLD: "gaining lifetime from zero never hurts",
    Axiom.PI: "productivity changes of a single individual are irrelevant",
    Axiom.TICHFP: "extra years are interchangeable at common health and full productivity",
    Axiom.HI: "health-state changes of a single individual are irrelevant",
    Axiom.TIFHCP: "extra years are interchangeable at full health and common productivity",
    Axiom.PIFHCT: "productivity gains are interchangeable at full health and common lifetime",
    Axiom.TIUP: "lifetime is irrelevant for a zero-productivity individual",
    Axiom.TICHP: "extra years are interchangeable at common health and productivity",
    Axiom.PICHT: "productivity gains are interchangeable at common health and lifetime",
    Axiom.PICT: "productivity gains are interchangeable at common lifetime",
    Axiom.TIFHP: "extra years are interchangeable at full health and full productivity",
}

_AXIOM_INDEX = {a: i for i, a in enumerate(Axiom)}


def default_check_registry() -> HealthRegistry:
    return HealthRegistry(
        frozenset({"full_health", "impaired", "severely_impaired"}), "full_health"
    )


@dataclass(frozen=True)
class CheckConfig:
    trials: int = 10_000
    tolerance: float = 1e-9
    seed: int = 42
    max_individuals: int = 6
    max_lifetime: float = 80.0
    registry: HealthRegistry = field(default_factory=default_check_registry)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_individuals < 2:
            raise ValueError("need at least two individuals for pairwise axioms")
        if self.max_lifetime <= 0.0:
            raise ValueError("max_lifetime must be positive")


@dataclass(frozen=True)
class Witness:
    """Concrete counterexample: distributions plus their evaluations."""

    axiom: Axiom
    trial: int
    relation: str
    distributions: tuple[tuple[str, Distribution], ...]
    values: tuple[tuple[str, float], ...]
    detail: str = ""


@dataclass(frozen=True)
class AxiomVerdict:
    axiom: Axiom
    passed: bool
    trials_run: int
    witness: Witness | None = None


# relation names used by witnesses
EQUAL = "equal"
WEAK = "at_least"
STRICT = "strictly_more"
BICONDITIONAL = "same_outcome"
DECAY = "gap_decay"

# a gap surviving eight halvings undamped signals a jump (see module docstring)
_CONT_STEPS = 20
_CONT_REF = (5, 10)  # steps 6..10, zero-based slice
_CONT_FACTOR = 2.0**-8


def _axiom_rng(seed: int, axiom: Axiom) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(_AXIOM_INDEX[axiom],))
    )


def _sign3(x: np.ndarray, tol: float) -> np.ndarray:
    out = np.zeros(x.shape, dtype=int)
    out[x > tol] = 1
    out[x < -tol] = -1
    return out


class _Batch:
    """Sampled populations as arrays plus helpers to mutate one column."""

    def __init__(self, rng: np.random.Generator, cfg: CheckConfig, n_states: int):
        trials, n_max = cfg.trials, cfg.max_individuals
        self.n = rng.integers(2, n_max + 1, size=trials)
        self.states = rng.integers(0, n_states, size=(trials, n_max))
        self.p = rng.uniform(0.0, 1.0, size=(trials, n_max))
        self.t = rng.uniform(0.0, cfg.max_lifetime, size=(trials, n_max))
        cols = np.arange(n_max)
        self.mask = cols[None, :] < self.n[:, None]
        # boundary cases forced once per batch
        self.t[0, 0] = 0.0
        self.p[0, 1] = 0.0
        self.rows = np.arange(trials)

    def pick_index(self, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.n)

    def pick_pair(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        i = rng.integers(0, self.n)
        j = (i + 1 + rng.integers(0, self.n - 1)) % self.n
        return i, j

    def total_without(self, be: BatchEvaluator, *cols: np.ndarray) -> np.ndarray:
        mask = self.mask.copy()
        for c in cols:
            mask[self.rows, c] = False
        return be.totals(self.states, self.p, self.t, mask)

    def col(self, arr: np.ndarray, idx: np.ndarray) -> np.ndarray:
        return arr[self.rows, idx]

    def distribution(self, k: int, state_order: Sequence[str], overrides=()) -> Distribution:
        """Trial k as a concrete Distribution, with optional column overrides.

        ``overrides`` maps column index -> (state_idx, p, t) for that trial.
        """
        ov = {int(c): vals for c, vals in overrides}
        profiles = []
        for c in range(int(self.n[k])):
            if c in ov:
                s_idx, p, t = ov[c]
                profiles.append(Profile(state_order[int(s_idx)], float(p), float(t)))
            else:
                profiles.append(
                    Profile(
                        state_order[int(self.states[k, c])],
                        float(self.p[k, c]),
                        float(self.t[k, c]),
                    )
                )
        return Distribution(tuple(profiles))


def check_axiom(spec: EvaluatorSpec, axiom: Axiom, cfg: CheckConfig) -> AxiomVerdict:
    """Run one axiom's sampled property check against an evaluator."""
    rng = _axiom_rng(cfg.seed, axiom)
    state_order = cfg.registry.sorted_states()
    be = BatchEvaluator(spec, state_order)
    checker = _CHECKERS[axiom]
    violated, margin, build = checker(spec, cfg, rng, be, state_order)
    if not violated.any():
        return AxiomVerdict(axiom, True, cfg.trials)
    k = int(np.argmax(np.where(violated, margin, -np.inf)))
    return AxiomVerdict(axiom, False, cfg.trials, build(k))


def check_axiom_set(
    spec: EvaluatorSpec, axioms: Iterable[Axiom], cfg: CheckConfig
) -> list[AxiomVerdict]:
    return [check_axiom(spec, a, cfg) for a in axioms]


def replay_witness(spec: EvaluatorSpec, witness: Witness, tolerance: float) -> bool:
    """Re-evaluate a witness with the scalar path; True if it still violates."""
    vals = {label: evaluate(spec, dist) for label, dist in witness.distributions}
    rel = witness.relation
    if rel == EQUAL:
        a, b = (vals[l] for l, _ in witness.distributions[:2])
        return abs(a - b) > tolerance
    if rel == WEAK:
        better, base = (vals[l] for l, _ in witness.distributions[:2])
        return better < base - tolerance
    if rel == STRICT:
        more, less = (vals[l] for l, _ in witness.distributions[:2])
        return more - less <= tolerance
    if rel == BICONDITIONAL:
        o1 = _sign3(np.array([vals["first_left"] - vals["first_right"]]), tolerance)[0]
        o2 = _sign3(np.array([vals["second_left"] - vals["second_right"]]), tolerance)[0]
        return o1 != o2
    if rel == DECAY:
        limit = vals["limit"]
        gaps = [abs(vals[f"step_{k:02d}"] - limit) for k in range(1, _CONT_STEPS + 1)]
        ref = max(gaps[_CONT_REF[0] : _CONT_REF[1]])
        return gaps[-1] > ref * _CONT_FACTOR + tolerance
    raise ValueError(f"unknown witness relation {rel!r}")


# ---------------------------------------------------------------------------
# individual checkers
# ---------------------------------------------------------------------------


def _pair_witness(
    axiom,
    batch,
    state_order,
    label_a,
    overrides_a,
    label_b,
    overrides_b,
    totals_a,
    totals_b,
    relation,
    detail="",
):
    def build(k: int) -> Witness:
        da = batch.distribution(k, state_order, overrides_a(k))
        db = batch.distribution(k, state_order, overrides_b(k))
        return Witness(
            axiom,
            k,
            relation,
            ((label_a, da), (label_b, db)),
            ((label_a, float(totals_a[k])), (label_b, float(totals_b[k]))),
            detail,
        )

    return build


def _check_anon(spec, cfg, rng, be, state_order):
    batch = _Batch(rng, cfg, len(state_order))
    keys = np.where(batch.mask, rng.uniform(size=batch.states.shape), 2.0)
    perm = np.argsort(keys, axis=1)
    s2 = np.take_along_axis(batch.states, perm, axis=1)
    p2 = np.take_along_axis(batch.p, perm, axis=1)
    t2 = np.take_along_axis(batch.t, perm, axis=1)
    e1 = be.totals(batch.states, batch.p, batch.t, batch.mask)
    e2 = be.totals(s2, p2, t2, batch.mask)
    margin = np.abs(e1 - e2) - cfg.tolerance
    violated = margin > 0

    def build(k: int) -> Witness:
        base = batch.distribution(k, state_order)
        ov = [(c, (s2[k, c], p2[k, c], t2[k, c])) for c in range(int(batch.n[k]))]
        reordered = batch.distribution(k, state_order, ov)
        return Witness(
            Axiom.ANON,
            k,
            EQUAL,
            (("original", base), ("reordered", reordered)),
            (("original", float(e1[k])), ("reordered", float(e2[k]))),
        )

    return violated, margin, build


def _check_sep(spec, cfg, rng, be, state_order):
    batch = _Batch(rng, cfg, len(state_order))
    n_states = len(state_order)
    shape = batch.states.shape
    s_alt = rng.integers(0, n_states, size=shape)
    p_alt = rng.uniform(0.0, 1.0, size=shape)
    t_alt = rng.uniform(0.0, cfg.max_lifetime, size=shape)

    subset = (rng.uniform(size=shape) < 0.5) & batch.mask
    live = batch.mask.sum(axis=1)
    for _ in range(64):
        count = subset.sum(axis=1)
        bad = (count == 0) | (count == live)
        if not bad.any():
            break
        subset[bad] = (rng.uniform(size=(int(bad.sum()), shape[1])) < 0.5) & batch.mask[bad]

    def mix(first_s, first_p, first_t, rest_s, rest_p, rest_t):
        return (
            np.where(subset, first_s, rest_s),
            np.where(subset, first_p, rest_p),
            np.where(subset, first_t, rest_t),
        )

    base = (batch.states, batch.p, batch.t)
    alt = (s_alt, p_alt, t_alt)
    e_first_left = be.totals(*base, batch.mask)
    e_first_right = be.totals(*mix(*alt, *base), batch.mask)
    e_second_left = be.totals(*mix(*base, *alt), batch.mask)
    e_second_right = be.totals(*alt, batch.mask)

    o_first = _sign3(e_first_left - e_first_right, cfg.tolerance)
    o_second = _sign3(e_second_left - e_second_right, cfg.tolerance)
    violated = o_first != o_second
    margin = np.abs(
        (e_first_left - e_first_right) - (e_second_left - e_second_right)
    )

    def build(k: int) -> Witness:
        def dist(s, p, t):
            ov = [(c, (s[k, c], p[k, c], t[k, c])) for c in range(int(batch.n[k]))]
            return batch.distribution(k, state_order, ov)

        mixes = {
            "first_left": dist(*base),
            "first_right": dist(*mix(*alt, *base)),
            "second_left": dist(*mix(*base, *alt)),
            "second_right": dist(*alt),
        }
        values = {
            "first_left": float(e_first_left[k]),
            "first_right": float(e_first_right[k]),
            "second_left": float(e_second_left[k]),
            "second_right": float(e_second_right[k]),
        }
        subset_cols = [c for c in range(int(batch.n[k])) if subset[k, c]]
        return Witness(
            Axiom.SEP,
            k,
            BICONDITIONAL,
            tuple(mixes.items()),
            tuple(values.items()),
            f"changed subgroup at positions {subset_cols}",
        )

    return violated, margin, build


def _check_cont(spec, cfg, rng, be, state_order):
    batch = _Batch(rng, cfg, len(state_order))
    i = batch.pick_index(rng)
    # limit point and offsets chosen to stay inside the sampled ranges
    p_lim = rng.uniform(0.0, 0.5, size=cfg.trials)
    t_lim = rng.uniform(0.0, cfg.max_lifetime / 2, size=cfg.trials)
    dp = rng.uniform(0.0, 0.5, size=cfg.trials)
    dt = rng.uniform(0.0, cfg.max_lifetime / 2, size=cfg.trials)
    batch.p[batch.rows, i] = p_lim
    batch.t[batch.rows, i] = t_lim

    rest = batch.total_without(be, i)
    s_i = batch.col(batch.states, i)
    e_limit = rest + be.contributions(s_i, p_lim, t_lim)
    gaps = np.empty((cfg.trials, _CONT_STEPS))
    for k in range(1, _CONT_STEPS + 1):
        scale = 2.0**-k
        e_k = rest + be.contributions(s_i, p_lim + dp * scale, t_lim + dt * scale)
        gaps[:, k - 1] = np.abs(e_k - e_limit)
    ref = gaps[:, _CONT_REF[0] : _CONT_REF[1]].max(axis=1)
    margin = gaps[:, -1] - (ref * _CONT_FACTOR + cfg.tolerance)
    violated = margin > 0

    def build(k: int) -> Witness:
        dists = [("limit", batch.distribution(k, state_order))]
        values = [("limit", float(e_limit[k]))]
        for step in range(1, _CONT_STEPS + 1):
            scale = 2.0**-step
            ov = [(i[k], (s_i[k], p_lim[k] + dp[k] * scale, t_lim[k] + dt[k] * scale))]
            d = batch.distribution(k, state_order, ov)
            e = rest[k] + be.contributions(
                np.array([s_i[k]]),
                np.array([p_lim[k] + dp[k] * scale]),
                np.array([t_lim[k] + dt[k] * scale]),
            )[0]
            dists.append((f"step_{step:02d}", d))
            values.append((f"step_{step:02d}", float(e)))
        return Witness(
            Axiom.CONT,
            k,
            DECAY,
            tuple(dists),
            tuple(values),
            f"approach to individual {int(i[k])} does not settle",
        )

    return violated, margin, build


def _single_replacement_check(axiom, mutate):
    """Equality axioms replacing one attribute of one individual.

    ``mutate(batch, i, rng, cfg)`` returns the two override tuples
    (state_idx, p, t) for the left and right versions of column i.
    """

    def checker(spec, cfg, rng, be, state_order):
        batch = _Batch(rng, cfg, len(state_order))
        i = batch.pick_index(rng)
        left, right = mutate(batch, i, rng, cfg)
        rest = batch.total_without(be, i)
        e1 = rest + be.contributions(*left)
        e2 = rest + be.contributions(*right)
        margin = np.abs(e1 - e2) - cfg.tolerance
        violated = margin > 0

        def build(k: int) -> Witness:
            ov_l = [(i[k], (left[0][k], left[1][k], left[2][k]))]
            ov_r = [(i[k], (right[0][k], right[1][k], right[2][k]))]
            return _pair_witness(
                axiom,
                batch,
                state_order,
                "before",
                lambda _k: ov_l,
                "after",
                lambda _k: ov_r,
                e1,
                e2,
                EQUAL,
                f"individual {int(i[k])} replaced",
            )(k)

        return violated, margin, build

    return checker


def _mutate_pi(batch, i, rng, cfg):
    s_i = batch.col(batch.states, i)
    t_i = batch.col(batch.t, i)
    p_new = rng.uniform(0.0, 1.0, size=cfg.trials)
    return (s_i, batch.col(batch.p, i), t_i), (s_i, p_new, t_i)


def _mutate_tiup(batch, i, rng, cfg):
    s_i = batch.col(batch.states, i)
    zeros = np.zeros(cfg.trials)
    t_new = rng.uniform(0.0, cfg.max_lifetime, size=cfg.trials)
    return (s_i, zeros, batch.col(batch.t, i)), (s_i, zeros, t_new)


def _check_zero_states(spec, cfg, rng, be, state_order):
    # _mutate_zero needs the true number of states, not the sampled max
    batch = _Batch(rng, cfg, len(state_order))
    i = batch.pick_index(rng)
    s_i = batch.col(batch.states, i)
    p_i = batch.col(batch.p, i)
    zeros = np.zeros(cfg.trials)
    s_new = rng.integers(0, len(state_order), size=cfg.trials)
    p_new = rng.uniform(0.0, 1.0, size=cfg.trials)
    rest = batch.total_without(be, i)
    e1 = rest + be.contributions(s_i, p_i, zeros)
    e2 = rest + be.contributions(s_new, p_new, zeros)
    margin = np.abs(e1 - e2) - cfg.tolerance
    violated = margin > 0

    def build(k: int) -> Witness:
        ov_l = [(i[k], (s_i[k], p_i[k], 0.0))]
        ov_r = [(i[k], (s_new[k], p_new[k], 0.0))]
        return _pair_witness(
            Axiom.ZERO,
            batch,
            state_order,
            "before",
            lambda _k: ov_l,
            "after",
            lambda _k: ov_r,
            e1,
            e2,
            EQUAL,
            f"zero-lifetime individual {int(i[k])} relabelled",
        )(k)

    return violated, margin, build


def _check_hi_states(spec, cfg, rng, be, state_order):
    batch = _Batch(rng, cfg, len(state_order))
    i = batch.pick_index(rng)
    p_i = batch.col(batch.p, i)
    t_i = batch.col(batch.t, i)
    s_i = batch.col(batch.states, i)
    s_new = rng.integers(0, len(state_order), size=cfg.trials)
    rest = batch.total_without(be, i)
    e1 = rest + be.contributions(s_i, p_i, t_i)
    e2 = rest + be.contributions(s_new, p_i, t_i)
    margin = np.abs(e1 - e2) - cfg.tolerance
    violated = margin > 0

    def build(k: int) -> Witness:
        ov_l = [(i[k], (s_i[k], p_i[k], t_i[k]))]
        ov_r = [(i[k], (s_new[k], p_i[k], t_i[k]))]
        return _pair_witness(
            Axiom.HI,
            batch,
            state_order,
            "before",
            lambda _k: ov_l,
            "after",
            lambda _k: ov_r,
            e1,
            e2,
            EQUAL,
            f"health state of individual {int(i[k])} replaced",
        )(k)

    return violated, margin, build


def _check_fhps(spec, cfg, rng, be, state_order):
    batch = _Batch(rng, cfg, len(state_order))
    i = batch.pick_index(rng)
    s_i = batch.col(batch.states, i)
    p_i = batch.col(batch.p, i)
    t_i = batch.col(batch.t, i)
    rest = batch.total_without(be, i)
    e_base = rest + be.contributions(s_i, p_i, t_i)
    full_idx = np.zeros(cfg.trials, dtype=int)  # full health sorts first
    e_health = rest + be.contributions(full_idx, p_i, t_i)
    e_prod = rest + be.contributions(s_i, np.ones(cfg.trials), t_i)
    m_health = (e_base - e_health) - cfg.tolerance
    m_prod = (e_base - e_prod) - cfg.tolerance
    margin = np.maximum(m_health, m_prod)
    violated = margin > 0

    def build(k: int) -> Witness:
        if m_health[k] >= m_prod[k]:
            ov = [(i[k], (0, p_i[k], t_i[k]))]
            label, improved = "full_health_version", e_health[k]
            detail = f"individual {int(i[k])} moved to full health"
        else:
            ov = [(i[k], (s_i[k], 1.0, t_i[k]))]
            label, improved = "full_productivity_version", e_prod[k]
            detail = f"individual {int(i[k])} moved to full productivity"
        d_improved = batch.distribution(k, state_order, ov)
        d_base = batch.distribution(k, state_order)
        return Witness(
            Axiom.FHPS,
            k,
            WEAK,
            ((label, d_improved), ("base", d_base)),
            ((label, float(improved)), ("base", float(e_base[k]))),
            detail,
        )

    return violated, margin, build


def _check_lmfhp(spec, cfg, rng, be, state_order):
    batch = _Batch(rng, cfg, len(state_order))
    i = batch.pick_index(rng)
    t_other = rng.uniform(0.0, cfg.max_lifetime, size=cfg.trials)
    t_i = batch.col(batch.t, i)
    t_hi = np.maximum(t_i, t_other)
    t_lo = np.minimum(t_i, t_other)
    full_idx = np.zeros(cfg.trials, dtype=int)
    ones = np.ones(cfg.trials)
    rest = batch.total_without(be, i)
    e_hi = rest + be.contributions(full_idx, ones, t_hi)
    e_lo = rest + be.contributions(full_idx, ones, t_lo)
    margin = cfg.tolerance - (e_hi - e_lo)
    violated = margin >= 0

    def build(k: int) -> Witness:
        ov_hi = [(i[k], (0, 1.0, t_hi[k]))]
        ov_lo = [(i[k], (0, 1.0, t_lo[k]))]
        return Witness(
            Axiom.LMFHP,
            k,
            STRICT,
            (
                ("longer_life", batch.distribution(k, state_order, ov_hi)),
                ("shorter_life", batch.distribution(k, state_order, ov_lo)),
            ),
            (("longer_life", float(e_hi[k])), ("shorter_life", float(e_lo[k]))),
            f"individual {int(i[k])} at full health and productivity",
        )

    return violated, margin, build


def _check_pld(spec, cfg, rng, be, state_order):
    batch = _Batch(rng, cfg, len(state_order))
    i = batch.pick_index(rng)
    s_i = batch.col(batch.states, i)
    p_i = batch.col(batch.p, i)
    rest = batch.total_without(be, i)
    e_base = rest + be.contributions(s_i, p_i, batch.col(batch.t, i))
    e_zero = rest + be.contributions(s_i, p_i, np.zeros(cfg.trials))
    margin = (e_zero - e_base) - cfg.tolerance
    violated = margin > 0

    def build(k: int) -> Witness:
        ov = [(i[k], (s_i[k], p_i[k], 0.0))]
        return Witness(
            Axiom.PLD,
            k,
            WEAK,
            (
                ("with_lifetime", batch.distribution(k, state_order)),
                ("zeroed", batch.distribution(k, state_order, ov)),
            ),
            (("with_lifetime", float(e_base[k])), ("zeroed", float(e_zero[k]))),
            f"lifetime of individual {int(i[k])} dropped to zero",
        )

    return violated, margin, build


def _time_shift_check(axiom, full_health, full_productivity, common_state, common_productivity):
    """Equality axioms shifting c extra years to one of two individuals."""

    def checker(spec, cfg, rng, be, state_order):
        batch = _Batch(rng, cfg, len(state_order))
        i, j = batch.pick_pair(rng)
        s_i = batch.col(batch.states, i)
        s_j = batch.col(batch.states, j).copy()
        p_i = batch.col(batch.p, i)
        p_j = batch.col(batch.p, j).copy()
        if full_health:
            s_i = np.zeros(cfg.trials, dtype=int)
            s_j = s_i
        elif common_state:
            s_j = s_i
        if full_productivity:
            p_i = np.ones(cfg.trials)
            p_j = p_i
        elif common_productivity:
            p_j = p_i
        t_i = batch.col(batch.t, i)
        t_j = batch.col(batch.t, j)
        c = rng.uniform(0.0, cfg.max_lifetime / 2, size=cfg.trials)
        rest = batch.total_without(be, i, j)
        e_left = rest + be.contributions(s_i, p_i, t_i + c) + be.contributions(s_j, p_j, t_j)
        e_right = rest + be.contributions(s_i, p_i, t_i) + be.contributions(s_j, p_j, t_j + c)
        margin = np.abs(e_left - e_right) - cfg.tolerance
        violated = margin > 0

        def build(k: int) -> Witness:
            ov_left = [(i[k], (s_i[k], p_i[k], t_i[k] + c[k])), (j[k], (s_j[k], p_j[k], t_j[k]))]
            ov_right = [(i[k], (s_i[k], p_i[k], t_i[k])), (j[k], (s_j[k], p_j[k], t_j[k] + c[k]))]
            return Witness(
                axiom,
                k,
                EQUAL,
                (
                    ("first_gains", batch.distribution(k, state_order, ov_left)),
                    ("second_gains", batch.distribution(k, state_order, ov_right)),
                ),
                (("first_gains", float(e_left[k])), ("second_gains", float(e_right[k]))),
                f"{c[k]:.6g} extra years moved between individuals {int(i[k])} and {int(j[k])}",
            )

        return violated, margin, build

    return checker


def _productivity_shift_check(axiom, full_health, common_state):
    """Equality axioms shifting a productivity gain c at common lifetime."""

    def checker(spec, cfg, rng, be, state_order):
        batch = _Batch(rng, cfg, len(state_order))
        i, j = batch.pick_pair(rng)
        s_i = batch.col(batch.states, i)
        s_j = batch.col(batch.states, j).copy()
        if full_health:
            s_i = np.zeros(cfg.trials, dtype=int)
            s_j = s_i
        elif common_state:
            s_j = s_i
        p_i = batch.col(batch.p, i)
        p_j = batch.col(batch.p, j)
        t_common = batch.col(batch.t, i)
        headroom = 1.0 - np.maximum(p_i, p_j)
        c = rng.uniform(0.0, 1.0, size=cfg.trials) * headroom
        rest = batch.total_without(be, i, j)
        e_left = rest + be.contributions(s_i, p_i + c, t_common) + be.contributions(
            s_j, p_j, t_common
        )
        e_right = rest + be.contributions(s_i, p_i, t_common) + be.contributions(
            s_j, p_j + c, t_common
        )
        margin = np.abs(e_left - e_right) - cfg.tolerance
        violated = margin > 0

        def build(k: int) -> Witness:
            ov_left = [
                (i[k], (s_i[k], p_i[k] + c[k], t_common[k])),
                (j[k], (s_j[k], p_j[k], t_common[k])),
            ]
            ov_right = [
                (i[k], (s_i[k], p_i[k], t_common[k])),
                (j[k], (s_j[k], p_j[k] + c[k], t_common[k])),
            ]
            return Witness(
                axiom,
                k,
                EQUAL,
                (
                    ("first_gains", batch.distribution(k, state_order, ov_left)),
                    ("second_gains", batch.distribution(k, state_order, ov_right)),
                ),
                (("first_gains", float(e_left[k])), ("second_gains", float(e_right[k]))),
                f"productivity gain {c[k]:.6g} moved between individuals {int(i[k])} and {int(j[k])}",
            )

        return violated, margin, build

    return checker


def _check_pi(spec, cfg, rng, be, state_order):
    return _single_replacement_check(Axiom.PI, _mutate_pi)(spec, cfg, rng, be, state_order)


def _check_tiup(spec, cfg, rng, be, state_order):
    return _single_replacement_check(Axiom.TIUP, _mutate_tiup)(spec, cfg, rng, be, state_order)


_CHECKERS: dict[Axiom, Callable] = {
    Axiom.ANON: _check_anon,
    Axiom.SEP: _check_sep,
    Axiom.CONT: _check_cont,
    Axiom.ZERO: _check_zero_states,
    Axiom.FHPS: _check_fhps,
    Axiom.LMFHP: _check_lmfhp,
    Axiom.PLD: _check_pld,
    Axiom.PI: _check_pi,
    Axiom.HI: _check_hi_states,
    Axiom.TIUP: _check_tiup,
    Axiom.TICHFP: _time_shift_check(Axiom.TICHFP, False, True, True, False),
    Axiom.TIFHCP: _time_shift_check(Axiom.TIFHCP, True, False, False, True),
    Axiom.TICHP: _time_shift_check(Axiom.TICHP, False, False, True, True),
    Axiom.TIFHP: _time_shift_check(Axiom.TIFHP, True, True, False, False),
    Axiom.PIFHCT: _productivity_shift_check(Axiom.PIFHCT, True, False),
    Axiom.PICHT: _productivity_shift_check(Axiom.PICHT, False, True),
    Axiom.PICT: _productivity_shift_check(Axiom.PICT, False, False),
}


# ---------------------------------------------------------------------------
# expected satisfy/violate matrix
# ---------------------------------------------------------------------------

MUST_PASS = "must_pass"
MAY_FAIL = "may_fail"

_FAMILY_BUNDLES: dict[str, frozenset[Axiom]] = {
    "qaly": frozenset({Axiom.PI, Axiom.TICHFP}),
    "gen_paly": frozenset({Axiom.HI, Axiom.TIFHCP}),
    "affine_paly": frozenset({Axiom.HI, Axiom.TIFHCP, Axiom.PIFHCT}),
    "linear_paly": frozenset({Axiom.HI, Axiom.TIFHCP, Axiom.PIFHCT, Axiom.TIUP}),
    "pqaly": frozenset({Axiom.TICHP, Axiom.PICHT, Axiom.TIUP}),
    "qaly_pqaly": frozenset({Axiom.TICHP, Axiom.PICHT}),
    "qaly_paly": frozenset({Axiom.TICHP, Axiom.PICT}),
    "power_pqaly": frozenset(),
    "weighted": frozenset({Axiom.TICHP}),
    "hpye": frozenset({Axiom.TIFHP}),
    "gen_hpye": frozenset(),
}

# direct family containments; a family inherits the guarantees of every
# characterised family that contains it
_DIRECT_SUPERSETS: dict[str, tuple[str, ...]] = {
    "qaly": ("weighted",),
    "gen_paly": ("weighted",),
    "affine_paly": ("gen_paly",),
    "linear_paly": ("affine_paly", "pqaly", "qaly_paly"),
    "pqaly": ("qaly_pqaly",),
    "qaly_paly": ("qaly_pqaly",),
    "qaly_pqaly": ("weighted",),
    "power_pqaly": ("weighted",),
    "weighted": ("hpye",),
    "hpye": ("gen_hpye",),
    "gen_hpye": (),
}


def _ancestors(family: str) -> set[str]:
    seen: set[str] = set()
    stack = [family]
    while stack:
        fam = stack.pop()
        if fam in seen:
            continue
        seen.add(fam)
        stack.extend(_DIRECT_SUPERSETS[fam])
    return seen


def expected_matrix(registry: HealthRegistry, family: str) -> dict[Axiom, str]:
    """Guaranteed axioms for a family: its own bundle plus every bundle
    inherited through family containment, plus the seven common axioms.
    Everything else may fail depending on parameters.
    """
    if family not in ALL_FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    guaranteed = set(COMMON_AXIOMS)
    for fam in _ancestors(family):
        guaranteed |= _FAMILY_BUNDLES[fam]
    return {a: (MUST_PASS if a in guaranteed else MAY_FAIL) for a in Axiom}


@dataclass(frozen=True)
class ConformanceReport:
    family: str
    seed: int
    trials: int
    tolerance: float
    verdicts: tuple[AxiomVerdict, ...]
    expected: dict[Axiom, str]

    @property
    def defects(self) -> list[Axiom]:
        return [
            v.axiom
            for v in self.verdicts
            if not v.passed and self.expected[v.axiom] == MUST_PASS
        ]

    def to_json_dict(self) -> dict:
        rows = []
        for v in self.verdicts:
            row = {
                "axiom": v.axiom.value,
                "expected": self.expected[v.axiom],
                "result": "pass" if v.passed else "fail",
                "trials": v.trials_run,
            }
            if v.witness is not None:
                row["witness"] = {
                    "trial": v.witness.trial,
                    "relation": v.witness.relation,
                    "detail": v.witness.detail,
                    "values": {label: val for label, val in v.witness.values},
                    "distributions": {
                        label: [[p.state, p.productivity, p.lifetime] for p in dist]
                        for label, dist in v.witness.distributions
                    },
                }
            rows.append(row)
        return {
            "family": self.family,
            "seed": self.seed,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "axioms": rows,
            "defects": [a.value for a in self.defects],
        }

    def to_text(self) -> str:
        lines = [
            f"axiom conformance for family {self.family}"
            f" (trials={self.trials}, seed={self.seed}, tolerance={self.tolerance:g})",
            f"{'axiom':8} {'expected':10} {'result':7}",
        ]
        for v in self.verdicts:
            lines.append(
                f"{v.axiom.value:8} {self.expected[v.axiom]:10}"
                f" {'pass' if v.passed else 'FAIL':7}"
            )
        if self.defects:
            lines.append("defects: " + ", ".join(a.value for a in self.defects))
        else:
            lines.append("defects: none")
        return "\n".join(lines)


def conformance_report(spec: EvaluatorSpec, cfg: CheckConfig) -> ConformanceReport:
    """Check all seventeen axioms and compare against the expected matrix."""
    verdicts = tuple(check_axiom(spec, a, cfg) for a in Axiom)
    return ConformanceReport(
        family=spec.family,
        seed=cfg.seed,
        trials=cfg.trials,
        tolerance=cfg.tolerance,
        verdicts=verdicts,
        expected=expected_matrix(cfg.registry, spec.family),
    )


# ---------------------------------------------------------------------------
# random parameterisations
# ---------------------------------------------------------------------------


def _sample_quality_table(registry: HealthRegistry, rng) -> QualityWeightTable:
    weights = {s: float(rng.uniform(0.0, 1.0)) for s in registry.sorted_states()}
    weights[registry.full_health] = 1.0
    return QualityWeightTable(weights)


def _sample_curve(rng) -> ProductivityValueCurve:
    interior = np.sort(rng.uniform(0.05, 0.95, size=int(rng.integers(1, 4))))
    ps = [0.0, *interior.tolist(), 1.0]
    vs = [float(rng.uniform(0.0, 1.0)) for _ in ps]
    vs[-1] = 1.0
    return ProductivityValueCurve.from_pairs(list(zip(ps, vs)))


def _sample_p_nodes(rng) -> tuple[float, ...]:
    interior = np.sort(rng.uniform(0.1, 0.9, size=int(rng.integers(1, 3))))
    return (0.0, *(float(x) for x in interior), 1.0)


def _sample_surface(registry: HealthRegistry, rng) -> WeightSurface:
    p_nodes = _sample_p_nodes(rng)
    order = registry.sorted_states()
    star = [float(rng.uniform(0.0, 1.0)) for _ in p_nodes]
    star[-1] = 1.0
    rows = {registry.full_health: tuple(star)}
    for state in order[1:]:
        top = float(rng.uniform(0.0, 1.0))
        row = [float(rng.uniform(0.0, 1.0)) * min(star[j], top) for j in range(len(p_nodes))]
        row[-1] = top
        rows[state] = tuple(row)
    return WeightSurface(p_nodes, rows, registry.full_health)


def _sample_monotone_curve(rng, t_nodes: Sequence[float]) -> np.ndarray:
    """Concave nondecreasing curve through 0 with slopes at most 1."""
    slopes = np.sort(rng.uniform(0.0, 1.0, size=len(t_nodes) - 1))[::-1]
    steps = np.diff(np.asarray(t_nodes)) * slopes
    return np.concatenate([[0.0], np.cumsum(steps)])


def _sample_hpye_table(registry: HealthRegistry, rng, max_lifetime: float) -> HpyeTable:
    p_nodes = _sample_p_nodes(rng)
    interior = np.sort(rng.uniform(0.15 * max_lifetime, 0.85 * max_lifetime, size=2))
    t_nodes = (0.0, *(float(x) for x in interior), float(max_lifetime))
    order = registry.sorted_states()
    identity = np.asarray(t_nodes)
    star_rows = []
    for j in range(len(p_nodes) - 1):
        star_rows.append(_sample_monotone_curve(rng, t_nodes))
    star_rows.append(identity.copy())  # full health at full productivity is itself
    values = {registry.full_health: tuple(tuple(float(v) for v in row) for row in star_rows)}
    for state in order[1:]:
        own_top = np.minimum(_sample_monotone_curve(rng, t_nodes), identity)
        state_rows = []
        for j in range(len(p_nodes) - 1):
            row = np.minimum(_sample_monotone_curve(rng, t_nodes), star_rows[j])
            row = np.minimum(row, own_top)
            state_rows.append(row)
        state_rows.append(np.minimum(own_top, star_rows[-1]))
        values[state] = tuple(tuple(float(v) for v in row) for row in state_rows)
    return HpyeTable(p_nodes, t_nodes, values, registry.full_health)


def _sample_transform(rng) -> GainTransform:
    kind = ["identity", "power", "affine"][int(rng.integers(0, 3))]
    if kind == "identity":
        return GainTransform("identity")
    if kind == "power":
        return GainTransform("power", exponent=float(rng.uniform(0.3, 3.0)))
    return GainTransform(
        "affine", slope=float(rng.uniform(0.2, 5.0)), intercept=float(rng.uniform(0.0, 10.0))
    )


def sample_spec(
    family: str,
    registry: HealthRegistry,
    rng: np.random.Generator,
    max_lifetime: float = 80.0,
) -> EvaluatorSpec:
    """Random legal parameterisation of a family over the registry."""
    if family == "qaly":
        return Qaly(_sample_quality_table(registry, rng))
    if family == "gen_paly":
        return GenPaly(_sample_curve(rng))
    if family == "affine_paly":
        return AffinePaly(float(rng.uniform(0.0, 1.0)))
    if family == "linear_paly":
        return LinearPaly()
    if family == "pqaly":
        return Pqaly(_sample_quality_table(registry, rng))
    if family == "qaly_pqaly":
        return QalyPqaly(
            float(rng.uniform(0.0, 1.0)),
            _sample_quality_table(registry, rng),
            _sample_quality_table(registry, rng),
        )
    if family == "qaly_paly":
        return QalyPaly(float(rng.uniform(0.0, 1.0)), _sample_quality_table(registry, rng))
    if family == "power_pqaly":
        return PowerPqaly(float(rng.uniform(0.05, 0.95)), _sample_quality_table(registry, rng))
    if family == "weighted":
        return Weighted(_sample_surface(registry, rng))
    if family == "hpye":
        return Hpye(_sample_hpye_table(registry, rng, max_lifetime))
    if family == "gen_hpye":
        return GenHpye(_sample_transform(rng), _sample_hpye_table(registry, rng, max_lifetime))
    raise ValueError(f"unknown family {family!r}")
