"""Domain types for individuals and populations.

A person is described by a triple: a health-state label, a productivity
level in [0, 1], and a remaining lifetime in years. A population scenario
is an ordered list of such triples. Health states are opaque labels with
no ordering of their own; any structure enters through weight tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite
from typing import Callable, Iterator, Sequence

HealthState = str


class InvalidPermutationError(ValueError):
    """The supplied index sequence is not a bijection on the population."""


@dataclass(frozen=True)
class HealthRegistry:
    """The finite set of health states admitted in an analysis.

    Exactly one state is distinguished as full health; it must be a member
    of ``states``.
    """

    states: frozenset[str]
    full_health: str

    def __post_init__(self) -> None:
        if not all(isinstance(s, str) and s for s in self.states):
            raise ValueError("health-state labels must be non-empty strings")
        if self.full_health not in self.states:
            raise ValueError(
                f"full-health state {self.full_health!r} is not in the registry"
            )

    def __contains__(self, label: str) -> bool:
        return label in self.states

    def sorted_states(self) -> list[str]:
        """States in a deterministic order, full health first."""
        rest = sorted(self.states - {self.full_health})
        return [self.full_health, *rest]


@dataclass(frozen=True)
class Profile:
    """One individual's (health state, productivity, lifetime) triple.

    Construction does not validate ranges; use ``validate_distribution``
    so that out-of-range inputs can be reported rather than rejected.
    """

    state: HealthState
    productivity: float
    lifetime: float


@dataclass(frozen=True)
class Distribution:
    """An ordered list of profiles; position identifies the individual."""

    profiles: tuple[Profile, ...]

    @classmethod
    def of(cls, rows: Sequence[tuple[HealthState, float, float]]) -> "Distribution":
        return cls(tuple(Profile(s, float(p), float(t)) for s, p, t in rows))

    def __len__(self) -> int:
        return len(self.profiles)

    def __iter__(self) -> Iterator[Profile]:
        return iter(self.profiles)

    def __getitem__(self, i: int) -> Profile:
        return self.profiles[i]


@dataclass(frozen=True)
class ValidationIssue:
    """One problem found while validating a distribution.

    ``kind`` is one of ``unknown_state``, ``out_of_range_productivity``,
    ``negative_lifetime`` or ``non_finite``; ``index`` is the offending
    individual's position.
    """

    kind: str
    index: int
    detail: str


def validate_distribution(
    d: Distribution, registry: HealthRegistry
) -> list[ValidationIssue]:
    """Check every profile against the registry and the legal ranges.

    Returns an empty list when the distribution is valid. An empty
    distribution is vacuously valid.
    """
    issues: list[ValidationIssue] = []
    for i, prof in enumerate(d):
        if prof.state not in registry:
            issues.append(
                ValidationIssue("unknown_state", i, f"state {prof.state!r} not registered")
            )
        if not isfinite(prof.productivity) or not isfinite(prof.lifetime):
            issues.append(
                ValidationIssue("non_finite", i, "productivity and lifetime must be finite")
            )
            continue
        if not 0.0 <= prof.productivity <= 1.0:
            issues.append(
                ValidationIssue(
                    "out_of_range_productivity",
                    i,
                    f"productivity {prof.productivity} outside [0, 1]",
                )
            )
        if prof.lifetime < 0.0:
            issues.append(
                ValidationIssue("negative_lifetime", i, f"lifetime {prof.lifetime} < 0")
            )
    return issues


def ensure_valid(d: Distribution, registry: HealthRegistry) -> None:
    """Raise ValueError listing every issue if the distribution is invalid."""
    issues = validate_distribution(d, registry)
    if issues:
        lines = "; ".join(f"[{i.index}] {i.kind}: {i.detail}" for i in issues)
        raise ValueError(f"invalid distribution: {lines}")


def permute(d: Distribution, perm: Sequence[int]) -> Distribution:
    """Reorder individuals by a bijection given as the image of 0..n-1."""
    n = len(d)
    if sorted(perm) != list(range(n)):
        raise InvalidPermutationError(f"{list(perm)!r} is not a permutation of 0..{n - 1}")
    return Distribution(tuple(d.profiles[perm[i]] for i in range(n)))


def replace_profile(d: Distribution, i: int, profile: Profile) -> Distribution:
    """Copy of ``d`` with the individual at position ``i`` replaced."""
    if not 0 <= i < len(d):
        raise IndexError(f"index {i} out of range for population of {len(d)}")
    rows = list(d.profiles)
    rows[i] = profile
    return Distribution(tuple(rows))


def map_profiles(d: Distribution, fn: Callable[[Profile], Profile]) -> Distribution:
    return Distribution(tuple(fn(p) for p in d))


# Fixture labels shared by the test suites and the CLI defaults.
FULL_HEALTH = "full_health"
IMPAIRED = "impaired"


def reference_registry() -> HealthRegistry:
    """Two-state registry used by the worked fixtures."""
    return HealthRegistry(frozenset({FULL_HEALTH, IMPAIRED}), FULL_HEALTH)


def reference_distributions() -> tuple[Distribution, Distribution]:
    """Two five-person scenarios used throughout the tests and reports.

    In the first, everyone enjoys full health while productivity and
    lifetime vary. The second keeps the same lifetimes but moves four of
    the five individuals to the impaired state (and the second individual
    to maximum productivity).
    """
    healthy = Distribution.of(
        [
            (FULL_HEALTH, 1.0, 40.0),
            (FULL_HEALTH, 0.5, 40.0),
            (FULL_HEALTH, 0.0, 40.0),
            (FULL_HEALTH, 0.5, 10.0),
            (FULL_HEALTH, 0.0, 0.0),
        ]
    )
    impaired = Distribution.of(
        [
            (FULL_HEALTH, 1.0, 40.0),
            (IMPAIRED, 1.0, 40.0),
            (IMPAIRED, 0.5, 40.0),
            (IMPAIRED, 0.5, 10.0),
            (IMPAIRED, 0.0, 0.0),
        ]
    )
    return healthy, impaired
