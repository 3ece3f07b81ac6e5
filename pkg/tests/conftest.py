import numpy as np
import pytest

from lifeyears.axioms import sample_spec
from lifeyears.evaluators import ALL_FAMILIES, QualityWeightTable
from lifeyears.model import (
    FULL_HEALTH,
    IMPAIRED,
    Distribution,
    HealthRegistry,
    Profile,
    reference_distributions,
    reference_registry,
)


@pytest.fixture
def registry() -> HealthRegistry:
    return reference_registry()


@pytest.fixture
def fixture_pair() -> tuple[Distribution, Distribution]:
    return reference_distributions()


@pytest.fixture
def quality_half() -> QualityWeightTable:
    return QualityWeightTable({FULL_HEALTH: 1.0, IMPAIRED: 0.5})


def quality(q_a: float) -> QualityWeightTable:
    return QualityWeightTable({FULL_HEALTH: 1.0, IMPAIRED: q_a})


def sample_distribution(
    rng: np.random.Generator,
    registry: HealthRegistry,
    n_max: int = 6,
    max_lifetime: float = 80.0,
) -> Distribution:
    states = registry.sorted_states()
    n = int(rng.integers(0, n_max + 1))
    return Distribution(
        tuple(
            Profile(
                states[int(rng.integers(0, len(states)))],
                float(rng.uniform(0.0, 1.0)),
                float(rng.uniform(0.0, max_lifetime)),
            )
            for _ in range(n)
        )
    )


def sampled_specs(seed: int, per_family: int, registry: HealthRegistry, max_lifetime: float = 80.0):
    """One (family, spec) stream across every evaluation family."""
    for family in ALL_FAMILIES:
        for k in range(per_family):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed, spawn_key=(ALL_FAMILIES.index(family), k))
            )
            yield family, sample_spec(family, registry, rng, max_lifetime)
