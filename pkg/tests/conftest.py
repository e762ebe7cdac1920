import numpy as np
import pytest

from ransomgame.core import GameInstance, Reputation


def random_instance(rng: np.random.Generator, n: int | None = None,
                    hi: float = 1000.0) -> GameInstance:
    """Random valid instance: decreasing losses, positive ransoms, values in (0, hi]."""
    if n is None:
        n = int(rng.integers(2, 9))
    ransoms = rng.uniform(1.0, hi, size=n)
    raw = np.sort(rng.uniform(0.0, hi, size=n))[::-1]
    losses = raw.copy()
    sale_ratio = rng.uniform(0.0, 1.0)
    return GameInstance(
        n=n,
        ransoms=tuple(ransoms),
        data_value=float(rng.uniform(0.0, hi)),
        recovery_cost=float(rng.uniform(0.0, hi / 10)),
        losses=tuple(losses),
        sale_profits=tuple(sale_ratio * losses),
    )


def random_reputation(rng: np.random.Generator, n: int) -> Reputation:
    vec = rng.uniform(0.0, 1.0, size=n + 1)
    return Reputation(float(vec[0]), tuple(float(b) for b in vec[1:]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
