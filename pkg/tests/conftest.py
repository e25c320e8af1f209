import numpy as np
import pytest
from hypothesis import settings

# numeric property tests routinely out-run hypothesis' default deadline
# on a loaded core; the budget is enforced suite-wide instead
settings.register_profile("qdsim", deadline=None, max_examples=50)
settings.load_profile("qdsim")


def random_density(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_bloch(rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    v = rng.normal(size=3)
    v = v / np.linalg.norm(v)
    if pure:
        return v
    return v * rng.uniform(0.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)
