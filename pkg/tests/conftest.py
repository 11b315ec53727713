import numpy as np
import pytest

from mvcjack import ConcentrationMatrix, validate_concentrations


def random_concentrations(rng: np.random.Generator, n: int, m: int) -> ConcentrationMatrix:
    """Random simplex rows; generic designs have nonsingular Gram matrices."""
    return validate_concentrations(rng.dirichlet(np.ones(m), size=n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
