import numpy as np
import pytest

from densitop import problem


@pytest.fixture
def tiny_mbb():
    """6x4 half-beam used by the small, fast checks."""
    return problem.mbb_beam(6, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
