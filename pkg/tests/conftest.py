import numpy as np
import pytest

from genspan.engine import set_mode


@pytest.fixture(autouse=True)
def _test_mode():
    """Every test starts in 64-bit mode unless it switches explicitly."""
    set_mode("test")
    yield
    set_mode("test")


@pytest.fixture
def rng():
    return np.random.default_rng(0)
