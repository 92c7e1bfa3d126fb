import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import ltpmor


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def paper_system():
    """The default benchmark-family instance (seed 0)."""
    return ltpmor.random_system(0)
