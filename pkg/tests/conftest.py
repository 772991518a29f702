from __future__ import annotations

import numpy as np
import pytest

from dlrvm.grid import GridSpec


@pytest.fixture
def landau_grid():
    return GridSpec(33, 128, 128, (0.0, 2 * np.pi / 0.4), (-5.0, 5.0), (-5.0, 5.0))


@pytest.fixture
def small_grid():
    return GridSpec(17, 16, 16, (0.0, 2 * np.pi / 0.4), (-6.0, 6.0), (-6.0, 6.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
