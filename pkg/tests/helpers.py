from __future__ import annotations

import numpy as np

from dlrvm.grid import GridSpec


def band_limited(grid: GridSpec, rng, modes: int = 5) -> np.ndarray:
    x = grid.x
    k0 = 2 * np.pi / grid.L_x
    u = np.full_like(x, rng.standard_normal())
    for m in range(1, modes + 1):
        a, b = rng.standard_normal(2)
        u += a * np.cos(m * k0 * x) + b * np.sin(m * k0 * x)
    return u
