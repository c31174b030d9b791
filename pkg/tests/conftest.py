from __future__ import annotations

import numpy as np
import pytest

from vortexlab.lattice import CircuitParams, build_geometry


@pytest.fixture(scope="session")
def device_params() -> CircuitParams:
    """Nominal device parameters (the shipped preset values)."""
    return CircuitParams(
        EJ_GHz=25.8,
        CJ_fF=1.5,
        Cdiag_fF=0.12,
        Cg_fF=0.008,
        CS_fF=68.5,
        G_over_G0=3.27e-3,
    )


@pytest.fixture(scope="session")
def full_geometry():
    """The 30 x 3 device geometry."""
    return build_geometry(30, 3)


# every (L, W) whose free-island count (W-1)(L+1)+1 is at most 12
SMALL_LATTICES = [
    (L, W)
    for W in range(1, 6)
    for L in range(1, 12)
    if (W - 1) * (L + 1) + 1 <= 12
]


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
