import numpy as np
import pytest

from srptsim.circuit import CircuitParams


@pytest.fixture
def reference():
    """The circuit every quantitative claim in the suite is pinned to."""
    return CircuitParams(L_J=0.75e-9, L_g=0.45e-9, C_J=24e-15, C_R0=2e-15, L_R0=0.45e-9)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
