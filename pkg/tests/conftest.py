import math

import numpy as np
import pytest

from faraday_edr.faraday import build_workspace
from faraday_edr.meter import SqueezeSpec


def acceptance_g_grid() -> np.ndarray:
    """60 interior points of (0, pi), away from the sin(2g) = 0 singularities."""
    g = np.linspace(0.0, math.pi, 62)[1:-1]
    return g[np.abs(np.sin(2.0 * g)) > 1e-3]


@pytest.fixture(scope="session")
def ws2():
    return build_workspace(math.sqrt(2.0))


@pytest.fixture(scope="session")
def ws6():
    return build_workspace(math.sqrt(6.0))


@pytest.fixture(scope="session")
def ws12():
    return build_workspace(math.sqrt(12.0))


@pytest.fixture(scope="session")
def ws_squeezed():
    """alpha^2 = 9, r = 0.3 amplitude-squeezed meter."""
    return build_workspace(3.0, SqueezeSpec(0.3))
