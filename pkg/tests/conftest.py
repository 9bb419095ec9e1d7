import math

import pytest

from softimpact import WedgeModel, find_period2_impact


@pytest.fixture(scope="session")
def demo_model():
    """Canonical wedge parameters used throughout the demo figures."""
    return WedgeModel(
        beta=math.pi / 3,
        omega=1.0,
        lam=math.sqrt(2.0),
        u1s=2.5,
        u2s=0.0,
        b=10.0,
        epsilon=0.0,
    )


@pytest.fixture(scope="session")
def demo_orbit(demo_model):
    """The hard-wall period-2 orbit launched from u1 = 9.23."""
    return find_period2_impact(demo_model, 9.23)
