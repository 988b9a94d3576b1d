import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from surfspline.geometry import BoundaryGrid, circle, ellipse
from surfspline.kernel import SplineParams

settings.register_profile(
    "default",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def disk():
    return circle(1.0)


@pytest.fixture(scope="session")
def ell21():
    return ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def params2():
    return SplineParams(m=2, d=2)


@pytest.fixture(scope="session")
def grid256(disk):
    return BoundaryGrid.build(disk, 256)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def interior_points(curve, n, rng, margin=0.1):
    """Random points strictly inside the curve (rejection from the box)."""
    out = []
    lo, hi = -curve.max_radius(), curve.max_radius()
    while len(out) < n:
        cand = rng.uniform(lo, hi, size=(4 * n, 2))
        theta = np.arctan2(cand[:, 1], cand[:, 0])
        r = np.hypot(cand[:, 0], cand[:, 1])
        keep = r < curve.polar_radius(theta) - margin
        out.extend(cand[keep])
    return np.asarray(out[:n])
