import numpy as np
import pytest

from qball import ModelParams, make_grid

BASELINE = ModelParams(e=1.0, m=1.0, h1=1.0, h2=1.0, g_inf=0.3)


@pytest.fixture(scope="session")
def baseline():
    return BASELINE


@pytest.fixture(scope="session")
def baseline_grid():
    # default resolution policy: sigma * r_max = 25, n = 4000
    return make_grid(25.0 / BASELINE.sigma, 4000)


@pytest.fixture(scope="session")
def bump_pair(baseline, baseline_grid):
    """A smooth compactly-supported scalar bump and its constrained gauge field."""
    from qball import Profile, solve_gauge

    r = baseline_grid.nodes
    f = 0.9 * np.exp(-0.5 * (r / 2.5) ** 2)
    f[-1] = 0.0
    g = solve_gauge(f, baseline_grid, baseline)
    return Profile.from_samples(baseline_grid, f, g)
