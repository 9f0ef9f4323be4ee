import numpy as np
import pytest
from numpy.testing import assert_allclose

from qball import GridError, differentiate, integrate, make_grid


def test_uniform_spacing():
    grid = make_grid(3.0, 3000)
    assert grid.spacing == pytest.approx(0.001)
    assert grid.nodes[0] == pytest.approx(0.001)
    assert grid.nodes[-1] == pytest.approx(3.0)
    assert np.all(np.diff(grid.nodes) > 0)


def test_weights_sum_exact():
    for r_max, n in ((2.0, 64), (10.0, 4000), (26.2, 4000)):
        grid = make_grid(r_max, n)
        exact = r_max**3 / 3.0
        assert abs(grid.weights.sum() - exact) / exact <= 1e-12
        assert np.all(grid.weights >= 0.0)


def test_integrate_constant():
    grid = make_grid(2.0, 128)
    assert integrate(np.ones(grid.n), grid) == pytest.approx(8.0 / 3.0, abs=1e-10)


def test_integrate_zero():
    grid = make_grid(2.0, 128)
    assert integrate(np.zeros(grid.n), grid) == 0.0


def test_integrate_r_squared():
    grid = make_grid(1.0, 4000)
    value = integrate(grid.nodes**2, grid)
    assert value == pytest.approx(0.2, abs=1e-6)


def test_integrate_exponential_tail():
    # int_0^inf e^{-2r} r^2 dr = 2/2^3 = 1/4
    grid = make_grid(20.0, 8000)
    value = integrate(np.exp(-2.0 * grid.nodes), grid)
    assert value == pytest.approx(0.25, abs=1e-5)


def test_differentiate_constant_and_linear():
    grid = make_grid(5.0, 500)
    assert_allclose(differentiate(np.full(grid.n, 3.7), grid), 0.0, atol=1e-12)
    assert_allclose(differentiate(grid.nodes, grid), 1.0, atol=1e-10)


def test_differentiate_quadratic():
    grid = make_grid(1.0, 4000)
    deriv = differentiate(grid.nodes**2, grid)
    assert_allclose(deriv[1:-1], 2.0 * grid.nodes[1:-1], atol=1e-6)


def test_errors():
    with pytest.raises(GridError):
        make_grid(0.0, 100)
    with pytest.raises(GridError):
        make_grid(1.0, 8)
    grid = make_grid(1.0, 100)
    with pytest.raises(GridError):
        integrate(np.ones(50), grid)
    with pytest.raises(GridError):
        differentiate(np.ones(50), grid)
    with pytest.raises(GridError):
        integrate(np.full(grid.n, np.nan), grid)


def _ibp_residual(n):
    # integration by parts: for u(r_max) = 0,
    # int u' v r^2 dr + int u (v' r^2 + 2 r v) dr = 0
    grid = make_grid(8.0, n)
    r = grid.nodes
    u = np.exp(-r) * (grid.r_max - r)
    v = np.cos(0.7 * r)
    left = integrate(differentiate(u, grid) * v, grid)
    right = integrate(u * differentiate(v, grid), grid) \
        + 2.0 * float(np.dot(grid.weights / r, u * v))
    return abs(left + right)


def test_integration_by_parts_second_order():
    coarse = _ibp_residual(2000)
    fine = _ibp_residual(4000)
    assert coarse < 3e-4
    assert 3.0 <= coarse / fine <= 4.6
