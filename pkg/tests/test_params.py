import math

import numpy as np
import pytest

from qball import (InvalidNumber, ModelParams, ParameterError,
                   coercivity_constant, validate)


def test_baseline_is_admissible():
    p = ModelParams(e=1.0, m=1.0, h1=1.0, h2=1.0, g_inf=0.3)
    result = validate(p)
    assert result.ok and result.violations == ()
    # the sextic condition reads 1 < (16/3)(1 - 0.09) = 4.8533...
    assert 1.0 < (16.0 / 3.0) * (1.0 - 0.09)


def test_g_inf_above_m_rejected():
    result = validate(ModelParams(e=1.0, m=1.0, h1=1.0, h2=1.0, g_inf=1.5))
    assert not result.ok
    assert any("0 < g_inf < m" in v for v in result.violations)


def test_sextic_condition_rejected():
    # 9 > (16/3)(1 - 0.01) = 5.28
    result = validate(ModelParams(e=1.0, m=1.0, h1=3.0, h2=1.0, g_inf=0.1))
    assert not result.ok
    assert any(v.startswith("sextic") for v in result.violations)


def test_negative_g_inf_points_to_sign_symmetry():
    result = validate(ModelParams(e=1.0, m=1.0, h1=1.0, h2=1.0, g_inf=-0.3))
    assert not result.ok
    assert any("sign symmetry" in v for v in result.violations)


def test_non_finite_raises():
    with pytest.raises(InvalidNumber):
        validate(ModelParams(e=1.0, m=float("nan"), h1=1.0, h2=1.0, g_inf=0.3))
    with pytest.raises(InvalidNumber):
        validate(ModelParams(e=1.0, m=float("inf"), h1=1.0, h2=1.0, g_inf=0.3))


def test_coercivity_baseline_value():
    p = ModelParams(e=1.0, m=1.0, h1=1.0, h2=1.0, g_inf=0.3)
    assert coercivity_constant(p) == pytest.approx(0.91 - 0.1875, abs=1e-15)


def test_coercivity_quartic_free_limit():
    # with h1 -> 0 and g_inf -> 0 the constant approaches m^2
    p = ModelParams(e=1.0, m=1.0, h1=1e-9, h2=1.0, g_inf=1e-9)
    assert coercivity_constant(p) == pytest.approx(1.0, rel=1e-12)


def test_coercivity_requires_valid_params():
    with pytest.raises(ParameterError):
        coercivity_constant(ModelParams(e=1.0, m=1.0, h1=3.0, h2=1.0, g_inf=0.1))


def test_coercivity_positive_for_random_valid_tuples():
    rng = np.random.default_rng(42)
    count = 0
    while count < 1000:
        e = rng.uniform(0.1, 5.0)
        m = rng.uniform(0.1, 5.0)
        h1 = rng.uniform(0.01, 5.0)
        h2 = rng.uniform(0.01, 5.0)
        g_inf = rng.uniform(0.0, m)
        p = ModelParams(e=e, m=m, h1=h1, h2=h2, g_inf=g_inf)
        if not validate(p).ok:
            continue
        count += 1
        c = coercivity_constant(p)
        assert c > 0.0
        # pointwise bound: the potential density over f^2 stays above c
        t = rng.uniform(0.0, 4.0 * h1 / h2, size=16)
        density = (m**2 - g_inf**2) - 0.25 * h1 * t + h2 / 12.0 * t**2
        assert np.all(density >= c - 1e-12 * max(1.0, c))


def test_derived_quantities():
    p = ModelParams(e=2.0, m=1.5, h1=1.0, h2=2.0, g_inf=0.5)
    assert p.sigma == pytest.approx(math.sqrt(1.5**2 - 0.25))
    assert p.amplitude_bound == pytest.approx(1.0)
