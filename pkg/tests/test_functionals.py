import math

import numpy as np
import pytest

from qball import (ModelParams, Profile, build_report, coercivity_constant,
                   coercivity_lower_bound, compute_E, compute_I, compute_J,
                   compute_K, compute_Q, integrate, make_grid, solve_gauge,
                   value_at_origin)

FOUR_PI = 4.0 * math.pi


def random_profile(grid, rng, g_inf):
    r = grid.nodes
    f = sum(a * np.exp(-0.5 * ((r - c) / s) ** 2)
            for a, c, s in zip(rng.uniform(0.1, 1.0, 3),
                               rng.uniform(1.0, 8.0, 3),
                               rng.uniform(0.5, 2.0, 3)))
    g = g_inf * (1.0 - np.exp(-0.3 * r))
    return Profile.from_samples(grid, f, g)


def test_energy_identities(baseline, baseline_grid):
    rng = np.random.default_rng(11)
    for _ in range(5):
        prof = random_profile(baseline_grid, rng, baseline.g_inf)
        K = compute_K(prof, baseline)
        J = compute_J(prof, baseline)
        E = compute_E(prof, baseline)
        I = compute_I(prof, baseline)
        assert abs(E - (K + J)) <= 1e-12 * max(abs(E), 1.0)
        assert abs(I - (K - J)) <= 1e-12 * max(abs(K) + abs(J), 1.0)


def test_trivial_pair_vanishes(baseline, baseline_grid):
    prof = Profile.from_samples(baseline_grid, np.zeros(baseline_grid.n),
                                np.full(baseline_grid.n, baseline.g_inf))
    assert compute_K(prof, baseline) == 0.0
    assert compute_J(prof, baseline) == pytest.approx(0.0, abs=1e-25)
    assert compute_I(prof, baseline) == pytest.approx(0.0, abs=1e-25)
    assert compute_E(prof, baseline) == pytest.approx(0.0, abs=1e-25)
    assert compute_Q(prof, baseline) == 0.0


def test_plateau_potential_contribution(baseline):
    # potential part of K over the plateau (1, R] of the trial function:
    # (1/3) (m^2 h0^2 - (h1/4) h0^4 + (h2/12) h0^6) (R^3 - 1)
    grid = make_grid(16.0, 8000)
    r = grid.nodes
    h0, R = 0.8, 8.0
    f = np.where(r <= 1.0, h0 * r, np.where(r <= R, h0, h0 * np.exp(R - r)))
    density = (baseline.m**2 * f**2 - 0.25 * baseline.h1 * f**4
               + baseline.h2 / 12.0 * f**6)
    mask = (r > 1.0) & (r <= R)
    plateau = float(np.dot(grid.weights[mask], density[mask]))
    expected = (baseline.m**2 * h0**2 - 0.25 * baseline.h1 * h0**4
                + baseline.h2 / 12.0 * h0**6) * (R**3 - 1.0) / 3.0
    assert plateau == pytest.approx(expected, rel=1e-3)


def test_ramp_kinetic_part():
    # K of f = h0 * min(r, 1) with all potential couplings off: h0^2/6
    grid = make_grid(4.0, 4000)   # node exactly at the kink r = 1
    raw = ModelParams(e=1.0, m=0.0, h1=0.0, h2=0.0, g_inf=0.0)
    h0 = 0.7
    f = h0 * np.minimum(grid.nodes, 1.0)
    prof = Profile.from_samples(grid, f, np.zeros(grid.n))
    assert compute_K(prof, raw) == pytest.approx(h0**2 / 6.0, rel=2e-3)


def test_gauge_energy_of_reference_tail(baseline):
    # J with f = 0 and g = g_inf (1 - e^{-r}), e = 1:
    # (g_inf^2/2) int e^{-2r} r^2 dr = g_inf^2 / 8
    grid = make_grid(20.0, 8000)
    gbar = baseline.g_inf * (1.0 - np.exp(-grid.nodes))
    prof = Profile.from_samples(grid, np.zeros(grid.n), gbar)
    assert compute_J(prof, baseline) == pytest.approx(baseline.g_inf**2 / 8.0,
                                                      rel=1e-4)


def test_reference_tail_energy_bound(baseline, baseline_grid):
    # J_f(gbar) <= g_inf int f^2 r^2 dr + 2 g_inf^2 / e^2
    rng = np.random.default_rng(5)
    gbar = baseline.g_inf * (1.0 - np.exp(-baseline_grid.nodes))
    for _ in range(4):
        prof = random_profile(baseline_grid, rng, baseline.g_inf)
        prof_bar = Profile.from_samples(baseline_grid, prof.f, gbar)
        J = compute_J(prof_bar, baseline)
        bound = (baseline.g_inf * integrate(prof.f**2, baseline_grid)
                 + 2.0 * baseline.g_inf**2 / baseline.e**2)
        assert J <= bound


def test_charge_factorizes_for_constant_g(baseline, baseline_grid):
    r = baseline_grid.nodes
    f = np.exp(-0.5 * ((r - 3.0) / 1.2) ** 2)
    prof = Profile.from_samples(baseline_grid, f,
                                np.full(baseline_grid.n, baseline.g_inf))
    expected = FOUR_PI * baseline.e * baseline.g_inf * integrate(f**2, baseline_grid)
    assert compute_Q(prof, baseline) == pytest.approx(expected, rel=1e-12)


def test_charge_monotone_in_g(baseline, baseline_grid):
    rng = np.random.default_rng(9)
    prof1 = random_profile(baseline_grid, rng, baseline.g_inf)
    g2 = prof1.g + 0.01 * (baseline.g_inf - prof1.g)
    prof2 = Profile.from_samples(baseline_grid, prof1.f, g2)
    assert compute_Q(prof2, baseline) >= compute_Q(prof1, baseline)


def test_coercivity_lower_bound_trivial(baseline, baseline_grid):
    prof = Profile.from_samples(baseline_grid, np.zeros(baseline_grid.n),
                                np.full(baseline_grid.n, baseline.g_inf))
    expected = -baseline.g_inf**2 / baseline.e**2
    assert coercivity_lower_bound(prof, baseline) == pytest.approx(expected)


def test_action_dominates_lower_bound_on_constrained_pairs(baseline,
                                                           baseline_grid,
                                                           bump_pair):
    assert compute_I(bump_pair, baseline) >= coercivity_lower_bound(bump_pair,
                                                                    baseline)


def test_lower_bound_scaling(baseline, baseline_grid, bump_pair):
    # quadratic scaling of both sides under f -> lambda f for small lambda
    values = {}
    for lam in (0.1, 0.01):
        f = lam * bump_pair.f
        g = solve_gauge(f, baseline_grid, baseline)
        prof = Profile.from_samples(baseline_grid, f, g)
        I = compute_I(prof, baseline)
        assert I >= coercivity_lower_bound(prof, baseline)
        values[lam] = I
    assert values[0.1] / values[0.01] == pytest.approx(100.0, rel=0.02)


def test_energy_dominates_gradient_plus_mass(baseline, baseline_grid):
    # E >= (1/2) int (f'^2 + c f^2) r^2 dr for any pair with g <= g_inf
    rng = np.random.default_rng(13)
    c = coercivity_constant(baseline)
    for _ in range(4):
        prof = random_profile(baseline_grid, rng, baseline.g_inf)
        lower = 0.5 * integrate(prof.f_prime**2 + c * prof.f**2, baseline_grid)
        assert compute_E(prof, baseline) >= lower - 1e-12


def test_truncation_consistency(baseline):
    # appending zero f samples (and constant g) beyond the support changes nothing
    small = make_grid(10.0, 1000)
    big = make_grid(20.0, 2000)   # same spacing, doubled domain
    r = small.nodes
    f_small = np.exp(-((r - 2.0)) ** 2)
    f_small[r > 5.0] = 0.0
    f_big = np.concatenate([f_small, np.zeros(1000)])
    g_small = np.full(1000, baseline.g_inf)
    g_big = np.full(2000, baseline.g_inf)
    p_small = Profile.from_samples(small, f_small, g_small)
    p_big = Profile.from_samples(big, f_big, g_big)
    for fn in (compute_K, compute_J, compute_I, compute_E, compute_Q):
        assert fn(p_big, baseline) == pytest.approx(fn(p_small, baseline),
                                                    rel=1e-12, abs=1e-14)


def test_value_at_origin_quadratic():
    grid = make_grid(5.0, 500)
    samples = 1.3 - 0.2 * grid.nodes**2
    assert value_at_origin(samples, grid) == pytest.approx(1.3, rel=1e-12)


def test_report_never_flags_trivial_state(baseline, baseline_grid):
    prof = Profile.from_samples(baseline_grid,
                                np.full(baseline_grid.n, 1e-16),
                                np.full(baseline_grid.n, baseline.g_inf))
    report = build_report(prof, baseline, iterations=0, converged=True,
                          method="minimize", residual_order=2)
    assert not report.nontrivial
