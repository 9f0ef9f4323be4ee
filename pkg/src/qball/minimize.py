"""Outer minimization of the reduced action over the scalar profile.

The reduced action is I_red(f) = K(f) - J_f(g_f), where g_f comes from the
gauge solve at fixed f.  Because that solve is the exact stationarity
condition of the discrete gauge energy, the derivative of I_red carries no
dg/df term, and the gradient is the plain strong-form variational
derivative

    -(r^2 f')'/r^2 + (m^2 - g_f^2) f - (h1/2) f^3 + (h2/4) f^5

in the same conservative stencil.  Descent directions are preconditioned
by the inverse of (-Lap_r + sigma^2), sigma^2 = m^2 - g_inf^2, which is
the exact Hessian of I_red at the trivial point, assembled with the same
stencils; a Polak-Ribiere update accelerates the nonlinear phase and an
Armijo backtracking line search enforces strict decrease.  Iterates are
folded to |f| after every step: the discrete energies only see f through
f^2 and cell differences, and folding never increases either, so descent
is preserved and the output is nonnegative.

Seeding uses the piecewise trial profile (linear ramp, plateau, falling
exponential).  If descent converges to the trivial point, the plateau
radius is doubled, up to r_max/2; if every attempt collapses, a
TrivialCollapse carrying the last state is raised.
"""

import numpy as np
from dataclasses import dataclass
from scipy.linalg import solve_banded

from .errors import OptionsError, ParameterError, StalledError, TrivialCollapse
from .functionals import Profile, build_report
from .gauge import GaugeSolveOptions, check_constraint, gauge_energy, solve_gauge
from .params import coercivity_constant, validate

__all__ = ["MinimizeOptions", "trial_profile", "reduced_gradient",
           "reduced_action", "minimize"]


@dataclass(frozen=True)
class MinimizeOptions:
    max_iterations: int = 2000
    gradient_tolerance: float = 1e-8    # L2(r^2 dr) norm
    step_initial: float = 1.0
    step_backtrack: float = 0.5
    step_sufficient_decrease: float = 1e-4
    trial_h0: float = 1.0
    trial_r_plateau: float = 5.0
    boundary_mode: str = "robin"

    def __post_init__(self):
        if not (self.max_iterations > 0 and self.gradient_tolerance > 0
                and self.step_initial > 0 and self.step_sufficient_decrease > 0
                and self.trial_h0 > 0 and self.trial_r_plateau > 0):
            raise OptionsError("minimize options must be positive")
        if not 0.0 < self.step_backtrack < 1.0:
            raise OptionsError("backtracking factor must lie in (0, 1)")


def trial_profile(h0, R, grid):
    """Ramp/plateau/exponential trial: h0*r, then h0, then h0*exp(R - r)."""
    if h0 <= 0:
        raise OptionsError("trial amplitude h0 must be > 0")
    if not 1.0 < R < grid.r_max:
        raise OptionsError(f"plateau radius must satisfy 1 < R < r_max, got {R}")
    r = grid.nodes
    f = np.where(r <= 1.0, h0 * r, np.where(r <= R, h0, h0 * np.exp(R - r)))
    f[-1] = 0.0
    return f


def _wdot(w, u, v):
    return float(np.sum(w * u * v))


def scalar_energy(f, grid, p):
    """Discrete K(f) in the stiffness form matched to the gauge solve."""
    h = grid.spacing
    stiff = np.sum(grid.face_moments * np.diff(f) ** 2) / h**2
    pot = np.sum(grid.weights * (p.m**2 * f**2 - 0.25 * p.h1 * f**4
                                 + p.h2 / 12.0 * f**6))
    return 0.5 * float(stiff + pot)


def reduced_action(f, grid, p, opts=MinimizeOptions()):
    """I_red(f) = K(f) - J_f(g_f); returns (value, g_f)."""
    g = solve_gauge(f, grid, p, GaugeSolveOptions(boundary_mode=opts.boundary_mode))
    val = scalar_energy(f, grid, p) - gauge_energy(f, g, grid, p,
                                                   boundary_mode=opts.boundary_mode)
    return val, g


def _strong_gradient(f, g, grid, p):
    """Variational derivative of the reduced action, zero at the clamped end."""
    h = grid.spacing
    w = grid.weights
    flux = grid.face_moments * np.diff(f) / h**2
    out = np.empty(grid.n)
    out[0] = -flux[0] / w[0]
    out[1:-1] = (flux[:-1] - flux[1:]) / w[1:-1]
    out[-1] = 0.0
    out += (p.m**2 - g**2) * f - 0.5 * p.h1 * f**3 + 0.25 * p.h2 * f**5
    out[-1] = 0.0
    return out


def reduced_gradient(f, grid, p, opts=MinimizeOptions()):
    """Gradient of the reduced action at f (solves the gauge field internally).

    The pairing is the weighted one: d/dt I_red(f + t ftilde) at t = 0
    equals sum_i w_i grad_i ftilde_i for any direction vanishing at r_max.
    """
    f = np.asarray(f, dtype=float)
    g = solve_gauge(f, grid, p, GaugeSolveOptions(boundary_mode=opts.boundary_mode))
    return _strong_gradient(f, g, grid, p)


def _preconditioner_bands(grid, sigma2):
    h = grid.spacing
    c = grid.face_moments / h**2
    w = grid.weights
    n = grid.n
    diag = np.empty(n)
    upper = np.zeros(n)
    lower = np.zeros(n)
    diag[0] = c[0] + sigma2 * w[0]
    upper[0] = -c[0]
    lower[1:n - 1] = -c[:n - 2]
    diag[1:n - 1] = c[:n - 2] + c[1:n - 1] + sigma2 * w[1:n - 1]
    upper[1:n - 1] = -c[1:n - 1]
    diag[n - 1] = 1.0
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return ab


def _descent_run(p, grid, opts, f_start, history=None):
    """One descent run from f_start.  Returns (f, g, report_parts).

    When a list is passed as history, a record per visited iterate is
    appended with the objective value, gradient norm, and the coercivity
    lower bound (1/2) int (f'^2 + c f^2) r^2 dr - g_inf^2/e^2.
    """
    w = grid.weights
    c0 = coercivity_constant(p)
    gauge_opts = GaugeSolveOptions(boundary_mode=opts.boundary_mode)
    precond = _preconditioner_bands(grid, p.m**2 - p.g_inf**2)

    def apply_precond(v):
        rhs = w * v
        rhs[-1] = 0.0
        return solve_banded((1, 1), precond, rhs)

    def lower_bound(f):
        h = grid.spacing
        stiff = np.sum(grid.face_moments * np.diff(f) ** 2) / h**2
        return 0.5 * float(stiff + c0 * np.sum(w * f * f)) - p.g_inf**2 / p.e**2

    f = np.abs(np.asarray(f_start, dtype=float))
    f[-1] = 0.0
    g = solve_gauge(f, grid, p, gauge_opts)
    value = scalar_energy(f, grid, p) - gauge_energy(f, g, grid, p,
                                                     boundary_mode=opts.boundary_mode)
    coercivity_violations = 0
    constraint_max = 0.0
    direction = None
    grad_prev = None
    pgrad_prev = None
    iterations = 0
    converged = False

    while iterations < opts.max_iterations:
        grad = _strong_gradient(f, g, grid, p)
        grad_norm = np.sqrt(_wdot(w, grad, grad))
        bound = lower_bound(f)
        if value < bound:
            coercivity_violations += 1
        constraint_max = max(constraint_max, check_constraint(f, g, grid, p))
        if history is not None:
            history.append({"iteration": iterations, "value": value,
                            "grad_norm": grad_norm, "lower_bound": bound})
        if grad_norm <= opts.gradient_tolerance:
            converged = True
            break

        pgrad = apply_precond(grad)
        if direction is None:
            direction = -pgrad
        else:
            beta = _wdot(w, grad, pgrad - pgrad_prev) / _wdot(w, grad_prev, pgrad_prev)
            beta = max(0.0, beta)
            direction = -pgrad + beta * direction
            if _wdot(w, grad, direction) >= 0.0:
                direction = -pgrad
        slope = _wdot(w, grad, direction)

        alpha = opts.step_initial
        accepted = False
        while alpha > 1e-14:
            f_try = np.abs(f + alpha * direction)
            f_try[-1] = 0.0
            g_try = solve_gauge(f_try, grid, p, gauge_opts)
            value_try = scalar_energy(f_try, grid, p) - gauge_energy(
                f_try, g_try, grid, p, boundary_mode=opts.boundary_mode)
            if value_try <= value + opts.step_sufficient_decrease * alpha * slope:
                accepted = True
                break
            alpha *= opts.step_backtrack
        if not accepted:
            profile = Profile.from_samples(grid, f, g)
            report = build_report(
                profile, p, iterations=iterations, converged=False,
                method="minimize", residual_order=2,
                coercivity_violations=coercivity_violations,
                constraint_violation_max=constraint_max,
                message=f"line search stalled at gradient norm {grad_norm:.3e}")
            raise StalledError("line search failed to find a decrease",
                               profile=profile, report=report)

        f, g, value = f_try, g_try, value_try
        grad_prev, pgrad_prev = grad, pgrad
        iterations += 1

    return f, g, iterations, converged, coercivity_violations, constraint_max


def minimize(p, grid, opts=MinimizeOptions(), f0=None, history=None):
    """Minimize the reduced action; return (Profile, SolveReport).

    With f0=None the run is seeded by the trial profile and, on a trivial
    outcome, retried with the plateau radius doubled up to r_max/2.  With
    an explicit f0 a single run is performed and the caller owns any retry
    policy.  A trivial outcome raises TrivialCollapse carrying the final
    state; a failed line search raises StalledError likewise.  A list
    passed as history collects one record per visited iterate across all
    attempts.
    """
    result = validate(p)
    if not result:
        raise ParameterError("; ".join(result.violations))

    if f0 is not None:
        seeds = [np.asarray(f0, dtype=float)]
    else:
        seeds = []
        R = opts.trial_r_plateau
        while R <= 0.5 * grid.r_max:
            seeds.append(trial_profile(opts.trial_h0, R, grid))
            R *= 2.0
        if not seeds:
            raise OptionsError(
                f"trial plateau {opts.trial_r_plateau} exceeds r_max/2 = {0.5 * grid.r_max}")

    last = None
    for attempt, seed in enumerate(seeds):
        f, g, iterations, converged, viol, cmax = _descent_run(p, grid, opts, seed,
                                                               history=history)
        profile = Profile.from_samples(grid, f, g)
        report = build_report(
            profile, p, iterations=iterations, converged=converged,
            method="minimize", residual_order=2,
            coercivity_violations=viol, constraint_violation_max=cmax,
            message=f"descent attempt {attempt + 1}/{len(seeds)}")
        if not converged:
            # iteration budget exhausted; hand the partial state back
            return profile, report
        if report.nontrivial:
            return profile, report
        last = (profile, report)

    profile, report = last
    raise TrivialCollapse(
        "descent converged to the trivial solution for every trial seed "
        "(no I < 0 certificate)", profile=profile, report=report)
