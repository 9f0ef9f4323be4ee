"""Scalar functionals of profile pairs: K, J, I, E, Q and bounds.

All integrals are radial, against r^2 dr on the truncated grid; the 4*pi
of the physical energy and charge conventions is applied only where a
report stores E_total and Q.  Derivatives are cached on the Profile and
reused by every functional.
"""

import math
import numpy as np
from dataclasses import dataclass, field

from . import grid as gridmod
from .errors import NumericsError
from .params import coercivity_constant

__all__ = ["Profile", "SolveReport", "compute_K", "compute_J", "compute_I",
           "compute_E", "compute_Q", "coercivity_lower_bound",
           "ode_residuals", "value_at_origin", "build_report"]

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class Profile:
    """Sampled profile pair (f, g) with cached derivative samples."""

    grid: gridmod.RadialGrid
    f: np.ndarray
    g: np.ndarray
    f_prime: np.ndarray = field(repr=False, default=None)
    g_prime: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_samples(cls, grid, f, g):
        f = np.asarray(f, dtype=float)
        g = np.asarray(g, dtype=float)
        if f.shape != (grid.n,) or g.shape != (grid.n,):
            raise NumericsError("profile samples do not match the grid")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise NumericsError("profile samples contain non-finite values")
        return cls(grid=grid, f=f, g=g,
                   f_prime=gridmod.differentiate(f, grid),
                   g_prime=gridmod.differentiate(g, grid))


@dataclass
class SolveReport:
    """Energies, charge, residual norms, and the nontriviality certificate."""

    K: float
    J: float
    I: float
    E: float                  # radial energy integral
    E_total: float            # 4*pi * E
    Q: float                  # 4*pi*e * int g f^2 r^2 dr
    residual_f: float
    residual_g: float
    nontrivial: bool
    converged: bool
    iterations: int
    method: str = ""
    coercivity_violations: int = 0
    constraint_violation_max: float = 0.0
    message: str = ""

    def to_dict(self):
        return {
            "K": self.K, "J": self.J, "I": self.I,
            "E_radial": self.E, "E_total": self.E_total, "Q": self.Q,
            "residual_f": self.residual_f, "residual_g": self.residual_g,
            "nontrivial": self.nontrivial, "converged": self.converged,
            "iterations": self.iterations, "method": self.method,
            "coercivity_violations": self.coercivity_violations,
            "constraint_violation_max": self.constraint_violation_max,
            "message": self.message,
        }


def _finite(value, name):
    if not math.isfinite(value):
        raise NumericsError(f"{name} evaluated to a non-finite value")
    return value


def compute_K(profile, p):
    """(1/2) int { f'^2 + m^2 f^2 - (h1/4) f^4 + (h2/12) f^6 } r^2 dr."""
    f, fp = profile.f, profile.f_prime
    density = fp**2 + p.m**2 * f**2 - 0.25 * p.h1 * f**4 + p.h2 / 12.0 * f**6
    return _finite(0.5 * gridmod.integrate(density, profile.grid), "K")


def compute_J(profile, p):
    """(1/2) int { (1/e^2) g'^2 + g^2 f^2 } r^2 dr."""
    f, g, gp = profile.f, profile.g, profile.g_prime
    density = gp**2 / p.e**2 + g**2 * f**2
    return _finite(0.5 * gridmod.integrate(density, profile.grid), "J")


def compute_I(profile, p):
    """Indefinite action K - J."""
    return _finite(compute_K(profile, p) - compute_J(profile, p), "I")


def compute_E(profile, p):
    """Radial energy integral; the physical energy is 4*pi times this."""
    f, g, fp, gp = profile.f, profile.g, profile.f_prime, profile.g_prime
    density = (fp**2 + gp**2 / p.e**2 + g**2 * f**2
               + p.m**2 * f**2 - 0.25 * p.h1 * f**4 + p.h2 / 12.0 * f**6)
    return _finite(0.5 * gridmod.integrate(density, profile.grid), "E")


def compute_Q(profile, p):
    """Electric charge 4*pi*e int g f^2 r^2 dr."""
    density = profile.g * profile.f**2
    return _finite(FOUR_PI * p.e * gridmod.integrate(density, profile.grid), "Q")


def coercivity_lower_bound(profile, p):
    """(1/2) int (f'^2 + c f^2) r^2 dr - g_inf^2/e^2 with the exact c."""
    c = coercivity_constant(p)
    density = profile.f_prime**2 + c * profile.f**2
    val = 0.5 * gridmod.integrate(density, profile.grid) - p.g_inf**2 / p.e**2
    return _finite(val, "coercivity lower bound")


def value_at_origin(samples, grid):
    """Extrapolate an even profile to r = 0 from the first two nodes."""
    return float((4.0 * samples[0] - samples[1]) / 3.0)


def _rhs_f(f, g, p):
    return (p.m**2 - g**2) * f - 0.5 * p.h1 * f**3 + 0.25 * p.h2 * f**5


def _residual_conservative(f, g, grid, p):
    """Residuals of both equations in the solver's own stencil."""
    h = grid.spacing
    w = grid.weights
    flux_f = grid.face_moments * np.diff(f) / h**2
    flux_g = grid.face_moments * np.diff(g) / h**2
    lap_f = np.empty(grid.n - 1)
    lap_g = np.empty(grid.n - 1)
    lap_f[0] = flux_f[0] / w[0]
    lap_g[0] = flux_g[0] / w[0]
    lap_f[1:] = (flux_f[1:] - flux_f[:-1]) / w[1:-1]
    lap_g[1:] = (flux_g[1:] - flux_g[:-1]) / w[1:-1]
    res_f = lap_f - _rhs_f(f[:-1], g[:-1], p)
    res_g = lap_g - p.e**2 * g[:-1] * f[:-1] ** 2
    wi = w[:-1]
    return (float(np.sqrt(np.sum(wi * res_f**2))),
            float(np.sqrt(np.sum(wi * res_g**2))))


def _residual_wide(f, g, grid, p):
    """Residuals by fourth-order centered differences on deep interior nodes.

    Matches the accuracy of a fourth-order trajectory, so a Runge-Kutta
    solution is not penalized for the O(h^2) consistency error of the
    narrow stencil.
    """
    h = grid.spacing
    r = grid.nodes[2:-2]
    w = grid.weights[2:-2]

    def second(v):
        return (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h**2)

    def first(v):
        return (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)

    fi, gi = f[2:-2], g[2:-2]
    res_f = second(f) + 2.0 / r * first(f) - _rhs_f(fi, gi, p)
    res_g = second(g) + 2.0 / r * first(g) - p.e**2 * gi * fi**2
    return (float(np.sqrt(np.sum(w * res_f**2))),
            float(np.sqrt(np.sum(w * res_g**2))))


def ode_residuals(profile, p, order=2):
    """L2(r^2 dr) norms of the discrete residuals of both field equations.

    order=2 evaluates the conservative stencil that the variational solver
    drives to zero; order=4 evaluates wide centered stencils appropriate
    for a fourth-order integrated trajectory.
    """
    if order == 2:
        return _residual_conservative(profile.f, profile.g, profile.grid, p)
    if order == 4:
        return _residual_wide(profile.f, profile.g, profile.grid, p)
    raise ValueError(f"unsupported residual order {order}")


def build_report(profile, p, *, iterations, converged, method, residual_order,
                 coercivity_violations=0, constraint_violation_max=0.0,
                 message=""):
    """Assemble a SolveReport from a profile pair.

    The nontriviality certificate is I < 0 with a noise guard: at the
    trivial point the computed I is roundoff at the scale of the separate
    K and J evaluations, so the strict sign test would occasionally flag
    a collapsed state as nontrivial.  Any genuine certificate is far below
    the guard.
    """
    K = compute_K(profile, p)
    J = compute_J(profile, p)
    I = compute_I(profile, p)
    E = compute_E(profile, p)
    Q = compute_Q(profile, p)
    res_f, res_g = ode_residuals(profile, p, order=residual_order)
    noise_floor = 1e-10 * max(1.0, abs(K), abs(J))
    return SolveReport(
        K=K, J=J, I=I, E=E, E_total=FOUR_PI * E, Q=Q,
        residual_f=res_f, residual_g=res_g,
        nontrivial=bool(I < -noise_floor),
        converged=converged, iterations=iterations, method=method,
        coercivity_violations=coercivity_violations,
        constraint_violation_max=constraint_violation_max,
        message=message,
    )
