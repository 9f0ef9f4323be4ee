"""Qualitative checks on computed profiles and the charge sweep.

Each check is a pure function of (Profile, ModelParams) and is run
identically on variational and shooting outputs.  Fit windows are
expressed in physical decay units where sensible so the checks stay
meaningful across resolutions.
"""

import numpy as np
from dataclasses import dataclass, field, replace
from multiprocessing import Pool

from .errors import AnalysisError, QBallError
from .minimize import MinimizeOptions, minimize
from .params import validate

__all__ = ["PropertyReport", "SweepRow", "SweepResult", "check_bounds",
           "check_monotone_g", "check_origin_slopes", "fit_decay_f",
           "fit_tail_g", "property_report", "sweep_charge", "charge_trend"]

# far-tail slack: f may underflow to zero and g may tie within this
FLOAT_TOL = 1e-14


@dataclass
class PropertyReport:
    """Per-clause pass flags and fitted quantities."""

    bounds_ok: bool
    bounds_margin_f: float          # min distance of f from (0, sqrt(2h1/h2))
    bounds_margin_g: float
    monotone_ok: bool
    flux_monotone_ok: bool          # r^2 g' nondecreasing
    origin_ok: bool
    origin_slope_f: float
    origin_slope_g: float
    origin_intercept_f: float
    origin_intercept_g: float
    decay_ok: bool
    decay_exponent_f: float         # fitted sigma-hat
    decay_expected: float           # sqrt(m^2 - g_inf^2)
    tail_ok: bool
    tail_coefficient_g: float       # fitted beta-hat
    tail_deviation_g: float         # max relative deviation of r(g_inf - g)
    notes: dict = field(default_factory=dict)

    def all_ok(self):
        return (self.bounds_ok and self.monotone_ok and self.flux_monotone_ok
                and self.origin_ok and self.decay_ok and self.tail_ok)

    def pass_pattern(self):
        return (self.bounds_ok, self.monotone_ok, self.flux_monotone_ok,
                self.origin_ok, self.decay_ok, self.tail_ok)

    def to_dict(self):
        out = {k: getattr(self, k) for k in (
            "bounds_ok", "bounds_margin_f", "bounds_margin_g", "monotone_ok",
            "flux_monotone_ok", "origin_ok", "origin_slope_f", "origin_slope_g",
            "origin_intercept_f", "origin_intercept_g", "decay_ok",
            "decay_exponent_f", "decay_expected", "tail_ok",
            "tail_coefficient_g", "tail_deviation_g")}
        out["notes"] = dict(self.notes)
        return out


def check_bounds(profile, p):
    """0 < f < sqrt(2 h1/h2) and 0 < g < g_inf at every interior node.

    Far-tail underflow of f to zero (within FLOAT_TOL) is tolerated with a
    note.  Returns (ok, margin_f, margin_g, notes); margins are the worst
    distances to the open interval, negative when violated, and the notes
    carry the first offending node index.
    """
    f, g = profile.f[:-1], profile.g[:-1]
    r = profile.grid.nodes[:-1]
    cap = p.amplitude_bound
    notes = {}

    low_f = float(np.min(f))
    margin_f = min(low_f, float(np.min(cap - f)))
    f_ok = bool(np.all(f > 0.0) and np.all(f < cap))
    if not f_ok and np.all(f < cap):
        # tolerate underflow to zero in the far tail only; a profile that
        # is not genuinely positive in the bulk fails strict positivity
        tail = r >= 0.75 * profile.grid.r_max
        underflow = np.abs(f) <= FLOAT_TOL
        if (np.all(f[~tail] > 0.0) and np.all(underflow[tail] | (f[tail] > 0.0))
                and float(np.max(f)) > FLOAT_TOL):
            f_ok = True
            notes["f_underflow"] = int(np.argmin(f))
    if not f_ok:
        bad = np.where((f <= 0.0) | (f >= cap))[0]
        notes["f_violation_node"] = int(bad[0])

    margin_g = min(float(np.min(g)), float(np.min(p.g_inf - g)))
    g_ok = bool(np.all(g > 0.0) and np.all(g < p.g_inf))
    if not g_ok:
        bad = np.where((g <= 0.0) | (g >= p.g_inf))[0]
        notes["g_violation_node"] = int(bad[0])

    return f_ok and g_ok, margin_f, margin_g, notes


def check_monotone_g(profile):
    """Strict increase of g, and nondecreasing discrete flux r^2 g'.

    Ties within FLOAT_TOL are tolerated in the far tail only (outer
    quarter of the domain, where the O(1/r) approach to g_inf can fall
    below resolution); a constant g therefore fails.  Returns
    (monotone_ok, flux_ok, notes).
    """
    g = profile.g
    r = profile.grid.nodes
    dg = np.diff(g)
    notes = {}
    monotone_ok = bool(np.all(dg > 0.0))
    if not monotone_ok:
        far = r[:-1] >= 0.75 * profile.grid.r_max
        bulk_ok = bool(np.all(dg[~far] > 0.0))
        tail_ok = bool(np.all(dg[far] > -FLOAT_TOL))
        if bulk_ok and tail_ok:
            monotone_ok = True
            notes["g_ties"] = int(np.argmin(dg))
    # one-sided end stencils are excluded: the flux statement is interior
    flux = (r**2 * profile.g_prime)[1:-1]
    dflux = np.diff(flux)
    scale = max(float(np.max(np.abs(flux))), 1.0)
    flux_ok = bool(np.all(dflux > -1e-9 * scale))
    return monotone_ok, flux_ok, notes


def _linear_fit(x, y):
    """Least squares y = intercept + slope*x; returns slope, intercept, relres."""
    A = np.vstack((x, np.ones_like(x))).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = y - (intercept + slope * x)
    scale = float(np.linalg.norm(y)) or 1.0
    return slope, intercept, float(np.linalg.norm(resid)) / scale


def _origin_fit(r, y):
    """Fit y = b0 + a1 r + a3 r^3 (odd expansion of an even profile's
    derivative, plus an intercept to detect regularity defects)."""
    A = np.vstack((np.ones_like(r), r, r**3)).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    scale = float(np.linalg.norm(y)) or 1.0
    return float(coef[1]), float(coef[0]), float(np.linalg.norm(resid)) / scale


def check_origin_slopes(profile, window_frac=0.05, rel_tol=0.05):
    """Fit f' and g' to alpha*r near the origin.

    The fit carries the r^3 term of the small-r expansion so window
    curvature does not leak into the intercept; pass requires the model
    residual within rel_tol and intercepts below grid-spacing scale.
    Returns (slope_f, slope_g, intercept_f, intercept_g, ok).
    """
    grid = profile.grid
    mask = grid.nodes <= window_frac * grid.r_max
    if np.count_nonzero(mask) < 8:
        raise AnalysisError("origin window too small (need at least 8 nodes)")
    r = grid.nodes[mask]
    slope_f, b_f, res_f = _origin_fit(r, profile.f_prime[mask])
    slope_g, b_g, res_g = _origin_fit(r, profile.g_prime[mask])
    h = grid.spacing
    ok = True
    for slope, intercept, res, deriv in (
            (slope_f, b_f, res_f, profile.f_prime[mask]),
            (slope_g, b_g, res_g, profile.g_prime[mask])):
        scale = max(abs(slope) * r[-1], float(np.max(np.abs(deriv))), 1e-300)
        if res > rel_tol and scale > FLOAT_TOL:
            ok = False
        if abs(intercept) > 2.0 * h * max(abs(slope), scale / r[-1]) + 1e-12:
            ok = False
    return slope_f, slope_g, b_f, b_g, ok


def fit_decay_f(profile, p, r_lo=None, floor=1e-12, min_nodes=50, band=0.05):
    """Fit sigma-hat from ln(r f) ~ -sigma r on the scalar tail.

    Window: r >= r_lo (default half the domain) and f > floor; the window
    shrinks from the right where f underflows.  Passes when sigma-hat lies
    within the band around sqrt(m^2 - g_inf^2).  Returns
    (sigma_hat, ok, window).
    """
    grid = profile.grid
    r = grid.nodes
    if r_lo is None:
        r_lo = 0.5 * grid.r_max
    mask = (r >= r_lo) & (profile.f > floor)
    count = int(np.count_nonzero(mask))
    if count < min_nodes:
        raise AnalysisError(
            f"decay window has {count} nodes (< {min_nodes}); "
            "tail underflowed or window misplaced")
    x = r[mask]
    y = np.log(x * profile.f[mask])
    slope, _, _ = _linear_fit(x, y)
    sigma_hat = -slope
    sigma = p.sigma
    ok = bool((1.0 - band) * sigma <= sigma_hat <= (1.0 + band) * sigma)
    return sigma_hat, ok, (float(x[0]), float(x[-1]))


def fit_tail_g(profile, p, support_floor=1e-8, dev_tol=0.02):
    """Fit beta-hat from r (g_inf - g) beyond the scalar support.

    The window is every node with r*f < support_floor.  Returns
    (beta_hat, deviation, ok, window); deviation is the max relative
    departure of r (g_inf - g) from its mean over the window.
    """
    grid = profile.grid
    r = grid.nodes
    mask = r * np.abs(profile.f) < support_floor
    if np.count_nonzero(mask) < 8:
        raise AnalysisError("tail window beyond the scalar support is empty")
    y = r[mask] * (p.g_inf - profile.g[mask])
    beta = float(np.mean(y))
    scale = max(abs(beta), FLOAT_TOL * p.g_inf * grid.r_max)
    deviation = float(np.max(np.abs(y - beta))) / scale
    return beta, deviation, bool(deviation <= dev_tol), (float(r[mask][0]), float(r[mask][-1]))


def property_report(profile, p):
    """Run every clause check and collect a PropertyReport."""
    bounds_ok, mf, mg, notes = check_bounds(profile, p)
    mono_ok, flux_ok, mono_notes = check_monotone_g(profile)
    notes.update(mono_notes)
    try:
        sf, sg, bf, bg, origin_ok = check_origin_slopes(profile)
    except AnalysisError as exc:
        sf = sg = bf = bg = float("nan")
        origin_ok = False
        notes["origin"] = str(exc)
    try:
        sigma_hat, decay_ok, decay_window = fit_decay_f(profile, p)
        notes["decay_window"] = decay_window
    except AnalysisError as exc:
        sigma_hat = float("nan")
        decay_ok = False
        notes["decay"] = str(exc)
    try:
        beta, dev, tail_ok, tail_window = fit_tail_g(profile, p)
        notes["tail_window"] = tail_window
    except AnalysisError as exc:
        beta = dev = float("nan")
        tail_ok = False
        notes["tail"] = str(exc)
    return PropertyReport(
        bounds_ok=bounds_ok, bounds_margin_f=mf, bounds_margin_g=mg,
        monotone_ok=mono_ok, flux_monotone_ok=flux_ok,
        origin_ok=origin_ok, origin_slope_f=sf, origin_slope_g=sg,
        origin_intercept_f=bf, origin_intercept_g=bg,
        decay_ok=decay_ok, decay_exponent_f=sigma_hat, decay_expected=p.sigma,
        tail_ok=tail_ok, tail_coefficient_g=beta, tail_deviation_g=dev,
        notes=notes)


@dataclass
class SweepRow:
    g_inf: float
    Q: float
    E_total: float
    I: float
    converged: bool
    nontrivial: bool
    error: str = ""

    def to_dict(self):
        return {"g_inf": self.g_inf, "Q": self.Q, "E_total": self.E_total,
                "I": self.I, "converged": self.converged,
                "nontrivial": self.nontrivial, "error": self.error}


@dataclass
class SweepResult:
    rows: list
    e: float
    m: float
    h1: float
    h2: float
    rmax_sigma: float
    n: int

    def converged_rows(self):
        return [row for row in self.rows if row.converged and row.nontrivial]

    def to_dict(self):
        return {"e": self.e, "m": self.m, "h1": self.h1, "h2": self.h2,
                "rmax_sigma": self.rmax_sigma, "n": self.n,
                "rows": [row.to_dict() for row in self.rows]}


def _sweep_row(args):
    p, g_inf, rmax_sigma, n, opts = args
    from .grid import make_grid   # local import keeps workers lightweight

    trial = replace(p, g_inf=g_inf)
    result = validate(trial)
    if not result:
        return SweepRow(g_inf=g_inf, Q=float("nan"), E_total=float("nan"),
                        I=float("nan"), converged=False, nontrivial=False,
                        error="; ".join(result.violations))
    grid = make_grid(rmax_sigma / trial.sigma, n)
    try:
        _, report = minimize(trial, grid, opts)
        return SweepRow(g_inf=g_inf, Q=report.Q, E_total=report.E_total,
                        I=report.I, converged=report.converged,
                        nontrivial=report.nontrivial)
    except QBallError as exc:
        report = getattr(exc, "report", None)
        if report is not None:
            return SweepRow(g_inf=g_inf, Q=report.Q, E_total=report.E_total,
                            I=report.I, converged=False,
                            nontrivial=report.nontrivial,
                            error=type(exc).__name__)
        return SweepRow(g_inf=g_inf, Q=float("nan"), E_total=float("nan"),
                        I=float("nan"), converged=False, nontrivial=False,
                        error=f"{type(exc).__name__}: {exc}")


def sweep_charge(p_base, g_inf_list, rmax_sigma, n, opts=MinimizeOptions(),
                 workers=1):
    """Run minimize for every g_inf value; rows are sorted by g_inf.

    Individual failures are recorded per row, not raised.  Rows run in a
    worker pool when workers > 1 and are gathered in input order.
    """
    jobs = [(p_base, float(g), rmax_sigma, n, opts) for g in g_inf_list]
    if workers > 1:
        with Pool(workers) as pool:
            rows = pool.map(_sweep_row, jobs)
    else:
        rows = [_sweep_row(job) for job in jobs]
    rows.sort(key=lambda row: row.g_inf)
    return SweepResult(rows=rows, e=p_base.e, m=p_base.m, h1=p_base.h1,
                       h2=p_base.h2, rmax_sigma=rmax_sigma, n=n)


def charge_trend(sweep):
    """Trend summary for the g_inf -> 0 limit of the charge.

    Uses converged nontrivial rows only: checks that Q decreases along the
    last two rows as g_inf decreases and reports the terminal charge ratio
    Q(min g_inf)/Q(max g_inf).
    """
    rows = sweep.converged_rows()
    if len(rows) < 2:
        return {"rows_used": len(rows), "terminal_ratio": float("nan"),
                "eventually_decreasing": False, "all_positive": False}
    qs = [row.Q for row in rows]             # ascending g_inf
    return {
        "rows_used": len(rows),
        "all_positive": bool(all(q > 0 for q in qs)),
        "eventually_decreasing": bool(qs[0] < qs[1]),
        "terminal_ratio": qs[0] / qs[-1] if qs[-1] != 0 else float("inf"),
    }
