"""Run configuration, profile/report persistence, and figure emission.

Configs are YAML with flat sections (model, grid, minimize, shoot, sweep,
output); every physical default lives in the config, not in code.  The
truncation radius is specified in decay units (r_max = rmax_sigma / sigma)
so one config stays valid across parameter changes.  Profiles persist as
CSV at full double precision (17 significant digits, so reads round-trip
bit-exactly) and reports as JSON embedding the config that produced them.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .functionals import Profile
from .grid import make_grid
from .minimize import MinimizeOptions
from .params import ModelParams
from .shooting import ShootOptions

__all__ = ["RunConfig", "load_config", "grid_for", "write_profile",
           "read_profile", "write_report", "write_sweep", "make_figures"]

PROFILE_HEADER = ["r", "f", "g", "f_prime", "g_prime"]


@dataclass
class RunConfig:
    model: ModelParams
    rmax_sigma: float
    n: int
    minimize: MinimizeOptions
    shoot: ShootOptions
    sweep_g_inf: list
    output_dir: str
    formats: list
    raw: dict = field(repr=False, default_factory=dict)


def _lookup(data, path, kind, default=None, required=False):
    node = data
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            if required:
                raise ConfigError(f"{path}: missing required field")
            return default
        node = node[key]
    if kind is float:
        if isinstance(node, bool) or not isinstance(node, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {node!r}")
        return float(node)
    if kind is int:
        if isinstance(node, bool) or not isinstance(node, int):
            raise ConfigError(f"{path}: expected an integer, got {node!r}")
        return node
    if kind is str:
        if not isinstance(node, str):
            raise ConfigError(f"{path}: expected a string, got {node!r}")
        return node
    if kind is list:
        if not isinstance(node, list):
            raise ConfigError(f"{path}: expected a list, got {node!r}")
        return node
    return node


def load_config(path):
    """Parse and validate a YAML run configuration."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    model = ModelParams(
        e=_lookup(data, "model.e", float, required=True),
        m=_lookup(data, "model.m", float, required=True),
        h1=_lookup(data, "model.h1", float, required=True),
        h2=_lookup(data, "model.h2", float, required=True),
        g_inf=_lookup(data, "model.g_inf", float, required=True),
    )
    rmax_sigma = _lookup(data, "grid.rmax_sigma", float, default=25.0)
    n = _lookup(data, "grid.n", int, default=4000)
    if n < 16:
        raise ConfigError("grid.n: must be at least 16")

    try:
        mini = MinimizeOptions(
            max_iterations=_lookup(data, "minimize.max_iterations", int, 2000),
            gradient_tolerance=_lookup(data, "minimize.gradient_tolerance", float, 1e-8),
            step_initial=_lookup(data, "minimize.step_initial", float, 1.0),
            step_backtrack=_lookup(data, "minimize.step_backtrack", float, 0.5),
            step_sufficient_decrease=_lookup(
                data, "minimize.step_sufficient_decrease", float, 1e-4),
            trial_h0=_lookup(data, "minimize.trial_h0", float, 1.0),
            trial_r_plateau=_lookup(data, "minimize.trial_r_plateau", float, 5.0),
            boundary_mode=_lookup(data, "minimize.boundary_mode", str, "robin"),
        )
        shoot = ShootOptions(
            match_sigma=_lookup(data, "shoot.match_sigma", float, 15.0),
            newton_tolerance=_lookup(data, "shoot.newton_tolerance", float, 1e-9),
            max_newton_iterations=_lookup(data, "shoot.max_newton_iterations", int, 40),
            max_restarts=_lookup(data, "shoot.max_restarts", int, 6),
        )
    except Exception as exc:
        raise ConfigError(f"invalid solver options: {exc}") from exc

    sweep = [float(v) for v in _lookup(data, "sweep.g_inf", list, default=[])]
    out_dir = _lookup(data, "output.directory", str, default="runs/out")
    formats = _lookup(data, "output.formats", list, default=["csv", "json", "svg"])
    return RunConfig(model=model, rmax_sigma=rmax_sigma, n=n, minimize=mini,
                     shoot=shoot, sweep_g_inf=sweep, output_dir=out_dir,
                     formats=formats, raw=data)


def grid_for(config, params=None):
    """Build the grid from the decay-scaled radius policy."""
    p = params or config.model
    sigma2 = p.m**2 - p.g_inf**2
    if sigma2 <= 0:
        raise ConfigError("grid radius undefined: requires g_inf < m")
    return make_grid(config.rmax_sigma / math.sqrt(sigma2), config.n)


def write_profile(profile, path):
    """CSV with header r,f,g,f_prime,g_prime at full double precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_HEADER)
        for row in zip(profile.grid.nodes, profile.f, profile.g,
                       profile.f_prime, profile.g_prime):
            writer.writerow([f"{v:.17g}" for v in row])
    return path


def read_profile(path):
    """Read a profile CSV back; samples round-trip bit-exactly."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PROFILE_HEADER:
            raise ConfigError(f"{path}: unexpected profile header {header}")
        rows = [[float(v) for v in row] for row in reader]
    if len(rows) < 16:
        raise ConfigError(f"{path}: too few profile rows ({len(rows)})")
    data = np.array(rows)
    r = data[:, 0]
    grid = make_grid(r[-1], len(r))
    if not np.allclose(grid.nodes, r, rtol=0, atol=1e-12 * r[-1]):
        raise ConfigError(f"{path}: radial nodes are not the uniform grid")
    return Profile(grid=grid, f=data[:, 1], g=data[:, 2],
                   f_prime=data[:, 3], g_prime=data[:, 4])


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value)}")


def write_report(payload, path):
    """Deterministic JSON dump (sorted keys, no timestamps)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True,
                               default=_json_default) + "\n")
    return path


def write_sweep(sweep, trend, config_raw, path):
    return write_report({"config": config_raw, "sweep": sweep.to_dict(),
                         "trend": trend}, path)


def make_figures(run_dir, fmt="svg"):
    """Emit static vector figures for a stored run directory.

    Produces profile_f, profile_g, tail_logrf and, when sweep.json is
    present, charge_vs_ginf.  Returns the list of written paths.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    run_dir = Path(run_dir)
    written = []
    profile_path = run_dir / "profile.csv"
    if profile_path.exists():
        profile = read_profile(profile_path)
        r = profile.grid.nodes
        for name, values, label in (("profile_f", profile.f, "f(r)"),
                                    ("profile_g", profile.g, "g(r)")):
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.plot(r, values, lw=1.2)
            ax.set_xlabel("r")
            ax.set_ylabel(label)
            ax.grid(alpha=0.3)
            out = run_dir / f"{name}.{fmt}"
            fig.savefig(out)
            plt.close(fig)
            written.append(out)

        mask = profile.f > 1e-12
        if np.count_nonzero(mask) > 2:
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.plot(r[mask], np.log(r[mask] * profile.f[mask]), lw=1.2)
            ax.set_xlabel("r")
            ax.set_ylabel("ln(r f)")
            ax.grid(alpha=0.3)
            out = run_dir / f"tail_logrf.{fmt}"
            fig.savefig(out)
            plt.close(fig)
            written.append(out)

    sweep_path = run_dir / "sweep.json"
    if sweep_path.exists():
        payload = json.loads(sweep_path.read_text())
        rows = payload.get("sweep", {}).get("rows", [])
        if rows:
            fig, ax = plt.subplots(figsize=(6, 4))
            xs = [row["g_inf"] for row in rows]
            ys = [row["Q"] for row in rows]
            ax.plot(xs, ys, "o-", lw=1.2)
            ax.set_xlabel("g_inf")
            ax.set_ylabel("Q")
            ax.grid(alpha=0.3)
            out = run_dir / f"charge_vs_ginf.{fmt}"
            fig.savefig(out)
            plt.close(fig)
            written.append(out)
    return written
