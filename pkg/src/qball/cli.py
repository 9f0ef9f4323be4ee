"""Command-line surface: validate / solve / oracle / compare / sweep / verify / plot.

Exit code 0 means every requested check passed; nonzero encodes the first
failing stage (see the EXIT_* constants).
"""

import argparse
import sys
from pathlib import Path

from . import analysis, io
from .errors import (ConfigError, NoMatchError, ParameterError, QBallError,
                     StalledError, TrivialCollapse)
from .functionals import value_at_origin
from .minimize import minimize
from .params import coercivity_constant, validate
from .shooting import shoot

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_VALIDATION = 4
EXIT_SOLVE = 5
EXIT_ORACLE = 6
EXIT_COMPARE = 7
EXIT_SWEEP = 8
EXIT_VERIFY = 9
EXIT_IO = 10

COMPARE_RTOL = 1e-3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="qball",
        description="Gauged Q-ball profile solver for the sextic potential model.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, with_config=True):
        cmd = sub.add_parser(name, help=help_text)
        if with_config:
            cmd.add_argument("config", help="run configuration (YAML)")
        cmd.add_argument("--out", default=None, help="output directory override")
        cmd.add_argument("--grid-n", type=int, default=None, help="grid size override")
        cmd.add_argument("--rmax-sigma", type=float, default=None,
                         help="truncation radius in units of 1/sigma")
        cmd.add_argument("--workers", type=int, default=1,
                         help="worker pool size for sweeps")
        return cmd

    add("validate", "check the model parameters against the admissibility conditions")
    add("solve", "run the constrained minimization and store profile + reports")
    add("oracle", "run the independent shooting method and store the same outputs")
    add("compare", "run both solvers and report their relative differences")
    add("sweep", "run the g_inf charge sweep")
    verify = add("verify", "re-run the property checks on a stored profile",
                 with_config=False)
    verify.add_argument("profile", help="stored profile CSV")
    verify.add_argument("config", help="run configuration (YAML)")
    plot = sub.add_parser("plot", help="emit static figures for a run directory")
    plot.add_argument("run_dir", help="directory holding profile.csv / sweep.json")
    return parser


def _load(args):
    config = io.load_config(args.config)
    if args.grid_n is not None:
        config.n = args.grid_n
    if getattr(args, "rmax_sigma", None) is not None:
        config.rmax_sigma = args.rmax_sigma
    if args.out is not None:
        config.output_dir = args.out
    return config


def _cmd_validate(args):
    config = _load(args)
    p = config.model
    result = validate(p)
    print(f"parameters: e={p.e} m={p.m} h1={p.h1} h2={p.h2} g_inf={p.g_inf}")
    print(f"  positivity (e, m, h1, h2 > 0): "
          f"{'ok' if all(v > 0 for v in (p.e, p.m, p.h1, p.h2)) else 'VIOLATED'}")
    print(f"  global minimum 3*h1^2 < 16*h2*m^2: "
          f"{3 * p.h1**2:.6g} < {16 * p.h2 * p.m**2:.6g}: "
          f"{'ok' if 3 * p.h1**2 < 16 * p.h2 * p.m**2 else 'VIOLATED'}")
    print(f"  window 0 < g_inf < m: "
          f"{'ok' if 0 < p.g_inf < p.m else 'VIOLATED'}")
    print(f"  sextic h1^2 < (16/3)*h2*(m^2 - g_inf^2): "
          f"{p.h1**2:.6g} < {16.0 / 3.0 * p.h2 * (p.m**2 - p.g_inf**2):.6g}: "
          f"{'ok' if p.h1**2 < 16.0 / 3.0 * p.h2 * (p.m**2 - p.g_inf**2) else 'VIOLATED'}")
    if result:
        print(f"  coercivity constant c = {coercivity_constant(p):.6g}")
        print("validation: ok")
        return EXIT_OK
    for violation in result.violations:
        print(f"validation: {violation}", file=sys.stderr)
    return EXIT_VALIDATION


def _write_solution(config, profile, report, out_dir, prefix=""):
    out_dir = Path(out_dir)
    props = analysis.property_report(profile, config.model)
    io.write_profile(profile, out_dir / f"{prefix}profile.csv")
    io.write_report({"config": config.raw, "solve": report.to_dict(),
                     "properties": props.to_dict()},
                    out_dir / f"{prefix}report.json")
    return props


def _run_solver(config, runner, failure_exit, prefix=""):
    """Run minimize or shoot; persist whatever state is available."""
    result = validate(config.model)
    if not result:
        for violation in result.violations:
            print(f"validation: {violation}", file=sys.stderr)
        return EXIT_VALIDATION, None, None
    grid = io.grid_for(config)
    try:
        profile, report = runner(config, grid)
    except (TrivialCollapse, StalledError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        if exc.profile is not None:
            _write_solution(config, exc.profile, exc.report,
                            config.output_dir, prefix)
        return failure_exit, exc.profile, exc.report
    except NoMatchError as exc:
        print(f"NoMatchError: {exc}", file=sys.stderr)
        io.write_report({"config": config.raw, "error": str(exc),
                         "attempts": exc.attempts},
                        Path(config.output_dir) / f"{prefix}report.json")
        return failure_exit, None, None
    props = _write_solution(config, profile, report, config.output_dir, prefix)
    print(f"{report.method}: converged={report.converged} "
          f"nontrivial={report.nontrivial} I={report.I:.6e} Q={report.Q:.6e} "
          f"E_total={report.E_total:.6e}")
    print(f"  residuals: f {report.residual_f:.3e}  g {report.residual_g:.3e}")
    print(f"  clause checks: {'all pass' if props.all_ok() else 'FAILURES'} "
          f"{props.pass_pattern()}")
    if not (report.converged and report.nontrivial):
        return failure_exit, profile, report
    return EXIT_OK, profile, report


def _cmd_solve(args):
    config = _load(args)
    code, _, _ = _run_solver(
        config, lambda cfg, grid: minimize(cfg.model, grid, cfg.minimize),
        EXIT_SOLVE)
    return code


def _cmd_oracle(args):
    config = _load(args)
    code, _, _ = _run_solver(
        config, lambda cfg, grid: shoot(cfg.model, grid, opts=cfg.shoot),
        EXIT_ORACLE)
    return code


def _cmd_compare(args):
    config = _load(args)
    code_min, prof_min, rep_min = _run_solver(
        config, lambda cfg, grid: minimize(cfg.model, grid, cfg.minimize),
        EXIT_SOLVE, prefix="minimize_")
    code_sht, prof_sht, rep_sht = _run_solver(
        config, lambda cfg, grid: shoot(cfg.model, grid, opts=cfg.shoot),
        EXIT_ORACLE, prefix="shoot_")
    if code_min != EXIT_OK:
        print("compare: minimization stage failed", file=sys.stderr)
        return code_min
    if code_sht != EXIT_OK:
        print("compare: shooting stage failed", file=sys.stderr)
        return code_sht

    grid = prof_min.grid
    pairs = {
        "f(0)": (value_at_origin(prof_min.f, grid), value_at_origin(prof_sht.f, grid)),
        "g(0)": (value_at_origin(prof_min.g, grid), value_at_origin(prof_sht.g, grid)),
        "E_total": (rep_min.E_total, rep_sht.E_total),
        "Q": (rep_min.Q, rep_sht.Q),
        "I": (rep_min.I, rep_sht.I),
    }
    print(f"{'quantity':>10s} {'minimize':>24s} {'shoot':>24s} {'rel diff':>12s}")
    worst = 0.0
    diffs = {}
    for name, (a, b) in pairs.items():
        scale = max(abs(a), abs(b), 1e-300)
        diff = abs(a - b) / scale
        diffs[name] = diff
        worst = max(worst, diff)
        print(f"{name:>10s} {a:>24.16e} {b:>24.16e} {diff:>12.3e}")
    io.write_report({"config": config.raw, "differences": diffs,
                     "minimize": rep_min.to_dict(), "shoot": rep_sht.to_dict()},
                    Path(config.output_dir) / "compare.json")
    if worst > COMPARE_RTOL:
        print(f"compare: worst relative difference {worst:.3e} exceeds {COMPARE_RTOL}",
              file=sys.stderr)
        return EXIT_COMPARE
    return EXIT_OK


def _cmd_sweep(args):
    config = _load(args)
    if not config.sweep_g_inf:
        print("sweep: config has no sweep.g_inf list", file=sys.stderr)
        return EXIT_CONFIG
    sweep = analysis.sweep_charge(config.model, config.sweep_g_inf,
                                  config.rmax_sigma, config.n,
                                  config.minimize, workers=args.workers)
    trend = analysis.charge_trend(sweep)
    io.write_sweep(sweep, trend, config.raw,
                   Path(config.output_dir) / "sweep.json")
    print(f"{'g_inf':>8s} {'Q':>14s} {'E_total':>14s} {'I':>14s} {'status':>10s}")
    for row in sweep.rows:
        status = "ok" if row.converged and row.nontrivial else (row.error or "trivial")
        print(f"{row.g_inf:>8.3f} {row.Q:>14.6e} {row.E_total:>14.6e} "
              f"{row.I:>14.6e} {status:>10s}")
    all_ok = all(row.converged and row.nontrivial for row in sweep.rows)
    if not (all_ok and trend["all_positive"] and trend["eventually_decreasing"]):
        print("sweep: trend checks failed", file=sys.stderr)
        return EXIT_SWEEP
    return EXIT_OK


def _cmd_verify(args):
    config = _load(args)
    try:
        profile = io.read_profile(args.profile)
    except (ConfigError, OSError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_IO
    props = analysis.property_report(profile, config.model)
    for clause, ok in (("bounds (i)", props.bounds_ok),
                       ("monotone g (ii)", props.monotone_ok),
                       ("flux r^2 g' (ii)", props.flux_monotone_ok),
                       ("origin slopes (iii)", props.origin_ok),
                       ("scalar decay (iv)", props.decay_ok),
                       ("gauge tail (iv)", props.tail_ok)):
        print(f"  {clause:<22s} {'PASS' if ok else 'FAIL'}")
    print(f"  sigma-hat = {props.decay_exponent_f:.6g} "
          f"(expected {props.decay_expected:.6g}), "
          f"beta-hat = {props.tail_coefficient_g:.6g}")
    return EXIT_OK if props.all_ok() else EXIT_VERIFY


def _cmd_plot(args):
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        print(f"plot: no such run directory {run_dir}", file=sys.stderr)
        return EXIT_IO
    written = io.make_figures(run_dir)
    if not written:
        print(f"plot: nothing to plot in {run_dir}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "solve": _cmd_solve,
    "oracle": _cmd_oracle,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "plot": _cmd_plot,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except QBallError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
