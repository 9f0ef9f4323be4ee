"""Gauged Q-ball profile solver for the sextic-potential model.

Computes the radial profile pair (f, g) of a U(1) gauged scalar soliton by
constrained minimization of the reduced action, cross-validates against an
independent shooting method, and checks boundedness, monotonicity, origin
regularity, tail asymptotics, and the small-g_inf charge limit on the
results.
"""

from .analysis import (PropertyReport, SweepResult, SweepRow, charge_trend,
                       check_bounds, check_monotone_g, check_origin_slopes,
                       fit_decay_f, fit_tail_g, property_report, sweep_charge)
from .errors import (AnalysisError, BlowUpError, ConfigError, GridError,
                     InvalidNumber, NoMatchError, NumericsError, OptionsError,
                     ParameterError, QBallError, SolverError, StalledError,
                     TrivialCollapse)
from .functionals import (Profile, SolveReport, build_report,
                          coercivity_lower_bound, compute_E, compute_I,
                          compute_J, compute_K, compute_Q, ode_residuals,
                          value_at_origin)
from .gauge import (GaugeSolveOptions, check_constraint, constraint_bilinear,
                    default_test_functions, gauge_energy, gauge_residual,
                    solve_gauge)
from .grid import RadialGrid, differentiate, integrate, make_grid
from .io import (RunConfig, grid_for, load_config, make_figures, read_profile,
                 write_profile, write_report)
from .minimize import (MinimizeOptions, minimize, reduced_action,
                       reduced_gradient, trial_profile)
from .params import ModelParams, ValidationResult, coercivity_constant, validate
from .shooting import (ShootOptions, ShootState, integrate_outward,
                       series_start, shoot)

__version__ = "0.1.0"
