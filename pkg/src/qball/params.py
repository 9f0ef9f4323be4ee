"""Model parameters and the admissibility conditions.

The model is a complex scalar with potential
V(|phi|) = m^2 |phi|^2 - (h1/2)|phi|^4 + (h2/3)|phi|^6 coupled to a U(1)
gauge field with coupling e. The electric potential profile approaches a
nonzero constant g_inf at infinity, which plays the role of the internal
rotation frequency. Admissibility combines positivity of all couplings,
the global-minimum condition 3 h1^2 < 16 h2 m^2, and the window
0 < g_inf < m with h1^2 < (16/3) h2 (m^2 - g_inf^2).
"""

import math
from dataclasses import dataclass

from .errors import InvalidNumber, ParameterError

__all__ = ["ModelParams", "ValidationResult", "validate", "coercivity_constant"]


@dataclass(frozen=True)
class ModelParams:
    """Physical couplings and the gauge-potential boundary value.

    e    : gauge coupling (dimensionless, > 0)
    m    : scalar mass (inverse length, > 0)
    h1   : quartic self-coupling (> 0)
    h2   : sextic self-coupling (> 0)
    g_inf: boundary value of the electric potential profile (0 < g_inf < m)

    Construction accepts any numeric tuple; admissibility is checked by
    :func:`validate`.
    """

    e: float
    m: float
    h1: float
    h2: float
    g_inf: float

    @property
    def sigma(self):
        """Scalar decay rate sqrt(m^2 - g_inf^2) (valid parameters only)."""
        return math.sqrt(self.m**2 - self.g_inf**2)

    @property
    def amplitude_bound(self):
        """Upper bound sqrt(2 h1 / h2) on the scalar profile."""
        return math.sqrt(2.0 * self.h1 / self.h2)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple

    def __bool__(self):
        return self.ok


def validate(p):
    """Check every admissibility predicate and list the violated ones by name.

    Raises InvalidNumber for NaN/inf inputs. g_inf < 0 is rejected with a
    pointer to the sign symmetry (g -> -g maps solutions to solutions), it
    is not silently flipped.
    """
    values = (p.e, p.m, p.h1, p.h2, p.g_inf)
    if not all(math.isfinite(v) for v in values):
        raise InvalidNumber(f"non-finite model parameters: {values}")

    violations = []
    if not (p.e > 0 and p.m > 0 and p.h1 > 0 and p.h2 > 0):
        violations.append("positivity: e, m, h1, h2 must all be > 0")
    if not 3.0 * p.h1**2 < 16.0 * p.h2 * p.m**2:
        violations.append("global_minimum: 3*h1^2 < 16*h2*m^2")
    if p.g_inf < 0:
        violations.append(
            "sign: g_inf < 0 is rejected; by the sign symmetry g -> -g, "
            "solve with |g_inf| and flip the sign of g afterwards"
        )
    elif not 0.0 < p.g_inf < p.m:
        violations.append("window: 0 < g_inf < m")
    if not p.h1**2 < (16.0 / 3.0) * p.h2 * (p.m**2 - p.g_inf**2):
        violations.append("sextic: h1^2 < (16/3)*h2*(m^2 - g_inf^2)")
    return ValidationResult(ok=not violations, violations=tuple(violations))


def coercivity_constant(p):
    """Exact minimum over t = f^2 >= 0 of (m^2 - g_inf^2) - (h1/4) t + (h2/12) t^2.

    The quadratic in t attains its minimum at t = 3 h1 / (2 h2), giving
    c = (m^2 - g_inf^2) - 3 h1^2 / (16 h2), which is > 0 exactly when the
    sextic admissibility condition holds.
    """
    result = validate(p)
    if not result:
        raise ParameterError("; ".join(result.violations))
    return (p.m**2 - p.g_inf**2) - 3.0 * p.h1**2 / (16.0 * p.h2)
