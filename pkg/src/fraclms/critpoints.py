"""Critical points of fractional gradients, and deterministic scalar descent.

For quadratic objectives the points where a Riemann-Liouville gradient of
order alpha vanishes can be written in closed form. Unlike the ordinary
critical point, they come in pairs, depend on the order alpha and the
lower terminal of the derivative, and move when an additive constant is
added to the objective. This module exposes those closed forms, the value
of the fractional derivative at the true minimum, a bound check for the
derivative at an interior minimum, and a scalar fractional descent loop.

All closed forms here are validated elsewhere against the quadrature
evaluator in :mod:`fraclms.fracderiv`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from .fracderiv import (
    DomainError,
    check_alpha,
    gamma,
    rl_deriv_numeric,
    rl_deriv_numeric_right,
)

__all__ = [
    "ScalarQuadratic",
    "CriticalPointReport",
    "DescentMode",
    "DescentResult",
    "flms1_critical_points",
    "flms1_critical_points_noconst",
    "flms2_critical_sequence",
    "example_quadratic_critical_points",
    "rl_deriv_at_true_minimum",
    "check_refai_bound",
    "fractional_descent_scalar",
    "rl_deriv_quadratic",
]


@dataclass(frozen=True)
class ScalarQuadratic:
    """Convex quadratic ``a2*t**2 + a1*t + c`` with an RL lower terminal."""

    a2: float
    a1: float
    c: float = 0.0
    lower_limit: float = 0.0

    def __post_init__(self):
        if not self.a2 > 0.0:
            raise DomainError(f"a2 must be positive, got {self.a2!r}")

    def __call__(self, t: float) -> float:
        return self.a2 * t * t + self.a1 * t + self.c

    def derivative(self, t: float) -> float:
        return 2.0 * self.a2 * t + self.a1

    @property
    def minimizer(self) -> float:
        return -self.a1 / (2.0 * self.a2)


@dataclass
class CriticalPointReport:
    """Ordinary vs fractional critical points of one quadratic instance.

    ``residuals`` holds the magnitude of the RL derivative at each
    fractional critical point, evaluated by quadrature; they are NaN when
    the pair is imaginary (no real point to evaluate at).
    """

    ordinary: float
    fractional_pair: Tuple[complex, complex]
    residuals: Tuple[float, float]
    imaginary: bool


def flms1_critical_points(d: float, x: float, alpha: float) -> Tuple[float, float]:
    """Both zeros of the fractional gradient of ``(d - w*x)**2`` over ``(0, w)``.

    Returns ``(d/(2x)) * ((2-alpha) +/- sqrt(alpha*(2-alpha)))``, plus root
    first. The discriminant is positive for every ``alpha`` in (0, 1], so
    the pair is always real and distinct from the ordinary critical point
    ``d/x``; as ``alpha -> 1`` the plus root tends to ``d/x`` and the minus
    root to 0.
    """
    check_alpha(alpha)
    if x == 0.0:
        raise DomainError("degenerate input: x must be non-zero")
    s = math.sqrt(alpha * (2.0 - alpha))
    base = d / (2.0 * x)
    return base * ((2.0 - alpha) + s), base * ((2.0 - alpha) - s)


def flms1_critical_points_noconst(d: float, x: float, alpha: float) -> Tuple[float, float]:
    """Critical points when the additive constant's derivative is dropped.

    Dropping the constant term from the objective before differentiating
    collapses the pair to ``{0, (2-alpha)*d/x}``; returned in that order.
    """
    check_alpha(alpha)
    if x == 0.0:
        raise DomainError("degenerate input: x must be non-zero")
    return 0.0, (2.0 - alpha) * d / x


def flms2_critical_sequence(w_prev: float, d: float, x: float, alpha: float) -> Tuple[float, float]:
    """Critical points of the short-memory gradient anchored at ``w_prev``.

    ``w_prev + (d - w_prev*x)/(2x) * ((2-alpha) +/- sqrt(alpha*(2-alpha)))``,
    plus root first. When the anchor sequence converges to the optimum
    ``d/x``, both outputs converge there too.
    """
    check_alpha(alpha)
    if x == 0.0:
        raise DomainError("degenerate input: x must be non-zero")
    s = math.sqrt(alpha * (2.0 - alpha))
    base = (d - w_prev * x) / (2.0 * x)
    return w_prev + base * ((2.0 - alpha) + s), w_prev + base * ((2.0 - alpha) - s)


# Fractional critical points of 2t^2 - t + c exist (as real points) only
# below this threshold on c; above it the pair is a complex conjugate pair.
def _imaginary_threshold(a: float, alpha: float) -> float:
    return (2.0 * (1.0 - alpha) + alpha * (4.0 * a - 1.0) ** 2) / (16.0 * (1.0 - alpha))


def example_quadratic_critical_points(q: ScalarQuadratic, alpha: float) -> CriticalPointReport:
    """Critical-point report for the reference quadratic ``2t**2 - t + c``.

    The fractional pair over ``(a, t)`` with ``a = q.lower_limit`` is

    ``a + (-(4a-1)(2-alpha) +/- sqrt((2-alpha)[alpha(4a-1)^2 - 2(8c-1)(1-alpha)])) / 8``

    and is imaginary iff ``c`` exceeds ``(2(1-alpha) + alpha(4a-1)^2) / (16(1-alpha))``.
    The ordinary critical point is 1/4 regardless of ``c`` and ``a``.
    Residuals are quadrature evaluations of the RL derivative at each real
    root; a root that falls on the lower terminal itself is a boundary case
    where the derivative's limit is zero, reported as residual 0.
    """
    check_alpha(alpha)
    if alpha == 1.0:
        raise DomainError("fractional pair requires alpha < 1")
    if not (q.a2 == 2.0 and q.a1 == -1.0):
        raise DomainError("reference quadratic must have a2=2, a1=-1")
    a = q.lower_limit
    if not 0.0 <= a < 0.25:
        raise DomainError(f"lower terminal must lie in [0, 1/4), got {a!r}")
    c = q.c
    disc = (2.0 - alpha) * (alpha * (4.0 * a - 1.0) ** 2 - 2.0 * (8.0 * c - 1.0) * (1.0 - alpha))
    lin = -(4.0 * a - 1.0) * (2.0 - alpha)
    imaginary = c > _imaginary_threshold(a, alpha)
    root = cmath.sqrt(disc)
    pair = (a + (lin + root) / 8.0, a + (lin - root) / 8.0)
    if imaginary:
        residuals = (math.nan, math.nan)
    else:
        residuals = tuple(
            abs(rl_deriv_numeric(alpha, q, (a, r.real))) if r.real - a > 1e-9 else 0.0
            for r in pair
        )
        pair = (pair[0].real, pair[1].real)
    return CriticalPointReport(
        ordinary=q.minimizer, fractional_pair=pair, residuals=residuals, imaginary=imaginary
    )


def rl_deriv_at_true_minimum(c: float, alpha: float) -> float:
    """RL derivative of ``2t**2 - t + c`` over ``(0, t)`` at the minimum ``t = 1/4``.

    Closed form: ``4**alpha / gamma(1-alpha) * (c - 1/(4*(2-alpha)))``.
    Strictly negative for every ``c < 1/(4*(2-alpha))`` -- the fractional
    gradient does not vanish at the true minimum. Verified against the
    quadrature evaluator. At ``alpha == 1`` the classical derivative
    vanishes there, so 0 is returned.
    """
    check_alpha(alpha)
    if alpha == 1.0:
        return 0.0
    return 4.0 ** alpha / gamma(1.0 - alpha) * (c - 1.0 / (4.0 * (2.0 - alpha)))


def check_refai_bound(f: Callable[[float], float], t_star: float, alpha: float) -> bool:
    """Bound on the RL derivative at an interior minimum of a smooth function.

    For twice continuously differentiable ``f`` on [0, 1] minimized at
    ``t_star`` in (0, 1), the left RL derivative at the minimizer cannot
    exceed ``t_star**(-alpha)/gamma(1-alpha) * f(t_star)``. Both sides are
    evaluated numerically and compared with 1e-6 slack.

    Raises
    ------
    DomainError
        If ``t_star`` is not in (0, 1) or is not a stationary point
        (central-difference derivative above 1e-8).
    """
    check_alpha(alpha)
    if not 0.0 < t_star < 1.0:
        raise DomainError(f"minimizer must lie in (0, 1), got {t_star!r}")
    h = 1e-6
    fprime = (f(t_star + h) - f(t_star - h)) / (2.0 * h)
    if abs(fprime) >= 1e-8:
        raise DomainError(f"t_star is not a stationary point: f'({t_star}) ~ {fprime:.3e}")
    lhs = rl_deriv_numeric(alpha, f, (0.0, t_star))
    if alpha == 1.0:
        rhs = 0.0
    else:
        rhs = t_star ** (-alpha) / gamma(1.0 - alpha) * f(t_star)
    return lhs <= rhs + 1e-6


class DescentMode(enum.Enum):
    """Lower-terminal policy for the scalar fractional descent."""

    RULE1_STYLE = "rule1"  # fixed lower terminal
    RULE2_STYLE = "rule2"  # moving lower terminal t_{n-1}


@dataclass
class DescentResult:
    """Iterate trajectory plus a flag for early non-finite termination."""

    trajectory: np.ndarray
    finite: bool


def rl_deriv_quadratic(
    q: ScalarQuadratic, lower: float, t: float, alpha: float, use_modulus: bool = True
) -> Union[float, complex]:
    """Closed-form RL derivative of a quadratic over ``(lower, t)``.

    Expands the quadratic about the lower terminal and applies the power
    rule term by term. With ``use_modulus`` the power bases use ``|t-lower|``
    (the sign-flip remedy); otherwise negative bases follow the complex
    principal branch. The constant term makes the derivative singular as
    ``t -> lower`` unless the quadratic vanishes at the terminal.
    """
    check_alpha(alpha)
    dt = t - lower
    if alpha == 1.0:
        return q.derivative(t)
    # numpy scalars so zero bases give inf under errstate instead of raising
    base = np.float64(abs(dt)) if use_modulus else np.complex128(dt)
    c1 = 1.0 / gamma(1.0 - alpha)
    c2 = 1.0 / gamma(2.0 - alpha)
    c3 = 1.0 / gamma(3.0 - alpha)
    quad_coeff = 2.0 * q.a2 * c3
    lin_coeff = (2.0 * q.a2 * lower + q.a1) * c2
    const_coeff = q(lower) * c1
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value = (
            quad_coeff * base ** (2.0 - alpha)
            + lin_coeff * base ** (1.0 - alpha)
            + const_coeff * base ** (-alpha)
        )
    return value


def fractional_descent_scalar(
    f: Union[ScalarQuadratic, Callable[[float], float]],
    mode: DescentMode,
    alpha: float,
    mu_f: float,
    t0: float,
    t_prev0: float,
    steps: int,
    lower_limit: float = 0.0,
    use_modulus: bool = True,
) -> DescentResult:
    """Iterate ``t <- t - (mu_f/2) * RL-derivative`` on a scalar objective.

    RULE1_STYLE differentiates over the fixed interval ``(lower_limit, t_n)``
    each step; RULE2_STYLE over the moving interval ``(t_{n-1}, t_n)``, the
    short-memory scheme, with the modulus remedy applied by default whenever
    the iterate moves downward (``use_modulus=False`` exposes the raw
    complex-branch behaviour deterministically; the trajectory then records
    real parts and terminates if iterates go non-finite).

    Quadratic objectives use the closed-form derivative; any other callable
    is differentiated by quadrature. ``mu_f == 0`` returns the constant
    trajectory without evaluating the derivative.
    """
    check_alpha(alpha)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    traj = np.empty(steps + 1)
    traj[0] = t0
    if mu_f == 0.0:
        traj[:] = t0
        return DescentResult(traj, True)
    is_quad = isinstance(f, ScalarQuadratic)
    if is_quad and mode is DescentMode.RULE1_STYLE:
        lower_limit = f.lower_limit
    t, t_prev = t0, t_prev0
    for n in range(steps):
        lower = lower_limit if mode is DescentMode.RULE1_STYLE else t_prev
        if is_quad:
            deriv = rl_deriv_quadratic(f, lower, t, alpha, use_modulus=use_modulus)
        elif t == lower:
            deriv = math.inf  # zero-width interval: derivative undefined
        elif t > lower:
            deriv = rl_deriv_numeric(alpha, f, (lower, t))
        else:
            # downward move: right-side derivative over (t, lower), the
            # rigorous form of the sign remedy for a general callable
            deriv = rl_deriv_numeric_right(alpha, f, t, lower)
        deriv = complex(deriv).real
        t_next = t - 0.5 * mu_f * deriv
        if not math.isfinite(t_next):
            traj[n + 1 :] = t
            return DescentResult(traj, False)
        t_prev, t = t, t_next
        traj[n + 1] = t
    return DescentResult(traj, True)
