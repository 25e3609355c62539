"""Streaming adaptive filters: classical LMS and its fractional-order variants.

Every filter is a state machine driven one sample at a time through a
``step_*`` function. Five update rules are provided:

* ``LMS`` -- plain stochastic gradient on the squared output error.
* ``FLMS1_RAW`` / ``FLMS1_MOD`` -- the LMS step augmented with a
  fractional-gradient term proportional to ``w**(1-alpha)`` per tap. The
  raw form evaluates the fractional power on the signed weight and goes
  complex as soon as any tap is negative; the modified form uses
  ``|w|**(1-alpha)`` and stays real.
* ``FLMS1_EXACT`` -- the full fractional gradient of the instantaneous
  squared error, with no dropped terms, using instantaneous surrogates
  for the correlation quantities.
* ``FLMS2_RAW`` / ``FLMS2_MOD`` -- the short-memory variant whose
  fractional power acts on the difference ``w_n - w_{n-1}``; the modified
  form supports a small bias ``epsilon`` inside the modulus to avoid
  stagnation when successive weights coincide.

Complex continuation
--------------------
The raw rules are run in complex arithmetic (principal branch of the
fractional power) instead of aborting at the first complex output, so
their failure modes produce plottable trajectories. The filter output is
the Hermitian inner product ``y = sum(conj(w) * x)``, the standard
adaptive-filter convention; for the real-weight rules it coincides
exactly with the plain transpose form. The first step at which a
fractional power acquires a non-zero imaginary part is recorded in
``FilterState.first_complex_at`` and never reset.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fracderiv import DomainError, check_alpha, gamma

__all__ = [
    "UpdateRule",
    "AlgorithmSpec",
    "FilterState",
    "StepOutcome",
    "complex_criterion",
    "step_lms",
    "step_flms1",
    "step_flms1_exact",
    "step_flms2",
    "step",
    "fractional_correction",
]


class UpdateRule(enum.Enum):
    LMS = "lms"
    FLMS1_RAW = "flms1_raw"
    FLMS1_MOD = "flms1_mod"
    FLMS1_EXACT = "flms1_exact"
    FLMS2_RAW = "flms2_raw"
    FLMS2_MOD = "flms2_mod"


_RULE2 = (UpdateRule.FLMS2_RAW, UpdateRule.FLMS2_MOD)


@dataclass(frozen=True)
class AlgorithmSpec:
    """Immutable description of one update rule and its parameters.

    ``mu_l`` is the classical step size, ``mu_f`` the fractional one.
    Reciprocal gamma constants for the configured order are precomputed
    here so the per-sample cost stays O(N); at ``alpha == 1`` they are
    set to their exact integer-order values (0, 1, 1) so the classical
    limit holds bit-for-bit.
    """

    rule: UpdateRule
    alpha: float = 1.0
    mu_l: float = 0.0
    mu_f: float = 0.0
    epsilon: float = 0.0
    # 1/gamma(1-alpha), 1/gamma(2-alpha), 1/gamma(3-alpha)
    c1: float = field(init=False, repr=False, compare=False)
    c2: float = field(init=False, repr=False, compare=False)
    c3: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_alpha(self.alpha)
        if self.mu_l < 0.0 or self.mu_f < 0.0:
            raise ValueError("step sizes must be non-negative")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be non-negative")
        if self.rule is UpdateRule.LMS and self.mu_f != 0.0:
            raise ValueError("LMS requires mu_f = 0")
        if self.rule in _RULE2 and self.mu_l != 0.0:
            raise ValueError("rule-2 variants require mu_l = 0")
        if self.epsilon != 0.0 and self.rule is not UpdateRule.FLMS2_MOD:
            raise ValueError("epsilon is only meaningful for FLMS2_MOD")
        if self.alpha == 1.0:
            c1, c2, c3 = 0.0, 1.0, 1.0
        else:
            c1 = 1.0 / gamma(1.0 - self.alpha)
            c2 = 1.0 / gamma(2.0 - self.alpha)
            c3 = 1.0 / gamma(3.0 - self.alpha)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)
        object.__setattr__(self, "c3", c3)


@dataclass
class StepOutcome:
    """Per-sample result: filter output, error, and the complex flag."""

    y: complex
    e: complex
    complex_flag: bool


@dataclass
class FilterState:
    """Mutable per-filter state: weights, rule-2 memory, delay line, clock.

    The regressor holds the last N inputs newest-first, zero-padded during
    warm-up. ``first_complex_at`` is set once, at the first step where a
    raw fractional power leaves the real axis.
    """

    weights: np.ndarray
    prev_weights: np.ndarray
    regressor: np.ndarray
    n: int = 0
    first_complex_at: Optional[int] = None

    @classmethod
    def zeros(cls, n_taps: int) -> "FilterState":
        return cls(
            weights=np.zeros(n_taps, dtype=np.complex128),
            prev_weights=np.zeros(n_taps, dtype=np.complex128),
            regressor=np.zeros(n_taps, dtype=np.float64),
        )

    @classmethod
    def from_weights(cls, w0: np.ndarray) -> "FilterState":
        w0 = np.asarray(w0, dtype=np.complex128)
        return cls(
            weights=w0.copy(),
            prev_weights=np.zeros_like(w0),
            regressor=np.zeros(len(w0), dtype=np.float64),
        )


def complex_criterion(powers: np.ndarray) -> bool:
    """True iff any entry has a non-zero imaginary part (exact test).

    Real bases raised to real powers give exactly-zero imaginary parts, so
    no tolerance is involved: any non-zero imaginary component means the
    underlying derivative was evaluated out of its domain of definition.
    """
    return bool(np.any(np.imag(powers) != 0.0))


def _advance(state: FilterState, x: float) -> None:
    reg = state.regressor
    reg[1:] = reg[:-1]
    reg[0] = x


def _output_error(state: FilterState, d: float):
    y = np.vdot(state.weights, state.regressor)
    return y, d - y


def step_lms(state: FilterState, x: float, d: float, spec: AlgorithmSpec) -> StepOutcome:
    """One classical LMS step: ``w += mu_l * e * x`` over the delay line."""
    if spec.rule is not UpdateRule.LMS:
        raise ValueError(f"step_lms requires an LMS spec, got {spec.rule}")
    _advance(state, x)
    y, e = _output_error(state, d)
    state.weights = state.weights + spec.mu_l * e * state.regressor
    state.n += 1
    return StepOutcome(y, e, False)


def step_flms1(
    state: FilterState, x: float, d: float, spec: AlgorithmSpec, use_modulus: bool
) -> StepOutcome:
    """One step of fractional rule 1 (raw or modulus-corrected).

    Per tap ``l`` the update adds ``mu_l*e*x_l + mu_f/gamma(2-alpha)*e*x_l*P_l``
    where ``P_l`` is ``w_l**(1-alpha)`` for the raw rule (complex principal
    branch when ``w_l`` is negative) or ``|w_l|**(1-alpha)`` for the
    modulus-corrected rule. With ``mu_f == 0`` the fractional term is skipped
    entirely, so the step is bit-identical to :func:`step_lms`.
    """
    if spec.rule not in (UpdateRule.FLMS1_RAW, UpdateRule.FLMS1_MOD):
        raise ValueError(f"step_flms1 requires a rule-1 spec, got {spec.rule}")
    _advance(state, x)
    y, e = _output_error(state, d)
    flag = False
    update = spec.mu_l * e * state.regressor
    if use_modulus:
        if spec.mu_f != 0.0:
            powers = np.abs(state.weights) ** (1.0 - spec.alpha)
            update = update + (spec.mu_f * spec.c2) * e * state.regressor * powers
    else:
        powers = np.power(state.weights, 1.0 - spec.alpha)
        flag = complex_criterion(powers)
        if flag and state.first_complex_at is None:
            state.first_complex_at = state.n
        if spec.mu_f != 0.0:
            update = update + (spec.mu_f * spec.c2) * e * state.regressor * powers
    state.weights = state.weights + update
    state.n += 1
    return StepOutcome(y, e, flag)


def step_flms1_exact(state: FilterState, x: float, d: float, spec: AlgorithmSpec) -> StepOutcome:
    """One step along the full fractional gradient of the squared error.

    Nothing is dropped from the gradient: the contribution of the additive
    constant and the quadratic self-term are kept. Instantaneous surrogates
    stand in for the correlation quantities (``R_il -> x_{n-i} x_{n-l}``,
    ``p_l -> d x_{n-l}``, ``sigma_d^2 -> d^2``), and every fractional power
    acts on the weight modulus so the rule stays real. The per-tap
    derivative is

    ``Psi_l |w_l|**(-alpha) c1 + 2(s_l - p_l) |w_l|**(1-alpha) c2
    + 2 R_ll w_l |w_l|**(1-alpha) c3``

    with ``s_l`` the off-tap correlation sum and ``Psi_l`` the part of the
    squared error constant in ``w_l``. The quadratic term keeps the sign of
    ``w_l`` so the whole expression reduces to the ordinary gradient
    ``-2 e x_l`` as alpha -> 1 for weights of either sign.
    Note ``|w_l|**(-alpha)`` is singular
    at a zero weight; the step then goes non-finite, which callers observe
    and record rather than receive as an exception.
    """
    if spec.rule is not UpdateRule.FLMS1_EXACT:
        raise ValueError(f"step_flms1_exact requires FLMS1_EXACT, got {spec.rule}")
    _advance(state, x)
    y, e = _output_error(state, d)
    reg = state.regressor
    w = state.weights
    a = np.abs(w)
    p = d * reg
    s_full = np.dot(w, reg)
    off = reg * (s_full - w * reg)  # sum_{i != l} w_i x_{n-i} x_{n-l}
    r_diag = reg * reg
    wp = np.dot(w, p)
    psi = d * d - 2.0 * (wp - w * p) + (s_full - w * reg) ** 2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        deriv = 2.0 * spec.c2 * (off - p) * a ** (1.0 - spec.alpha) + 2.0 * spec.c3 * r_diag * w * a ** (
            1.0 - spec.alpha
        )
        # c1 == 0 exactly at alpha == 1; skip to avoid 0 * inf at zero taps
        if spec.c1 != 0.0:
            deriv = deriv + spec.c1 * psi * a ** (-spec.alpha)
    state.weights = w + spec.mu_l * e * reg - 0.5 * spec.mu_f * deriv
    state.n += 1
    return StepOutcome(y, e, False)


def step_flms2(
    state: FilterState, x: float, d: float, spec: AlgorithmSpec, use_modulus: bool
) -> StepOutcome:
    """One step of the short-memory fractional rule (raw or corrected).

    The fractional power acts on the per-tap difference from the previous
    weights: ``Q_l = (w_l - w_l_prev)**(1-alpha)`` raw (complex branch when
    the difference is negative) or ``|w_l - w_l_prev + epsilon|**(1-alpha)``
    corrected. ``prev_weights`` is replaced by the pre-update weights, so
    equal successive weights with ``epsilon == 0`` freeze the filter.
    """
    if spec.rule not in _RULE2:
        raise ValueError(f"step_flms2 requires a rule-2 spec, got {spec.rule}")
    _advance(state, x)
    y, e = _output_error(state, d)
    delta = state.weights - state.prev_weights
    flag = False
    if use_modulus:
        q_pow = np.abs(delta + spec.epsilon) ** (1.0 - spec.alpha)
    else:
        q_pow = np.power(delta, 1.0 - spec.alpha)
        flag = complex_criterion(q_pow)
        if flag and state.first_complex_at is None:
            state.first_complex_at = state.n
    state.prev_weights = state.weights.copy()
    state.weights = state.weights + (spec.mu_f * spec.c2) * e * state.regressor * q_pow
    state.n += 1
    return StepOutcome(y, e, flag)


def step(state: FilterState, x: float, d: float, spec: AlgorithmSpec) -> StepOutcome:
    """Dispatch one sample to the update rule named in ``spec``."""
    rule = spec.rule
    if rule is UpdateRule.LMS:
        return step_lms(state, x, d, spec)
    if rule is UpdateRule.FLMS1_RAW:
        return step_flms1(state, x, d, spec, use_modulus=False)
    if rule is UpdateRule.FLMS1_MOD:
        return step_flms1(state, x, d, spec, use_modulus=True)
    if rule is UpdateRule.FLMS1_EXACT:
        return step_flms1_exact(state, x, d, spec)
    if rule is UpdateRule.FLMS2_RAW:
        return step_flms2(state, x, d, spec, use_modulus=False)
    if rule is UpdateRule.FLMS2_MOD:
        return step_flms2(state, x, d, spec, use_modulus=True)
    raise ValueError(f"unknown rule {rule!r}")


def fractional_correction(state: FilterState, e: complex, spec: AlgorithmSpec) -> np.ndarray:
    """Per-tap fractional correction ``u_l = mu_f * e * x_l * |w_l|**(1-alpha)``.

    Convergence diagnostic: when the classical part of the filter converges,
    this vector must decay to zero.
    """
    return spec.mu_f * e * state.regressor * np.abs(state.weights) ** (1.0 - spec.alpha)
