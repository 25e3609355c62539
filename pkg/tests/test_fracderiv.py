import math

import numpy as np
import pytest
from scipy.integrate import quad

from fraclms.fracderiv import (
    DomainError,
    PowerFunction,
    QuadratureError,
    gamma,
    rl_deriv_numeric,
    rl_deriv_numeric_right,
    rl_deriv_power_left,
    rl_deriv_power_right,
)


def gamma_integral_oracle(z):
    """Adaptive quadrature of the defining integral, split at 1."""
    head = quad(lambda t: t ** (z - 1.0) * math.exp(-t), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
    tail = quad(lambda t: t ** (z - 1.0) * math.exp(-t), 1.0, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
    return head + tail


class TestGamma:
    def test_one(self):
        assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)

    def test_factorial(self):
        assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)

    def test_half_vs_integral_oracle(self):
        assert gamma(0.5) == pytest.approx(gamma_integral_oracle(0.5), rel=1e-11)
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_against_integral_on_grid(self):
        for z in (0.2, 0.7, 1.3, 2.8, 4.5, 7.9):
            assert gamma(z) == pytest.approx(gamma_integral_oracle(z), rel=1e-10)

    def test_recurrence_property(self):
        rng = np.random.default_rng(42)
        for z in rng.uniform(0.1, 19.0, 1000):
            lhs = gamma(z + 1.0)
            assert abs(lhs - z * gamma(z)) / lhs <= 1e-12

    @pytest.mark.parametrize("z", [0.0, -1.0, -0.5])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            gamma(z)


class TestPowerRuleLeft:
    def test_linear(self):
        # f(t) = t on (0, t): frozen from the quadrature oracle
        p = PowerFunction(0.0, 2.0)
        value = rl_deriv_power_left(0.5, p, 1.0)
        assert value == pytest.approx(1.1283791670955126, rel=1e-12)
        assert value == pytest.approx(rl_deriv_numeric(0.5, p, (0.0, 1.0)), rel=1e-6)

    def test_constant_is_nonzero(self):
        p = PowerFunction(0.0, 1.0)
        value = rl_deriv_power_left(0.5, p, 1.0)
        assert value == pytest.approx(0.5641895835477563, rel=1e-12)
        assert value == pytest.approx(rl_deriv_numeric(0.5, p, (0.0, 1.0)), rel=1e-6)

    def test_integer_limit(self):
        # alpha -> 1 recovers d/dt t^2 = 2t
        p = PowerFunction(0.0, 3.0)
        assert rl_deriv_power_left(0.999999, p, 2.0) == pytest.approx(4.0, rel=1e-4)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_integer_limit_monomials(self, k):
        alpha = 1.0 - 1e-6
        for t in (0.7, 1.0, 2.3):
            value = rl_deriv_power_left(alpha, PowerFunction(0.0, k + 1.0), t)
            assert value == pytest.approx(k * t ** (k - 1), rel=1e-4)

    def test_alpha_one_exact(self):
        p = PowerFunction(0.5, 3.0, coefficient=2.0)
        assert rl_deriv_power_left(1.0, p, 2.0) == 2.0 * 2.0 * 1.5

    def test_beta_equals_alpha_gives_zero(self):
        p = PowerFunction(0.0, 0.5)
        assert rl_deriv_power_left(0.5, p, 2.0) == 0.0

    def test_domain(self):
        p = PowerFunction(1.0, 2.0)
        with pytest.raises(DomainError):
            rl_deriv_power_left(0.5, p, 1.0)
        with pytest.raises(DomainError):
            rl_deriv_power_left(0.5, p, 0.5)
        with pytest.raises(DomainError):
            rl_deriv_power_left(1.5, p, 2.0)
        with pytest.raises(DomainError):
            PowerFunction(0.0, 0.0)


class TestPowerRuleRight:
    def test_linear(self):
        # f(t) = (b - t) with b = 0 at t = -1
        p = PowerFunction(0.0, 2.0)
        value = rl_deriv_power_right(0.5, p, -1.0, 0.0)
        assert value == pytest.approx(1.1283791670955126, rel=1e-12)
        assert value == pytest.approx(
            rl_deriv_numeric_right(0.5, lambda t: -t, -1.0, 0.0), rel=1e-6
        )

    def test_integer_limit_monomial_magnitude(self):
        p = PowerFunction(0.0, 2.0)
        assert rl_deriv_power_right(1.0, p, -3.0, 0.0) == 1.0
        assert rl_deriv_power_right(0.999999, p, 0.2, 1.0) == pytest.approx(1.0, rel=1e-4)

    def test_constant(self):
        p = PowerFunction(0.0, 1.0)
        value = rl_deriv_power_right(0.5, p, 0.0, 1.0)
        assert value == pytest.approx(0.5641895835477563, rel=1e-12)
        assert value == pytest.approx(
            rl_deriv_numeric_right(0.5, lambda t: 1.0, 0.0, 1.0), rel=1e-6
        )

    def test_domain(self):
        p = PowerFunction(0.0, 2.0)
        with pytest.raises(DomainError):
            rl_deriv_power_right(0.5, p, 1.0, 1.0)
        with pytest.raises(DomainError):
            rl_deriv_power_right(0.5, p, 2.0, 1.0)


class TestNumericOracle:
    def test_linear_agreement(self):
        value = rl_deriv_numeric(0.5, lambda t: t, (0.0, 1.0))
        assert value == pytest.approx(1.1283791670955126, rel=1e-6)

    def test_constant_on_wide_interval(self):
        value = rl_deriv_numeric(0.5, lambda t: 1.0, (0.0, 4.0))
        assert value == pytest.approx(4.0 ** -0.5 / math.sqrt(math.pi), rel=1e-6)

    def test_near_integer_order(self):
        value = rl_deriv_numeric(0.999999, lambda t: 2.0 * t * t - t, (0.0, 1.0))
        assert value == pytest.approx(3.0, rel=1e-3)

    def test_alpha_one_short_circuit(self):
        value = rl_deriv_numeric(1.0, lambda t: 2.0 * t * t - t, (0.0, 1.0))
        assert value == pytest.approx(3.0, rel=1e-9)

    def test_oracle_agreement_sweep(self):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 300:
            a = rng.uniform(-2.0, 2.0)
            beta = rng.uniform(0.05, 3.0)
            alpha = rng.uniform(0.05, 0.95)
            t = a + rng.uniform(0.05, 5.0)
            if abs(beta - alpha) < 1e-2:
                continue  # closed form ~ 0 there; relative error is meaningless
            checked += 1
            p = PowerFunction(a, beta)
            closed = rl_deriv_power_left(alpha, p, t)
            numeric = rl_deriv_numeric(alpha, p, (a, t))
            assert abs(closed - numeric) / abs(closed) <= 1e-5, (alpha, beta, a, t)

    def test_linearity(self):
        f = lambda t: t * t
        g = lambda t: t + 1.0
        combo = lambda t: 2.5 * f(t) - 1.25 * g(t)
        interval = (0.3, 2.0)
        lhs = rl_deriv_numeric(0.6, combo, interval)
        rhs = 2.5 * rl_deriv_numeric(0.6, f, interval) - 1.25 * rl_deriv_numeric(0.6, g, interval)
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_nonzero_constants(self):
        # the derivative of a non-zero constant never vanishes for alpha < 1
        rng = np.random.default_rng(11)
        for _ in range(100):
            alpha = rng.uniform(0.01, 0.99)
            t = rng.uniform(0.1, 6.0)
            value = rl_deriv_power_left(alpha, PowerFunction(0.0, 1.0, 2.5), t)
            assert value != 0.0
            assert value == pytest.approx(2.5 * t ** -alpha / gamma(1.0 - alpha), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            rl_deriv_numeric(0.5, lambda t: t, (1.0, 1.0))
        with pytest.raises(DomainError):
            rl_deriv_numeric(0.5, lambda t: t, (2.0, 1.0))
        with pytest.raises(DomainError):
            rl_deriv_numeric(0.0, lambda t: t, (0.0, 1.0))

    def test_non_convergent_quadrature_reports(self):
        wild = lambda t: math.sin(3e7 * t * t)
        with pytest.raises(QuadratureError) as exc:
            rl_deriv_numeric(0.5, wild, (0.0, 4.0))
        assert exc.value.achieved > 0.0
