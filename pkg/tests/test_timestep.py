import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weno5.errors import ConfigError, NonPositiveDensity
from weno5.timestep import AccuracyScaled, Cfl, compute_dt, integrate, rk4_step, ssp_rk3_step

STEPPERS = [ssp_rk3_step, rk4_step]


def zero_rhs(t, u):
    return np.zeros_like(u)


class TestComputeDt:
    def test_cfl(self):
        assert compute_dt(Cfl(0.5), 0.1, 2.0, 0.0, 10.0) == pytest.approx(0.025)

    def test_accuracy_scaled(self):
        assert compute_dt(AccuracyScaled(1.0), 1.0, math.nan, 0.0, 10.0) == 1.0
        assert compute_dt(AccuracyScaled(2.0), 0.01, math.nan, 0.0, 10.0) == pytest.approx(2 * 0.01**1.25)

    def test_snapping(self):
        assert compute_dt(Cfl(0.5), 0.1, 2.0, 1.29, 1.3) == pytest.approx(0.01)

    def test_matching_constant(self):
        c = AccuracyScaled.matching_cfl(0.05).c
        assert c * 0.05**1.25 == pytest.approx(0.5 * 0.05)

    @pytest.mark.parametrize("bad", [lambda: Cfl(0.0), lambda: Cfl(1.5), lambda: AccuracyScaled(0.0)])
    def test_invalid_policies(self, bad):
        with pytest.raises(ConfigError):
            bad()

    def test_cfl_needs_speed(self):
        with pytest.raises(ConfigError):
            compute_dt(Cfl(0.5), 0.1, 0.0, 0.0, 1.0)


class TestSteps:
    @pytest.mark.parametrize("step", STEPPERS)
    def test_zero_rhs(self, step):
        u = np.array([1.0, -2.0, 3.0])
        assert np.array_equal(step(u, 0.0, 0.1, zero_rhs), u)

    @pytest.mark.parametrize(
        "step, degree", [(ssp_rk3_step, 3), (rk4_step, 4)]
    )
    @given(z=st.floats(-2.5, 0.5))
    def test_stability_polynomial(self, step, degree, z):
        lam, dt = z, 1.0
        got = step(np.array([1.0]), 0.0, dt, lambda t, u: lam * u)[0]
        want = sum(z**k / math.factorial(k) for k in range(degree + 1))
        assert got == pytest.approx(want, rel=1e-14, abs=1e-15)

    @pytest.mark.parametrize("step", STEPPERS)
    @given(a=st.floats(-3, 3), b=st.floats(-3, 3), u0=st.floats(-3, 3), v0=st.floats(-3, 3))
    def test_affine_in_state(self, step, a, b, u0, v0):
        rhs = lambda t, u: -0.7 * u + 0.3  # noqa: E731
        s = lambda u: step(np.array([u]), 0.0, 0.2, rhs)[0]  # noqa: E731
        lhs = s(a * u0 + (1 - a) * v0)
        rhs_val = a * s(u0) + (1 - a) * s(v0)
        assert lhs == pytest.approx(rhs_val, abs=1e-12)

    def test_rk4_time_only_rhs_is_simpson(self):
        g = lambda t: np.array([np.cos(3 * t) + t**2])  # noqa: E731
        t0, dt = 0.3, 0.2
        got = rk4_step(np.array([0.0]), t0, dt, lambda t, u: g(t))[0]
        simpson = dt / 6 * (g(t0) + 4 * g(t0 + dt / 2) + g(t0 + dt))[0]
        assert got == pytest.approx(simpson, rel=1e-14)

    @pytest.mark.parametrize("step", STEPPERS)
    def test_state_independent_rhs_integrates_exactly(self, step):
        got = step(np.array([1.0]), 0.0, 0.5, lambda t, u: np.array([2.0 * t]))[0]
        assert got == pytest.approx(1.25, rel=1e-15)

    @pytest.mark.parametrize("step", STEPPERS)
    def test_rejects_nonpositive_dt(self, step):
        with pytest.raises(ConfigError):
            step(np.zeros(1), 0.0, 0.0, zero_rhs)

    @pytest.mark.parametrize("step, stages", [(ssp_rk3_step, 3), (rk4_step, 4)])
    def test_stage_tag_on_failure(self, step, stages):
        calls = []

        def rhs(t, u):
            calls.append(t)
            if len(calls) == stages:
                raise NonPositiveDensity("density collapsed", index=7)
            return np.zeros_like(u)

        with pytest.raises(NonPositiveDensity) as info:
            step(np.zeros(2), 0.4, 0.1, rhs)
        assert info.value.stage == stages
        assert info.value.time == 0.4
        assert info.value.index == 7
        assert "stage" in str(info.value)


def _order(step, target):
    errs = []
    for n in (20, 40, 80, 160):
        res = integrate(np.array([1.0]), lambda t, u: -u, 1.0, 1.0, AccuracyScaled(1.0 / n), stepper=step)
        errs.append(abs(res.state[0] - math.exp(-1.0)))
    return np.log2(np.array(errs[:-1]) / np.array(errs[1:]))


def test_rk4_order():
    assert np.all(np.abs(_order(rk4_step, 4) - 4.0) <= 0.1)


def test_ssp_rk3_order():
    assert np.all(np.abs(_order(ssp_rk3_step, 3) - 3.0) <= 0.1)


@given(t_end=st.floats(0.01, 5.0), dx=st.floats(0.001, 0.5))
def test_final_time_is_exact(t_end, dx):
    res = integrate(np.zeros(1), zero_rhs, t_end, dx, Cfl(0.7), wave_speed=lambda u: 1.3)
    assert res.t == t_end
    assert res.steps == pytest.approx(math.ceil(t_end / (0.7 * dx / 1.3)), abs=1)


def test_on_step_sees_every_state():
    seen = []
    integrate(np.zeros(1), zero_rhs, 1.0, 0.1, AccuracyScaled(1.0), on_step=lambda t, u: seen.append(t))
    assert seen[-1] == 1.0
    assert np.all(np.diff(seen) > 0)
