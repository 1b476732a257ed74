import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weno5.errors import ConfigError, NonPositiveDensity, NonPositivePressure
from weno5.euler1d import (
    GAMMA,
    _roe_basis_lines,
    cons_to_prim,
    euler1d_interface_fluxes,
    euler1d_rhs,
    interface_basis,
    max_wave_speed,
    physical_flux,
    prim_to_cons,
    roe_average,
    sound_speed,
)
from weno5.scalar import BoundaryKind, GridSpec, extend
from weno5.stencil import SchemeConfig, Variant, ideal_reconstruction
from weno5.timestep import AccuracyScaled, integrate, rk4_step

SCHEMES = [Variant.LOC, Variant.JS5, Variant.UD5]

positive = st.floats(0.05, 20.0)
velocity = st.floats(-5.0, 5.0)
states = st.tuples(positive, velocity, positive)


def cons(state):
    return prim_to_cons(*state)


class TestConversions:
    def test_sod_left(self):
        assert np.allclose(prim_to_cons(1.0, 0.0, 1.0), [1.0, 0.0, 2.5])

    def test_moving_state(self):
        assert np.allclose(prim_to_cons(2.0, 3.0, 0.4), [2.0, 6.0, 1.0 + 9.0])

    def test_sound_speed(self):
        assert sound_speed(1.0, 1.0) == pytest.approx(np.sqrt(1.4))
        assert sound_speed(0.125, 0.1) == pytest.approx(np.sqrt(1.12))
        with pytest.raises(ValueError):
            sound_speed(-1.0, 1.0)

    @given(states)
    def test_round_trip(self, s):
        w = cons_to_prim(cons(s))
        assert np.allclose([w.rho, w.u, w.p], s, rtol=1e-10, atol=1e-10)

    def test_negative_pressure_index(self):
        q = np.stack([prim_to_cons(1, 0, 1)] * 4, axis=1)
        q[2, 2] = -1.0
        with pytest.raises(NonPositivePressure) as info:
            cons_to_prim(q)
        assert info.value.index == 2

    def test_zero_density_index(self):
        q = np.stack([prim_to_cons(1, 0, 1)] * 4, axis=1)
        q[0, 3] = 0.0
        with pytest.raises(NonPositiveDensity) as info:
            cons_to_prim(q)
        assert info.value.index == 3

    def test_flux_example(self):
        assert np.allclose(physical_flux(prim_to_cons(1.0, 2.0, 1.0)), [2.0, 5.0, 2.0 * (2.5 + 2.0 + 1.0)])


def jacobian(q, gamma=GAMMA):
    """Analytic flux Jacobian in conserved variables."""
    w = cons_to_prim(q, gamma)
    u = w.u
    H = (q[2] + w.p) / w.rho
    g = gamma - 1.0
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [0.5 * (gamma - 3.0) * u * u, (3.0 - gamma) * u, g],
            [u * (0.5 * g * u * u - H), H - g * u * u, gamma * u],
        ]
    )


class TestCharacteristics:
    @given(states, states)
    def test_left_right_inverse(self, a, b):
        basis = interface_basis(cons(a), cons(b))
        assert np.allclose(basis.left @ basis.right, np.eye(3), atol=1e-9)

    @given(states)
    def test_diagonalises_jacobian(self, s):
        q = cons(s)
        basis = interface_basis(q, q)
        lam = basis.left @ jacobian(q) @ basis.right
        scale = np.abs(basis.eigenvalues).max()
        assert np.allclose(lam, np.diag(basis.eigenvalues), atol=1e-9 * (1 + scale))

    @given(states, states)
    def test_roe_property(self, a, b):
        """The averaged Jacobian maps the state jump onto the flux jump."""
        qL, qR = cons(a), cons(b)
        basis = interface_basis(qL, qR)
        A = basis.right @ np.diag(basis.eigenvalues) @ basis.left
        jump = physical_flux(qR) - physical_flux(qL)
        assert np.allclose(A @ (qR - qL), jump, rtol=1e-8, atol=1e-8 * (1 + np.abs(jump).max()))

    def test_roe_average_of_identical_states(self):
        q = prim_to_cons(1.0, 0.5, 1.0)
        u, h, c = roe_average(q, q)
        assert u == pytest.approx(0.5)
        assert c == pytest.approx(np.sqrt(1.4))

    @given(st.lists(states, min_size=8, max_size=14))
    def test_compiled_basis_matches_vectorised(self, seq):
        q = np.stack([cons(s) for s in seq], axis=1)
        npts = q.shape[1]
        left = np.empty((1, npts - 5, 3, 3))
        right = np.empty_like(left)
        c2min = _roe_basis_lines(q[None].copy(), GAMMA, left, right)
        want = interface_basis(q[:, 2:-3], q[:, 3:-2])
        assert c2min > 0
        assert np.allclose(left[0], want.left, rtol=1e-12, atol=1e-12)
        assert np.allclose(right[0], want.right, rtol=1e-12, atol=1e-12)


def sod(n):
    g = GridSpec(0.0, 1.0, n)
    rho = np.where(g.x < 0.5, 1.0, 0.125)
    p = np.where(g.x < 0.5, 1.0, 0.1)
    return g, prim_to_cons(rho, np.zeros(n), p)


class TestRhs:
    @pytest.mark.parametrize("variant", SCHEMES)
    @pytest.mark.parametrize("bc", list(BoundaryKind))
    def test_uniform_flow_is_steady(self, variant, bc):
        g = GridSpec(0, 1, 20)
        q = np.repeat(prim_to_cons(1.3, 0.4, 2.0)[:, None], 20, axis=1)
        assert np.allclose(euler1d_rhs(q, g, SchemeConfig(variant), bc), 0.0, atol=1e-13)

    @pytest.mark.parametrize("variant", SCHEMES)
    def test_sod_update_is_local(self, variant):
        g, q = sod(40)
        r = euler1d_rhs(q, g, SchemeConfig(variant), BoundaryKind.ZERO_GRADIENT)
        active = np.flatnonzero(np.abs(r).max(axis=0) > 1e-12)
        assert active.min() >= 20 - 3 and active.max() <= 19 + 3

    @pytest.mark.parametrize("variant", SCHEMES)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_periodic_conservation(self, variant, seed):
        rng = np.random.default_rng(seed)
        n = 24
        q = prim_to_cons(rng.uniform(0.2, 3, n), rng.uniform(-1, 1, n), rng.uniform(0.2, 3, n))
        r = euler1d_rhs(q, GridSpec(0, 1, n), SchemeConfig(variant), BoundaryKind.PERIODIC)
        assert np.all(np.abs(r.sum(axis=1)) / n <= 1e-12 * (1 + np.abs(r).max()))

    @given(seed=st.integers(0, 2**32 - 1))
    def test_ideal_single_speed_reduces_to_componentwise(self, seed):
        """Linear weights with one splitting speed: projection cancels exactly."""
        rng = np.random.default_rng(seed)
        n = 16
        q = prim_to_cons(rng.uniform(0.5, 2, n), rng.uniform(-0.5, 0.5, n), rng.uniform(0.5, 2, n))
        qe = extend(q, BoundaryKind.PERIODIC)
        got = euler1d_interface_fluxes(qe, SchemeConfig(Variant.IDEAL), 0.1, single_alpha=True)
        w = cons_to_prim(qe)
        a = np.max(np.abs(w.u) + np.sqrt(GAMMA * w.p / w.rho))
        f = physical_flux(qe)
        fp, fm = 0.5 * (f + a * qe), 0.5 * (f - a * qe)
        want = np.empty_like(got)
        for k in range(3):
            for j in range(n + 1):
                want[k, j] = ideal_reconstruction(fp[k, j : j + 5]) + ideal_reconstruction(fm[k, j + 5 : j : -1])
        assert np.allclose(got, want, rtol=1e-10, atol=1e-10)

    def test_shape_checked(self):
        with pytest.raises(ConfigError):
            euler1d_rhs(np.ones((3, 12)), GridSpec(0, 1, 20), SchemeConfig(), BoundaryKind.PERIODIC)

    def test_max_wave_speed(self):
        _, q = sod(10)
        assert max_wave_speed(q) == pytest.approx(np.sqrt(1.4))


def test_density_wave_converges_at_high_order():
    """Advected density profile at constant velocity and pressure is an exact solution."""
    errs = []
    t_end = 0.2
    for n in (40, 80, 160):
        g = GridSpec(-1.0, 1.0, n)
        h = g.dx
        # exact cell averages of 1 + 0.2 sin(pi x)
        avg = lambda x0: 1.0 + 0.2 * (np.cos(np.pi * (x0 - h / 2)) - np.cos(np.pi * (x0 + h / 2))) / (np.pi * h)  # noqa: E731
        q0 = prim_to_cons(avg(g.x), np.ones(n), np.ones(n))
        q0[1] = q0[0] * 1.0
        q0[2] = 1.0 / (GAMMA - 1.0) + 0.5 * q0[0]
        cfg = SchemeConfig(Variant.UD5)
        res = integrate(
            q0, lambda t, q: euler1d_rhs(q, g, cfg, BoundaryKind.PERIODIC), t_end, h,
            AccuracyScaled(0.5 * 0.05**-0.25), stepper=rk4_step,
        )
        errs.append(np.mean(np.abs(res.state[0] - avg(g.x - t_end))))
    slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert slopes[-1] >= 4.5, slopes
