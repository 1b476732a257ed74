import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from weno5.errors import ConfigError, NonFiniteError
from weno5.scalar import (
    BoundaryKind,
    GridSpec,
    burgers_flux,
    compute_alpha,
    extend,
    fill_ghosts,
    interface_fluxes,
    linear_flux,
    scalar_rhs,
    split_flux,
)
from weno5.stencil import SchemeConfig, Variant, mirror_window, reconstruct_interface

SCHEMES = [Variant.LOC, Variant.JS5, Variant.UD5]
fields = arrays(np.float64, st.integers(10, 40), elements=st.floats(-5, 5, allow_nan=False))


class TestSplitFlux:
    def test_linear_upwinding(self):
        u = np.array([0.3, -1.0, 2.0])
        fp, fm = split_flux(u, lambda v: v, 1.0)
        assert np.array_equal(fp, u)
        assert np.array_equal(fm, np.zeros(3))

    def test_burgers_zero(self):
        f, _ = burgers_flux()
        fp, fm = split_flux(np.zeros(4), f, 2.0)
        assert not fp.any() and not fm.any()

    def test_burgers_example(self):
        f, _ = burgers_flux()
        fp, fm = split_flux(np.array([-1.0, 1.0]), f, 1.0)
        assert np.allclose(fp, [-0.25, 0.75])
        assert np.allclose(fm, [0.75, -0.25])

    @given(fields, st.floats(0, 10))
    def test_parts_sum_to_flux(self, u, alpha):
        f, _ = burgers_flux()
        fp, fm = split_flux(u, f, alpha)
        assert np.allclose(fp + fm, f(u), rtol=1e-15, atol=1e-15 * (1 + alpha * np.abs(u).max()))

    def test_non_finite_reported_with_index(self):
        with pytest.raises(NonFiniteError) as info:
            split_flux(np.array([0.0, 1.0, 2.0]), lambda v: np.where(v > 1.5, np.inf, v), 1.0)
        assert info.value.index == 2


class TestComputeAlpha:
    def test_examples(self):
        f, df = linear_flux(1.0)
        assert compute_alpha(np.linspace(-3, 3, 7), df) == 1.0
        _, dburgers = burgers_flux()
        assert compute_alpha(np.array([-2.0, 0.5, 3.0]), dburgers) == 3.0
        x = GridSpec(-1, 1, 40).x
        assert compute_alpha(np.sin(np.pi * x), dburgers) == np.max(np.abs(np.sin(np.pi * x)))


class TestGhosts:
    def test_periodic_example(self):
        u = np.array([0.0, 1, 2, 3, 0])
        fill_ghosts(u, BoundaryKind.PERIODIC, ghost=1)
        assert u.tolist() == [3, 1, 2, 3, 1]

    def test_zero_gradient_example(self):
        u = np.array([0.0, 0, 1, 2, 3, 0, 0])
        fill_ghosts(u, BoundaryKind.ZERO_GRADIENT, ghost=2)
        assert u.tolist() == [1, 1, 1, 2, 3, 3, 3]

    @pytest.mark.parametrize("bc", list(BoundaryKind))
    @given(u=fields)
    def test_idempotent(self, bc, u):
        once = extend(u, bc)
        twice = fill_ghosts(once.copy(), bc)
        assert np.array_equal(once, twice)


class TestGridSpec:
    def test_spacing(self):
        g = GridSpec(-1.0, 1.0, 40)
        assert g.dx == 0.05
        assert g.x[0] == pytest.approx(-0.975) and g.x[-1] == pytest.approx(0.975)

    @pytest.mark.parametrize("args", [(-1, 1, 9), (1, -1, 20), (0, 1, 20, 4), (0, 1, 20, 2)])
    def test_invalid(self, args):
        with pytest.raises(ConfigError):
            GridSpec(*args)


class TestScalarRhs:
    @pytest.mark.parametrize("variant", SCHEMES)
    @pytest.mark.parametrize("bc", list(BoundaryKind))
    def test_constant_state_is_steady(self, variant, bc):
        g = GridSpec(-1, 1, 30)
        f, df = burgers_flux()
        rhs = scalar_rhs(np.full(30, 0.7), g, SchemeConfig(variant), bc, f, df)
        assert np.array_equal(rhs, np.zeros(30))

    @pytest.mark.parametrize("variant", SCHEMES)
    @given(u=fields)
    def test_periodic_conservation(self, variant, u):
        g = GridSpec(-1, 1, u.size)
        f, df = burgers_flux()
        cfg = SchemeConfig(variant)
        r = scalar_rhs(u, g, cfg, BoundaryKind.PERIODIC, f, df)
        ue = extend(u, BoundaryKind.PERIODIC)
        fp, fm = split_flux(ue, f, compute_alpha(ue, df))
        scale = np.abs(interface_fluxes(fp, fm, cfg, g.dx)).sum()
        assert abs(np.sum(r) * g.dx) <= 1e-12 * max(scale, 1e-300) + 1e-300

    def test_fifth_order_spatial_operator(self):
        f, df = linear_flux(1.0)
        cfg = SchemeConfig(Variant.UD5, p=2.0)
        errs = []
        for n in (40, 80, 160, 320):
            g = GridSpec(-1, 1, n)
            r = scalar_rhs(np.sin(np.pi * g.x), g, cfg, BoundaryKind.PERIODIC, f, df)
            errs.append(np.mean(np.abs(r + np.pi * np.cos(np.pi * g.x))))
        slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(slopes >= 4.7), slopes

    def test_linf_fifth_order_at_n160(self):
        f, df = linear_flux(1.0)
        errs = []
        for n in (80, 160):
            g = GridSpec(-1, 1, n)
            r = scalar_rhs(np.sin(np.pi * g.x), g, SchemeConfig(), BoundaryKind.PERIODIC, f, df)
            errs.append(np.max(np.abs(r + np.pi * np.cos(np.pi * g.x))))
        assert np.log2(errs[0] / errs[1]) > 4.5

    def test_shape_mismatch(self):
        f, df = linear_flux()
        with pytest.raises(ConfigError):
            scalar_rhs(np.zeros(12), GridSpec(0, 1, 20), SchemeConfig(), BoundaryKind.PERIODIC, f, df)

    def test_non_finite_state(self):
        f, df = linear_flux()
        u = np.zeros(20)
        u[4] = np.nan
        with pytest.raises(NonFiniteError):
            scalar_rhs(u, GridSpec(0, 1, 20), SchemeConfig(), BoundaryKind.PERIODIC, f, df)


@pytest.mark.parametrize("variant", SCHEMES)
@given(u=fields)
def test_sweep_matches_per_window_api(variant, u):
    """Compiled grid sweep against a loop over the per-window functions."""
    cfg = SchemeConfig(variant)
    f, df = burgers_flux()
    ue = extend(u, BoundaryKind.PERIODIC)
    fp, fm = split_flux(ue, f, compute_alpha(ue, df))
    got = interface_fluxes(fp, fm, cfg, 0.1)
    want = []
    for j in range(u.size + 1):
        # interface between padded nodes j+2 and j+3
        plus = reconstruct_interface(fp[j : j + 5], cfg, 0.1)
        minus = reconstruct_interface(mirror_window(fm[j + 1 : j + 6]), cfg, 0.1)
        want.append(plus + minus)
    assert np.array_equal(got, np.array(want))
