import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fpme import ParameterError
from fpme.fraclap import (
    FractionalOp,
    RadialProfile,
    bessel_integral,
    fourier_pair,
    frac_lap_hypergeom,
    frac_lap_rising,
    frac_lap_rising_special,
    inv_frac_lap_compact,
    numeric_frac_lap,
    radial_transform,
    weber_schafheitlin_check,
)


class TestTypes:
    def test_order_window(self):
        with pytest.raises(ParameterError):
            FractionalOp(0.0, 1)
        with pytest.raises(ParameterError):
            FractionalOp(1.0, 2)
        with pytest.raises(ParameterError):
            FractionalOp(0.5, 0)

    def test_inverse_window_warns(self):
        from fpme import ValidityWarning
        with pytest.warns(ValidityWarning):
            FractionalOp(-0.6, 1)

    def test_profile_validation(self):
        with pytest.raises(ParameterError):
            RadialProfile("rising", -1.0, 1.0, 1.0, 1)
        with pytest.raises(ParameterError):
            RadialProfile("flat", 1.0, 1.0, 1.0, 1)

    def test_profile_values(self):
        p = RadialProfile("compact", 2.0, 1.0, 3.0, 2)
        assert p(2.0) == 0.0
        assert_allclose(p(0.5), 3.0 * 0.75**2, rtol=1e-15)
        r = RadialProfile("rising", 1.5, 2.0, 1.0, 1)
        assert_allclose(r(1.0), 5.0 ** (-1.5), rtol=1e-15)


class TestRadialTransform:
    def test_gaussian_self_transform(self):
        val = radial_transform(lambda r: np.exp(-(r**2) / 2.0),
                               "forward", 2, 1.0)
        assert_allclose(val, 2.0 * math.pi * math.exp(-0.5), rtol=1e-10)

    def test_lorentzian_residue_value(self):
        val = radial_transform(lambda r: 1.0 / (1.0 + r**2),
                               "forward", 1, 1.0)
        assert_allclose(val, math.pi / math.e, rtol=1e-10)

    def test_inverse_of_forward_is_identity(self):
        f = lambda r: (1.0 + r**2) ** (-1.5)
        eta = np.geomspace(1e-4, 45.0, 240)
        hats = np.array([radial_transform(f, "forward", 2, k) for k in eta])
        for r in (0.5, 1.0, 2.0):
            back = radial_transform((eta, hats), "inverse", 2, r,
                                    r_max=eta[-1])
            assert_allclose(back, f(r), rtol=1e-6)

    def test_direction_validation(self):
        with pytest.raises(ParameterError):
            radial_transform(lambda r: r, "sideways", 1, 1.0)


class TestFracLapRising:
    def test_elementary_value_at_origin(self):
        # N=2, s=1/2, q=1/2 collapses to R (R^2+|y|^2)^{-3/2}
        p = RadialProfile("rising", 0.5, 1.0, 1.0, 2)
        fl = frac_lap_rising(FractionalOp(0.5, 2), p)
        assert_allclose(fl(0.0), 1.0, rtol=1e-12)
        assert_allclose(fl(1.0), 2.0 ** (-1.5), rtol=1e-11)

    def test_compose_with_inverse_telescopes(self):
        p = RadialProfile("rising", 1.2, 0.9, 1.7, 2)
        fwd = frac_lap_rising(FractionalOp(0.4, 2), p)
        fac, spec = frac_lap_hypergeom(FractionalOp(-0.4, 2), fwd.spec, p.R)
        # the recovered field is the original profile: binomial spec ...
        assert_allclose(spec.a, p.q, rtol=1e-12)
        assert_allclose(spec.b, p.N / 2.0, rtol=1e-12)
        # ... and the combined prefactor collapses to lam R^{-2q}
        assert_allclose(fwd.prefactor * fac * p.R ** (2 * p.q) / p.lam,
                        1.0, rtol=1e-12)

    def test_matches_oracle_at_single_radius(self):
        p = RadialProfile("rising", 0.75, 1.0, 1.0, 1)
        op = FractionalOp(0.25, 1)
        closed = frac_lap_rising(op, p)(2.0)
        oracle = numeric_frac_lap(op, p, 2.0)
        assert_allclose(closed, oracle, rtol=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            frac_lap_rising(FractionalOp(0.5, 2),
                            RadialProfile("rising", 1.0, 1.0, 1.0, 1))


class TestFracLapRisingSpecial:
    def test_case_two_profile_map(self):
        p = RadialProfile("rising", 0.5, 1.0, 1.0, 2)
        out = frac_lap_rising_special(FractionalOp(0.5, 2), p)
        assert isinstance(out, RadialProfile)
        assert_allclose(out.q, 1.5, rtol=1e-14)
        assert_allclose(out.lam, 1.0, rtol=1e-13)

    def test_case_two_then_inverse_recovers_input(self):
        N, s = 2, 0.3
        p = RadialProfile("rising", N / 2.0 - s, 1.4, 2.2, N)
        mapped = frac_lap_rising_special(FractionalOp(s, N), p)
        back = frac_lap_rising(FractionalOp(-s, N), mapped)
        for r in (0.0, 0.7, 3.0):
            assert_allclose(back(r), p(r), rtol=1e-11)

    def test_case_one_value_at_origin(self):
        p = RadialProfile("rising", 1.0, 1.0, 1.0, 1)
        out = frac_lap_rising_special(FractionalOp(0.5, 1), p)
        assert_allclose(out(0.0), 1.0, rtol=1e-12)

    def test_rejects_generic_exponent(self):
        with pytest.raises(ParameterError):
            frac_lap_rising_special(FractionalOp(0.5, 1),
                                    RadialProfile("rising", 2.0, 1.0, 1.0, 1))


class TestInvFracLapCompact:
    def test_constant_at_origin(self):
        p = RadialProfile("compact", 1.0, 1.0, 1.0, 3)
        val = inv_frac_lap_compact(FractionalOp(-0.5, 3), p, 0.0)
        expected = 0.5 * 1.0 * 1.0 / (math.gamma(1.5) * math.gamma(2.5))
        assert_allclose(val, expected, rtol=1e-12)
        assert_allclose(val, 0.4244132, rtol=1e-6)

    def test_branch_continuity_random_parameters(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            N = int(rng.integers(1, 4))
            s = rng.uniform(0.05, min(0.95, N / 2.0 - 0.02))
            q = rng.uniform(0.3, 2.5)
            p = RadialProfile("compact", q, 1.0, 1.0, N)
            op = FractionalOp(-s, N)
            inner = inv_frac_lap_compact(op, p, p.R, branch="inside")
            outer = inv_frac_lap_compact(op, p, p.R, branch="outside")
            assert_allclose(inner, outer, rtol=1e-8)

    def test_far_field_decay_exponent(self):
        p = RadialProfile("compact", 1.3, 1.0, 1.0, 3)
        op = FractionalOp(-0.4, 3)
        r1, r2 = 2e3, 3e3
        v1 = inv_frac_lap_compact(op, p, r1)
        v2 = inv_frac_lap_compact(op, p, r2)
        slope = (math.log(v2) - math.log(v1)) / (math.log(r2) - math.log(r1))
        assert_allclose(slope, 2 * 0.4 - 3, atol=1e-3)

    def test_matches_oracle(self):
        p = RadialProfile("compact", 1.0, 1.0, 1.0, 3)
        op = FractionalOp(-0.5, 3)
        for y in (0.5, 1.0, 2.0):
            closed = inv_frac_lap_compact(op, p, y)
            oracle = numeric_frac_lap(op, p, y)
            assert_allclose(closed, oracle, rtol=1e-5)

    def test_matches_oracle_n2_nested(self):
        p = RadialProfile("compact", 0.8, 1.2, 0.9, 2)
        op = FractionalOp(-0.45, 2)
        for y in (0.4, 1.2, 3.0):
            closed = inv_frac_lap_compact(op, p, y)
            oracle = numeric_frac_lap(op, p, y)
            assert_allclose(closed, oracle, rtol=1e-5)


class TestFourierPair:
    def test_lorentzian_is_exponential(self):
        fp = fourier_pair(RadialProfile("rising", 1.0, 1.0, 1.0, 1))
        for xi in (0.3, 1.0, 4.0):
            assert_allclose(fp(xi), math.pi * math.exp(-xi), rtol=1e-12)

    def test_even_in_xi(self):
        fp = fourier_pair(RadialProfile("rising", 1.2, 0.7, 2.0, 2))
        for xi in (0.5, 1.7):
            assert_allclose(fp(xi), fp(-xi), rtol=1e-15)

    def test_matches_direct_quadrature(self):
        p = RadialProfile("rising", 1.4, 1.1, 0.8, 3)
        fp = fourier_pair(p)
        for xi in (0.5, 1.0, 2.5):
            direct = radial_transform(p, "forward", 3, xi)
            assert_allclose(fp(xi), direct, rtol=1e-9)

    def test_round_trip_recovers_profile(self):
        p = RadialProfile("rising", 1.0, 1.0, 1.0, 1)
        fp = fourier_pair(p)
        for r in (0.3, 1.0, 2.0):
            back = radial_transform(fp, "inverse", 1, r, r_max=80.0)
            assert_allclose(back, p(r), rtol=1e-6)

    def test_compact_rejected(self):
        with pytest.raises(ParameterError):
            fourier_pair(RadialProfile("compact", 1.0, 1.0, 1.0, 1))


class TestNumericFracLap:
    @pytest.mark.parametrize("N,s,q", [
        (1, 0.25, 0.75),
        (2, 0.5, 1.5),
        (3, 0.75, 2.25),
    ])
    def test_oracle_agreement_twenty_radii(self, N, s, q):
        p = RadialProfile("rising", q, 1.0, 1.0, N)
        op = FractionalOp(s, N)
        closed = frac_lap_rising(op, p)
        grid = np.geomspace(1e-2, 10.0, 20)
        oracle = numeric_frac_lap(op, p, grid)
        assert_allclose(closed(grid), oracle, rtol=1e-6)

    def test_multiplier_semigroup(self):
        # applying s1 then s2 equals a single application of s1 + s2;
        # the intermediate field is carried back to real space on a
        # spline with its far-field power law extended analytically
        from scipy.interpolate import CubicSpline

        N, q = 1, 1.5
        s1, s2 = 0.35, 0.4
        p = RadialProfile("rising", q, 1.0, 1.0, N)
        mid_grid = np.geomspace(1e-3, 400.0, 700)
        mid_vals = numeric_frac_lap(FractionalOp(s1, N), p, mid_grid)
        tail_pow = N + 2 * s1
        tail_amp = mid_vals[-1] * mid_grid[-1] ** tail_pow
        spline = CubicSpline(np.log(mid_grid), mid_vals, extrapolate=False)

        def mid(r):
            r = np.asarray(r, dtype=float)
            out = np.where(r < mid_grid[0], mid_vals[0],
                           np.nan_to_num(spline(np.log(np.maximum(
                               r, mid_grid[0])))))
            tail = r > mid_grid[-1]
            out = np.where(tail, tail_amp * np.maximum(r, 1.0)**(-tail_pow),
                           out)
            return out

        eta = np.geomspace(1e-3, 32.0, 220)
        fwd = np.array([
            radial_transform(mid, "forward", N, e, rtol=1e-9)
            for e in eta
        ])
        for y in (0.5, 1.5):
            two_step = radial_transform(
                (eta, eta ** (2 * s2) * fwd), "inverse", N, y,
                r_max=eta[-1])
            one_step = numeric_frac_lap(FractionalOp(s1 + s2, N), p, y)
            assert_allclose(two_step, one_step, rtol=1e-5)

    def test_compact_requires_inverse_order(self):
        p = RadialProfile("compact", 1.0, 1.0, 1.0, 1)
        with pytest.raises(ParameterError):
            numeric_frac_lap(FractionalOp(0.5, 1), p, 0.5)


class TestOracleEquivalence:
    """Closed forms vs the quadrature oracle on log-radius grids."""

    @pytest.mark.parametrize("N,s,q,R,lam", [
        (1, 0.25, 0.75, 1.0, 1.3),
        (2, 0.5, 1.5, 0.8, 0.7),
        (1, 0.5, 1.0, 1.2, 1.0),
    ])
    def test_rising_full_range(self, N, s, q, R, lam):
        p = RadialProfile("rising", q, R, lam, N)
        op = FractionalOp(s, N)
        closed = frac_lap_rising(op, p)
        grid = np.geomspace(1e-2 * R, 1e2 * R, 30)
        oracle = numeric_frac_lap(op, p, grid)
        assert_allclose(closed(grid), oracle, rtol=1e-5)

    def test_rising_inverse_order(self):
        p = RadialProfile("rising", 1.5, 1.0, 1.0, 2)
        op = FractionalOp(-0.4, 2)
        closed = frac_lap_rising(op, p)
        grid = np.geomspace(0.05, 20.0, 12)
        oracle = numeric_frac_lap(op, p, grid)
        assert_allclose(closed(grid), oracle, rtol=1e-5)

    def test_decay_exponent_of_output(self):
        # dominant far-field power is -2(q+s) when q < N/2
        for N, s, q in ((2, 0.35, 0.2), (3, 0.6, 0.5), (3, 0.25, 0.9)):
            p = RadialProfile("rising", q, 1.0, 1.0, N)
            fl = frac_lap_rising(FractionalOp(s, N), p)
            r1, r2 = 1e3, 1.3e3
            slope = ((math.log(abs(fl(r2))) - math.log(abs(fl(r1))))
                     / (math.log(r2) - math.log(r1)))
            assert_allclose(slope, -2 * (q + s), atol=1e-3)


class TestWeberSchafheitlin:
    def test_equal_scales_spot(self):
        lhs, rhs = weber_schafheitlin_check(0.5, 0.5, 0.0, 1.0, 1.0)
        assert_allclose(lhs, rhs, rtol=1e-7)

    def test_generic_spot(self):
        lhs, rhs = weber_schafheitlin_check(0.25, 1.5, 0.5, 2.0, 1.0)
        assert_allclose(lhs, rhs, rtol=1e-7)

    def test_small_b_limit_vanishes(self):
        vals = [weber_schafheitlin_check(0.3, 1.2, 0.2, 1.0, b)
                for b in (1e-2, 1e-3)]
        for lhs, rhs in vals:
            assert_allclose(lhs, rhs, rtol=1e-6)
        assert abs(vals[1][0]) < abs(vals[0][0]) * 0.2

    def test_precondition(self):
        with pytest.raises(ParameterError):
            weber_schafheitlin_check(3.0, 0.5, 0.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            weber_schafheitlin_check(0.5, 0.5, 0.0, -1.0, 1.0)


class TestBesselIntegral:
    def test_known_dirichlet_style_integral(self):
        # int_0^inf J_0(r) dr = 1 (conditionally convergent)
        val = bessel_integral(lambda r: np.ones_like(r), 0.0, 1.0)
        assert_allclose(val, 1.0, rtol=1e-9)

    def test_exponential_weight(self):
        # int_0^inf e^{-r} J_0(r) dr = 1/sqrt(2)
        val = bessel_integral(lambda r: np.exp(-r), 0.0, 1.0)
        assert_allclose(val, 1.0 / math.sqrt(2.0), rtol=1e-10)
