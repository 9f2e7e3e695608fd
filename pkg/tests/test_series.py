import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlab.series import (
    BlaschkeProduct,
    MobiusMap,
    PowerSeries,
    blaschke_series,
    compose,
    compose_with_mobius,
    derivative,
    eval_at,
    eval_circle,
    kernel_series,
    log_weighted_norm,
    mobius_series,
    mul,
    parse_symbol,
    power,
    power_derivative_alpha,
    powers,
    reciprocal,
    tail_estimate,
    weighted_inner,
    weighted_norm,
)
from hlab.weights import bergman, constant, invert, powerlog

# -- strategies -----------------------------------------------------------------


def disk_points(r=0.9):
    return st.builds(
        lambda rad, ang: cmath.rect(rad, ang),
        st.floats(0, r),
        st.floats(0, 2 * math.pi),
    )


def _unit_vector(seed, n):
    rng = np.random.default_rng(seed)
    return np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def unit_series(n):
    """Coefficient vectors with entries in the closed unit disk (seeded draws)."""
    return st.integers(0, 2**32 - 1).map(lambda s: PowerSeries(_unit_vector(s, n)))


def mp_taylor(fn, n):
    mp.mp.dps = 40
    return np.array([complex(c) for c in mp.taylor(fn, 0, n - 1)])


# -- closed forms and examples --------------------------------------------------


class TestMobius:
    def test_examples(self):
        assert mobius_series(MobiusMap(0), 4).allclose(PowerSeries([0, -1, 0, 0]), 0)
        assert mobius_series(MobiusMap(0.5), 4).allclose(PowerSeries([0.5, -0.75, -0.375, -0.1875]), 1e-15)
        np.testing.assert_allclose(mobius_series(MobiusMap(0.5, math.pi), 2).coeffs, [-0.5, 0.75], atol=1e-15)

    @pytest.mark.parametrize("z0", [0.3, -0.7j, 0.6 + 0.2j, 0.95])
    def test_against_mpmath(self, z0):
        a = mp.mpc(z0)
        want = mp_taylor(lambda z: cmath.exp(0.4j) * (a - z) / (1 - mp.conj(a) * z), 40)
        got = mobius_series(MobiusMap(z0, 0.4), 40).coeffs
        np.testing.assert_allclose(got, want, atol=1e-14)

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            MobiusMap(1.0)

    def test_eval(self):
        f = mobius_series(MobiusMap(0.5), 256)
        assert eval_at(f, 0.3) == pytest.approx(0.2 / 0.85, abs=1e-12)


class TestBlaschke:
    def test_examples(self):
        np.testing.assert_array_equal(blaschke_series(BlaschkeProduct((0, 0)), 4).coeffs, [0, 0, 1, 0])
        got = blaschke_series(BlaschkeProduct((0.5, -0.5)), 6).coeffs
        np.testing.assert_allclose(got, [-0.25, 0, 15 / 16, 0, 15 / 64, 0], atol=1e-15)
        one = blaschke_series(BlaschkeProduct((0.5,)), 4)
        assert one.allclose(mobius_series(MobiusMap(0.5), 4), 0)

    def test_against_mpmath(self):
        zs = (0.3 + 0.4j, -0.6, 0.1j)

        def B(z):
            out = cmath.exp(0.7j)
            for zj in zs:
                a = mp.mpc(zj)
                out *= (a - z) / (1 - mp.conj(a) * z)
            return out

        got = blaschke_series(BlaschkeProduct(zs, 0.7), 48).coeffs
        np.testing.assert_allclose(got, mp_taylor(B, 48), atol=1e-14)

    def test_needs_zero(self):
        with pytest.raises(ValueError):
            BlaschkeProduct(())
        with pytest.raises(ValueError):
            BlaschkeProduct((0.2, 1.1))

    @pytest.mark.parametrize("zs", [(0.5,), (0.9, 0.2j), (0.7j, -0.3, 0.4 + 0.1j), (-0.8, 0.8j)])
    def test_coefficient_decay(self, zs):
        rho = max(abs(z) for z in zs)
        # stop where rho^N is still well above double round-off
        N = int(min(1024, 25 / -math.log(rho)))
        c = np.abs(blaschke_series(BlaschkeProduct(zs), N).coeffs)
        k = np.arange(N // 2, N)
        slope = np.polyfit(k, np.log(c[k]), 1)[0]
        assert slope <= math.log(rho) + 0.05

    @given(st.lists(disk_points(0.9), min_size=1, max_size=4))
    @settings(max_examples=25, deadline=None)
    def test_unimodular_on_circle(self, zs):
        b = BlaschkeProduct(tuple(zs))
        vals = eval_circle(blaschke_series(b, 1024), 1024)
        # truncation error at |z| = 1 is bounded by the tail sum
        assert np.max(np.abs(np.abs(vals) - 1)) < 1e-8


class TestMul:
    def test_examples(self):
        one_z = PowerSeries([1, 1, 0, 0])
        np.testing.assert_array_equal(mul(one_z, one_z).coeffs, [1, 2, 1, 0])
        f = mobius_series(MobiusMap(0.3 + 0.1j), 32)
        assert mul(f, PowerSeries.one(32)).allclose(f, 0)
        prod = mul(mobius_series(MobiusMap(0.5), 64), mobius_series(MobiusMap(-0.5), 64))
        assert prod.allclose(blaschke_series(BlaschkeProduct((0.5, -0.5)), 64), 1e-15)

    def test_order_mismatch(self):
        with pytest.raises(ValueError):
            mul(PowerSeries.one(4), PowerSeries.one(5))

    def test_structural_zeros_exact(self):
        # leading zeros stay exactly zero, not round-off noise
        f = mobius_series(MobiusMap(0.4), 512)
        zf = mul(PowerSeries.monomial(3, 512), f)
        g = mul(zf, power(zf, 5))
        assert np.all(g.coeffs[:18] == 0)
        assert g.coeffs[18] != 0

    @given(unit_series(200), unit_series(200))
    @settings(max_examples=30, deadline=None)
    def test_fft_matches_direct(self, f, g):
        d = mul(f, g, "direct").coeffs
        q = mul(f, g, "fft").coeffs
        assert np.max(np.abs(d - q)) <= 1e-10

    def test_fft_matches_direct_large(self):
        rng = np.random.default_rng(3)
        n = 2**14
        r = rng.uniform(0, 1, (2, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, (2, n)))
        f, g = PowerSeries(r[0]), PowerSeries(r[1])
        assert np.max(np.abs(mul(f, g, "direct").coeffs - mul(f, g, "fft").coeffs)) <= 1e-10

    @given(unit_series(80), unit_series(80), unit_series(80))
    @settings(max_examples=30, deadline=None)
    def test_commutative_associative(self, f, g, h):
        assert np.max(np.abs(mul(f, g).coeffs - mul(g, f).coeffs)) <= 1e-12
        lhs = mul(mul(f, g), h).coeffs
        rhs = mul(f, mul(g, h)).coeffs
        scale = max(1.0, np.max(np.abs(lhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale

    @given(unit_series(64), unit_series(64))
    @settings(max_examples=20, deadline=None)
    def test_product_rule(self, f, g):
        lhs = derivative(mul(f, g)).coeffs[:-1]
        rhs = (mul(derivative(f), g) + mul(f, derivative(g))).coeffs[:-1]
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_powers_agree(self):
        f = mobius_series(MobiusMap(0.6j), 256)
        p = powers(f, 20)
        for n in (0, 1, 7, 19):
            assert np.max(np.abs(p[n].coeffs - power(f, n).coeffs)) < 1e-13


class TestCompose:
    def test_examples(self):
        N = 8
        z2 = PowerSeries.monomial(2, N)
        half = PowerSeries.monomial(1, N, 0.5)
        np.testing.assert_allclose(compose(z2, half).coeffs, [0, 0, 0.25, 0, 0, 0, 0, 0])
        geo = PowerSeries(np.ones(N))
        np.testing.assert_array_equal(compose(geo, z2).coeffs, [1, 0, 1, 0, 1, 0, 1, 0])
        f = PowerSeries([3, 1, 4, 1, 5, 9, 2, 6])
        np.testing.assert_array_equal(compose(f, PowerSeries(np.zeros(N))).coeffs, [3, 0, 0, 0, 0, 0, 0, 0])

    def test_rejects_nonzero_constant(self):
        with pytest.raises(ValueError, match="compose_with_mobius"):
            compose(PowerSeries.one(4), PowerSeries([0.1, 1, 0, 0]))

    @given(unit_series(24), unit_series(24))
    @settings(max_examples=25, deadline=None)
    def test_formal_matches_direct_sum(self, f, g):
        g = PowerSeries(np.r_[0, g.coeffs[1:]])
        want = sum((f.coeffs[k] * power(g, k).coeffs for k in range(24)), np.zeros(24, complex))
        np.testing.assert_allclose(compose(f, g).coeffs, want, atol=1e-11 * max(1, np.max(np.abs(want))))

    @pytest.mark.parametrize("z0", [0.0, 0.5, 0.3 - 0.6j, 0.9, -0.9j])
    def test_involution(self, z0):
        m = MobiusMap(z0)
        out = compose_with_mobius(mobius_series(m, 512), m).coeffs
        want = np.zeros(512)
        want[1] = 1
        assert np.max(np.abs(out - want)) <= 1e-10

    def test_mobius_examples(self):
        m = MobiusMap(0.5)
        assert compose_with_mobius(PowerSeries.one(16), m).allclose(PowerSeries.one(16), 0)
        got = compose_with_mobius(PowerSeries.monomial(2, 64), m)
        phi = mobius_series(m, 64)
        assert got.allclose(mul(phi, phi), 1e-14)

    def test_against_circle_samples(self):
        # oracle: sample f(phi(z)) on a fine circle and transform
        m = MobiusMap(0.4 + 0.3j, 1.1)
        f = blaschke_series(BlaschkeProduct((0.2, -0.5j)), 128)
        got = compose_with_mobius(f, m).coeffs
        M = 4096
        z = np.exp(2j * np.pi * np.arange(M) / M)
        b = BlaschkeProduct((0.2, -0.5j))
        want = np.fft.fft(b(m(z)))[:128] / M
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_tail_estimate(self):
        assert tail_estimate(blaschke_series(BlaschkeProduct((0.5,)), 128)) < 1e-30
        assert tail_estimate(PowerSeries(np.ones(64))) == math.inf


class TestNorms:
    def test_examples(self):
        z3 = PowerSeries.monomial(3, 16)
        assert weighted_norm(z3, bergman(1)) == pytest.approx(math.sqrt(0.2), abs=1e-14)
        for n in (0, 5, 40):
            zn = PowerSeries.monomial(n, 64)
            assert weighted_norm(zn, powerlog()) == pytest.approx(math.exp(math.log(n + 1) ** 2), rel=1e-12)
        assert weighted_inner(PowerSeries.monomial(2, 8), PowerSeries.monomial(3, 8), bergman(2)) == 0

    def test_conjugate_linear(self):
        f = mobius_series(MobiusMap(0.3), 32)
        g = kernel_series(0.2j, 32)
        s = bergman(1)
        assert weighted_inner(f, 2j * g, s) == pytest.approx(-2j * weighted_inner(f, g, s), abs=1e-14)
        assert weighted_inner(g, f, s) == pytest.approx(np.conj(weighted_inner(f, g, s)), abs=1e-14)

    def test_log_domain(self):
        # (k+1)^{2 ln(k+1)} overflows for k ~ 1e6; the log norm stays finite
        f = PowerSeries.monomial(3000, 3001)
        s = powerlog()
        assert log_weighted_norm(f, s) == pytest.approx(math.log(3001) ** 2, rel=1e-12)
        tiny = invert(powerlog())
        assert log_weighted_norm(f, tiny) == pytest.approx(-math.log(3001) ** 2, rel=1e-12)

    @pytest.mark.parametrize("t", [0.1, 0.4, 0.7])
    @pytest.mark.parametrize("n", [0, 1, 17, 64])
    def test_inner_function_norm(self, t, n):
        phi = mobius_series(MobiusMap(t), 4096)
        assert weighted_norm(power(phi, n), constant()) == pytest.approx(1.0, abs=1e-8)


class TestOther:
    def test_derivative(self):
        np.testing.assert_array_equal(derivative(PowerSeries([1, 1, 1, 1])).coeffs, [1, 2, 3, 0])

    def test_reciprocal(self):
        t = 0.37
        got = reciprocal(PowerSeries([1, -t, 0, 0, 0, 0])).coeffs
        np.testing.assert_allclose(got, t ** np.arange(6), atol=1e-15)
        with pytest.raises(ZeroDivisionError):
            reciprocal(PowerSeries([1e-13, 1, 0]))

    @given(unit_series(100))
    @settings(max_examples=25, deadline=None)
    def test_reciprocal_inverse(self, f):
        # dominant constant term: 1/f is analytic past the circle, coefficients stay bounded
        c = f.coeffs.copy() / f.order
        c[0] = 2.0
        f = PowerSeries(c)
        prod = mul(f, reciprocal(f)).coeffs
        want = np.zeros(f.order)
        want[0] = 1
        assert np.max(np.abs(prod - want)) <= 1e-12

    def test_eval_circle(self):
        f = blaschke_series(BlaschkeProduct((0.3, 0.6j)), 64)
        vals = eval_circle(f, 128)
        z = np.exp(2j * np.pi * np.arange(128) / 128)
        want = np.polyval(f.coeffs[::-1], z)
        np.testing.assert_allclose(vals, want, atol=1e-12)
        with pytest.raises(ValueError):
            eval_circle(f, 48)
        with pytest.raises(ValueError):
            eval_circle(f, 32)

    def test_power_derivative_alpha(self):
        c = power_derivative_alpha(0.6, 1.0, 4096).coeffs
        assert np.sum(np.abs(c) ** 2) == pytest.approx(2.125, abs=1e-12)
        half = power_derivative_alpha(1e-9, 0.5, 16).coeffs
        assert half[0] == pytest.approx(1j, abs=1e-8)
        assert np.linalg.norm(half) == pytest.approx(1.0, abs=1e-8)

    def test_power_derivative_matches_definition(self):
        # alpha = 2: ((t^2-1)/(1-tz)^2)^2 by plain series algebra
        t, N = 0.45, 64
        d = mul(reciprocal(PowerSeries([1, -t], N)), reciprocal(PowerSeries([1, -t], N)))
        d = d * (t * t - 1)
        np.testing.assert_allclose(power_derivative_alpha(t, 2.0, N).coeffs, mul(d, d).coeffs, atol=1e-13)


class TestParse:
    def test_symbols(self):
        assert isinstance(parse_symbol("mobius:0.5,0"), MobiusMap)
        m = parse_symbol("mobius:0.5,-0.25,1.5")
        assert m.z0 == 0.5 - 0.25j and m.theta == 1.5
        b = parse_symbol("blaschke:0.5,0;-0.5,0,3")
        assert b.zeros == (0.5, -0.5) and b.theta == 3.0
        p = parse_symbol("poly:1,0,−0.25", 8)
        np.testing.assert_array_equal(p.coeffs[:3], [1, 0, -0.25])

    @pytest.mark.parametrize("bad", ["mobius:2,0", "mobius:0.1", "blaschke:", "poly:a", "sin:1"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_symbol(bad)
