import math
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from hlab.weights import (
    GrowthClass,
    WeightSequence,
    bergman,
    beta,
    classify_growth,
    constant,
    dirichlet,
    flip_signs,
    flipbergman,
    invert,
    lift,
    load_weight_file,
    logrecip,
    parse_weight,
    powerlog,
    sobolev,
    tabulated,
)

# Gamma-function closed forms are an oracle independent of the running product.


def bergman_log_beta(alpha, k):
    return 0.5 * (gammaln(k + 2) + gammaln(2 * alpha + 2) - gammaln(k + 2 * alpha + 2))


def dirichlet_log_beta(lam, k):
    return 0.5 * (gammaln(k + 2 * lam + 2) - gammaln(2 * lam + 2) - gammaln(k + 2))


class TestClosedForms:
    def test_bergman_one(self):
        k = np.arange(10_001)
        got = bergman(1).betas(len(k))
        want = np.sqrt(6.0 / ((k + 2) * (k + 3)))
        assert np.max(np.abs(got / want - 1)) <= 1e-12

    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 2.0, 3.5])
    def test_bergman_gamma(self, alpha):
        k = np.arange(5000)
        got = bergman(alpha).log_betas(5000)
        np.testing.assert_allclose(got, bergman_log_beta(alpha, k), atol=1e-11)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_dirichlet_gamma(self, lam):
        k = np.arange(5000)
        got = dirichlet(lam).log_betas(5000)
        np.testing.assert_allclose(got, dirichlet_log_beta(lam, k), atol=1e-11)

    def test_examples(self):
        assert beta(bergman(1), 4) == pytest.approx(0.377964473, abs=1e-9)
        assert beta(powerlog(), 3) == pytest.approx(4 ** math.log(4), rel=1e-13)
        assert beta(invert(bergman(1)), 4) == pytest.approx(math.sqrt(7), rel=1e-13)
        assert beta(lift(bergman(1)), 4) == pytest.approx(5 / math.sqrt(7), rel=1e-13)
        assert beta(constant(), 123) == 1.0

    def test_logrecip(self):
        k = np.arange(1, 2000)
        b = logrecip().betas(2000)
        assert b[0] == 1.0
        np.testing.assert_allclose(b[1:], 1 / np.log(k + 1), rtol=1e-12)

    def test_powerlog_log_domain(self):
        # beta_k = (k+1)^{ln(k+1)} overflows double near k = e^{26.6}; logs stay finite
        k = np.arange(20000)
        lb = powerlog().log_betas(len(k))
        np.testing.assert_allclose(lb, np.log(k + 1) ** 2, rtol=1e-11, atol=1e-12)

    def test_sobolev_verbatim(self):
        s = sobolev()
        j = np.arange(1, 50.0)
        np.testing.assert_allclose(s.w(j), np.sqrt((j + 1) / (3 * j**4 - j**2 + 2 * j + 1)))
        assert s.flagged and invert(s).flagged
        assert not bergman(1).flagged


class TestDerived:
    def test_invert_involution(self):
        s = bergman(1)
        assert invert(invert(s)) is s
        assert invert(constant()) == constant()

    def test_lift_formula(self):
        s = dirichlet(1)
        k = np.arange(300)
        np.testing.assert_allclose(lift(s).betas(300), (k + 1) * s.betas(300), rtol=1e-12)

    def test_flip_deterministic(self):
        a = flipbergman(1, 7).betas(500)
        b = flipbergman(1, 7).betas(500)
        c = flipbergman(1, 8).betas(500)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        signs = flip_signs(7, np.arange(1, 10001))
        assert set(np.unique(signs)) == {-1.0, 1.0}
        assert abs(signs.mean()) < 0.05

    def test_tabulated(self, tmp_path):
        p = tmp_path / "w.txt"
        p.write_text("# steps\n2\n0.5\n\n3\n")
        s = load_weight_file(p)
        np.testing.assert_allclose(s.betas(4), [1, 2, 1, 3])
        with pytest.raises(IndexError):
            s.betas(5)
        with pytest.raises(ValueError):
            tabulated([1.0, -2.0])


class TestMemo:
    @given(st.lists(st.integers(1, 3000), min_size=1, max_size=8))
    @settings(max_examples=30, deadline=None)
    def test_append_only_prefix(self, sizes):
        s = bergman(0.7)
        ref = bergman(0.7).betas(3000)
        for n in sizes:
            assert np.array_equal(s.betas(n), ref[:n])

    def test_read_only(self):
        b = bergman(1).betas(10)
        with pytest.raises(ValueError):
            b[0] = 2.0

    def test_concurrent_readers(self):
        s = dirichlet(1.5)
        ref = dirichlet(1.5).log_betas(20000)
        barrier = threading.Barrier(8)

        def job(n):
            barrier.wait()
            return s.log_betas(n)

        with ThreadPoolExecutor(8) as ex:
            outs = list(ex.map(job, [100, 20000, 3000, 17, 20000, 5000, 64, 12345]))
        for out in outs:
            assert np.array_equal(out, ref[: len(out)])

    @given(st.sampled_from(["bergman:1", "dirichlet:2", "powerlog", "logrecip", "constant"]),
           st.integers(2, 4000))
    @settings(max_examples=40, deadline=None)
    def test_ratio_consistency(self, spec, n):
        s = parse_weight(spec)
        lb = s.log_betas(n)
        k = np.arange(1, n)
        np.testing.assert_allclose(np.diff(lb), s.log_w(k), atol=1e-12, rtol=1e-12)
        assert np.all(np.isfinite(lb))


class TestGrowth:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_bergman_polynomial(self, alpha):
        v = classify_growth(bergman(alpha), 100_000)
        assert v.growth_class is GrowthClass.POLYNOMIAL
        assert v.empirical_sup <= alpha

    def test_powerlog_intermediate(self):
        v = classify_growth(powerlog(), 100_000)
        assert v.growth_class is GrowthClass.INTERMEDIATE_EVIDENCE
        assert v.analytic_bound is None

    def test_logrecip_polynomial(self):
        assert classify_growth(logrecip(), 100_000).growth_class is GrowthClass.POLYNOMIAL

    def test_lift_constant(self):
        v = classify_growth(lift(constant()), 10_000)
        assert v.growth_class is GrowthClass.POLYNOMIAL
        assert v.empirical_sup == pytest.approx(2.0)

    def test_sobolev_flag_in_report(self):
        v = classify_growth(sobolev(), 1000)
        assert v.flagged and v.to_dict()["flagged"]

    def test_small_window(self):
        with pytest.raises(ValueError):
            classify_growth(bergman(1), 8)


class TestParse:
    @pytest.mark.parametrize(
        "spec",
        ["bergman:1", "dirichlet:0.5", "sobolev", "logrecip", "powerlog", "constant",
         "flipbergman:1:42", "inv(powerlog)", "lift(bergman:2)", "lift(inv(dirichlet:1))"],
    )
    def test_round_trip(self, spec):
        assert parse_weight(spec).spec == spec

    @pytest.mark.parametrize("bad", ["", "bergman", "bergman:x", "nope:1", "bergman:-1", "file:"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_weight(bad)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            WeightSequence("gaussian")
