import math

import mpmath as mp
import numpy as np
import pytest

from ssabsorb import closed_forms as cf
from ssabsorb.errors import DomainError, PoleError

import oracle_values as ov


def test_log_gamma_at_one_and_two():
    assert cf.log_gamma(1.0) == 0.0 or abs(cf.log_gamma(1.0)) < 1e-15
    assert abs(cf.log_gamma(2.0)) < 1e-15


@pytest.mark.parametrize("x", [0.1, 0.5, 1.5, 7.3, 42.0, 170.5, 1e5])
def test_log_gamma_against_mpmath(x):
    assert cf.log_gamma(x) == pytest.approx(float(mp.loggamma(x)), rel=1e-14, abs=1e-15)


def test_gamma_sign_and_poles():
    assert cf.gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-14)
    assert cf.rgamma(-3.0) == 0.0
    with pytest.raises(PoleError):
        cf.gamma(-2.0)


def test_regularized_gamma_erf():
    assert cf.regularized_gamma_lower(0.5, 0.5) == pytest.approx(ov.ERF_HALF_SQRT2, abs=1e-15)


@pytest.mark.parametrize("a,x", [(0.5, 0.01), (2.5, 1.0), (3.0, 10.0), (0.3, 40.0), (50.0, 45.0)])
def test_regularized_gamma_against_mpmath(a, x):
    ref = float(mp.gammainc(a, 0, x, regularized=True))
    assert cf.regularized_gamma_lower(a, x) == pytest.approx(ref, rel=1e-13, abs=1e-16)


def test_regularized_gamma_limits():
    assert cf.regularized_gamma_lower(1.7, 0.0) == 0.0
    assert cf.regularized_gamma_lower(1.7, 1e4) == 1.0
    assert cf.regularized_gamma_lower(1.7, math.inf) == 1.0


class TestKummer:
    def test_at_zero(self):
        assert cf.kummer_phi(1.3, 2.2, 0.0) == 1.0

    def test_exponential_collapse(self):
        assert cf.kummer_phi(1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-15)
        assert cf.kummer_phi(1.5, 1.5, -0.5) == pytest.approx(math.exp(-0.5), rel=1e-15)

    @pytest.mark.parametrize("rho,c,z", [(1.5, 1.8, -0.5), (1.5, 1.8, -2.0), (1.5, 1.8, -10.0),
                                         (0.4, 2.5, -60.0), (2.0, 0.7, 3.0)])
    def test_against_mpmath(self, rho, c, z):
        assert cf.kummer_phi(rho, c, z) == pytest.approx(float(mp.hyp1f1(rho, c, z)), rel=1e-13)

    def test_asymptotic_mode(self):
        x = 1e4
        full = cf.kummer_phi(0.7, 1.9, -x)
        lead = cf.kummer_phi(0.7, 1.9, -x, mode="asymptotic")
        assert lead == pytest.approx(full, rel=1e-3)

    def test_pole_in_lower_parameter(self):
        with pytest.raises(PoleError):
            cf.kummer_phi(1.0, -2.0, 0.5)


class TestGauss:
    def test_at_zero(self):
        assert cf.gauss_2f1(0.3, 1.2, 2.5, 0.0) == 1.0

    def test_log_identity(self):
        assert cf.gauss_2f1(1.0, 1.0, 2.0, -1.0) == pytest.approx(math.log(2.0), rel=1e-15)

    def test_chu_vandermonde_terminating(self):
        # 2F1(-n, 1 + beta; 2 - delta; 1) for n = 2, beta = 1, delta = 1/2, as a finite sum
        n, beta, delta = 2, 1.0, 0.5
        c = 2 - delta
        lhs = sum(
            math.comb(n, k) * (-1) ** k * math.prod(1 + beta + j for j in range(k)) / math.prod(c + j for j in range(k))
            for k in range(n + 1)
        )
        rhs = cf.gamma(c) * cf.gamma(c - 1 - beta + n) / (cf.gamma(c + n) * cf.gamma(c - 1 - beta))
        assert lhs == pytest.approx(rhs, rel=1e-14)
        assert cf.gauss_2f1(-2.0, 2.0, 1.5, 0.999999) == pytest.approx(lhs, rel=1e-5)

    @pytest.mark.parametrize("z", [-0.3, -0.9, -3.0, -12.0, -500.0, 0.6])
    def test_against_mpmath(self, z):
        a, b, c = 0.5, 2.0, 1.5
        assert cf.gauss_2f1(a, b, c, z) == pytest.approx(float(mp.hyp2f1(a, b, c, z)), rel=1e-12)

    def test_integer_gap_far_argument(self):
        # b - a integer: the inverse formula is skipped and Pfaff is used
        z = -50.0
        assert cf.gauss_2f1(1.0, 2.0, 1.5, z) == pytest.approx(float(mp.hyp2f1(1, 2, 1.5, z)), rel=1e-11)

    def test_domain(self):
        with pytest.raises(DomainError):
            cf.gauss_2f1(0.5, 0.5, 1.5, 1.0)


class TestErrorBounds:
    """Reported error bounds must dominate the true error on random draws."""

    def test_kummer_bounds(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            rho, c = rng.uniform(0.1, 4.0), rng.uniform(0.2, 5.0)
            z = -rng.uniform(0.0, 40.0)
            sv = cf.kummer_phi_series(rho, c, z)
            true = abs(sv.value - float(mp.hyp1f1(rho, c, z)))
            assert true <= sv.err_bound + 2e-16 * abs(sv.value)

    def test_gauss_bounds(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a, b, c = rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0), rng.uniform(0.2, 4.0)
            z = -rng.uniform(0.0, 30.0)
            sv = cf.gauss_2f1_series(a, b, c, z)
            true = abs(sv.value - float(mp.hyp2f1(a, b, c, z)))
            assert true <= sv.err_bound + 2e-16 * abs(sv.value)

    def test_wright_bounds(self):
        rng = np.random.default_rng(3)
        mp.mp.dps = 40
        try:
            for _ in range(50):
                alpha = rng.uniform(1.3, 1.95)
                z = -rng.uniform(0.0, 2.5) ** alpha
                sv = cf.wright_2psi1_series(alpha, z)
                ref = mp.nsum(
                    lambda n: mp.gamma(n + 1 - 1 / mp.mpf(alpha)) / mp.gamma(alpha * n + alpha) * mp.mpf(z) ** n,
                    [0, mp.inf],
                )
                assert abs(sv.value - float(ref)) <= sv.err_bound + 2e-16 * abs(sv.value)
        finally:
            mp.mp.dps = 15


class TestWright:
    def test_at_zero(self):
        a = 1.5
        assert cf.wright_2psi1(a, 0.0) == pytest.approx(cf.gamma(1 - 1 / a) / cf.gamma(a), rel=1e-15)

    def test_series_at_minus_one(self):
        assert cf.wright_2psi1(1.5, -1.0) == pytest.approx(ov.WRIGHT_M1, rel=1e-13)

    def test_alpha_outside_range(self):
        with pytest.raises(DomainError):
            cf.wright_2psi1(2.5, -1.0)


class TestStableMaximum:
    @pytest.mark.parametrize("x,ref", ov.STABLE_CDF)
    def test_against_mpmath(self, x, ref):
        assert cf.stable_max_cdf(1.5, x) == pytest.approx(ref, abs=1e-13)

    def test_limits(self):
        assert cf.stable_max_cdf(1.5, 1e-8) < 1e-4
        assert cf.stable_max_cdf(1.5, 1e4) == pytest.approx(1.0, abs=1e-5)

    def test_monotone(self):
        xs = np.geomspace(0.05, 20, 60)
        vals = [cf.stable_max_cdf(1.7, x) for x in xs]
        assert all(b >= a - 1e-13 for a, b in zip(vals, vals[1:]))

    def test_tail_and_series_overlap(self):
        for x in (2.5, 3.0, 4.0, 6.0):
            series = cf.wright_2psi1_series(1.5, -x ** 1.5)
            pref = math.sin(math.pi / 1.5) / math.pi * x ** 0.5
            tail = cf._stable_tail(1.5, x, 0)
            gap = abs(pref * series.value - tail.value)
            assert gap <= tail.err_bound + pref * series.err_bound

    def test_pdf_is_derivative(self):
        x, h = 1.2, 1e-5
        fd = (cf.stable_max_cdf(1.5, x + h) - cf.stable_max_cdf(1.5, x - h)) / (2 * h)
        assert cf.stable_max_pdf(1.5, x) == pytest.approx(fd, rel=1e-7)


class TestBessel:
    def test_erf_value(self):
        assert cf.bessel_survival(-0.5, 0.0, 1.0) == pytest.approx(ov.ERF_HALF_SQRT2, abs=1e-15)

    @pytest.mark.parametrize("t,ref", ov.BESSEL_S[::4])
    def test_survival_grid(self, t, ref):
        assert cf.bessel_survival(-0.5, 0.0, t) == pytest.approx(ref, abs=1e-14)

    @pytest.mark.parametrize("t,ref", ov.BESSEL_DENS)
    def test_density(self, t, ref):
        assert cf.bessel_density(-0.5, 0.0, t) == pytest.approx(ref, rel=1e-14)

    def test_density_integrates_to_one(self):
        val = mp.quad(lambda t: cf.bessel_density(-0.5, 0.0, float(t)), [0, 1, 10, 100, mp.inf])
        assert float(val) == pytest.approx(1.0, abs=1e-8)

    def test_killed_forms_agree(self):
        k = cf.bessel_density(0.3, 1.0, 2.0, form="kummer")
        b = cf.bessel_density(0.3, 1.0, 2.0, form="beta")
        assert k == pytest.approx(b, abs=1e-9)

    @pytest.mark.parametrize("t,ref", ov.KILLED_S_BETA)
    def test_killed_beta_form(self, t, ref):
        assert cf.bessel_density(0.3, 1.0, t, form="beta") == pytest.approx(ref, rel=1e-12)

    def test_killed_constant(self):
        assert cf.bessel_kesten_constant(0.3, 1.0) == pytest.approx(ov.KILLED_C, rel=1e-14)

    def test_h0_violation(self):
        with pytest.raises(DomainError):
            cf.bessel_survival(0.5, 0.0, 1.0)


class TestSawtooth:
    def test_prefactor(self):
        assert cf.sawtooth_kesten_constant(1.0, 0.5) == pytest.approx(4 / math.pi, rel=1e-15)

    @pytest.mark.parametrize("t,ref", ov.SAW_S[::3])
    def test_survival(self, t, ref):
        assert cf.sawtooth_survival(1.0, 0.5, 0.0, t) == pytest.approx(ref, abs=1e-14)

    @pytest.mark.parametrize("t,ref", ov.SAW_DENS)
    def test_density(self, t, ref):
        assert cf.sawtooth_density(1.0, 0.5, 0.0, t) == pytest.approx(ref, rel=1e-12)

    def test_power_tail(self):
        t = 1e9
        assert cf.sawtooth_survival(1.0, 0.5, 0.0, t) * t ** 0.5 == pytest.approx(4 / math.pi, rel=1e-8)

    def test_small_time(self):
        assert cf.sawtooth_survival(1.0, 0.5, 0.0, 1e-6) == pytest.approx(1.0, abs=1e-4)

    def test_killed_is_probability(self):
        vals = [cf.sawtooth_survival(1.0, 0.5, 0.7, t) for t in np.geomspace(1e-3, 1e3, 40)]
        assert all(0 <= v <= 1 for v in vals)
        assert all(b <= a + 1e-14 for a, b in zip(vals, vals[1:]))

    def test_parameter_domain(self):
        with pytest.raises(DomainError):
            cf.sawtooth_survival(1.0, 1.5, 0.0, 1.0)
