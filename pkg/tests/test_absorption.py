import math

import numpy as np
import pytest
from scipy import special

from ssabsorb import bessel_model, sawtooth_model
from ssabsorb.absorption import AbsorptionLaw, ExitSpec, hitting_laplace, select_gamma
from ssabsorb.errors import DomainError

import oracle_values as ov


@pytest.fixture(scope="module")
def bessel():
    return AbsorptionLaw(bessel_model(-0.5))


@pytest.fixture(scope="module")
def killed():
    return AbsorptionLaw(bessel_model(0.3, 1.0))


@pytest.fixture(scope="module")
def saw():
    return AbsorptionLaw(sawtooth_model(1.0, 0.5))


def bessel_S(b, t):
    # Q_1(T_0 > t) = P(Gamma(-b) <= 1 / (2t)) for the Bessel model without killing
    return special.gammainc(-b, 0.5 / t)


class TestGammaSelection:
    def test_cramer(self):
        g, _ = select_gamma(sawtooth_model(1.0, 0.5))
        assert g == pytest.approx(0.5, rel=1e-13)

    def test_killed(self):
        b, q = 0.3, 1.0
        g, _ = select_gamma(bessel_model(b, q))
        assert g == pytest.approx(0.5 * (math.sqrt(2 * q + b * b) - b), rel=1e-13)

    def test_no_absorption(self):
        with pytest.raises(DomainError, match="never"):
            select_gamma(bessel_model(0.5))


class TestKesten:
    def test_sawtooth(self, saw):
        assert saw.c_gamma == pytest.approx(4 / math.pi, rel=1e-12)
        assert saw.kappa == pytest.approx(0.5, rel=1e-13)

    def test_bessel(self, bessel):
        assert bessel.c_gamma == pytest.approx(math.sqrt(2 / math.pi), rel=1e-12)

    def test_killed(self, killed):
        assert killed.c_gamma == pytest.approx(ov.KILLED_C, rel=1e-12)

    @pytest.mark.parametrize("b,c", [(-1.0, 0.5), (-2.0, 0.125)])
    def test_integer_kappa(self, b, c):
        assert AbsorptionLaw(bessel_model(b)).c_gamma == pytest.approx(c, rel=1e-13)

    @pytest.mark.parametrize("d", [3e-7, -3e-7, 3e-5, -3e-5])
    def test_continuous_through_integer(self, d):
        b = -1.0 + d
        expect = 2.0 ** b / special.gamma(1 - b)  # (1/(2t))^(-b) / Gamma(1 - b)
        assert AbsorptionLaw(bessel_model(b)).c_gamma == pytest.approx(expect, rel=1e-9)

    def test_error_bound_small(self, saw, bessel, killed):
        for law in (saw, bessel, killed):
            assert 0 < law.kesten_error() < 1e-12 * law.c_gamma

    def test_power_tail(self, saw):
        t = 1e6
        assert saw.survival(t).value * t ** saw.kappa == pytest.approx(saw.c_gamma, rel=1e-5)


class TestSurvival:
    @pytest.mark.parametrize("t,ref", ov.BESSEL_S)
    def test_bessel(self, bessel, t, ref):
        rep = bessel.survival(t)
        assert rep.value == pytest.approx(ref, abs=1e-10)
        assert abs(rep.value - ref) <= rep.err_bound + 4e-16

    @pytest.mark.parametrize("t,ref", ov.SAW_S)
    def test_sawtooth(self, saw, t, ref):
        rep = saw.survival(t)
        assert rep.value == pytest.approx(ref, abs=1e-10)
        assert abs(rep.value - ref) <= rep.err_bound + 4e-16

    @pytest.mark.parametrize("t,ref", ov.KILLED_S)
    def test_killed(self, killed, t, ref):
        assert killed.survival(t).value == pytest.approx(ref, abs=1e-10)

    @pytest.mark.parametrize("b", [-1.0, -2.0, -0.8, -1.7])
    def test_bessel_family(self, b):
        law = AbsorptionLaw(bessel_model(b))
        for t in (0.3, 1.0, 4.0, 25.0):
            assert law.survival(t).value == pytest.approx(bessel_S(b, t), abs=1e-9)

    def test_small_time(self, bessel, saw):
        assert bessel.survival(1e-6).value == pytest.approx(1.0, abs=1e-4)
        assert saw.survival(1e-6).value == pytest.approx(1.0, abs=1e-4)

    def test_decreasing(self, saw):
        ts = np.geomspace(0.05, 500, 80)
        vals = [saw.survival(t).value for t in ts]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_scaling(self, saw):
        x, t = 2.0, 3.0
        assert saw.survival_from(x, t).value == pytest.approx(saw.survival(t / x).value, rel=1e-15)

    def test_bad_time(self, saw):
        with pytest.raises(DomainError):
            saw.survival(0.0)


class TestDensity:
    @pytest.mark.parametrize("t,ref", ov.BESSEL_DENS)
    def test_bessel(self, bessel, t, ref):
        assert bessel.density(t).value == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("t,ref", ov.SAW_DENS)
    def test_sawtooth(self, saw, t, ref):
        assert saw.density(t).value == pytest.approx(ref, rel=1e-9)

    @pytest.mark.parametrize("t,ref", ov.KILLED_DENS)
    def test_killed(self, killed, t, ref):
        assert killed.density(t).value == pytest.approx(ref, rel=1e-9)

    def test_derivative_of_survival(self, saw):
        t, h = 1.7, 1e-5
        fd = -(saw.survival(t + h).value - saw.survival(t - h).value) / (2 * h)
        assert saw.density(t).value == pytest.approx(fd, rel=1e-7)

    def test_higher_derivatives(self, saw):
        t, h = 2.3, 1e-4
        for m in (1, 2):
            fd = (saw.density(t + h, m - 1).value - saw.density(t - h, m - 1).value) / (2 * h)
            assert saw.density(t, m).value == pytest.approx(fd, rel=1e-6)

    def test_sign_pattern_far_out(self, saw, bessel):
        for law in (saw, bessel):
            for m in range(5):
                assert math.copysign(1, law.density(100.0, m).value) == (-1) ** m

    @pytest.mark.parametrize("law", ["bessel", "saw", "killed"])
    def test_normalization(self, law, request):
        # killed laws have total mass Q_1(T_0 < inf) = 1 as killing sends the process to 0
        total, err = request.getfixturevalue(law).normalization()
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_negative_order(self, saw):
        with pytest.raises(DomainError):
            saw.density(1.0, -1)


class TestDistribution:
    def test_monotone_with_limits(self, saw):
        xs = np.geomspace(1e-3, 1e3, 200)
        vals = [saw.distribution(x).value for x in xs]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[0] < 0.05
        assert vals[-1] > 0.999


class TestLaplace:
    def test_zero(self, saw):
        assert saw.laplace(0.0).value == 1.0

    @pytest.mark.parametrize("i", range(3))
    def test_against_quadrature(self, saw, i):
        r, ref = ov.SAW_LAPLACE[i]
        assert saw.laplace(r).value == pytest.approx(ref, rel=1e-9)

    def test_decreasing(self, saw):
        vals = [saw.laplace(r).value for r in np.linspace(0, 0.9, 30)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_large_argument_uses_quadrature(self, saw):
        # the two series cancel to every digit here; the density integral does not
        rep = saw.laplace(40.0)
        assert rep.method == "quadrature"
        fine = saw._laplace_quadrature(40.0)
        assert 0 < rep.value < saw.laplace(20.0).value
        assert rep.err_bound < 1e-12
        assert rep.value == pytest.approx(fine.value, rel=1e-14)

    def test_methods_agree_where_both_work(self, saw):
        for r in (0.5, 1.0):
            series = saw.laplace(r)
            assert series.method == "direct_series"
            assert saw._laplace_quadrature(r).value == pytest.approx(series.value, rel=1e-11)

    def test_scaling_in_start(self, saw):
        assert saw.laplace(0.4, x=2.0).value == pytest.approx(saw.laplace(0.8).value, rel=1e-14)

    def test_needs_unkilled(self, killed):
        with pytest.raises(DomainError):
            killed.laplace(1.0)


class TestExit:
    def test_bessel_value(self, bessel):
        spec = ExitSpec(lam=-1.0, level_a=2.0, start_x=0.5, alpha=1.0)
        assert bessel.exit_probability(spec).value == pytest.approx(ov.BESSEL_EXIT, rel=1e-12)

    def test_at_level(self, saw, bessel):
        for law in (saw, bessel):
            for lam in (-0.5, 0.3):
                spec = ExitSpec(lam=lam, level_a=1.5, start_x=1.5, alpha=1.0)
                assert law.exit_probability(spec).value == pytest.approx(1.0, rel=1e-14)

    def test_flat_level_limit(self, saw):
        # as lambda -> 0 the curve is flat and Q_x[T_a < T_0] = (x/a)^theta
        for lam in (-1e-9, 1e-9):
            spec = ExitSpec(lam=lam, level_a=0.6, start_x=0.2, alpha=1.0)
            assert saw.exit_probability(spec).value == pytest.approx((0.2 / 0.6) ** 0.5, rel=1e-6)

    def test_probability_range_and_order(self, bessel):
        prev = 1.0
        for a in (1.0, 2.0, 4.0, 8.0):
            v = bessel.exit_probability(ExitSpec(lam=-1.0, level_a=a, start_x=0.5, alpha=1.0)).value
            assert 0 < v < prev
            prev = v

    def test_conservative_mellin_at_zero(self, saw):
        spec = ExitSpec(lam=-1.0, level_a=2.0, start_x=0.5, alpha=1.0)
        assert saw.exit_mellin(spec, 0.0, absorbed=False).value == 1.0

    def test_bv_radius(self, saw):
        with pytest.raises(DomainError):
            saw.exit_probability(ExitSpec(lam=2.0, level_a=1.0, start_x=0.5, alpha=1.0))

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            ExitSpec(lam=0.0, level_a=1.0, start_x=0.5, alpha=1.0)
        with pytest.raises(DomainError):
            ExitSpec(lam=1.0, level_a=1.0, start_x=1.5, alpha=1.0)


class TestHitting:
    def test_bessel(self):
        assert hitting_laplace(bessel_model(0.5), 0.5, 1.0).value == pytest.approx(ov.BESSEL_HITTING, rel=1e-13)

    def test_at_level(self):
        assert hitting_laplace(bessel_model(0.5), 1.0, 1.0).value == 1.0

    def test_needs_nonnegative_mean(self):
        with pytest.raises(DomainError):
            hitting_laplace(bessel_model(-0.5), 0.5, 1.0)
