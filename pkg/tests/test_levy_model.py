import math

import numpy as np
import pytest

from ssabsorb import (
    BoundedVariation,
    ExpMixture,
    ExponentHandle,
    LevyModel,
    NoJumps,
    TabulatedDensity,
    UnboundedVariation,
    bessel_model,
    sawtooth_model,
)
from ssabsorb.errors import DomainError, ModelError
from ssabsorb.levy_model import eval_psi, eval_psi_prime


def handle(model):
    return ExponentHandle(model)


class TestModelValidation:
    def test_negative_sigma_rejected(self):
        with pytest.raises(ModelError, match="sigma"):
            LevyModel(bbar=1.0, sigma=-1.0)

    def test_negative_kill_rate_rejected(self):
        with pytest.raises(ModelError, match="kill_q"):
            LevyModel(bbar=1.0, sigma=1.0, kill_q=-0.1)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ModelError, match="alpha"):
            LevyModel(bbar=1.0, sigma=1.0, alpha=0.0)

    def test_pure_negative_drift_is_degenerate(self):
        with pytest.raises(ModelError, match="degenerate"):
            LevyModel(bbar=-1.0)

    def test_alpha_tilde(self):
        m = LevyModel(bbar=1.0, sigma=1.0, alpha=0.8)
        assert m.alpha_tilde * m.alpha == pytest.approx(1.0, abs=1e-15)

    def test_exp_mixture_needs_positive_parameters(self):
        with pytest.raises(ModelError):
            ExpMixture((1.0, -2.0), (1.0, 1.0))
        with pytest.raises(ModelError):
            ExpMixture((1.0,), (1.0, 2.0))

    def test_tabulated_grid_checks(self):
        with pytest.raises(ModelError, match="negative"):
            TabulatedDensity((-1.0, 0.5), (1.0, 1.0), 1.0)
        with pytest.raises(ModelError, match="increasing"):
            TabulatedDensity((-1.0, -2.0), (1.0, 1.0), 1.0)
        with pytest.raises(ModelError, match="nonnegative"):
            TabulatedDensity((-2.0, -1.0), (1.0, -1.0), 1.0)


class TestExponent:
    def test_bessel_phi_root_b0_q4(self):
        h = handle(bessel_model(0.0, 4.0))
        # psi-bar(u) = 2u^2 - 4 vanishes at sqrt(2)
        assert eval_psi(h, math.sqrt(2.0)) == pytest.approx(0.0, abs=1e-14)

    def test_psi_at_zero_is_minus_q(self):
        for q in (0.0, 0.3, 4.0):
            assert eval_psi(handle(bessel_model(0.2, q)), 0.0) == -q

    def test_sawtooth_psi_value(self):
        h = handle(sawtooth_model(1.0, 0.5))
        assert eval_psi(h, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_sawtooth_mean(self):
        assert eval_psi_prime(handle(sawtooth_model(1.0, 0.5)), 0.0) == pytest.approx(-1.0, rel=1e-15)

    def test_bessel_mean(self):
        assert eval_psi_prime(handle(bessel_model(-1.0)), 0.0) == pytest.approx(-2.0, rel=1e-15)

    def test_psi_prime_increasing(self):
        h = handle(sawtooth_model(1.5, 0.2))
        vals = [h.psi_prime(u) for u in np.linspace(0, 10, 50)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_derivative_matches_difference(self):
        h = handle(sawtooth_model(1.0, 0.5))
        u, d = 1.3, 1e-6
        fd = (h.psi(u + d) - h.psi(u - d)) / (2 * d)
        assert h.psi_prime(u) == pytest.approx(fd, rel=1e-8)


class TestRoots:
    def test_bessel_cramer(self):
        assert handle(bessel_model(-1.0)).cramer_root() == pytest.approx(1.0, rel=1e-13)

    def test_sawtooth_cramer(self):
        assert handle(sawtooth_model(1.0, 0.5)).cramer_root() == pytest.approx(0.5, rel=1e-13)

    def test_factorable_quadratic(self):
        # 2u^2 - u: a Bessel model with b = -1/2
        assert handle(bessel_model(-0.5)).cramer_root() == pytest.approx(0.5, rel=1e-13)

    def test_no_cramer_root(self):
        with pytest.raises(DomainError, match="no Cramér root"):
            handle(bessel_model(0.5)).cramer_root()

    def test_inverse_phi_bessel_b0(self):
        assert handle(bessel_model(0.0)).inverse_phi(4.0) == pytest.approx(math.sqrt(2.0), rel=1e-13)

    @pytest.mark.parametrize("b", [-1.0, -0.3, 0.0, 0.7])
    @pytest.mark.parametrize("q", [0.1, 1.0, 5.0])
    def test_inverse_phi_bessel_formula(self, b, q):
        expect = 0.5 * (math.sqrt(2 * q + b * b) - b)
        assert handle(bessel_model(b)).inverse_phi(q) == pytest.approx(expect, rel=1e-12)

    @pytest.mark.parametrize("beta,delta", [(1.0, 0.5), (2.0, 0.3), (0.5, 0.8)])
    @pytest.mark.parametrize("q", [0.2, 1.0, 3.0])
    def test_inverse_phi_sawtooth_formula(self, beta, delta, q):
        phibar = math.sqrt((q - (delta - 1)) ** 2 + 4 * (delta + beta - 1) * q)
        expect = 0.5 * (q - (delta - 1) + phibar)
        assert handle(sawtooth_model(beta, delta)).inverse_phi(q) == pytest.approx(expect, rel=1e-12)

    def test_inverse_phi_needs_positive_q(self):
        with pytest.raises(DomainError):
            handle(bessel_model(0.0)).inverse_phi(0.0)


class TestTilt:
    def test_sawtooth_tilt(self):
        t = handle(sawtooth_model(1.0, 0.5)).tilt(0.5)
        for u in (0.3, 1.0, 4.0):
            assert t.psi(u) == pytest.approx(u * (u + 0.5) / (u + 1.0), rel=1e-14)

    def test_bessel_killed_tilt_coefficient(self):
        # direct substitution: psi(u + phi) - q = 2u^2 + (2b + 4 phi) u
        b, q = 0.3, 1.0
        h = handle(bessel_model(b, q))
        phi = h.inverse_phi(q)
        t = h.tilt(phi)
        for u in (0.5, 2.0):
            assert t.psi(u) == pytest.approx(2 * u * u + (2 * b + 4 * phi) * u, rel=1e-12)

    def test_tilt_vanishes_at_zero(self):
        for model in (sawtooth_model(1.0, 0.5), bessel_model(-1.0), bessel_model(0.3, 1.0)):
            h = handle(model)
            g = h.inverse_phi(model.kill_q) if model.kill_q else h.cramer_root()
            assert h.tilt(g).psi(0.0) == 0.0

    def test_tilt_has_positive_mean(self):
        h = handle(sawtooth_model(1.0, 0.5))
        assert h.tilt(0.5).psi_prime(0.0) > 0

    def test_wrong_gamma_rejected(self):
        with pytest.raises(DomainError):
            handle(sawtooth_model(1.0, 0.5)).tilt(0.7)


class TestRegime:
    def test_sawtooth_bv(self):
        assert handle(sawtooth_model(1.0, 0.5)).classify_regime() == BoundedVariation(1.0)

    def test_bessel_uv(self):
        assert isinstance(handle(bessel_model(-0.5)).classify_regime(), UnboundedVariation)

    def test_drift_two_mixture(self):
        m = LevyModel.from_drift(2.0, 0.0, ExpMixture((3.0,), (0.5,)))
        assert handle(m).classify_regime().b == pytest.approx(2.0, rel=1e-15)

    def test_vhat_sawtooth(self):
        h = handle(sawtooth_model(1.0, 0.5))
        for s in (0.0, 0.5, 3.0):
            assert h.vhat(s) == pytest.approx(1.0 / (s + 0.5), rel=1e-15)
        assert h.vhat(1e12) < 1e-11

    def test_vhat_factorisation(self):
        h = handle(sawtooth_model(2.0, 0.3))
        b = h.classify_regime().b
        for u in (0.1, 1.0, 5.0, 20.0, 50.0):
            assert abs(h.psi(u) - u * (b - h.vhat(u))) <= 1e-10 * (1 + abs(h.psi(u)))

    def test_vhat_rejects_uv(self):
        with pytest.raises(DomainError):
            handle(bessel_model(-0.5)).vhat(1.0)

    def test_barphi_bessel(self):
        t = handle(bessel_model(-1.0)).tilt(1.0)
        assert t.barphi(1.0) == pytest.approx(4.0, rel=1e-14)

    def test_barphi_definition_and_limit(self):
        m = LevyModel.from_drift(-0.5, 1.0, ExpMixture((2.0, 5.0), (0.7, 0.2)))
        h = handle(m)
        t = h.tilt(h.cramer_root())
        for u in np.geomspace(0.01, 100, 20):
            assert u * u * t.barphi(u) == pytest.approx(t.psi(u), rel=1e-12, abs=1e-14)
        assert t.barphi(1e8) == pytest.approx(0.5, rel=1e-6)

    def test_barphi_small_u_branches_agree(self):
        m = LevyModel.from_drift(-0.5, 1.0, ExpMixture((2.0,), (0.7,)))
        h = handle(m)
        t = h.tilt(h.cramer_root())
        u = 0.999999
        assert t.barphi(u) == pytest.approx(t.psi(u) / u ** 2, rel=1e-12)

    def test_barphi_pole(self):
        with pytest.raises(DomainError):
            handle(bessel_model(-1.0)).tilt(1.0).barphi(0.0)


class TestTabulated:
    def tab_from_exp(self, rate=2.0, intensity=1.0):
        r = np.linspace(-6.0, -1e-4, 4001)
        f = intensity * rate * np.exp(rate * r)
        return TabulatedDensity(tuple(r), tuple(f), rate)

    def test_quadrature_psi_matches_mixture(self):
        tab = self.tab_from_exp()
        m_tab = LevyModel.from_drift(1.0, 0.5, tab)
        m_exp = LevyModel.from_drift(1.0, 0.5, ExpMixture((2.0,), (1.0,)))
        for u in (0.5, 2.0):
            # piecewise-linear interpolation error of the grid is O(h^2)
            assert handle(m_tab).psi(u) == pytest.approx(handle(m_exp).psi(u), rel=1e-5)

    def test_nojumps_has_no_mass(self):
        assert NoJumps().total_mass() == 0.0
