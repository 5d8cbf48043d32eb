"""Built-in validation suite: analytic engine against closed forms and Monte Carlo."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, stats

from . import closed_forms as cf
from .absorption import AbsorptionLaw, ExitSpec
from .levy_model import bessel_model, sawtooth_model
from .mc import MCConfig, affine_recomposition, estimate_exit, estimate_survival, simulate_stable_max


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(name, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure of the check, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def check_sawtooth():
    law = AbsorptionLaw(sawtooth_model(1.0, 0.5))
    ts = np.geomspace(0.5, 50.0, 32)
    err = max(abs(law.survival(t).value - cf.sawtooth_survival(1.0, 0.5, 0.0, t)) for t in ts)
    c_err = abs(law.c_gamma - 4.0 / math.pi)
    return err <= 1e-8 and c_err <= 1e-8, f"max |S - closed form| = {err:.2e}, |C - 4/pi| = {c_err:.2e}"


def check_bessel():
    law = AbsorptionLaw(bessel_model(-0.5))
    s1 = law.survival(1.0).value
    ref = math.erf(1.0 / math.sqrt(2.0))
    ts = np.geomspace(0.2, 50.0, 32)
    # (T_0, Q_1) = 1 / (2 G_{1/2}): S(t) = P(G_{1/2} <= 1/(2t))
    err = max(abs(law.survival(t).value - cf.regularized_gamma_lower(0.5, 0.5 / t)) for t in ts)
    return abs(s1 - ref) <= 1e-8 and err <= 1e-8, f"|S(1) - erf| = {abs(s1 - ref):.2e}, grid max {err:.2e}"


def check_bessel_killed():
    law = AbsorptionLaw(bessel_model(0.3, 1.0))
    ts = np.geomspace(0.5, 20.0, 24)
    worst = 0.0
    for t in ts:
        g = law.density(t).value
        k = cf.bessel_density(0.3, 1.0, t, form="kummer")
        b = cf.bessel_density(0.3, 1.0, t, form="beta")
        worst = max(worst, abs(g - k), abs(g - b), abs(k - b))
    return worst <= 1e-8, f"max pairwise density gap {worst:.2e} (rho = b + 2 phi(q))"


def _models():
    return {
        "bessel b=-1/2": bessel_model(-0.5),
        "bessel b=0.3 q=1": bessel_model(0.3, 1.0),
        "saw-tooth": sawtooth_model(1.0, 0.5),
    }


def check_calculus():
    notes = []
    ok = True
    for name, model in _models().items():
        law = AbsorptionLaw(model)
        total, _ = law.normalization()
        ok &= abs(total - 1.0) <= 1e-6
        worst1 = worst2 = 0.0
        for t in (2.0, 10.0):
            h = 1e-5 * t
            fd = -(law.survival(t + h).value - law.survival(t - h).value) / (2 * h)
            worst1 = max(worst1, abs(fd / law.density(t).value - 1.0))
            for m in (1, 2):
                hm = 1e-3 * t
                if m == 1:
                    fdm = (law.density(t + hm).value - law.density(t - hm).value) / (2 * hm)
                else:
                    fdm = (law.density(t + hm).value - 2 * law.density(t).value + law.density(t - hm).value) / hm ** 2
                worst2 = max(worst2, abs(fdm / law.density(t, m).value - 1.0))
        ok &= worst1 <= 1e-5 and worst2 <= 1e-4
        notes.append(f"{name}: int s - 1 = {total - 1:.1e}, s {worst1:.1e}, s' s'' {worst2:.1e}")
    return ok, "; ".join(notes)


def check_kesten():
    notes = []
    ok = True
    for name, model in (("bessel", bessel_model(-0.5)), ("bessel killed", bessel_model(0.3, 1.0)),
                        ("saw-tooth", sawtooth_model(1.0, 0.5))):
        law = AbsorptionLaw(model)
        t = 1e4
        r = abs(t ** law.kappa * law.survival(t).value / law.c_gamma - 1.0)
        ok &= r <= 1e-3
        notes.append(f"{name} {r:.1e}")
    return ok, "t^k S / C - 1 at 1e4: " + ", ".join(notes)


def check_coefficients():
    law = AbsorptionLaw(sawtooth_model(1.0, 0.5))
    se = law.tilted
    # psi_gamma(k) = k (k + 1/2) / (k + 1) exactly
    a = Fraction(1)
    worst = 0.0
    for n in range(1, 501):
        a /= Fraction(n) * (Fraction(n) + Fraction(1, 2)) / (Fraction(n) + 1)
        m, e = se.coeff_a_frexp(n)
        worst = max(worst, abs(float(Fraction(m) * Fraction(2) ** e / a - 1)))
    worst_s = 0.0
    for s in np.linspace(-0.9, 6.3, 10):
        lhs = se.product_a_s(s + 1.0)
        rhs = se.product_a_s(s) / se.exponent.phi(law.alpha * (s + 1.0))
        worst_s = max(worst_s, abs(lhs / rhs - 1.0))
    worst_c = 0.0
    for rho in (0.5, 1.5, 2.5):
        for frac in (0.1, 0.3, 0.45):
            x = frac * se.radius
            d, _ = se._direct(rho, -x)
            c = se._continuation(rho, -x)
            worst_c = max(worst_c, abs(d.value - c.value) / abs(d.value))
    ok = worst <= 1e-14 and worst_s <= 1e-10 and worst_c <= 1e-9
    return ok, f"a_n {worst:.1e}, a_s shift {worst_s:.1e}, continuation overlap {worst_c:.1e}"


def check_laplace():
    law = AbsorptionLaw(sawtooth_model(1.0, 0.5))
    worst = 0.0
    for r in (0.5, 1.0, 2.0):
        def f(u):
            t = u / (1.0 - u)
            return math.exp(-r * t) * law.density(t).value / (1.0 - u) ** 2

        q, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-12, epsrel=1e-11, limit=400)
        worst = max(worst, abs(q - law.laplace(r).value))
    return worst <= 1e-6, f"max |quadrature - transform| = {worst:.2e}"


def check_monte_carlo(paths=200_000, dt=1e-4, seed=20240607):
    cfg = MCConfig(paths=paths, dt=dt, seed=seed)
    notes = []
    ok = True
    ts = (0.5, 1.0, 2.0, 5.0, 20.0)
    for name, model in (("bessel", bessel_model(-0.5)), ("saw-tooth", sawtooth_model(1.0, 0.5))):
        law = AbsorptionLaw(model)
        worst = 0.0
        for t, est in zip(ts, estimate_survival(model, cfg, ts)):
            worst = max(worst, abs(est.value - law.survival(t).value) / max(est.tolerance(), 1e-300))
            ok &= abs(est.value - law.survival(t).value) <= est.tolerance()
        notes.append(f"{name} survival worst |err|/(4sd+bias) = {worst:.2f}")
    model = bessel_model(-0.5)
    spec = ExitSpec(-1.0, 2.0, 0.5, 1.0)
    est = estimate_exit(model, cfg, spec)
    ref = AbsorptionLaw(model).exit_probability(spec).value
    ok &= abs(est.value - ref) <= est.tolerance()
    notes.append(f"exit {est.value:.4f} vs {ref:.4f}")
    worst = 0.0
    for x, e in zip((0.5, 1.0, 2.0), simulate_stable_max(1.5, cfg, (0.5, 1.0, 2.0))):
        ref = cf.stable_max_cdf(1.5, x)
        ok &= abs(e.value - ref) <= 4.0 * e.std_err + e.truncation_bias_bound
        worst = max(worst, abs(e.value - ref) / e.std_err)
    notes.append(f"stable max worst z = {worst:.2f}")
    return ok, "; ".join(notes)


def check_affine(paths=10_000, seed=20240607):
    direct, recomposed = affine_recomposition(sawtooth_model(1.0, 0.5), MCConfig(paths=paths, dt=1e-3, seed=seed))
    res = stats.ks_2samp(direct, recomposed)
    return res.pvalue > 0.01, f"KS statistic {res.statistic:.4f}, p-value {res.pvalue:.3f}"


def run_all(mc_paths=200_000, seed=20240607):
    checks = [
        ("saw-tooth equivalence", check_sawtooth),
        ("bessel equivalence", check_bessel),
        ("killed bessel equivalence", check_bessel_killed),
        ("normalization and calculus", check_calculus),
        ("kesten asymptote", check_kesten),
        ("coefficients and products", check_coefficients),
        ("laplace closure", check_laplace),
        ("monte carlo concordance", lambda: check_monte_carlo(mc_paths, seed=seed)),
        ("affine fixed point", lambda: check_affine(seed=seed)),
    ]
    return [_timed(name, fn) for name, fn in checks]
