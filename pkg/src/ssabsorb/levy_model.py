"""Spectrally negative Lévy models and their Laplace exponents.

A model is the triplet (bbar, sigma, nu) plus a kill rate q and the
self-similarity index alpha.  The Laplace exponent is

    psi(u) = bbar*u + sigma/2*u**2 + int (e^{ur} - 1 - ur 1_{|r|<1}) nu(dr) - q.

Every exponent handled here is stored through the factorisation
psi(u) = u*phi(u) - q.  For jump measures that are finite mixtures of
exponentials, phi is the rational function

    phi(u) = c0 + c1*u - sum_j w_j / (m_j + u),

and tilting u -> u + gamma maps it onto another function of the same
shape with explicitly transformed parameters.  The tilted exponent is
therefore exactly zero at the origin instead of being the difference of
two nearly equal floats.
"""

from __future__ import annotations

import copy
import math
import threading
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, ModelError, PoleError, QuadratureError

TOL_ROOT = 1e-13
_QUAD_RTOL = 1e-11


# ---------------------------------------------------------------------------
# jump measures


@dataclass(frozen=True)
class NoJumps:
    """The zero Lévy measure."""

    def small_jump_mean(self):
        return 0.0

    def total_mass(self):
        return 0.0

    def min_rate(self):
        return math.inf

    def integrate(self, g):
        return 0.0


@dataclass(frozen=True)
class ExpMixture:
    """nu(dr) = sum_j intensity_j * rate_j * exp(rate_j * r) dr on r < 0.

    The total mass is sum_j intensity_j, so the jump part is compound
    Poisson with exponentially distributed jump sizes.
    """

    rates: tuple
    intensities: tuple

    def __post_init__(self):
        rates = tuple(float(x) for x in self.rates)
        intens = tuple(float(x) for x in self.intensities)
        if len(rates) == 0 or len(rates) != len(intens):
            raise ModelError("exp_mixture needs matching, non-empty rates and intensities")
        for x in rates + intens:
            if not (math.isfinite(x) and x > 0):
                raise ModelError("exp_mixture rates and intensities must be finite and > 0")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "intensities", intens)

    def small_jump_mean(self):
        # int_{-1}^0 r * lam*mu*e^{mu r} dr = lam*(e^{-mu} - (1 - e^{-mu})/mu)
        out = 0.0
        for mu, lam in zip(self.rates, self.intensities):
            out += lam * (math.exp(-mu) + math.expm1(-mu) / mu)
        return out

    def total_mass(self):
        return math.fsum(self.intensities)

    def min_rate(self):
        return min(self.rates)


def _h2(x):
    """(e^x - 1 - x) / x**2, accurate near zero."""
    if abs(x) < 1e-3:
        return 0.5 + x / 6.0 + x * x / 24.0 + x ** 3 / 120.0
    return (math.expm1(x) - x) / (x * x)


@dataclass(frozen=True)
class TabulatedDensity:
    """A Lévy density given on a grid of negative jump sizes.

    The density is linear between grid points, zero between the last
    grid point and the origin, and continues below the first grid point
    as ``density[0] * exp(tail_rate * (r - r[0]))``.
    """

    r: tuple
    density: tuple
    tail_rate: float

    def __post_init__(self):
        r = tuple(float(x) for x in self.r)
        f = tuple(float(x) for x in self.density)
        if len(r) < 2 or len(r) != len(f):
            raise ModelError("tabulated density needs at least two (r, density) pairs")
        if any(not math.isfinite(x) or x >= 0 for x in r):
            raise ModelError("tabulated jump sizes must be finite and negative")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ModelError("tabulated jump sizes must be strictly increasing")
        if any(not math.isfinite(x) or x < 0 for x in f):
            raise ModelError("tabulated density values must be finite and nonnegative")
        tail = float(self.tail_rate)
        if not (math.isfinite(tail) and tail > 0):
            raise ModelError("tabulated tail_rate must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "density", f)
        object.__setattr__(self, "tail_rate", tail)
        mass = self.integrate(lambda x: min(1.0, x * x))
        if not math.isfinite(mass):
            raise ModelError("tabulated density is not a Lévy measure")

    def _f(self, x):
        return float(np.interp(x, self.r, self.density))

    def integrate(self, g):
        """int g(r) nu(dr): adaptive quadrature on each grid cell (split at r = -1), plus the tail."""
        r, f = self.r, self.density
        r0 = r[0]
        cells = []
        for a, b, fa, fb in zip(r, r[1:], f, f[1:]):
            if a < -1.0 < b:
                fm = fa + (fb - fa) * (-1.0 - a) / (b - a)
                cells += [(a, -1.0, fa, fm), (-1.0, b, fm, fb)]
            else:
                cells.append((a, b, fa, fb))
        parts, err_b = [], 0.0
        for a, b, fa, fb in cells:
            if fa == 0.0 and fb == 0.0:
                continue
            slope = (fb - fa) / (b - a)
            v, e = integrate.quad(
                lambda x, a=a, fa=fa, slope=slope: g(x) * (fa + slope * (x - a)), a, b,
                epsabs=1e-16, epsrel=_QUAD_RTOL, limit=100,
            )
            parts.append(v)
            err_b += e
        body = math.fsum(parts)
        f0, tau = self.density[0], self.tail_rate
        if f0 > 0:
            tail, err_t = integrate.quad(
                lambda y: g(r0 - y) * math.exp(-tau * y), 0.0, math.inf,
                epsabs=1e-15, epsrel=_QUAD_RTOL, limit=200,
            )
            tail *= f0
            err_t *= f0
        else:
            tail, err_t = 0.0, 0.0
        val = body + tail
        err = err_b + err_t
        if not math.isfinite(val) or err > max(1e-9 * abs(val), 1e-12):
            raise QuadratureError(
                f"jump-measure quadrature did not converge (estimated error {err:.3e})", err
            )
        return val

    def small_jump_mean(self):
        return self.integrate(lambda x: x if x > -1.0 else 0.0)

    def total_mass(self):
        return self.integrate(lambda x: 1.0)

    def min_rate(self):
        return self.tail_rate


JumpMeasureSpec = Union[NoJumps, ExpMixture, TabulatedDensity]


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class LevyModel:
    bbar: float
    sigma: float = 0.0
    measure: JumpMeasureSpec = field(default_factory=NoJumps)
    kill_q: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("bbar", "sigma", "kill_q", "alpha"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ModelError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.sigma < 0:
            raise ModelError("sigma must be >= 0")
        if self.kill_q < 0:
            raise ModelError("kill_q must be >= 0")
        if self.alpha <= 0:
            raise ModelError("alpha must be > 0")
        if self.measure is None:
            object.__setattr__(self, "measure", NoJumps())
        if not isinstance(self.measure, (NoJumps, ExpMixture, TabulatedDensity)):
            raise ModelError(f"unsupported jump measure {self.measure!r}")
        if self.sigma == 0 and self.drift <= 0:
            raise ModelError(
                "degenerate model: with sigma = 0 the linear drift must be positive, "
                "otherwise -xi is a subordinator"
            )

    @classmethod
    def from_drift(cls, b, sigma=0.0, measure=None, kill_q=0.0, alpha=1.0):
        """Build a model from the linear drift b = bbar - int_{-1}^0 r nu(dr)."""
        measure = NoJumps() if measure is None else measure
        return cls(b + measure.small_jump_mean(), sigma, measure, kill_q, alpha)

    @property
    def alpha_tilde(self):
        return 1.0 / self.alpha

    @property
    def drift(self):
        """The linear drift b = bbar - int_{-1}^0 r nu(dr)."""
        return self.bbar - self.measure.small_jump_mean()

    def exponent(self):
        return ExponentHandle(self)


def bessel_model(b, q=0.0):
    """Squared Bessel-type model: psi(u) = 2u^2 + 2bu - q with alpha = 1."""
    return LevyModel(bbar=2.0 * b, sigma=4.0, measure=NoJumps(), kill_q=q, alpha=1.0)


def sawtooth_model(beta, delta, q=0.0):
    """Unit drift plus exponential jumps: psi(u) = u(u+delta-1)/(u+delta+beta-1) - q."""
    rate = delta + beta - 1.0
    if rate <= 0:
        raise ModelError("saw-tooth model needs delta + beta - 1 > 0")
    return LevyModel.from_drift(1.0, 0.0, ExpMixture((rate,), (beta,)), kill_q=q, alpha=1.0)


# ---------------------------------------------------------------------------
# regimes


@dataclass(frozen=True)
class BoundedVariation:
    b: float


@dataclass(frozen=True)
class UnboundedVariation:
    pass


Regime = Union[BoundedVariation, UnboundedVariation]


# ---------------------------------------------------------------------------
# root finding


def solve_convex_increasing(g, gprime, lo, hi, tol=TOL_ROOT, max_iter=200):
    """Root of g on [lo, hi] where g(lo) <= 0 < g(hi) and g is convex.

    Newton iterates started at the right end decrease monotonically to
    the root; any step leaving the bracket is replaced by bisection.
    """
    u = hi
    for _ in range(max_iter):
        gu = g(u)
        if gu > 0:
            hi = u
        else:
            lo = u
        d = gprime(u)
        if gu == 0.0:
            return u
        step = gu / d if d > 0 else math.inf
        nxt = u - step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - u) <= 4e-16 * max(abs(u), 1e-300) or hi - lo <= 4e-16 * abs(hi):
            return nxt
        u = nxt
    raise ConvergenceError("root finder exhausted its iterations", hi - lo)


# ---------------------------------------------------------------------------
# exponent handles


class ExponentHandle:
    """Evaluator for psi, psi', roots, tilts and the factor functions.

    ``shift`` is zero for the exponent of the model itself.  A tilted
    handle has shift gamma and represents psi(u + gamma) - psi(gamma),
    which is the same as psi(u + gamma) - q when gamma solves psi = q.
    """

    def __init__(self, model: LevyModel, shift: float = 0.0):
        self.model = model
        self.shift = float(shift)
        self.q_eff = model.kill_q if self.shift == 0.0 else 0.0
        m = model
        self._d = m.drift
        self._c0 = self._d + m.sigma * self.shift
        self._c1 = 0.5 * m.sigma
        meas = m.measure
        if isinstance(meas, ExpMixture):
            mu = np.array(meas.rates)
            lam = np.array(meas.intensities)
            if self.shift == 0.0:
                self._w = lam
            else:
                self._w = lam * mu / (mu + self.shift)
            self._m = mu + self.shift
        elif isinstance(meas, NoJumps):
            self._w = np.zeros(0)
            self._m = np.zeros(0)
        else:
            self._w = self._m = None
        self._lower = -meas.min_rate() - self.shift
        self._lock = threading.Lock()
        self.phi_cache = {}
        self.regime = self._classify()
        self.mean_xi1 = self._base_dpsi(self.shift)
        self.theta = None
        if self.shift == 0.0 and m.kill_q == 0.0 and self.mean_xi1 < 0:
            self.theta = self._root_of(0.0)

    # -- representation -----------------------------------------------------

    @property
    def is_rational(self):
        """True when phi is a rational function with explicit parameters."""
        return self._w is not None

    def rational_parts(self):
        """(c0, c1, weights, poles, q) with psi(u) = u*(c0 + c1 u - sum w/(m+u)) - q."""
        if not self.is_rational:
            raise DomainError("exponent has no rational representation")
        return self._c0, self._c1, tuple(self._w.tolist()), tuple(self._m.tolist()), self.q_eff

    def with_poles(self, poles):
        """A copy of a rational handle whose phi has its poles at -poles instead.

        The weights, drift and Gaussian part are kept.  Only phi and the
        quantities built from it follow the move; psi' and the roots still
        describe the original model.
        """
        if not self.is_rational:
            raise DomainError("exponent has no rational representation")
        poles = np.asarray(poles, dtype=float)
        if poles.shape != self._m.shape or not np.all(poles > 0):
            raise DomainError("need one positive pole position per weight")
        out = copy.copy(self)
        out._m = poles
        out._lower = -float(np.min(poles)) if poles.size else -math.inf
        out._lock = threading.Lock()
        out.phi_cache = {}
        return out

    def _check_arg(self, u):
        if not u > self._lower:
            raise DomainError(f"exponent undefined at u={u} (needs u > {self._lower})")

    def _jump_part(self, u):
        """int e^{shift r} expm1(u r)/u nu(dr); the u -> 0 limit is int r e^{shift r} nu(dr)."""
        meas = self.model.measure
        g = self.shift
        if u == 0.0:
            return meas.integrate(lambda r: r * math.exp(g * r))
        return meas.integrate(lambda r: math.exp(g * r) * math.expm1(u * r) / u)

    def phi(self, u, continued=False):
        """psi(u) = u*phi(u) - q; phi(0) is psi'(0+) for a tilted handle.

        With ``continued=True`` a rational phi is evaluated as a meromorphic
        function anywhere off its poles u = -m_j, including points where the
        Laplace exponent itself is not defined.
        """
        u = float(u)
        if continued and self.is_rational:
            den = self._m + u
            if np.any(den == 0.0):
                raise PoleError(f"phi has a pole at u={u}")
            return self._c0 + self._c1 * u - float(np.sum(self._w / den))
        self._check_arg(u)
        if self.is_rational:
            return self._c0 + self._c1 * u - float(np.sum(self._w / (self._m + u)))
        return self._c0 + self._c1 * u + self._jump_part(u)

    def psi(self, u):
        u = float(u)
        if u == 0.0:
            return -self.q_eff
        return u * self.phi(u) - self.q_eff

    def _base_dpsi(self, v):
        """Derivative of the untilted exponent at v."""
        m = self.model
        meas = m.measure
        if not v > -meas.min_rate():
            raise DomainError(f"psi' undefined at {v}")
        if isinstance(meas, ExpMixture):
            mu = np.array(meas.rates)
            lam = np.array(meas.intensities)
            jump = -float(np.sum(lam * mu / (mu + v) ** 2))
        elif isinstance(meas, NoJumps):
            jump = 0.0
        else:
            jump = meas.integrate(lambda r: r * math.exp(v * r))
        return self._d + m.sigma * v + jump

    def psi_prime(self, u):
        """psi'(u); at u = 0 this is E[xi_1] for an untilted handle."""
        u = float(u)
        self._check_arg(u)
        return self._base_dpsi(u + self.shift)

    # -- roots ----------------------------------------------------------------

    def _psi0(self, v):
        # psi without killing for the model, from the current handle's data
        if self.shift == 0.0:
            return self.psi(v) + self.q_eff
        raise DomainError("roots are only defined on untilted handles")

    def _root_of(self, target):
        lo = 0.0
        if target > 0:
            if self.mean_xi1 < 0:
                lo = self.theta if self.theta is not None else self._root_of(0.0)
        hi = 1.0
        while self._psi0(hi) <= target:
            hi *= 2.0
            if hi > 1e300:
                raise ConvergenceError("exponent never exceeds the target value")
        root = solve_convex_increasing(
            lambda v: self._psi0(v) - target, self._base_dpsi, lo, hi
        )
        resid = self._psi0(root) - target
        scale = max(1.0, abs(self._base_dpsi(root)), abs(target))
        if abs(resid) > 1e-11 * scale:
            raise ConvergenceError(f"root residual {resid:.3e} too large", abs(resid))
        return root

    def cramer_root(self):
        if self.shift != 0.0:
            raise DomainError("cramer_root is defined for untilted handles")
        if self.theta is None:
            raise DomainError(
                "no Cramér root: needs kill_q = 0 and E[xi_1] < 0 "
                f"(kill_q={self.model.kill_q}, E[xi_1]={self.mean_xi1})"
            )
        return self.theta

    def inverse_phi(self, q):
        """phi(q): the root of psi(u) = q (unkilled exponent) in [max(theta,0), inf)."""
        q = float(q)
        if not q > 0:
            raise DomainError("inverse_phi needs q > 0")
        if self.shift != 0.0:
            raise DomainError("inverse_phi is defined for untilted handles")
        with self._lock:
            hit = self.phi_cache.get(q)
        if hit is not None:
            return hit
        root = self._root_of(q)
        with self._lock:
            self.phi_cache[q] = root
        return root

    # -- tilting --------------------------------------------------------------

    def tilt(self, gamma):
        """Handle of u -> psi(u + gamma) - q, which vanishes at u = 0."""
        if self.shift != 0.0:
            raise DomainError("tilt a base handle, not an already tilted one")
        gamma = float(gamma)
        if not gamma > 0:
            raise DomainError("tilt needs gamma > 0")
        q = self.model.kill_q
        expect = self.inverse_phi(q) if q > 0 else self.cramer_root()
        if abs(gamma - expect) > 1e-9 * max(1.0, expect):
            raise DomainError(
                f"gamma={gamma} is not the root of psi = q for this model (expected {expect})"
            )
        out = ExponentHandle(self.model, gamma)
        if not out.phi(0.0) > 0:
            raise DomainError("tilted exponent is not in LK+ (psi_gamma'(0+) <= 0)")
        return out

    # -- regime and factorisations -------------------------------------------

    def _classify(self):
        if self.model.sigma == 0.0:
            return BoundedVariation(self._c0)
        return UnboundedVariation()

    def classify_regime(self):
        return self.regime

    def vhat(self, s):
        """Laplace transform of the tail nu(-inf, -r) of the (tilted) measure."""
        if not isinstance(self.regime, BoundedVariation):
            raise DomainError("vhat is only defined in the bounded-variation regime")
        s = float(s)
        self._check_arg(s)
        if self.is_rational:
            return float(np.sum(self._w / (self._m + s)))
        return -self._jump_part(s)

    def barphi(self, u, continued=False):
        """psi_gamma(u) / u^2 for a conservative handle in the unbounded-variation regime."""
        if not isinstance(self.regime, UnboundedVariation):
            raise DomainError("barphi is only defined in the unbounded-variation regime")
        if self.q_eff != 0.0:
            raise DomainError("barphi needs a conservative (tilted or unkilled) exponent")
        u = float(u)
        if u == 0.0:
            raise PoleError("barphi has a pole at u = 0")
        if continued and self.is_rational:
            return self.phi(u, continued=True) / u
        self._check_arg(u)
        if abs(u) >= 1.0:
            return self.psi(u) / (u * u)
        return self.phi(0.0) / u + self._c1 + self._barphi_remainder(u)

    def _barphi_remainder(self, u):
        """(phi(u) - phi(0) - c1 u) / u, written without cancellation."""
        if self.is_rational:
            return float(np.sum(self._w / (self._m * (self._m + u))))
        g = self.shift
        return self.model.measure.integrate(lambda r: math.exp(g * r) * r * r * _h2(u * r))

    def limit_factor(self):
        """lim phi(u) (BV) or lim barphi(u) (UV) as u -> infinity."""
        if isinstance(self.regime, BoundedVariation):
            return self.regime.b
        return self._c1


def eval_psi(h: ExponentHandle, u):
    return h.psi(u)


def eval_psi_prime(h: ExponentHandle, u):
    return h.psi_prime(u)
