"""Law of the absorption time T_0 of a positive self-similar Markov process.

With kappa = gamma / alpha, where gamma is the Cramér root theta (no
killing) or phi(q) (killing at rate q), the survival function is

    S(t) = Q_1(T_0 > t) = C_gamma t^(-kappa) O_{psi_gamma}(kappa; 1/t),

and Q_x(T_0 > t) = S(t x^(-alpha)).  C_gamma is the constant of the power
tail S(t) ~ C_gamma t^(-kappa).  It follows from the residue of the
Mellin-Barnes representation of O at s = -kappa:

    bounded variation:    C_gamma = 1 / (alpha^kappa a_{-kappa}(phi_gamma))
    unbounded variation:  C_gamma = Gamma(1 - kappa) / (alpha^(2 kappa) a_{-kappa}(barphi_gamma))

The second expression has a removable singularity at integer kappa = n + 1,
where it equals (-1)^n n! / (alpha psi_gamma'(0) prod_{j=1}^n psi_gamma(-alpha j)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, special

from .errors import ConsistencyError, ConvergenceError, DomainError
from .levy_model import BoundedVariation, ExponentHandle, LevyModel
from .series_engine import EvalReport, SeriesEval

_RANGE_SLACK = 1e-9
_INTEGER_WIDTH = 1e-6
_LOG_MAX = math.log(1.7976931348623157e308)
_FLOOR = 1e-290
_EPS = 2.0 ** -52
_SENSITIVE_METHODS = ("extended_precision", "residue_expansion")


def _as_handle(model_or_handle):
    if isinstance(model_or_handle, ExponentHandle):
        return model_or_handle
    if isinstance(model_or_handle, LevyModel):
        return ExponentHandle(model_or_handle)
    raise TypeError("expected a LevyModel or an ExponentHandle")


def select_gamma(model_or_handle):
    """(gamma, tilted handle): phi(q) when q > 0, else the Cramér root."""
    h = _as_handle(model_or_handle)
    q = h.model.kill_q
    if q > 0:
        gamma = h.inverse_phi(q)
    elif h.mean_xi1 < 0:
        gamma = h.cramer_root()
    else:
        raise DomainError(
            "absorption never occurs: kill_q = 0 and E[xi_1] >= 0, so Q_x(T_0 < inf) = 0"
        )
    return gamma, h.tilt(gamma)


@dataclass(frozen=True)
class ExitSpec:
    """Exit problem for the curve a (1 + chi s)^(1/alpha), chi = alpha * lambda."""

    lam: float
    level_a: float
    start_x: float
    alpha: float

    def __post_init__(self):
        if self.lam == 0 or not math.isfinite(self.lam):
            raise DomainError("lambda must be a nonzero real number")
        if not self.level_a > 0:
            raise DomainError("level_a must be > 0")
        if not 0 < self.start_x <= self.level_a:
            raise DomainError("start_x must lie in (0, level_a]")
        if not self.alpha > 0:
            raise DomainError("alpha must be > 0")

    @property
    def chi(self):
        return self.alpha * self.lam

    @property
    def zeta(self):
        return math.inf if self.lam >= 0 else 1.0 / (self.alpha * abs(self.lam))


class AbsorptionLaw:
    """gamma, C_gamma and the functions S, s, s^(m), P for one model."""

    def __init__(self, model_or_handle, tol=1e-11):
        self.handle = _as_handle(model_or_handle)
        self.model = self.handle.model
        self.alpha = self.model.alpha
        self.gamma, self.tilted_handle = select_gamma(self.handle)
        self.tilted = SeriesEval(self.tilted_handle, self.alpha, tol=tol)
        self.alpha_tilde_gamma = self.gamma / self.alpha
        self.c_gamma = self._kesten_constant()
        if not self.c_gamma > 0:
            raise ConsistencyError(f"Kesten constant {self.c_gamma} is not positive")
        self._untilted = None

    @property
    def kappa(self):
        return self.alpha_tilde_gamma

    # -- constant --------------------------------------------------------------

    def _kesten_integer(self, n):
        """Closed form of the constant for kappa = n + 1 (unbounded variation)."""
        h = self.tilted_handle
        al = self.alpha
        prod = 1.0
        for j in range(1, n + 1):
            prod *= h.psi(-al * j)
        return (-1) ** n * math.factorial(n) / (al * h.psi_prime(0.0) * prod)

    def _kesten_general(self, kappa):
        se = self.tilted
        if se.is_bv:
            p, scale = se.product_a_s(-kappa, "phi"), kappa
        else:
            p, scale = se.scaled_product_A(kappa)[0], 2.0 * kappa
        if not p > 0:
            raise DomainError(f"the product behind the Kesten constant underflows (kappa = {kappa})")
        log_c = -scale * math.log(self.alpha) - math.log(p)
        if log_c > _LOG_MAX:
            raise DomainError(f"Kesten constant exp({log_c:.1f}) is beyond double range (kappa = {kappa})")
        return math.exp(log_c)

    def _kesten_constant(self):
        kappa = self.kappa
        if isinstance(self.tilted.regime, BoundedVariation):
            return self._kesten_general(kappa)
        n1 = round(kappa)
        if n1 >= 1 and abs(kappa - n1) <= _INTEGER_WIDTH:
            c_int = self._kesten_integer(n1 - 1)
            # the general expression is smooth through the integer: it must agree
            # with the closed form, and its slope gives the first-order correction
            h = 1e-3
            lo, hi = self._kesten_general(n1 - h), self._kesten_general(n1 + h)
            if abs(0.5 * (lo + hi) - c_int) > 1e-4 * abs(c_int):
                raise ConsistencyError(
                    f"integer and general Kesten constants disagree: {c_int} vs {0.5 * (lo + hi)}"
                )
            return c_int + (kappa - n1) * (hi - lo) / (2.0 * h)
        return self._kesten_general(kappa)

    def kesten_constant(self):
        return self.c_gamma

    def kesten_error(self):
        """Error bound on C_gamma from the product evaluation (integer closed form: rounding only)."""
        kappa = self.kappa
        se = self.tilted
        if se.is_bv:
            rep = se.product_report(-kappa, "phi")
            rel = rep.err_bound / abs(rep.value)
        else:
            n1 = round(kappa)
            if n1 >= 1 and abs(kappa - n1) <= _INTEGER_WIDTH:
                rel = 8 * (n1 + 2) * _EPS + 1e-4 * abs(kappa - n1)
            else:
                a0, err = se.scaled_product_A(kappa)
                rel = err / abs(a0)
        return abs(self.c_gamma) * (rel + 4 * _EPS)

    # -- law of T_0 ---------------------------------------------------------------

    def _check_range(self, value, err, what):
        if value < -_RANGE_SLACK - err or value > 1.0 + _RANGE_SLACK + err:
            raise ConsistencyError(f"{what} = {value} escaped [0, 1] (error bound {err:.3e})")

    def _series_O(self, rho, x):
        """O(rho; x) with an error bound that also covers the rounding of rho.

        On the cancellation paths the value can be far below its natural
        scale, and then a relative change of 1e-16 in rho moves it by much
        more than the summation error.
        """
        rep = self.tilted.series_O_rho(rho, x)
        if rep.method not in _SENSITIVE_METHODS:
            return rep
        h = 1e-7 * max(abs(rho), 1.0)
        try:
            up = self.tilted.series_O_rho(rho + h, x).value
            dn = self.tilted.series_O_rho(rho - h, x).value
        except (ConvergenceError, DomainError):
            return rep
        slope = abs(up - dn) / (2.0 * h)
        extra = slope * abs(rho) * 4.0 * _EPS + 1e-6 * abs(up - 2.0 * rep.value + dn)
        return EvalReport(rep.value, rep.trunc_order, rep.method, rep.err_bound + extra)

    def _scaled(self, log_f, sign, rep):
        """sign * exp(log_f) * rep, formed in logs: for large kappa the factor alone overflows."""
        v, e = float(rep.value), float(rep.err_bound)
        if not (math.isfinite(v) and math.isfinite(e)):
            raise ConvergenceError(f"series value {v} ({rep.method}) is not finite")
        if abs(v) < _FLOOR:
            # the value may have underflowed on its way: all that is known is |O| < _FLOOR
            e += _FLOOR
        try:
            val = sign * math.copysign(math.exp(log_f + math.log(abs(v))), v) if v else 0.0
            err = math.exp(log_f + math.log(e)) if e > 0 else 0.0
        except OverflowError:
            raise ConvergenceError(f"scaled value exp({log_f:.1f}) * {v} overflows") from None
        return EvalReport(val, rep.trunc_order, rep.method, err)

    def survival(self, t):
        """S(t) = Q_1(T_0 > t)."""
        t = float(t)
        if not t > 0:
            raise DomainError("t must be > 0")
        k = self.kappa
        rep = self._series_O(k, 1.0 / t)
        out = self._scaled(math.log(self.c_gamma) - k * math.log(t), 1.0, rep)
        self._check_range(out.value, out.err_bound, "S(t)")
        return out

    def density(self, t, m=0):
        """s^(m)(t), the m-th derivative of the density of T_0 under Q_1."""
        t = float(t)
        m = int(m)
        if not t > 0:
            raise DomainError("t must be > 0")
        if m < 0:
            raise DomainError("m must be >= 0")
        k = self.kappa
        rep = self._series_O(m + 1.0 + k, 1.0 / t)
        lg = float(special.gammaln(m + 1.0 + k) - special.gammaln(k))
        return self._scaled(lg + math.log(self.c_gamma) - (k + 1.0 + m) * math.log(t), (-1.0) ** m, rep)

    def distribution(self, x):
        """P(x) = S(x^(-alpha)); Q_x(T_0 >= t) = P(x t^(-1/alpha))."""
        x = float(x)
        if not x > 0:
            raise DomainError("x must be > 0")
        return self.survival(x ** (-self.alpha))

    def survival_from(self, x, t):
        """Q_x(T_0 > t) = S(t x^(-alpha))."""
        return self.survival(t * float(x) ** (-self.alpha))

    # -- Laplace transform -----------------------------------------------------------

    def _untilted_series(self):
        if self._untilted is None:
            self._untilted = SeriesEval(self.handle, self.alpha, tol=self.tilted.tol)
        return self._untilted

    def laplace(self, r, x=1.0):
        """E_x[exp(-r T_0)] = I_psi(z) - Gamma(1-kappa) C_theta z^kappa I_{psi_theta}(z), z = r x^alpha."""
        h = self.handle
        if h.model.kill_q != 0 or not h.mean_xi1 < 0:
            raise DomainError("the Laplace transform formula needs kill_q = 0 and E[xi_1] < 0")
        if not self.gamma < self.alpha:
            raise DomainError(f"the Laplace transform formula needs theta < alpha ({self.gamma} >= {self.alpha})")
        r = float(r)
        if r < 0:
            raise DomainError("r must be >= 0")
        if r == 0:
            return EvalReport(1.0, 1, "direct_series", 0.0)
        z = r * float(x) ** self.alpha
        rep = self._laplace_series(z)
        if rep.err_bound <= 1e-12 * max(abs(rep.value), 1e-300):
            return rep
        # both series grow like e^z and their difference cancels; integrate the density instead
        quad = self._laplace_quadrature(z)
        return quad if quad.err_bound < rep.err_bound else rep

    def _laplace_series(self, z):
        k = self.kappa
        first = self._untilted_series().series_I(z)
        second = self.tilted.series_I(z)
        c = special.gamma(1.0 - k) * self.c_gamma
        f = c * z ** k
        val = first.value - f * second.value
        err = first.err_bound + abs(f) * second.err_bound + 4e-16 * (abs(first.value) + abs(f * second.value))
        return EvalReport(val, max(first.trunc_order, second.trunc_order), "direct_series", err)

    def _laplace_quadrature(self, z):
        """int_0^inf e^(-u) s(u/z) du / z, split where e^(-u) has decayed by a few digits."""
        worst = [0.0]

        def g(u):
            rep = self.density(u / z)
            v = float(rep.value)
            if v != 0.0:
                worst[0] = max(worst[0], rep.err_bound / abs(v))
            return math.exp(-u) * v / z

        edges = (0.0, 0.5, 2.0, 6.0, 15.0, 40.0)
        total = 0.0
        err = 0.0
        for lo, hi in zip(edges, edges[1:]):
            v, e = integrate.quad(g, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)
            total += v
            err += e
        # s(t) <= sup s is finite, so the remainder past u = 40 is below e^(-40) sup(s) / z
        err += math.exp(-40.0) * self._density_peak() / z + (worst[0] + 1e-13) * abs(total)
        return EvalReport(total, 0, "quadrature", err)

    def _density_peak(self):
        grid = [10.0 ** (k / 4.0) for k in range(-12, 13)]
        return max(abs(float(self.density(t).value)) for t in grid) * 2.0

    # -- exit problems ------------------------------------------------------------------

    def _ratio(self, rho, spec):
        se = self.tilted
        al = self.alpha
        if spec.lam < 0:
            c = abs(spec.chi)
            den = se.series_O_rho(rho, c * spec.level_a ** al)
            num = se.series_O_rho(rho, c * spec.start_x ** al)
        else:
            c = spec.chi
            za = c * spec.level_a ** al
            if se.is_bv and not za < se.radius:
                raise DomainError(
                    f"needs lambda a^alpha < b: chi a^alpha = {za} >= alpha b = {se.radius}"
                )
            den = se.series_I_rho(rho, za)
            num = se.series_I_rho(rho, c * spec.start_x ** al)
        if not float(den.value) > 0:
            raise DomainError(
                f"the denominator vanishes or changes sign: rho={rho} reaches the first zero "
                "of the series at the level a"
            )
        val = num.value / den.value
        err = (num.err_bound + abs(val) * den.err_bound) / abs(den.value)
        return EvalReport(val, max(num.trunc_order, den.trunc_order), num.method, err)

    def exit_mellin(self, spec: ExitSpec, rho=0.0, absorbed=True):
        """Mellin-type transform of the exit time of the moving level.

        Conservative tilted process (``absorbed=False``):
        E[(1 + chi T)_+^(-rho)] = O(rho; |chi| x^alpha) / O(rho; |chi| a^alpha)
        for lambda < 0, the I-ratio for lambda > 0.  For the absorbed process
        the ratio is taken at rho + kappa and multiplied by (x/a)^gamma;
        rho = 0 then gives Q_x[T_a < T_0 and before zeta].
        """
        if abs(spec.alpha - self.alpha) > 1e-15 * self.alpha:
            raise DomainError("ExitSpec alpha differs from the model's alpha")
        if not absorbed:
            return self._ratio(rho, spec)
        rep = self._ratio(rho + self.kappa, spec)
        f = (spec.start_x / spec.level_a) ** self.gamma
        return EvalReport(f * rep.value, rep.trunc_order, rep.method, f * rep.err_bound)

    def exit_probability(self, spec: ExitSpec):
        return self.exit_mellin(spec, 0.0, absorbed=True)

    # -- diagnostics ---------------------------------------------------------------------

    def normalization(self, t_far=1e8):
        """int_0^inf s(t) dt, by quadrature on (0, t_far] and the power tail beyond."""
        def s(t):
            return float(self.density(t).value)

        pieces = [(0.0, 1.0)]
        lo = 1.0
        while lo < t_far:
            hi = min(lo * 10.0, t_far)
            pieces.append((lo, hi))
            lo = hi
        total = 0.0
        err = 0.0
        for a, b in pieces:
            v, e = integrate.quad(s, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
            total += v
            err += e
        tail = self.c_gamma * t_far ** (-self.kappa)
        return total + tail, err + tail * 10.0 / t_far


def hitting_laplace(model: LevyModel, x, a):
    """E_x[exp(-T_a)] = I_psi(x^alpha) / I_psi(a^alpha) for x <= a.

    Valid for conservative models that are not absorbed (kill_q = 0 and
    E[xi_1] >= 0), for which psi(alpha k) > 0 for every k >= 1.
    """
    h = ExponentHandle(model)
    if model.kill_q != 0 or h.mean_xi1 < 0:
        raise DomainError("hitting_laplace needs kill_q = 0 and E[xi_1] >= 0")
    if not 0 < x <= a:
        raise DomainError("needs 0 < x <= a")
    se = SeriesEval(h, model.alpha)
    num = se.series_I(x ** model.alpha)
    den = se.series_I(a ** model.alpha)
    v = num.value / den.value
    return EvalReport(v, max(num.trunc_order, den.trunc_order), "direct_series",
                      (num.err_bound + v * den.err_bound) / den.value)
