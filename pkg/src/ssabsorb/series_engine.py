"""Power series attached to a Laplace exponent and their continuations.

For a conservative exponent psi with psi(alpha k) > 0 the coefficients

    a_0 = 1,   a_n = a_{n-1} / psi(alpha n)

define the entire function I(z) = sum a_n z^n and, for a parameter rho,

    I(rho; z) = 1/Gamma(rho) sum a_n Gamma(rho + n) z^n,    O(rho; x) = I(rho; -x).

When the paths of the process have bounded variation, psi(u) ~ b u and
I(rho; .) only converges in the disc |z| < alpha b.  Outside the disc the
function is continued to the half-plane Re z < alpha b / 2 by

    I(rho; z) = (1 - z/(alpha b))^(-rho) sum_n I(-n; alpha b) (rho)_n / n! w^n,
    w = z / (z - alpha b).

The numbers I(-n; alpha b) are alternating binomial sums with heavy
cancellation, so they are computed once, exactly in ``decimal``
arithmetic, from the rational parameters of the exponent.

For large arguments of O the Mellin-Barnes residue expansion is used.  It
needs the interpolated products

    a_s(F) = L^(-s) prod_{k>=1} F(alpha (k + s)) / F(alpha k),

where F is psi(u)/u (bounded variation, L = b) or psi(u)/u^2 (unbounded
variation, L = sigma/2).  They satisfy a_0 = 1 and
a_{s+1} = a_s / F(alpha (s + 1)), so at integers a_n = 1 / prod F(alpha k).
"""

from __future__ import annotations

import cmath
import math
import threading
import warnings
from dataclasses import dataclass
from decimal import Decimal, localcontext

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError, PoleError
from .levy_model import BoundedVariation, ExponentHandle, UnboundedVariation

EPS = np.finfo(float).eps
N_MAX = 100_000
EPS_ABS = 1e-16
EPS_REL = 1e-13
DEFAULT_TOL = 1e-11
_MAX_DIGITS = 1500
_OVERFLOW = 1e290

METHODS = (
    "direct_series",
    "continuation",
    "polynomial",
    "product_shift",
    "residue_expansion",
    "extended_precision",
    "quadrature",
)


@dataclass(frozen=True)
class EvalReport:
    """A value with the order at which its series was cut and an error bound.

    ``method`` is one of :data:`METHODS`.
    """

    value: float | complex
    trunc_order: int
    method: str
    err_bound: float

    def __float__(self):
        return float(self.value.real if isinstance(self.value, complex) else self.value)


_CONT_MAX_TERMS = 4096
_MERGE_WIDTH = 1e-3


def _finite(rep):
    if not math.isfinite(rep.err_bound):
        raise ConvergenceError("the series overflows double precision at this argument", math.inf)
    return rep


def _neumaier_add(total, comp, term):
    t = total + term
    if abs(total) >= abs(term):
        comp += (total - t) + term
    else:
        comp += (term - t) + total
    return t, comp


class SeriesEval:
    """Coefficient cache and evaluators for one exponent and one alpha."""

    def __init__(self, exponent: ExponentHandle, alpha: float | None = None, tol: float = DEFAULT_TOL):
        self.exponent = exponent
        self.alpha = float(exponent.model.alpha if alpha is None else alpha)
        if not self.alpha > 0:
            raise DomainError("alpha must be > 0")
        self.tol = float(tol)
        self.regime = exponent.regime
        if isinstance(self.regime, BoundedVariation):
            self.radius = self.alpha * self.regime.b
        else:
            self.radius = math.inf
        self._lock = threading.Lock()
        self._psi = [math.nan]
        self._a = [1.0]
        self._log_a = [0.0]
        self._a_frexp = [(0.5, 1)]
        self._cont = None  # (N, tuple of I(-n; alpha b) as floats)
        self._prod_cache = {}

    @property
    def is_bv(self):
        return isinstance(self.regime, BoundedVariation)

    # -- coefficients -----------------------------------------------------------

    def _extend(self, n):
        if n < len(self._a):
            return
        with self._lock:
            psi, a, la = list(self._psi), list(self._a), list(self._log_a)
            fx = list(self._a_frexp)
            for k in range(len(a), n + 1):
                p = self.exponent.psi(self.alpha * k)
                if not p > 0:
                    raise DomainError(
                        f"psi(alpha*{k}) = {p} is not positive; the exponent is not in LK+"
                    )
                psi.append(p)
                la.append(la[-1] - math.log(p))
                a.append(a[-1] / p)
                m, e = math.frexp(fx[-1][0] / p)
                fx.append((m, e + fx[-1][1]))
            self._psi, self._a, self._log_a, self._a_frexp = psi, a, la, fx

    def psi_at(self, k):
        """psi(alpha k) for k >= 1, cached."""
        self._extend(k)
        return self._psi[k]

    def coeff_a(self, n):
        """a_n; zero once it underflows, in which case log_coeff_a stays exact."""
        if n < 0:
            raise DomainError("n must be >= 0")
        self._extend(n)
        return self._a[n]

    def coeff_a_frexp(self, n):
        """a_n as (m, e) with a_n = m 2^e, 0.5 <= m < 1; never underflows."""
        if n < 0:
            raise DomainError("n must be >= 0")
        self._extend(n)
        return self._a_frexp[n]

    def log_coeff_a(self, n):
        self._extend(n)
        return self._log_a[n]

    # -- direct series -----------------------------------------------------------

    def _direct(self, rho, z, n_max=N_MAX):
        """Sum t_0 = 1, t_n = t_{n-1} (rho + n - 1) z / psi(alpha n); rho=None drops the factor.

        Returns (report, max_abs_term).
        """
        total = 0.0
        comp = 0.0
        term = 1.0 + 0.0 * z
        weighted = 1.0
        biggest = 1.0
        total, comp = _neumaier_add(total, comp, term)
        limit = abs(z) / self.radius if (rho is not None and self.is_bv) else 0.0
        small = 0
        for n in range(1, n_max):
            p = self.psi_at(n)
            r = z / p if rho is None else (rho + n - 1) * z / p
            term = term * r
            total, comp = _neumaier_add(total, comp, term)
            at = abs(term)
            if not at < _OVERFLOW:
                return EvalReport(math.nan, n, "direct_series", math.inf), math.inf
            biggest = max(biggest, at)
            weighted += (n + 1) * at
            s = abs(total + comp)
            if at <= EPS_ABS + EPS_REL * s:
                small += 1
            else:
                small = 0
            if small >= 2 or term == 0:
                p1 = self.psi_at(n + 1)
                r1 = abs(z / p1 if rho is None else (rho + n) * z / p1)
                rhat = max(r1, limit)
                if rhat < 1.0:
                    tail = at * rhat / (1.0 - rhat)
                    err = tail + 4.0 * EPS * weighted
                    return EvalReport(total + comp, n + 1, "direct_series", err), biggest
        raise ConvergenceError(
            f"series did not converge within {n_max} terms (last term {abs(term):.3e})",
            abs(term),
        )

    def _accept(self, rep, tol=None):
        tol = self.tol if tol is None else tol
        return rep.err_bound <= tol * abs(rep.value) + 1e-300

    # -- exact arithmetic helpers -------------------------------------------------

    def _decimal_psi(self):
        """Callable k -> psi(alpha k) as a Decimal in the active context."""
        c0, c1, w, m, q = self.exponent.rational_parts()
        dc0, dc1, dq = Decimal(c0), Decimal(c1), Decimal(q)
        dw = [Decimal(x) for x in w]
        dm = [Decimal(x) for x in m]
        da = Decimal(self.alpha)

        def psi(k):
            u = da * k
            acc = dc0 + dc1 * u
            for wi, mi in zip(dw, dm):
                acc -= wi / (mi + u)
            return u * acc - dq

        return psi

    def _extended(self, rho, x, hint_digits):
        """O(rho; x) (rho=None: I(-x)) summed in decimal arithmetic."""
        if not self.exponent.is_rational:
            raise DomainError("extended precision needs a rational exponent")
        if isinstance(rho, complex) or isinstance(x, complex):
            raise DomainError("extended precision is implemented for real arguments")
        digits = int(hint_digits)
        for _ in range(3):
            if digits > _MAX_DIGITS:
                raise ConvergenceError(f"extended precision would need {digits} digits")
            with localcontext() as ctx:
                ctx.prec = digits
                psi = self._decimal_psi()
                dx = -Decimal(x)
                dr = None if rho is None else Decimal(rho)
                term = Decimal(1)
                total = Decimal(1)
                weighted = Decimal(1)
                small = 0
                n = 0
                while True:
                    n += 1
                    if n > N_MAX:
                        raise ConvergenceError("extended-precision series did not converge")
                    f = dx / psi(n)
                    if dr is not None:
                        f *= dr + (n - 1)
                    term *= f
                    total += term
                    weighted += (n + 1) * abs(term)
                    if abs(term) <= Decimal(EPS_REL) * Decimal(1e-4) * abs(total):
                        small += 1
                    else:
                        small = 0
                    if small >= 2 and abs(f) < 1:
                        break
                round_err = weighted * Decimal(10) ** (2 - digits)
                tail = abs(term) * 2
                err = float(round_err + tail)
                val = float(total)
            if err <= self.tol * 1e-2 * abs(val) or val == 0.0 and err < 1e-300:
                return EvalReport(val, n, "extended_precision", err)
            need = math.log10(max(err, 1e-300)) - math.log10(self.tol * 1e-2 * abs(val) + 1e-300)
            digits += int(need) + 10
        raise ConvergenceError("extended precision did not reach the tolerance", err)

    # -- continuation (bounded variation) ------------------------------------------

    def _continuation_coeffs(self, n_terms):
        """I(-n; alpha b) for n < n_terms as floats, computed exactly."""
        cur = self._cont
        if cur is not None and cur[0] >= n_terms:
            return cur[1]
        if not self.is_bv:
            raise DomainError("the continuation applies to bounded-variation exponents")
        ab = self.radius
        if self.exponent.is_rational:
            # c_k = prod_{j<=k} alpha b j / psi(alpha j); log10 of the largest one
            logc = 0.0
            big = 0.0
            for j in range(1, n_terms):
                logc += math.log10(ab * j / self.psi_at(j))
                big = max(big, logc)
            digits = 40 + int(math.ceil(n_terms * math.log10(2.0) + big))
            with localcontext() as ctx:
                ctx.prec = digits
                psi = self._decimal_psi()
                dab = Decimal(ab)
                c = [Decimal(1)]
                for j in range(1, n_terms):
                    c.append(c[-1] * dab * j / psi(j))
                # d_n = sum_k (-1)^k C(n, k) c_k is the n-th forward difference of c at 0
                d = []
                row = c
                for n in range(n_terms):
                    d.append(float(row[0]))
                    row = [row[k] - row[k + 1] for k in range(len(row) - 1)]
        else:
            c = [1.0]
            for j in range(1, n_terms):
                c.append(c[-1] * ab * j / self.psi_at(j))
            d = []
            for n in range(n_terms):
                acc = 0.0
                for k in range(n + 1):
                    acc += (-1) ** k * math.comb(n, k) * c[k]
                d.append(acc)
        d = tuple(d)
        with self._lock:
            if self._cont is None or self._cont[0] < n_terms:
                self._cont = (n_terms, d)
        return d

    def _continuation_error_floor(self, n_terms):
        # rounding error of the binomial sums in double, zero when computed exactly
        if self.exponent.is_rational:
            return 0.0
        logc = 0.0
        big = 0.0
        for j in range(1, n_terms):
            logc += math.log(self.radius * j / self.psi_at(j))
            big = max(big, logc)
        return EPS * 2.0 ** n_terms * math.exp(big)

    def _continuation(self, rho, z):
        if not self.is_bv:
            raise DomainError("the continuation applies to bounded-variation exponents")
        ab = self.radius
        if not (z.real if isinstance(z, complex) else z) < ab / 2.0 - 1e-9 * ab:
            raise DomainError(f"continuation needs Re z < alpha b / 2 = {ab / 2}")
        w = z / (z - ab)
        pref = (1.0 - z / ab) ** (-rho)
        aw = abs(w)
        if aw > 0:
            # terms fall off like |w|^n n^(Re rho - 1); refuse up front if that needs too many
            re_rho = rho.real if isinstance(rho, complex) else rho
            need = (math.log(EPS_REL) - max(re_rho - 1.0, 0.0) * math.log(_CONT_MAX_TERMS)) / math.log(aw)
            if need > _CONT_MAX_TERMS:
                raise ConvergenceError(
                    f"continuation would need about {need:.0f} terms (|w| = {aw:.6f}); "
                    "the argument is too far beyond alpha b", math.inf)
        n_terms = 128
        while True:
            d = self._continuation_coeffs(n_terms)
            floor = self._continuation_error_floor(n_terms)
            total, comp = 0.0, 0.0
            p = 1.0 + 0.0 * w
            weighted = 0.0
            small = 0
            done = None
            for n in range(n_terms):
                if n > 0:
                    p = p * (rho + n - 1) / n * w
                t = d[n] * p
                total, comp = _neumaier_add(total, comp, t)
                weighted += (n + 1) * abs(t) + floor * abs(p)
                s = abs(total + comp)
                small = small + 1 if abs(t) <= EPS_ABS + EPS_REL * s else 0
                if small >= 3 and abs(rho + n) <= (n + 1) / max(abs(w), 1e-300):
                    done = n
                    break
            if done is not None:
                # |d_n| stays bounded along the tail; geometric bound in |w|
                aw = abs(w)
                mag = max(abs(d[k]) for k in range(max(0, done - 8), done + 1))
                tail = mag * abs(p) * aw / (1.0 - aw) * (1.0 + abs(rho))
                err = abs(pref) * (tail + 4.0 * EPS * weighted)
                return EvalReport(pref * (total + comp), done + 1, "continuation", err)
            if n_terms >= _CONT_MAX_TERMS:
                raise ConvergenceError(f"continuation series needs more than {_CONT_MAX_TERMS} terms")
            n_terms *= 2

    # -- interpolated products --------------------------------------------------------

    def _factor(self, u, factor):
        h = self.exponent
        if factor == "phi":
            return h.phi(u, continued=True)
        if u == 0.0:
            raise PoleError("barphi has a pole at u = 0")
        return h.barphi(u, continued=True)

    def _factor_diff(self, u, v, factor):
        """F(v) - F(u) without cancellation for rational exponents."""
        h = self.exponent
        if not h.is_rational:
            return self._factor(v, factor) - self._factor(u, factor)
        c0, c1, w, m, _ = h.rational_parts()
        w = np.asarray(w)
        m = np.asarray(m)
        dv = v - u
        if factor == "phi":
            return c1 * dv + float(np.sum(w * dv / ((m + u) * (m + v))))
        # barphi(u) = c0/u + c1 - sum w/(u(m+u))
        return (-c0 * dv / (u * v)
                + float(np.sum(w * dv * (m + u + v) / (u * v * (m + u) * (m + v)))))

    def _limit(self, factor):
        if factor == "phi":
            if not self.is_bv:
                raise DomainError("phi products are used in the bounded-variation regime")
            return self.regime.b
        if self.is_bv:
            raise DomainError("barphi products are used in the unbounded-variation regime")
        return 0.5 * self.exponent.model.sigma

    def _log_product(self, s, factor):
        """log a_s(F) for s > -1 by Euler-Maclaurin summation of the log-ratios."""
        al = self.alpha

        def g(x):
            u = al * x
            fu = self._factor(u, factor)
            return math.log1p(self._factor_diff(u, u + al * s, factor) / fu)

        big_k = int(max(400, 8 * abs(s) + 20))
        head = math.fsum(g(k) for k in range(1, big_k))
        with warnings.catch_warnings():
            # roundoff near epsabs is expected here; qerr still enters the bound
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            tail, qerr = integrate.quad(g, big_k, math.inf, epsabs=1e-17, epsrel=1e-14, limit=200)

        def deriv(f, x, h):
            return (f(x + h) - f(x - h)) / (2 * h)

        h1 = 1e-2 * big_k
        d1 = (4 * deriv(g, big_k, h1 / 2) - deriv(g, big_k, h1)) / 3
        h3 = 0.02 * big_k
        d3 = (g(big_k + 2 * h3) - 2 * g(big_k + h3) + 2 * g(big_k - h3) - g(big_k - 2 * h3)) / (2 * h3 ** 3)
        em = 0.5 * g(big_k) - d1 / 12.0 + d3 / 720.0
        val = head + tail + em - s * math.log(self._limit(factor))
        err = qerr + abs(d3) / 720.0 + 30 * EPS * (abs(head) + abs(tail) + 1.0)
        return val, err

    def product_a_s(self, s, factor=None):
        """a_s(F) for real s; F defaults to phi (bounded variation) or barphi.

        Values of s <= -1 are reached from s + k > -1 through
        a_s = a_{s+k} prod_{i=1}^k F(alpha (s + i)).
        """
        return self.product_report(s, factor).value

    def product_report(self, s, factor=None):
        factor = factor or ("phi" if self.is_bv else "barphi")
        if factor not in ("phi", "barphi"):
            raise ValueError(f"unknown factor {factor!r}")
        s = float(s)
        key = (s, factor)
        hit = self._prod_cache.get(key)
        if hit is not None:
            return hit
        k = 0
        if s <= -1.0:
            k = int(math.floor(-1.0 - s)) + 1
        base = s + k
        if base == 0.0:
            lv, le = 0.0, 0.0
        else:
            lv, le = self._log_product(base, factor)
        val = math.exp(lv)
        shift = 1.0
        for i in range(1, k + 1):
            u = self.alpha * (s + i)
            try:
                f = self._factor(u, factor)
            except (PoleError, DomainError) as exc:
                raise PoleError(
                    f"a_s({factor}) has a pole at s={s}: factor at u={u} is singular "
                    f"(shift path s+1..s+{k})"
                ) from exc
            shift *= f
        val *= shift
        err = abs(val) * (le + 4 * EPS * (k + 1))
        rep = EvalReport(val, k, "product_shift" if k else "direct_series", err)
        with self._lock:
            self._prod_cache[key] = rep
        return rep

    def scaled_product_A(self, rho):
        """a_{-rho}(barphi) / Gamma(1 - rho), finite for every real rho.

        Uses a_{s-1}/Gamma(s) = (a_s / Gamma(1+s)) * phi(alpha s) / alpha,
        which never touches the pole of barphi at the origin.
        """
        if self.is_bv:
            raise DomainError("scaled_product_A is for the unbounded-variation regime")
        k = 0 if -rho > -1.0 else int(math.floor(rho - 1.0)) + 1
        base = -rho + k
        if base == 0.0:
            acc = 1.0
            err = 0.0
        else:
            rep = self.product_report(base, "barphi")
            acc = rep.value * float(special.rgamma(1.0 + base))
            err = rep.err_bound / max(abs(rep.value), 1e-300)
        for i in range(1, k + 1):
            acc *= self.exponent.phi(self.alpha * (-rho + i), continued=True) / self.alpha
        return acc, abs(acc) * (err + 4 * EPS * (k + 1))

    # -- residue expansion for large arguments -------------------------------------------

    def _residue(self, rho, x):
        """O(rho; x) for large x; see _residue_sum.

        When rho - m_p/alpha is within _MERGE_WIDTH of an integer two pole
        families merge into double poles.  O is analytic in rho, so the value
        is then extrapolated from rho +- d, rho +- 2d and rho +- 4d.
        """
        if isinstance(rho, complex) or isinstance(x, complex):
            raise DomainError("residue expansion is implemented for real arguments")
        h = self.exponent
        if h.is_rational:
            _, _, _, m, _ = h.rational_parts()
            spread = [(mq - mp) / self.alpha for i, mp in enumerate(m) for mq in m[i + 1:]]
            if any(abs(g) > 0.5 and abs(g - round(g)) < _MERGE_WIDTH for g in spread):
                return self._residue_split(rho, x)
            gaps = [rho - mp / self.alpha for mp in m]
            if any(abs(g - round(g)) < _MERGE_WIDTH for g in gaps):
                return self._residue_merged(rho, x)
        try:
            return self._residue_sum(rho, x)
        except OverflowError:
            raise ConvergenceError("a residue term overflows the double range") from None

    def _residue_split(self, rho, x):
        """Poles of phi a multiple of alpha apart give double poles deeper in the chain.

        Moving pole j by t*alpha*j separates every pair; O depends analytically
        on the pole positions, so the same extrapolation in t recovers it.
        """
        if getattr(self, "_split_depth", 0) >= 2:
            raise PoleError("pole families of phi keep merging after the shift")
        m = np.array(self.exponent.rational_parts()[3])
        step = self.alpha * np.arange(m.size)
        # 3e-3 against the 2e-3 of the rho extrapolation: when both are needed the
        # shifted poles stay at least _MERGE_WIDTH away from every shifted rho
        d = 3.0 * _MERGE_WIDTH

        def at(t):
            ev = SeriesEval(self.exponent.with_poles(m + t * step), self.alpha, self.tol)
            ev._split_depth = getattr(self, "_split_depth", 0) + 1
            return ev._residue(rho, x)

        return self._richardson(at, d)

    def _richardson(self, at, d):
        """Value at t = 0 of an analytic t -> at(t), from t = +-d, +-2d, +-4d."""
        sym = {}
        errs = 0.0
        order = 0
        for k in (1, 2, 4):
            lo, hi = at(-k * d), at(k * d)
            sym[k] = 0.5 * (lo.value + hi.value)
            errs = max(errs, 0.5 * (lo.err_bound + hi.err_bound))
            order = max(order, lo.trunc_order, hi.trunc_order)
        # even in d: v(d) = O + c2 d^2 + c4 d^4 + ...
        r1 = (4.0 * sym[1] - sym[2]) / 3.0
        r2 = (4.0 * sym[2] - sym[4]) / 3.0
        err = abs(r1 - r2) + 3.0 * errs
        return EvalReport(r1, order, "residue_expansion", err)

    def _residue_merged(self, rho, x):
        return self._richardson(lambda t: self._residue_sum(rho + t, x), 2.0 * _MERGE_WIDTH)

    def _residue_sum(self, rho, x):
        """O(rho; x) from the residues of the Mellin-Barnes integrand left of the contour.

        Convergent for x > alpha b in the bounded-variation case; an
        asymptotic expansion, cut at its smallest term, otherwise.
        """
        if isinstance(rho, complex) or isinstance(x, complex):
            raise DomainError("residue expansion is implemented for real arguments")
        h = self.exponent
        al = self.alpha
        bv = self.is_bv
        factor = "phi" if bv else "barphi"
        scale = al if bv else al * al
        y = x / scale
        parts = []
        # family from Gamma(rho + s)
        if bv:
            t0 = self.product_a_s(-rho, "phi") * y ** (-rho)
        else:
            a0, _ = self.scaled_product_A(rho)
            t0 = a0 * y ** (-rho)
        # a chain may only stop once its steps can no longer cross a pole of phi or Gamma
        poles = h.rational_parts()[3] if h.is_rational else ()
        last = max([mp / al - rho for mp in poles], default=0.0)
        parts.append((t0, lambda j: h.phi(al * (-rho - j), continued=True) * (-(rho + j) / (j + 1)) / y
                      * (1.0 if bv else 1.0 / al), last))
        # families from the poles of the factor at u = -m_p
        if h.is_rational:
            c0, c1, w, m, _ = h.rational_parts()
            for wp, mp in zip(w, m):
                res_f = -wp if bv else wp / mp
                s1 = -mp / al - 1.0
                gap = rho - mp / al
                if abs(gap - round(gap)) < 1e-6:
                    raise PoleError("poles of the two residue families (nearly) coincide")
                base = self.product_a_s(-mp / al, factor)
                r1 = base * res_f / al
                lg = math.lgamma(rho + s1) + math.lgamma(-s1) + s1 * math.log(y)
                sign = float(special.gammasgn(rho + s1) * special.gammasgn(-s1))
                if not bv:
                    if abs(1.0 + s1 - round(1.0 + s1)) < 1e-12 and 1.0 + s1 <= 0:
                        continue
                    lg -= math.lgamma(1.0 + s1)
                    sign *= float(special.gammasgn(1.0 + s1))
                sign *= float(special.rgamma(rho))
                t1 = r1 * sign * math.exp(lg)

                def step(j, mp=mp, s1=s1):
                    l = j + 1
                    s0 = s1 - j
                    f = self._factor(-mp - al * l, factor)
                    out = f * (-s0) / (rho + s0 - 1.0) / y
                    if not bv:
                        out *= s0
                    return out

                last = max([(mq - mp) / al for mq in m] + [gap - 1.0])
                parts.append((t1, step, last))
        total = 0.0
        comp = 0.0
        err = 0.0
        absum = 0.0
        order = 0
        for t, step, last in parts:
            smallest = abs(t)
            total, comp = _neumaier_add(total, comp, t)
            absum += abs(t)
            small = 0
            for j in range(0, 4000):
                r = step(j)
                t_next = t * r
                if not bv and abs(t_next) > smallest:
                    # asymptotic series: stop at the smallest term; what is left, including
                    # the exponentially small part no residue sees, is of that size, so take two
                    err += 2.0 * smallest
                    break
                t = t_next
                total, comp = _neumaier_add(total, comp, t)
                absum += abs(t)
                smallest = min(smallest, abs(t))
                s = abs(total + comp)
                small = small + 1 if abs(t) <= EPS_ABS + EPS_REL * s else 0
                if small >= 2 and j >= last:
                    if bv:
                        rhat = max(abs(r), scale * self.regime.b / x)
                        if rhat < 1.0:
                            err += abs(t) * rhat / (1.0 - rhat)
                            break
                    else:
                        err += abs(t)
                        break
            else:
                raise ConvergenceError("residue expansion did not converge")
            order = max(order, j + 1)
        val = total + comp
        # each term carries a few ulps from the products and Gamma values that built it
        err += 64 * EPS * absum + 8 * EPS * order * abs(val)
        return EvalReport(val, order, "residue_expansion", err)

    # -- public evaluators ------------------------------------------------------------------

    def series_I(self, z):
        """I(z) = sum a_n z^n."""
        if z == 0:
            return EvalReport(1.0, 1, "direct_series", 0.0)
        rep, big = self._direct(None, z)
        if self._accept(rep) or isinstance(z, complex) or z > 0:
            return _finite(rep)
        return self._precise_negative(None, -z, rep, big)

    def _log10_max_term(self, rho, x):
        """log10 of the largest |t_n| at -x, in log space; stops once past _MAX_DIGITS."""
        lt = 0.0
        best = 0.0
        lx = math.log10(x)
        for n in range(1, int(N_MAX)):
            p = abs(self.psi_at(n))
            f = lx - math.log10(p)
            if rho is not None:
                f += math.log10(abs(rho + n - 1)) if rho + n - 1 != 0 else -math.inf
            if f < 0 and n > abs(rho or 0.0):
                return best
            lt += f
            best = max(best, lt)
            if best > _MAX_DIGITS:
                break
        return best

    def _precise_negative(self, rho, x, rep, big):
        best = rep
        if self.exponent.is_rational and not isinstance(rho, complex):
            lbig = math.log10(max(big, 1.0)) if math.isfinite(big) else self._log10_max_term(rho, x)
            digits = 25 + int(lbig) - int(math.log10(self.tol))
            if digits <= _MAX_DIGITS:
                try:
                    ext = self._extended(rho, x, digits)
                    if ext.err_bound < best.err_bound:
                        best = ext
                except ConvergenceError:
                    pass
        if not self._accept(best) and rho is not None and not self.is_bv:
            try:
                asy = self._residue(rho, x)
                if asy.err_bound < best.err_bound:
                    best = asy
            except (ConvergenceError, DomainError):
                pass
        # O(rho; x) is generically of size x^(-rho); far below that scale the
        # value is itself a cancellation residue and only absolute accuracy counts
        scale = 1.0 if rho is None else min(1.0, x ** -float(rho.real if isinstance(rho, complex) else rho))
        if not (self._accept(best) or best.err_bound <= self.tol * scale * EPS_ABS / EPS):
            raise ConvergenceError(
                f"catastrophic cancellation: error bound {best.err_bound:.3e} for value "
                f"{best.value!r} ({best.method}); use the continuation or a rational exponent",
                best.err_bound,
            )
        return best

    def _near_negative_integer(self, rho):
        if isinstance(rho, complex):
            if abs(rho.imag) > 1e-8:
                return None
            rho = rho.real
        n = round(-rho)
        if n >= 0 and abs(rho + n) <= 1e-8:
            return int(n)
        return None

    def series_I_rho(self, rho, z):
        """I(rho; z), continued to Re z < alpha b / 2 in the bounded-variation regime."""
        n = self._near_negative_integer(rho)
        if n is not None:
            return EvalReport(self.poly_I_negN(n, z), n + 1, "polynomial", 0.0)
        if z == 0:
            return EvalReport(1.0, 1, "direct_series", 0.0)
        if not isinstance(z, complex) and z < 0:
            return self.series_O_rho(rho, -z)
        if self.is_bv:
            R = self.radius
            re = z.real if isinstance(z, complex) else z
            if abs(z) <= 0.5 * R:
                rep, _ = self._direct(rho, z)
                if self._accept(rep):
                    return rep
            if re < R / 2.0 - 1e-9 * R:
                return self._continuation(rho, z)
            if abs(z) < R:
                rep, _ = self._direct(rho, z)
                return rep
            raise DomainError(
                f"z={z} lies outside |z| < alpha b = {R} and the half-plane Re z < {R / 2}"
            )
        rep, _ = self._direct(rho, z)
        return _finite(rep)

    def series_O_rho(self, rho, x):
        """O(rho; x) = I(rho; -x)."""
        n = self._near_negative_integer(rho)
        if n is not None:
            return EvalReport(self.poly_I_negN(n, -x), n + 1, "polynomial", 0.0)
        if x == 0:
            return EvalReport(1.0, 1, "direct_series", 0.0)
        complex_arg = isinstance(x, complex) or isinstance(rho, complex)
        if not complex_arg and x < 0:
            return self.series_I_rho(rho, -x)
        if self.is_bv:
            R = self.radius
            if abs(x) < 0.5 * R:
                rep, _ = self._direct(rho, -x)
                if self._accept(rep):
                    return rep
            far = None
            if not complex_arg and x > 3.0 * R and self.exponent.is_rational:
                try:
                    far = self._residue(rho, x)
                    if self._accept(far):
                        return far
                except (PoleError, ConvergenceError):
                    far = None
            try:
                cont = self._continuation(rho, -x)
            except ConvergenceError:
                # keep the residue sum with its (looser) bound rather than failing
                if far is not None and far.err_bound < abs(far.value):
                    return far
                raise
            if far is not None and far.err_bound < cont.err_bound:
                return far
            return cont
        rep, big = self._direct(rho, -x)
        if self._accept(rep) or complex_arg:
            return _finite(rep)
        return self._precise_negative(rho, x, rep, big)

    def poly_I_negN(self, N, z):
        """I(-N; z) = sum_{n<=N} (-1)^n N!/(N-n)! a_n z^n, by Horner's rule."""
        N = int(N)
        if N < 0:
            raise DomainError("N must be >= 0")
        acc = 1.0
        for n in range(N, 0, -1):
            acc = 1.0 - (N - n + 1) * z / self.psi_at(n) * acc
        return acc

    def smallest_kappa_zero(self, a, branch="O_plus", kappa_max=50.0, steps=400):
        """Smallest kappa > 0 where O(kappa; a^alpha) (or I(-kappa; a^alpha)) vanishes."""
        if not a > 0:
            raise DomainError("a must be > 0")
        z = a ** self.alpha
        if branch == "O_plus":
            def f(k):
                return float(self.series_O_rho(k, z).value)
        elif branch == "I_minus":
            def f(k):
                return float(self.series_I_rho(-k, z).value)
        else:
            raise ValueError(f"unknown branch {branch!r}")
        grid = np.linspace(0.0, kappa_max, steps + 1)[1:]
        prev_k, prev_v = 0.0, 1.0
        for k in grid:
            try:
                v = f(k)
            except (ConvergenceError, DomainError):
                continue
            if v == 0.0:
                return float(k)
            if (v < 0) != (prev_v < 0):
                from scipy.optimize import brentq

                return float(brentq(f, prev_k, k, xtol=1e-13, rtol=1e-12))
            prev_k, prev_v = k, v
        return math.inf
