"""Special functions and exact survival laws used as reference values.

Nothing here depends on the series engine.  The Gamma function, the
incomplete Gamma ratio, Kummer's function, Gauss' function and the
Wright series are implemented from scratch so that the reference values
are computed along a route that shares no code with the engine.

Three families of absorption laws have explicit expressions:

* squared Bessel processes of index b, with psi(u) = 2u^2 + 2bu - q;
* saw-tooth processes, unit drift and exponential jumps;
* the running maximum of a spectrally positive stable process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConvergenceError, DomainError, PoleError

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class SpecialFnConfig:
    series_tol: float = 1e-15
    max_terms: int = 20000

    def __post_init__(self):
        if self.series_tol < 1e-15 or self.series_tol >= 1:
            raise ValueError("series_tol must lie in [1e-15, 1)")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")


DEFAULT = SpecialFnConfig()


class SeriesValue(NamedTuple):
    value: float
    err_bound: float
    terms: int


# ---------------------------------------------------------------------------
# Gamma function

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log(x):
    # log Gamma(x) for x >= 0.5
    x -= 1.0
    a = _LANCZOS[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(a)


def _stirling_log(x):
    # log Gamma(x) for large x, asymptotic series with Bernoulli terms
    inv = 1.0 / x
    inv2 = inv * inv
    corr = inv * (1 / 12 - inv2 * (1 / 360 - inv2 * (1 / 1260 - inv2 * (1 / 1680 - inv2 / 1188))))
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + corr


def log_gamma(x):
    """log Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError("log_gamma needs x > 0")
    if x >= 20.0:
        return _stirling_log(x)
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - _lanczos_log(1.0 - x)
    if x < 1.5:
        # small shifts keep the relative error near 1 and 2, where log Gamma vanishes
        return _lanczos_log(x + 1.0) - math.log(x)
    return _lanczos_log(x)


# measured worst case of log_gamma against a 30-digit reference is 15 ulp of max(1, |log Gamma|)
_LG_ULPS = 16.0


def _lg_err(lg):
    return _LG_ULPS * max(1.0, abs(lg))


def _is_nonpositive_int(x):
    return x <= 0 and x == math.floor(x)


def gamma_sign_log(x):
    """(sign, log|Gamma(x)|) for real x off the poles."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x > 0:
        return 1.0, log_gamma(x)
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    s = math.sin(math.pi * (x - 2.0 * math.floor(x / 2.0)))
    sign = 1.0 if s > 0 else -1.0
    return sign, math.log(math.pi / abs(s)) - log_gamma(1.0 - x)


def gamma(x):
    sign, lg = gamma_sign_log(x)
    return sign * math.exp(lg)


def rgamma(x):
    """1/Gamma(x), equal to zero at the poles of Gamma."""
    if _is_nonpositive_int(float(x)):
        return 0.0
    sign, lg = gamma_sign_log(x)
    return sign * math.exp(-lg)


# ---------------------------------------------------------------------------
# incomplete Gamma


def regularized_gamma_lower(a, x, cfg=DEFAULT):
    """P(a, x) = gamma(a, x) / Gamma(a)."""
    a = float(a)
    x = float(x)
    if not a > 0:
        raise DomainError("regularized_gamma_lower needs a > 0")
    if x < 0:
        raise DomainError("regularized_gamma_lower needs x >= 0")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    log_pref = a * math.log(x) - x - log_gamma(a)
    if x < a + 1.0:
        # series: P = x^a e^{-x} / Gamma(a+1) * sum x^n / (a+1)_n
        term = 1.0 / a
        total = term
        for n in range(1, cfg.max_terms):
            term *= x / (a + n)
            total += term
            if term < total * 1e-17:
                return min(1.0, math.exp(log_pref) * total)
        raise ConvergenceError("incomplete gamma series did not converge")
    # continued fraction for Q = 1 - P, modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, cfg.max_terms):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return max(0.0, 1.0 - math.exp(log_pref) * h)
    raise ConvergenceError("incomplete gamma continued fraction did not converge")


# ---------------------------------------------------------------------------
# hypergeometric series


def _sum_hypergeometric(ratio, limit_ratio, cfg):
    """Sum 1 + t_1 + t_2 + ... with t_n = t_{n-1} * ratio(n).

    ``limit_ratio`` is lim |ratio(n)|, used for the geometric tail bound.
    """
    total = 1.0
    comp = 0.0
    term = 1.0
    weighted = 1.0
    small = 0
    for n in range(1, cfg.max_terms):
        r = ratio(n)
        term *= r
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        weighted += (n + 1) * abs(term)
        s = abs(total + comp)
        if abs(term) <= cfg.series_tol * s or term == 0.0:
            small += 1
        else:
            small = 0
        if small >= 2:
            rnext = max(abs(ratio(n + 1)), limit_ratio)
            if rnext < 1:
                tail = abs(term) * rnext / (1.0 - rnext)
                err = tail + 8.0 * _EPS * weighted
                return SeriesValue(total + comp, err, n + 1)
    raise ConvergenceError("hypergeometric series did not converge", abs(term))


def _check_c(c):
    if _is_nonpositive_int(c):
        raise PoleError(f"lower parameter {c} is a nonpositive integer")


_KUMMER_FAR = 40.0


def _kummer_far(a, c, x, cfg):
    """Large-x expansion of Phi(a, c; -x), truncated before its smallest term.

    Phi(a, c; -x) = Gamma(c)/Gamma(c - a) x^(-a) 2F0(a, a - c + 1;; 1/x)
    plus a term of size Gamma(c)/Gamma(a) e^(-x) x^(a - c).  Returns None
    when the divergent sum cannot reach the requested tolerance.
    """
    if _is_nonpositive_int(a):
        return None
    lead = gamma(c) * rgamma(c - a) * x ** (-a)
    total, term, n = 1.0, 1.0, 0
    weighted = 1.0
    while n < cfg.max_terms:
        nxt = term * (a + n) * (a - c + 1 + n) / ((n + 1) * x)
        if abs(nxt) >= abs(term) and n > 0:
            break
        n += 1
        term = nxt
        total += term
        weighted += abs(term)
        if term == 0.0 or abs(term) <= 0.25 * _EPS * abs(total):
            break
    expo = abs(gamma(c) * rgamma(a)) * math.exp(-x) * x ** (a - c) if not _is_nonpositive_int(a) else 0.0
    lead_err = _EPS * (_lg_err(log_gamma(c)) + _lg_err(log_gamma(abs(c - a))) + 4.0 + abs(a * math.log(x)))
    err = abs(lead) * (abs(term) + 4 * _EPS * weighted + lead_err * abs(total)) + expo
    value = lead * total
    if abs(lead) * abs(term) + expo > cfg.series_tol * abs(value) and value != 0.0:
        return None
    return SeriesValue(value, err, n + 1)


def kummer_phi_series(rho, c, z, cfg=DEFAULT):
    """Kummer's function with an error bound.

    For z < -1 Kummer's transformation Phi(a, c; z) = e^z Phi(c - a, c; -z)
    replaces the alternating series by one whose terms change sign at
    most finitely often.
    """
    rho, c, z = float(rho), float(c), float(z)
    _check_c(c)
    if z < -_KUMMER_FAR:
        far = _kummer_far(rho, c, -z, cfg)
        if far is not None:
            return far
    if z < -1.0:
        inner = kummer_phi_series(c - rho, c, -z, cfg)
        f = math.exp(z)
        return SeriesValue(f * inner.value, f * inner.err_bound + _EPS * f * abs(inner.value), inner.terms)
    return _sum_hypergeometric(lambda n: (rho + n - 1) * z / ((c + n - 1) * n), 0.0, cfg)


def kummer_phi(rho, c, z, mode="series", cfg=DEFAULT):
    """Confluent hypergeometric function 1F1(rho; c; z).

    ``mode="asymptotic"`` returns the leading large-|z| term
    Gamma(c)/Gamma(c - rho) * (-z)^(-rho) for z < 0.
    """
    if mode == "asymptotic":
        if z >= 0:
            raise DomainError("asymptotic mode is for z < 0")
        return gamma(c) * rgamma(c - rho) * (-float(z)) ** (-rho)
    if mode != "series":
        raise ValueError(f"unknown mode {mode!r}")
    return kummer_phi_series(rho, c, z, cfg).value


def gauss_2f1_series(a, b, c, z, cfg=DEFAULT):
    """Gauss' function 2F1(a, b; c; z) for real z < 1, with an error bound.

    For -4 <= z < -1/2 the Pfaff transformation
    2F1(a, b; c; z) = (1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))
    moves the argument into (1/3, 4/5].  Below -4 the connection formula
    between z and 1/z is used, unless b - a is an integer.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    _check_c(c)
    if not z < 1:
        raise DomainError("gauss_2f1 needs z < 1")
    if a == 0 or b == 0 or z == 0:
        return SeriesValue(1.0, 0.0, 1)
    if z < -4.0 and b - a != math.floor(b - a):
        return _gauss_inverse(a, b, c, z, cfg)
    if z < -0.5:
        w = z / (z - 1.0)
        f = (1.0 - z) ** (-a)
        inner = gauss_2f1_series(a, c - b, c, w, cfg)
        val = f * inner.value
        err = f * inner.err_bound + _EPS * (2.0 + abs(a * math.log1p(-z))) * abs(val)
        return SeriesValue(val, err, inner.terms)
    return _sum_hypergeometric(
        lambda n: (a + n - 1) * (b + n - 1) * z / ((c + n - 1) * n), abs(z), cfg
    )


def _gauss_inverse(a, b, c, z, cfg):
    y = 1.0 / z
    out = 0.0
    err = 0.0
    terms = 0
    for p, r in ((a, b), (b, a)):
        if _is_nonpositive_int(c - p) or _is_nonpositive_int(r):
            continue  # 1/Gamma vanishes
        sg = [gamma_sign_log(v) for v in (c, r - p, r, c - p)]
        sign = sg[0][0] * sg[1][0] * sg[2][0] * sg[3][0]
        lg = sg[0][1] + sg[1][1] - sg[2][1] - sg[3][1] - p * math.log(-z)
        coef = sign * math.exp(lg)
        inner = gauss_2f1_series(p, p - c + 1.0, p - r + 1.0, y, cfg)
        out += coef * inner.value
        err += abs(coef) * (inner.err_bound + _EPS * (8.0 + abs(lg)) * abs(inner.value))
        terms = max(terms, inner.terms)
    return SeriesValue(out, err + _EPS * abs(out), terms)


def gauss_2f1(a, b, c, z, cfg=DEFAULT):
    return gauss_2f1_series(a, b, c, z, cfg).value


# ---------------------------------------------------------------------------
# Wright series for the stable maximum


def _check_stable(alpha):
    if not 1.0 < alpha < 2.0:
        raise DomainError("stable index must lie in (1, 2)")


def wright_2psi1_series(alpha, z, variant="cdf", cfg=DEFAULT):
    """sum_n Gamma(n + 1 - 1/alpha) / Gamma(alpha n + alpha - v) z^n, v = 0 (cdf) or 1 (pdf)."""
    alpha = float(alpha)
    _check_stable(alpha)
    z = float(z)
    if z > 0:
        raise DomainError("wright_2psi1 is used for z <= 0")
    shift = {"cdf": 0.0, "pdf": 1.0}[variant]
    at = 1.0 / alpha
    lz = math.log(-z) if z < 0 else -math.inf
    total = 0.0
    comp = 0.0
    absum = 0.0
    small = 0
    last = 0.0
    for n in range(cfg.max_terms):
        lg_num = log_gamma(n + 1 - at)
        lg_den = log_gamma(alpha * n + alpha - shift)
        lt = lg_num - lg_den + (n * lz if n else 0.0)
        if lt > 700.0:
            raise ConvergenceError("Wright series terms overflow; use the large-x expansion", math.inf)
        mag = math.exp(lt) if lt > -745 else 0.0
        term = mag if n % 2 == 0 else -mag
        if z == 0 and n > 0:
            term = 0.0
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        # relative error of each term: rounding of exp plus the error of the log-Gamma values
        absum += abs(term) * (4.0 + _lg_err(lg_num) + _lg_err(lg_den) + abs(n * lz if n else 0.0))
        s = abs(total + comp)
        if abs(term) <= cfg.series_tol * s and n > 2:
            small += 1
        else:
            small = 0
        if small >= 2:
            # terms alternate and decrease in modulus from here on
            err = abs(term) + _EPS * absum
            return SeriesValue(total + comp, err, n + 1)
        last = term
    raise ConvergenceError("Wright series did not converge", abs(last))


def wright_2psi1(alpha, z, variant="cdf", cfg=DEFAULT):
    return wright_2psi1_series(alpha, z, variant, cfg).value


def _stable_tail(alpha, x, deriv):
    """Large-x expansion of P(x) (deriv=0) or p(x) (deriv=1).

    P(x) = sin(pi/alpha)/pi * [sum_k A_k x^(-alpha k) + sum_k B_k x^(-1 - alpha k)]
    with A_k = (-1)^k/k! Gamma(1 - 1/alpha + k) Gamma(1/alpha - k) / Gamma(1 - alpha k)
    and  B_k = (-1)^k Gamma(-1/alpha - k) / Gamma(-alpha k).
    The series is asymptotic, so summation stops at the smallest term.
    """
    at = 1.0 / alpha
    pref = math.sin(math.pi * at) / math.pi
    terms = []
    for k in range(60):
        ak = (-1) ** k / math.factorial(k) * gamma(1 - at + k) * gamma(at - k) * rgamma(1 - alpha * k)
        bk = (-1) ** k * gamma(-at - k) * rgamma(-alpha * k)
        pa = -alpha * k
        pb = -1.0 - alpha * k
        if deriv:
            terms.append(ak * pa * x ** (pa - 1) + bk * pb * x ** (pb - 1))
        else:
            terms.append(ak * x ** pa + bk * x ** pb)
    total = 0.0
    absum = 0.0
    best = math.inf
    for k, t in enumerate(terms):
        if k > 1 and abs(t) > best:
            break
        total += t
        absum += abs(t)
        if k > 0 and t != 0.0:
            best = min(best, abs(t))
    return SeriesValue(pref * total, pref * (best + _LG_ULPS * _EPS * absum), k)


def stable_max_cdf_series(alpha, x, cfg=DEFAULT, variant="cdf"):
    """P(x) = P(sup_{s<=1} Z_s <= x) with its error bound and the mode used."""
    alpha = float(alpha)
    _check_stable(alpha)
    x = float(x)
    if not x > 0:
        raise DomainError("stable maximum law needs x > 0")
    at = 1.0 / alpha
    pref = math.sin(math.pi * at) / math.pi
    deriv = variant == "pdf"
    power = alpha - 2.0 if deriv else alpha - 1.0
    y = x ** alpha
    series = None
    if y < 60.0:
        try:
            sv = wright_2psi1_series(alpha, -y, variant, cfg)
            f = pref * x ** power
            series = SeriesValue(f * sv.value, f * sv.err_bound, sv.terms)
        except ConvergenceError:
            series = None
    if series is not None and series.err_bound < 1e-13:
        return series
    tail = _stable_tail(alpha, x, deriv)
    if series is None or tail.err_bound < series.err_bound:
        return tail
    return series


def stable_max_cdf(alpha, x, cfg=DEFAULT):
    """Distribution function of the maximum over [0, 1] of the stable process."""
    sv = stable_max_cdf_series(alpha, x, cfg)
    v = sv.value
    if sv.err_bound < 1e-8:
        v = min(1.0, max(0.0, v))
    return v


def stable_max_pdf(alpha, x, cfg=DEFAULT):
    return stable_max_cdf_series(alpha, x, cfg, variant="pdf").value


# ---------------------------------------------------------------------------
# tanh-sinh quadrature on [0, 1], tolerant of integrable endpoint singularities


def tanh_sinh(g, tol=1e-14, max_level=12):
    """int_0^1 g(x, 1 - x) dx; g receives both x and 1 - x to avoid cancellation."""
    h = 1.0
    prev = None
    total = 0.0

    def node(t):
        s = 0.5 * math.pi * math.sinh(t)
        e = math.exp(-2.0 * abs(s)) if abs(s) < 350 else 0.0
        # x = 1/(1 + e^{-2s}), 1 - x = 1/(1 + e^{2s}); weight = dx/dt
        small = e / (1.0 + e)
        big = 1.0 / (1.0 + e)
        x, xc = (big, small) if s >= 0 else (small, big)
        w = 0.5 * math.pi * math.cosh(t) * 2.0 * small * big
        return x, xc, w

    def contrib(t):
        x, xc, w = node(t)
        if w == 0.0 or x == 0.0 or xc == 0.0:
            return 0.0
        return w * g(x, xc)

    total = contrib(0.0)
    k = 1
    while True:
        v = contrib(k * h) + contrib(-k * h)
        total += v
        if abs(v) < 1e-18 * abs(total) or k * h > 6.5:
            break
        k += 1
    est = total * h
    for level in range(1, max_level):
        h *= 0.5
        extra = 0.0
        k = 1
        while k * h <= 6.5:
            extra += contrib(k * h) + contrib(-k * h)
            k += 2
        total += extra
        new = total * h
        if prev is not None and abs(new - est) <= tol * abs(new):
            return new
        prev = est
        est = new
    raise ConvergenceError("tanh-sinh quadrature did not converge", abs(new - prev))


# ---------------------------------------------------------------------------
# Bessel family


def bessel_phi(b, q):
    """Root of 2u^2 + 2bu = q: phi(q) = (sqrt(2q + b^2) - b) / 2."""
    return 0.5 * (math.sqrt(2.0 * q + b * b) - b)


def _check_bessel(b, q):
    if q < 0:
        raise DomainError("kill rate must be >= 0")
    if q == 0 and not b < 0:
        raise DomainError("absorption needs q > 0 or b < 0")


def bessel_kesten_constant(b, q):
    _check_bessel(b, q)
    if q == 0:
        # S(t) ~ (1/(2t))^{-b} / Gamma(1 - b)
        return 2.0 ** b / gamma(1.0 - b)
    phi = bessel_phi(b, q)
    varrho = b + 2.0 * phi
    return math.exp(log_gamma(varrho + 1 - phi) - log_gamma(varrho + 1)) / 2.0 ** phi


def bessel_survival(b, q, t):
    """Q_1(T_0 > t) for the squared Bessel process of index b killed at rate q."""
    b, q, t = float(b), float(q), float(t)
    _check_bessel(b, q)
    if not t > 0:
        raise DomainError("t must be > 0")
    if q == 0:
        return regularized_gamma_lower(-b, 1.0 / (2.0 * t))
    phi = bessel_phi(b, q)
    varrho = b + 2.0 * phi
    c = bessel_kesten_constant(b, q)
    return c * t ** (-phi) * kummer_phi(phi, varrho + 1.0, -1.0 / (2.0 * t))


def bessel_density(b, q, t, form="kummer"):
    """Density of T_0 under Q_1.

    For q > 0 two equivalent expressions are available: ``form="kummer"``
    uses Kummer's function and ``form="beta"`` the Beta-type integral
    (b + phi) / (2^phi Gamma(phi)) t^(-phi-1) int_0^1 e^{-u/2t} (1-u)^(b+phi-1) u^phi du.
    """
    b, q, t = float(b), float(q), float(t)
    _check_bessel(b, q)
    if not t > 0:
        raise DomainError("t must be > 0")
    if q == 0:
        return math.exp(b * math.log(2.0) - log_gamma(-b) + (b - 1) * math.log(t) - 0.5 / t)
    phi = bessel_phi(b, q)
    varrho = b + 2.0 * phi
    if form == "kummer":
        c = bessel_kesten_constant(b, q)
        return phi * c * t ** (-phi - 1.0) * kummer_phi(1.0 + phi, varrho + 1.0, -0.5 / t)
    if form == "beta":
        e1 = varrho - phi - 1.0

        def g(u, uc):
            return math.exp(-u / (2.0 * t)) * uc ** e1 * u ** phi

        integral = tanh_sinh(g)
        return (b + phi) / (2.0 ** phi * gamma(phi)) * t ** (-phi - 1.0) * integral
    raise ValueError(f"unknown form {form!r}")


# ---------------------------------------------------------------------------
# saw-tooth family


def sawtooth_params(beta, delta, q):
    """(gamma, K, hypergeometric parameters) for the saw-tooth survival function."""
    beta, delta, q = float(beta), float(delta), float(q)
    if not (beta > 0 and delta + beta - 1 > 0):
        raise DomainError("saw-tooth needs beta > 0 and delta + beta - 1 > 0")
    if q < 0:
        raise DomainError("kill rate must be >= 0")
    if q == 0:
        if not (1 - beta < delta < 1):
            raise DomainError("saw-tooth with q = 0 needs 1 - beta < delta < 1")
        g = 1.0 - delta
        k = math.exp(log_gamma(1 + beta) - log_gamma(2 - delta) - log_gamma(beta + delta))
        return g, k, (1.0 - delta, 1.0 + beta, 2.0 - delta)
    phibar = math.sqrt((q - delta + 1) ** 2 + 4 * (delta + beta - 1) * q)
    phi = 0.5 * (q - (delta - 1) + phibar)
    k = math.exp(
        log_gamma(beta + delta + phi) + log_gamma(1 + phibar - phi)
        - log_gamma(1 + phibar) - log_gamma(beta + delta)
    )
    return phi, k, (phi, beta + delta + phi, 1.0 + phibar)


def sawtooth_survival(beta, delta, q, t):
    t = float(t)
    if not t > 0:
        raise DomainError("t must be > 0")
    g, k, (a, bb, c) = sawtooth_params(beta, delta, q)
    return k * t ** (-g) * gauss_2f1(a, bb, c, -1.0 / t)


def sawtooth_density(beta, delta, q, t):
    """-dS/dt, from d/dz 2F1(a, b; c; z) = ab/c 2F1(a+1, b+1; c+1; z)."""
    t = float(t)
    if not t > 0:
        raise DomainError("t must be > 0")
    g, k, (a, bb, c) = sawtooth_params(beta, delta, q)
    z = -1.0 / t
    f0 = gauss_2f1(a, bb, c, z)
    f1 = a * bb / c * gauss_2f1(a + 1, bb + 1, c + 1, z)
    return k * (g * t ** (-g - 1.0) * f0 - t ** (-g - 2.0) * f1)


def sawtooth_kesten_constant(beta, delta, q=0.0):
    return sawtooth_params(beta, delta, q)[1]
