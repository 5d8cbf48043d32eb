"""Regenerate tests/oracle_values.py from mpmath at 40 significant digits.

    python tests/oracle_gen.py > tests/oracle_values.py

Nothing here touches the package; every value comes from mpmath's own
special functions and quadrature.
"""

import mpmath as mp

mp.mp.dps = 40

LOG_GRID = [0.2 * (50 / 0.2) ** (k / 31) for k in range(32)]
SAW_GRID = [0.5 * (50 / 0.5) ** (k / 31) for k in range(32)]
KILLED_GRID = [0.5 + k * (20 - 0.5) / 15 for k in range(16)]


def bessel_S(b, t):
    """Q_1(T_0 > t) = P(G_{-b} <= 1/(2t)), q = 0."""
    return mp.gammainc(-b, 0, 1 / (2 * mp.mpf(t)), regularized=True)


def bessel_s(b, t):
    t = mp.mpf(t)
    return mp.mpf(2) ** b / mp.gamma(-b) * t ** (b - 1) * mp.exp(-1 / (2 * t))


def killed(b, q):
    b, q = mp.mpf(b), mp.mpf(q)
    phi = (mp.sqrt(2 * q + b * b) - b) / 2
    rho = b + 2 * phi
    c = mp.gamma(rho + 1 - phi) / (2 ** phi * mp.gamma(rho + 1))
    return phi, rho, c


def killed_S(b, q, t):
    phi, rho, c = killed(b, q)
    t = mp.mpf(t)
    return c * t ** (-phi) * mp.hyp1f1(phi, rho + 1, -1 / (2 * t))


def killed_s(b, q, t):
    phi, rho, c = killed(b, q)
    t = mp.mpf(t)
    return phi * c * t ** (-phi - 1) * mp.hyp1f1(1 + phi, rho + 1, -1 / (2 * t))


def killed_s_beta(b, q, t):
    phi, rho, _ = killed(b, q)
    t = mp.mpf(t)
    f = mp.quad(lambda u: mp.exp(-u / (2 * t)) * (1 - u) ** (rho - phi - 1) * u ** phi, [0, 1])
    return (b + phi) / (2 ** phi * mp.gamma(phi)) * t ** (-phi - 1) * f


def saw_S(t, beta=1, delta=mp.mpf(1) / 2):
    t = mp.mpf(t)
    k = mp.gamma(1 + beta) / (mp.gamma(2 - delta) * mp.gamma(beta + delta))
    return k * t ** (delta - 1) * mp.hyp2f1(1 - delta, 1 + beta, 2 - delta, -1 / t)


def saw_s(t):
    return -mp.diff(saw_S, mp.mpf(t))


def saw_laplace(r):
    return mp.quad(lambda t: mp.exp(-r * t) * saw_s(t), [0, 0.25, 1, 4, 16, mp.inf])


def saw_I(rho, z):
    """I(rho; z) of the tilted saw-tooth exponent u(u + 1/2)/(u + 1)."""
    return mp.hyp2f1(rho, 2, mp.mpf(3) / 2, z)


def stable_cdf(alpha, x):
    alpha, x = mp.mpf(alpha), mp.mpf(x)
    at = 1 / alpha
    f = mp.nsum(lambda n: mp.gamma(n + 1 - at) / mp.gamma(alpha * n + alpha) * (-x ** alpha) ** n, [0, mp.inf])
    return mp.sin(mp.pi * at) / mp.pi * x ** (alpha - 1) * f


def wright(alpha, z):
    alpha = mp.mpf(alpha)
    return mp.nsum(lambda n: mp.gamma(n + 1 - 1 / alpha) / mp.gamma(alpha * n + alpha) * mp.mpf(z) ** n, [0, mp.inf])


def bessel_exit(b, x, a, lam):
    """Exit probability through the Kummer form of O for the tilted Bessel exponent."""
    b, x, a = mp.mpf(b), mp.mpf(x), mp.mpf(a)
    theta = -b
    kappa = theta
    chi = abs(mp.mpf(lam))
    o = lambda y: mp.hyp1f1(kappa, 1 - b, -chi * y / 2)  # noqa: E731
    return (x / a) ** theta * o(x) / o(a)


def bessel_hitting(b, x, a):
    """E_x[e^{-T_a}] = I(x)/I(a), I(z) = 0F1(; 1 + b; z/2) for psi = 2u^2 + 2bu."""
    return mp.hyp0f1(1 + mp.mpf(b), mp.mpf(x) / 2) / mp.hyp0f1(1 + mp.mpf(b), mp.mpf(a) / 2)


def values():
    out = {}
    out["bessel_S"] = [(t, bessel_S(-0.5, t)) for t in LOG_GRID]
    out["bessel_dens"] = [(t, bessel_s(-0.5, t)) for t in (0.5, 1.0, 2.0, 10.0)]
    out["killed_S"] = [(t, killed_S(0.3, 1.0, t)) for t in KILLED_GRID]
    out["killed_dens"] = [(t, killed_s(0.3, 1.0, t)) for t in KILLED_GRID]
    out["killed_s_beta"] = [(t, killed_s_beta(0.3, 1.0, t)) for t in (0.5, 2.0, 20.0)]
    out["killed_C"] = killed(0.3, 1.0)[2]
    out["saw_S"] = [(t, saw_S(t)) for t in SAW_GRID]
    out["saw_dens"] = [(t, saw_s(t)) for t in (0.5, 1.0, 5.0, 50.0)]
    out["saw_laplace"] = [(r, saw_laplace(r)) for r in (0.5, 1.0, 2.0)]
    out["saw_I_rho"] = [((rho, z), saw_I(rho, z)) for rho in (0.5, 1.3, 2.5) for z in (-0.4, 0.2, 0.45)]
    out["saw_O_far"] = [((rho, x), saw_I(rho, -x)) for rho in (0.5, 1.5) for x in (3.0, 30.0, 300.0)]
    out["stable_cdf"] = [(x, stable_cdf(1.5, x)) for x in (0.5, 1.0, 2.0)]
    out["wright_m1"] = wright(1.5, -1)
    out["bessel_exit"] = bessel_exit(-0.5, 0.5, 2.0, -1.0)
    out["bessel_hitting"] = bessel_hitting(0.5, 0.5, 1.0)
    out["besseli0_2"] = mp.besseli(0, 2)
    out["erf_half_sqrt2"] = mp.erf(1 / mp.sqrt(2))
    return out


def _fmt(v):
    if isinstance(v, tuple):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    if isinstance(v, list):
        return "[\n" + "".join(f"    {_fmt(x)},\n" for x in v) + "]"
    if isinstance(v, mp.mpf):
        return repr(float(v))
    return repr(v)


def main():
    print('"""Reference values computed by tests/oracle_gen.py with mpmath (do not edit by hand)."""')
    print()
    for k, v in values().items():
        print(f"{k.upper()} = {_fmt(v)}")
        print()


if __name__ == "__main__":
    main()
