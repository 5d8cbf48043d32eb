"""Pure-Python path kernels.

These mirror the compiled kernels statement by statement and draw the same
variates in the same order from each path's generator, so both backends
return identical arrays.  They are slow and meant for environments where
the extension could not be built.
"""

import math

import numpy as np

ST_TAIL = 0
ST_CAP = 1
ST_KILLED = 2
ST_HORIZON = 3
ST_UNIT = 4
ST_CROSSED = 5
ST_END = 6

BACKEND = "python"


def _jump(g, mode, table, tail):
    """Magnitude of one jump (a positive number)."""
    n = len(table)
    if mode == 1:
        j = 0
        if n > 1:
            u = g.random()
            lo, hi = 0, n - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if u < table[mid][0]:
                    hi = mid
                else:
                    lo = mid + 1
            j = lo
        return g.standard_exponential() / table[j][1]
    u = g.random()
    if u < tail[0]:
        return tail[2] + g.standard_exponential() / tail[1]
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if u < table[mid][0]:
            hi = mid
        else:
            lo = mid + 1
    j = lo
    prev = tail[0] if j == 0 else table[j - 1][0]
    v = (u - prev) / (table[j][0] - prev)
    start, w, fl, fh = table[j][1], table[j][2], table[j][3], table[j][4]
    # invert F(y) = fl y + (fh - fl) y^2 / (2 w) at v times the cell mass
    target = v * 0.5 * w * (fl + fh)
    a2 = (fh - fl) / w
    disc = fl * fl + 2.0 * a2 * target
    if disc < 0.0:
        disc = 0.0
    den = fl + math.sqrt(disc)
    y = 2.0 * target / den if den > 0.0 else 0.0
    if y > w:
        y = w
    return start + y


def sigma_paths(gens, alpha, drift, var, lam, kill_q, mode, table, tail,
                dt, h_max, horizon, xi_stop, cap, t_stop, threads=1):
    n = len(gens)
    fine = np.empty(n)
    coarse = np.empty(n)
    xi_end = np.empty(n)
    status = np.empty(n, dtype=np.int8)
    steps = np.empty(n, dtype=np.int64)
    rows = [tuple(r) for r in np.asarray(table, dtype=float)]
    tl = tuple(float(x) for x in tail)
    t_end = min(horizon, t_stop)
    inf = math.inf
    for i in range(n):
        g = gens[i]
        xi = 0.0
        s = 0.0
        acc = 0.0
        cacc = 0.0
        f = 1.0
        nst = 0
        st = ST_HORIZON
        t_jump = g.standard_exponential() / lam if lam > 0.0 else inf
        t_kill = g.standard_exponential() / kill_q if kill_q > 0.0 else inf
        if var == 0.0:
            ad = alpha * drift
            while True:
                t_next = t_jump
                if t_kill < t_next:
                    t_next = t_kill
                if t_end < t_next:
                    t_next = t_end
                tau = t_next - s
                if ad != 0.0:
                    acc += f * math.expm1(ad * tau) / ad
                else:
                    acc += f * tau
                xi += drift * tau
                s = t_next
                f = math.exp(alpha * xi)
                nst += 1
                if acc >= cap:
                    st = ST_CAP
                    break
                if s >= t_kill:
                    st = ST_KILLED
                    break
                if s >= t_end:
                    st = ST_UNIT if s >= t_stop else ST_HORIZON
                    break
                xi -= _jump(g, mode, rows, tl)
                f = math.exp(alpha * xi)
                t_jump = s + g.standard_exponential() / lam
                if xi <= xi_stop:
                    st = ST_TAIL
                    break
            cacc = acc
        else:
            pend = False
            pf = 0.0
            ph = 0.0
            while True:
                h = dt / f if f < 1.0 else dt
                if h > h_max:
                    h = h_max
                if h < dt:
                    h = dt
                t_next = s + h
                if t_jump < t_next:
                    t_next = t_jump
                if t_kill < t_next:
                    t_next = t_kill
                if t_end < t_next:
                    t_next = t_end
                tau = t_next - s
                xn = xi + drift * tau + math.sqrt(var * tau) * g.standard_normal()
                fn = math.exp(alpha * xn)
                acc += 0.5 * tau * (f + fn)
                if pend:
                    cacc += 0.5 * (ph + tau) * (pf + fn)
                    pend = False
                else:
                    pend = True
                    pf = f
                    ph = tau
                xi = xn
                f = fn
                s = t_next
                nst += 1
                if acc >= cap:
                    st = ST_CAP
                    break
                if s >= t_kill:
                    st = ST_KILLED
                    break
                if s >= t_end:
                    st = ST_UNIT if s >= t_stop else ST_HORIZON
                    break
                if s >= t_jump:
                    if pend:
                        cacc += 0.5 * ph * (pf + f)
                        pend = False
                    xi -= _jump(g, mode, rows, tl)
                    f = math.exp(alpha * xi)
                    t_jump = s + g.standard_exponential() / lam
                if xi <= xi_stop:
                    st = ST_TAIL
                    break
            if pend:
                cacc += 0.5 * ph * (pf + f)
        fine[i] = acc
        coarse[i] = cacc
        xi_end[i] = xi
        status[i] = st
        steps[i] = nst
    return fine, coarse, xi_end, status, steps


def crossing_paths(gens, alpha, drift, var, lam, kill_q, mode, table, tail,
                   dt, h_max, horizon, xi_stop, x0a, log_ax, chi, s_max, threads=1):
    """First passage of X = x e^xi above a (1 + chi s)^(1/alpha) in X-time s < s_max."""
    n = len(gens)
    crossed = np.zeros(n, dtype=np.int8)
    t_cross = np.full(n, math.nan)
    status = np.empty(n, dtype=np.int8)
    steps = np.empty(n, dtype=np.int64)
    rows = [tuple(r) for r in np.asarray(table, dtype=float)]
    tl = tuple(float(x) for x in tail)
    inf = math.inf
    ad = alpha * drift
    for i in range(n):
        g = gens[i]
        nst = 0
        if log_ax <= 0.0:
            crossed[i] = 1
            t_cross[i] = 0.0
            status[i] = ST_CROSSED
            steps[i] = 0
            continue
        xi = 0.0
        s = 0.0
        acc = 0.0
        f = 1.0
        b = log_ax
        st = ST_HORIZON
        t_jump = g.standard_exponential() / lam if lam > 0.0 else inf
        t_kill = g.standard_exponential() / kill_q if kill_q > 0.0 else inf
        while True:
            xf = x0a * f
            h = dt / xf if xf < 1.0 else dt
            if h > h_max:
                h = h_max
            if h < dt:
                h = dt
            t_next = s + h
            if t_jump < t_next:
                t_next = t_jump
            if t_kill < t_next:
                t_next = t_kill
            if horizon < t_next:
                t_next = horizon
            tau = t_next - s
            if var > 0.0:
                xn = xi + drift * tau + math.sqrt(var * tau) * g.standard_normal()
                fn = math.exp(alpha * xn)
                accn = acc + 0.5 * tau * (f + fn)
            else:
                xn = xi + drift * tau
                fn = math.exp(alpha * xn)
                if ad != 0.0:
                    accn = acc + f * math.expm1(ad * tau) / ad
                else:
                    accn = acc + f * tau
            nst += 1
            xs = x0a * accn
            if xs >= s_max:
                st = ST_END
                break
            bn = log_ax + math.log1p(chi * xs) / alpha
            if xn >= bn:
                crossed[i] = 1
                t_cross[i] = xs
                st = ST_CROSSED
                break
            if var > 0.0:
                e = -2.0 * (b - xi) * (bn - xn) / (var * tau)
                if e > -700.0:
                    u = g.random()
                    if u < math.exp(e):
                        crossed[i] = 1
                        t_cross[i] = 0.5 * (x0a * acc + xs)
                        st = ST_CROSSED
                        break
            xi = xn
            f = fn
            acc = accn
            s = t_next
            b = bn
            if s >= t_kill:
                st = ST_KILLED
                break
            if s >= horizon:
                st = ST_HORIZON
                break
            if s >= t_jump:
                xi -= _jump(g, mode, rows, tl)
                f = math.exp(alpha * xi)
                t_jump = s + g.standard_exponential() / lam
            if xi <= xi_stop:
                st = ST_TAIL
                break
        status[i] = st
        steps[i] = nst
    return crossed, t_cross, status, steps


def stable_max_paths(gens, alpha, n_steps, threads=1):
    """Running maximum on [0, 1] of a spectrally positive stable process.

    Normalisation E[exp(-u Z_1)] = exp(u^alpha).  Returns the maximum over
    the full grid and over every other grid point.
    """
    n = len(gens)
    fine = np.empty(n)
    coarse = np.empty(n)
    ta = math.tan(0.5 * math.pi * alpha)
    bb = math.atan(ta) / alpha
    ss = (1.0 + ta * ta) ** (0.5 / alpha)
    scale = abs(math.cos(0.5 * math.pi * alpha)) ** (1.0 / alpha) * (1.0 / n_steps) ** (1.0 / alpha)
    ia = 1.0 / alpha
    ex = (1.0 - alpha) / alpha
    for i in range(n):
        g = gens[i]
        z = 0.0
        m = 0.0
        mc = 0.0
        for k in range(1, n_steps + 1):
            v = math.pi * (g.random() - 0.5)
            w = g.standard_exponential()
            av = alpha * (v + bb)
            x = ss * math.sin(av) / math.cos(v) ** ia * (math.cos(v - av) / w) ** ex
            z += scale * x
            if z > m:
                m = z
            if k % 2 == 0 and z > mc:
                mc = z
        fine[i] = m
        coarse[i] = mc
    return fine, coarse
