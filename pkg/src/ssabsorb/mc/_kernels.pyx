# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled path kernels; see _fallback.py for the reference implementation."""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from cython.parallel cimport prange
from libc.math cimport INFINITY, NAN, atan, cos, exp, expm1, fabs, log1p, pow, sin, sqrt, tan, M_PI
from libc.stdint cimport uintptr_t
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_exponential,
    random_standard_normal,
    random_standard_uniform,
)

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    ST_TAIL = 0
    ST_CAP = 1
    ST_KILLED = 2
    ST_HORIZON = 3
    ST_UNIT = 4
    ST_CROSSED = 5
    ST_END = 6


cdef uintptr_t[::1] _bitgens(list gens):
    cdef Py_ssize_t i, n = len(gens)
    out = np.empty(n, dtype=np.uintp)
    cdef uintptr_t[::1] ptr = out
    cdef const char *name = "BitGenerator"
    for i in range(n):
        cap = gens[i].bit_generator.capsule
        if not PyCapsule_IsValid(cap, name):
            raise ValueError("invalid bit generator capsule")
        ptr[i] = <uintptr_t>PyCapsule_GetPointer(cap, name)
    return ptr


cdef inline Py_ssize_t _search(const double[:, ::1] table, double u) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = table.shape[0] - 1, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if u < table[mid, 0]:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef inline double _jump(bitgen_t *g, int mode, const double[:, ::1] table,
                         const double[::1] tail) noexcept nogil:
    cdef Py_ssize_t j = 0
    cdef double u, prev, v, start, w, fl, fh, target, a2, disc, den, y
    if mode == 1:
        if table.shape[0] > 1:
            u = random_standard_uniform(g)
            j = _search(table, u)
        return random_standard_exponential(g) / table[j, 1]
    u = random_standard_uniform(g)
    if u < tail[0]:
        return tail[2] + random_standard_exponential(g) / tail[1]
    j = _search(table, u)
    prev = tail[0] if j == 0 else table[j - 1, 0]
    v = (u - prev) / (table[j, 0] - prev)
    start = table[j, 1]
    w = table[j, 2]
    fl = table[j, 3]
    fh = table[j, 4]
    target = v * 0.5 * w * (fl + fh)
    a2 = (fh - fl) / w
    disc = fl * fl + 2.0 * a2 * target
    if disc < 0.0:
        disc = 0.0
    den = fl + sqrt(disc)
    y = 2.0 * target / den if den > 0.0 else 0.0
    if y > w:
        y = w
    return start + y


cdef void _sigma_one(bitgen_t *g, double alpha, double drift, double var, double lam,
                     double kill_q, int mode, const double[:, ::1] table, const double[::1] tail,
                     double dt, double h_max, double horizon, double xi_stop, double cap,
                     double t_stop, double *res_fine, double *res_coarse, double *res_xi,
                     signed char *res_st, long long *res_steps) noexcept nogil:
    cdef double xi = 0.0, s = 0.0, acc = 0.0, cacc = 0.0, f = 1.0
    cdef double t_jump, t_kill, t_next, tau, ad, h, xn, fn, pf = 0.0, ph = 0.0
    cdef double t_end = horizon if horizon < t_stop else t_stop
    cdef long long nst = 0
    cdef signed char st = ST_HORIZON
    cdef bint pend = False
    t_jump = random_standard_exponential(g) / lam if lam > 0.0 else INFINITY
    t_kill = random_standard_exponential(g) / kill_q if kill_q > 0.0 else INFINITY
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
                acc += f * expm1(ad * tau) / ad
            else:
                acc += f * tau
            xi += drift * tau
            s = t_next
            f = exp(alpha * xi)
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
            xi -= _jump(g, mode, table, tail)
            f = exp(alpha * xi)
            t_jump = s + random_standard_exponential(g) / lam
            if xi <= xi_stop:
                st = ST_TAIL
                break
        cacc = acc
    else:
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
            xn = xi + drift * tau + sqrt(var * tau) * random_standard_normal(g)
            fn = exp(alpha * xn)
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
                xi -= _jump(g, mode, table, tail)
                f = exp(alpha * xi)
                t_jump = s + random_standard_exponential(g) / lam
            if xi <= xi_stop:
                st = ST_TAIL
                break
        if pend:
            cacc += 0.5 * ph * (pf + f)
    res_fine[0] = acc
    res_coarse[0] = cacc
    res_xi[0] = xi
    res_st[0] = st
    res_steps[0] = nst


def sigma_paths(list gens, double alpha, double drift, double var, double lam, double kill_q,
                int mode, table, tail, double dt, double h_max, double horizon,
                double xi_stop, double cap, double t_stop, int threads=1):
    cdef Py_ssize_t i, n = len(gens)
    cdef uintptr_t[::1] bg = _bitgens(gens)
    cdef const double[:, ::1] tb = np.ascontiguousarray(table, dtype=np.float64)
    cdef const double[::1] tl = np.ascontiguousarray(tail, dtype=np.float64)
    fine = np.empty(n)
    coarse = np.empty(n)
    xi_end = np.empty(n)
    status = np.empty(n, dtype=np.int8)
    steps = np.empty(n, dtype=np.int64)
    cdef double[::1] vf = fine, vc = coarse, vx = xi_end
    cdef signed char[::1] vs = status
    cdef long long[::1] vn = steps
    for i in prange(n, nogil=True, num_threads=max(threads, 1), schedule="dynamic"):
        _sigma_one(<bitgen_t *>bg[i], alpha, drift, var, lam, kill_q, mode, tb, tl, dt, h_max,
                   horizon, xi_stop, cap, t_stop, &vf[i], &vc[i], &vx[i], &vs[i], &vn[i])
    return fine, coarse, xi_end, status, steps


cdef void _cross_one(bitgen_t *g, double alpha, double drift, double var, double lam,
                     double kill_q, int mode, const double[:, ::1] table, const double[::1] tail,
                     double dt, double h_max, double horizon, double xi_stop, double x0a,
                     double log_ax, double chi, double s_max, signed char *res_c,
                     double *res_t, signed char *res_st, long long *res_steps) noexcept nogil:
    cdef double xi = 0.0, s = 0.0, acc = 0.0, f = 1.0, b = log_ax
    cdef double t_jump, t_kill, t_next, tau, h, xn, fn, accn, xs, bn, e, u, xf
    cdef double ad = alpha * drift
    cdef long long nst = 0
    cdef signed char st = ST_HORIZON
    if log_ax <= 0.0:
        res_c[0] = 1
        res_t[0] = 0.0
        res_st[0] = ST_CROSSED
        res_steps[0] = 0
        return
    res_c[0] = 0
    res_t[0] = NAN
    t_jump = random_standard_exponential(g) / lam if lam > 0.0 else INFINITY
    t_kill = random_standard_exponential(g) / kill_q if kill_q > 0.0 else INFINITY
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
            xn = xi + drift * tau + sqrt(var * tau) * random_standard_normal(g)
            fn = exp(alpha * xn)
            accn = acc + 0.5 * tau * (f + fn)
        else:
            xn = xi + drift * tau
            fn = exp(alpha * xn)
            if ad != 0.0:
                accn = acc + f * expm1(ad * tau) / ad
            else:
                accn = acc + f * tau
        nst += 1
        xs = x0a * accn
        if xs >= s_max:
            st = ST_END
            break
        bn = log_ax + log1p(chi * xs) / alpha
        if xn >= bn:
            res_c[0] = 1
            res_t[0] = xs
            st = ST_CROSSED
            break
        if var > 0.0:
            e = -2.0 * (b - xi) * (bn - xn) / (var * tau)
            if e > -700.0:
                u = random_standard_uniform(g)
                if u < exp(e):
                    res_c[0] = 1
                    res_t[0] = 0.5 * (x0a * acc + xs)
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
            xi -= _jump(g, mode, table, tail)
            f = exp(alpha * xi)
            t_jump = s + random_standard_exponential(g) / lam
        if xi <= xi_stop:
            st = ST_TAIL
            break
    res_st[0] = st
    res_steps[0] = nst


def crossing_paths(list gens, double alpha, double drift, double var, double lam, double kill_q,
                   int mode, table, tail, double dt, double h_max, double horizon,
                   double xi_stop, double x0a, double log_ax, double chi, double s_max,
                   int threads=1):
    cdef Py_ssize_t i, n = len(gens)
    cdef uintptr_t[::1] bg = _bitgens(gens)
    cdef const double[:, ::1] tb = np.ascontiguousarray(table, dtype=np.float64)
    cdef const double[::1] tl = np.ascontiguousarray(tail, dtype=np.float64)
    crossed = np.zeros(n, dtype=np.int8)
    t_cross = np.full(n, np.nan)
    status = np.empty(n, dtype=np.int8)
    steps = np.empty(n, dtype=np.int64)
    cdef signed char[::1] vc = crossed, vs = status
    cdef double[::1] vt = t_cross
    cdef long long[::1] vn = steps
    for i in prange(n, nogil=True, num_threads=max(threads, 1), schedule="dynamic"):
        _cross_one(<bitgen_t *>bg[i], alpha, drift, var, lam, kill_q, mode, tb, tl, dt, h_max,
                   horizon, xi_stop, x0a, log_ax, chi, s_max, &vc[i], &vt[i], &vs[i], &vn[i])
    return crossed, t_cross, status, steps


cdef void _stable_one(bitgen_t *g, double alpha, long long n_steps, double bb, double ss,
                      double scale, double *res_fine, double *res_coarse) noexcept nogil:
    cdef double z = 0.0, m = 0.0, mc = 0.0, v, w, av, x
    cdef double ia = 1.0 / alpha
    cdef double ex = (1.0 - alpha) / alpha
    cdef long long k
    for k in range(1, n_steps + 1):
        v = M_PI * (random_standard_uniform(g) - 0.5)
        w = random_standard_exponential(g)
        av = alpha * (v + bb)
        x = ss * sin(av) / pow(cos(v), ia) * pow(cos(v - av) / w, ex)
        z += scale * x
        if z > m:
            m = z
        if k % 2 == 0 and z > mc:
            mc = z
    res_fine[0] = m
    res_coarse[0] = mc


def stable_max_paths(list gens, double alpha, long long n_steps, int threads=1):
    cdef Py_ssize_t i, n = len(gens)
    cdef uintptr_t[::1] bg = _bitgens(gens)
    cdef double ta = tan(0.5 * M_PI * alpha)
    cdef double bb = atan(ta) / alpha
    cdef double ss = pow(1.0 + ta * ta, 0.5 / alpha)
    cdef double scale = pow(fabs(cos(0.5 * M_PI * alpha)), 1.0 / alpha) * pow(1.0 / n_steps, 1.0 / alpha)
    fine = np.empty(n)
    coarse = np.empty(n)
    cdef double[::1] vf = fine, vc = coarse
    for i in prange(n, nogil=True, num_threads=max(threads, 1), schedule="dynamic"):
        _stable_one(<bitgen_t *>bg[i], alpha, n_steps, bb, ss, scale, &vf[i], &vc[i])
    return fine, coarse
