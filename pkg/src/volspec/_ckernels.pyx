# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a line-for-line twin in ``_pykernels``; the floating
point expressions are written in the same order so both backends emit
bitwise identical results (the extension is built with -ffp-contract=off).
"""

from libc.math cimport log, sqrt, pow, fabs, fmod, isfinite
from libc.stdint cimport uint64_t

import numpy as np

cdef double TWO_POW_M53 = 1.0 / 9007199254740992.0


def polar_normals(const uint64_t[::1] raw):
    """Marsaglia polar transform of consecutive raw 64-bit word pairs.

    Rejected pairs are skipped; each accepted pair yields two deviates.
    """
    cdef Py_ssize_t n_pairs = raw.shape[0] // 2
    out_arr = np.empty(2 * n_pairs, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k = 0
    cdef double v1, v2, s, f
    with nogil:
        for i in range(n_pairs):
            v1 = 2.0 * (<double>(raw[2 * i] >> 11) * TWO_POW_M53) - 1.0
            v2 = 2.0 * (<double>(raw[2 * i + 1] >> 11) * TWO_POW_M53) - 1.0
            s = v1 * v1 + v2 * v2
            if s >= 1.0 or s == 0.0:
                continue
            f = sqrt(-2.0 * log(s) / s)
            out[k] = v1 * f
            out[k + 1] = v2 * f
            k += 2
    return out_arr[:k]


cdef inline double fold(double x, double lo, double hi) noexcept nogil:
    # mirror reflection into [lo, hi], repeated reflections collapsed into one fold
    cdef double w = hi - lo
    cdef double y
    if x >= lo and x <= hi:
        return x
    y = fmod(fabs(x - lo), 2.0 * w)
    if y > w:
        y = 2.0 * w - y
    return lo + y


def sde_advance(double x, double remaining, double dt_out,
                double eta, double lam, double sigma,
                double x_min, double x_max, int cutoff, double m, double kappa,
                const double[::1] eps, Py_ssize_t pos,
                double[::1] out, Py_ssize_t j):
    """Advance the adaptive Euler-Maruyama integration.

    Runs until ``out`` is full or ``eps`` is exhausted. Returns
    ``(x, remaining, pos, j, steps, status)``; status 1 flags a non-finite state.
    """
    cdef Py_ssize_t n_eps = eps.shape[0]
    cdef Py_ssize_t n_out = out.shape[0]
    cdef long long steps = 0
    cdef int status = 0
    cdef double s2 = sigma * sigma
    cdef double coef = eta - 0.5 * lam
    cdef double k2 = kappa * kappa
    cdef double p_drift = 2.0 * eta - 1.0
    cdef double p_dt = 2.0 * (eta - 1.0)
    cdef double floor_x = 1e-12 * x_min
    cdef double dt, bracket
    with nogil:
        while j < n_out:
            if remaining <= 0.0:
                out[j] = x
                j += 1
                remaining = dt_out
                continue
            if pos >= n_eps:
                break
            dt = k2 / (s2 * pow(x, p_dt))
            if dt > remaining:
                dt = remaining
            bracket = coef
            if cutoff:
                bracket = coef + 0.5 * m * (pow(x_min / x, m) - pow(x / x_max, m))
            x = x + s2 * bracket * pow(x, p_drift) * dt + sigma * pow(x, eta) * sqrt(dt) * eps[pos]
            pos += 1
            steps += 1
            if not isfinite(x):
                status = 1
                break
            if cutoff:
                if x < floor_x:
                    x = floor_x
            else:
                x = fold(x, x_min, x_max)
            remaining = remaining - dt
    return x, remaining, pos, j, steps, status


def garch_run(int variant, double a, double b, double c, double mu,
              double s2, const double[::1] omega, double[::1] out):
    """Iterate the volatility recursion once per entry of ``omega``.

    variant: 0 linear, 1 odd power, 2 absolute power.
    Returns ``(s2, clamps, bad_index)``; bad_index is -1 unless the state
    became non-finite.
    """
    cdef Py_ssize_t n = omega.shape[0]
    cdef Py_ssize_t i
    cdef Py_ssize_t bad = -1
    cdef long long clamps = 0
    cdef double w, sig, sm
    with nogil:
        for i in range(n):
            w = omega[i]
            if variant == 0:
                s2 = a + b * s2 * w * w + c * s2
            elif variant == 1:
                sig = sqrt(s2)
                s2 = a + b * pow(sig, mu) * pow(w, mu) + c * s2
            else:
                sig = sqrt(s2)
                sm = pow(sig, mu)
                s2 = a + b * sm * pow(fabs(w), mu) + s2 - c * sm
            if not isfinite(s2):
                bad = i
                break
            if s2 < 0.0:
                s2 = 0.0
                clamps += 1
            out[i] = s2
    return s2, clamps, bad
