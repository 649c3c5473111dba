"""Pure-Python twins of the compiled kernels in ``_ckernels.pyx``.

Used when the extension is not built. Arithmetic mirrors the compiled code
operation for operation, so for a given platform both backends agree bitwise.
"""

import math

import numpy as np

TWO_POW_M53 = 1.0 / 9007199254740992.0


def polar_normals(raw):
    raw = np.ascontiguousarray(raw, dtype=np.uint64)
    n_pairs = raw.shape[0] // 2
    # shifts, the power-of-two scale and 2u - 1 are exact, so numpy can do them
    u = (raw[: 2 * n_pairs] >> np.uint64(11)).astype(np.float64) * TWO_POW_M53
    v = 2.0 * u - 1.0
    v1 = v[0::2]
    v2 = v[1::2]
    s = v1 * v1 + v2 * v2
    keep = (s < 1.0) & (s != 0.0)
    v1, v2, s = v1[keep], v2[keep], s[keep]
    logs = np.fromiter(map(math.log, s.tolist()), dtype=np.float64, count=s.shape[0])
    f = np.sqrt(-2.0 * logs / s)
    out = np.empty(2 * s.shape[0])
    out[0::2] = v1 * f
    out[1::2] = v2 * f
    return out


def _fold(x, lo, hi):
    w = hi - lo
    if lo <= x <= hi:
        return x
    y = math.fmod(abs(x - lo), 2.0 * w)
    if y > w:
        y = 2.0 * w - y
    return lo + y


def sde_advance(x, remaining, dt_out, eta, lam, sigma, x_min, x_max, cutoff, m,
                kappa, eps, pos, out, j):
    n_eps = eps.shape[0]
    n_out = out.shape[0]
    steps = 0
    status = 0
    s2 = sigma * sigma
    coef = eta - 0.5 * lam
    k2 = kappa * kappa
    p_drift = 2.0 * eta - 1.0
    p_dt = 2.0 * (eta - 1.0)
    floor_x = 1e-12 * x_min
    eps = eps.tolist()
    isfinite = math.isfinite
    while j < n_out:
        if remaining <= 0.0:
            out[j] = x
            j += 1
            remaining = dt_out
            continue
        if pos >= n_eps:
            break
        try:
            denom = s2 * x ** p_dt
            dt = k2 / denom if denom != 0.0 else math.inf
            if dt > remaining:
                dt = remaining
            bracket = coef
            if cutoff:
                bracket = coef + 0.5 * m * ((x_min / x) ** m - (x / x_max) ** m)
            x = x + s2 * bracket * x ** p_drift * dt + sigma * x ** eta * math.sqrt(dt) * eps[pos]
        except OverflowError:
            x = math.inf
        pos += 1
        steps += 1
        if not isfinite(x):
            status = 1
            break
        if cutoff:
            if x < floor_x:
                x = floor_x
        else:
            x = _fold(x, x_min, x_max)
        remaining = remaining - dt
    return x, remaining, pos, j, steps, status


def garch_run(variant, a, b, c, mu, s2, omega, out):
    bad = -1
    clamps = 0
    isfinite = math.isfinite
    sqrt = math.sqrt
    for i, w in enumerate(omega.tolist()):
        try:
            if variant == 0:
                s2 = a + b * s2 * w * w + c * s2
            elif variant == 1:
                sig = sqrt(s2)
                s2 = a + b * sig ** mu * w ** mu + c * s2
            else:
                sig = sqrt(s2)
                sm = sig ** mu
                s2 = a + b * sm * abs(w) ** mu + s2 - c * sm
        except OverflowError:
            s2 = math.inf
        if not isfinite(s2):
            bad = i
            break
        if s2 < 0.0:
            s2 = 0.0
            clamps += 1
        out[i] = s2
    return s2, clamps, bad
