"""
Special functions for the detection statistics.

The first-order Marcum Q function is evaluated from the Neumann-type series

    Q1(a, b)     = exp(-(a^2+b^2)/2) * sum_{k>=0} (a/b)^k I_k(ab)
    1 - Q1(a, b) = exp(-(a^2+b^2)/2) * sum_{k>=1} (b/a)^k I_k(ab)

Both sums have positive terms. The side whose ratio is at most one is summed
directly; the other follows by complement, except for small ``b`` where both
are summed so that neither loses relative accuracy. Bessel ratios
``I_k(x)/I_0(x)`` come from Miller's backward recurrence and the prefactor is
folded into ``exp(-(a-b)^2/2) * I0e(ab)``, so nothing overflows.
"""

import math

import numpy as np
from scipy import special as sc

# Truncated terms are below exp(-_LOG_CUTOFF) relative to the leading term.
_LOG_CUTOFF = 45.0
_MILLER_MARGIN = 12
_RESCALE = 1e200
# Below this product ab the series reduce to their first terms.
_TINY_X = 1e-30
# For b*b below this, 1 - Q1 is summed directly even when b >= a.
_SMALL_B2 = 50.0


def bessel_i0_scaled(x):
    """
    Exponentially scaled modified Bessel function ``exp(-x) * I0(x)``, x >= 0.

    Finite for all finite x; ``~ 1/sqrt(2 pi x)`` for large x.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_i0_scaled requires x >= 0")
    out = sc.i0e(x)
    return out if out.ndim else float(out)


def log_bessel_i0(x):
    """``log I0(x)`` without overflow."""
    x = np.asarray(x, dtype=float)
    return x + np.log(sc.i0e(x))


def _series_start(x, rho):
    """
    Starting index for the backward recurrence.

    It has to lie where ``I_k(x)/I_0(x)`` itself is negligible (otherwise the
    recurrence does not converge to the Bessel ratios) and, for ``rho > 1``,
    where the weighted terms ``rho^k I_k/I_0`` are negligible as well.
    """
    # I_k/I_0 <= (x/2)^k/k! <= (e x / 2k)^k, which is < e^-k once k >= e^2 x/2
    k_small = np.maximum(_LOG_CUTOFF, math.e**2 * x / 2.0)
    # I_k/I_0 <= exp(-k^2 / (2(x + k))) for large x
    k_large = _LOG_CUTOFF + np.sqrt(_LOG_CUTOFF**2 + 2 * _LOG_CUTOFF * x)
    k = np.minimum(k_small, k_large)
    k = np.where(rho > 1, np.maximum(k, math.e**2 * rho * x / 2.0), k)
    return np.ceil(k).astype(np.int64) + _MILLER_MARGIN


def _bessel_tail_ratio(x, rho):
    """
    ``sum_{k>=1} rho^k I_k(x) / I_0(x)`` for positive `x`, vectorized.

    Backward recurrence ``f_{k-1} = (2k/x) f_k + f_{k+1}`` started at a
    per-element index; the weighted sum is accumulated Horner style on the
    way down. Elements are sorted by start index so each step only touches
    the active prefix.
    """
    x = np.asarray(x, dtype=float).ravel()
    rho = np.asarray(rho, dtype=float).ravel()
    n = x.size
    if n == 0:
        return np.empty(0)
    start = _series_start(x, rho)
    order = np.argsort(-start, kind="stable")
    xs, rs, ks = x[order], rho[order], start[order]
    f = np.zeros(n)
    f_next = np.zeros(n)
    acc = np.zeros(n)
    neg_ks = -ks
    active = 0
    for k in range(int(ks[0]), 0, -1):
        m = int(np.searchsorted(neg_ks, -k, side="right"))
        if m > active:
            f[active:m] = 1.0
            active = m
        fa = f[:m]
        acc[:m] = fa + rs[:m] * acc[:m]
        f_prev = (2.0 * k / xs[:m]) * fa + f_next[:m]
        f_next[:m] = fa
        f[:m] = f_prev
        if f_prev.max() > _RESCALE:
            scale = np.where(f_prev > _RESCALE, 1.0 / _RESCALE, 1.0)
            f[:m] *= scale
            f_next[:m] *= scale
            acc[:m] *= scale
    out = np.empty(n)
    out[order] = rs * acc / f
    return out


def _validate(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("Marcum Q arguments must be nonnegative")
    return np.broadcast_arrays(a, b)


def marcum_logs(a, b):
    """
    ``(log Q1(a, b), log(1 - Q1(a, b)))``, each accurate in relative terms.

    Never underflows: tails far below the double range come back as large
    negative logarithms.
    """
    a, b = _validate(a, b)
    shape = a.shape
    a = a.ravel().copy()
    b = b.ravel().copy()
    logq = np.full(a.shape, np.nan)
    logp = np.full(a.shape, np.nan)

    b_zero = b == 0
    logq[b_zero] = 0.0
    logp[b_zero] = -np.inf

    x = a * b
    # a negligible against b: Rayleigh tail
    ray = ~b_zero & ((a == 0) | ((x < _TINY_X) & (b >= a)))
    bb = b[ray]
    h = 0.5 * bb * bb
    logq[ray] = -h
    # log(1 - exp(-h)) = log h - h/2 + O(h^2); log b avoids underflow of b^2
    with np.errstate(divide="ignore"):
        logp[ray] = np.where(h < 1e-10, math.log(0.5) + 2 * np.log(bb) - 0.5 * h,
                             np.log(-np.expm1(-h)))

    # b negligible against a: 1 - Q1 ~ (b^2/2) exp(-a^2/2)
    lowb = ~b_zero & ~ray & (x < _TINY_X)
    logp[lowb] = math.log(0.5) + 2 * np.log(b[lowb]) - 0.5 * a[lowb] ** 2
    logq[lowb] = np.log1p(-np.exp(logp[lowb]))

    rest = ~b_zero & ~ray & ~lowb
    q_side = rest & (b >= a)
    p_side = rest & (a > b)
    p_extra = q_side & (b * b < _SMALL_B2)

    # one batched recurrence for every series needed
    sel = [np.flatnonzero(q_side), np.flatnonzero(p_side), np.flatnonzero(p_extra)]
    xs = np.concatenate([x[s] for s in sel])
    rhos = np.concatenate([a[sel[0]] / b[sel[0]], b[sel[1]] / a[sel[1]], b[sel[2]] / a[sel[2]]])
    tails = _bessel_tail_ratio(xs, rhos)
    t_q, t_p, t_extra = np.split(tails, [sel[0].size, sel[0].size + sel[1].size])

    def log_prefactor(idx):
        return -0.5 * (a[idx] - b[idx]) ** 2 + np.log(sc.i0e(x[idx]))

    with np.errstate(divide="ignore"):
        i = sel[0]
        logq[i] = log_prefactor(i) + np.log1p(t_q)
        logq[i] = np.minimum(logq[i], 0.0)
        logp[i] = np.log(-np.expm1(logq[i]))
        i = sel[1]
        logp[i] = log_prefactor(i) + np.log(t_p)
        logq[i] = np.log1p(-np.exp(logp[i]))
        i = sel[2]
        logp[i] = log_prefactor(i) + np.log(t_extra)
    return logq.reshape(shape), logp.reshape(shape)


def _scalar(out):
    return out if out.ndim else float(out)


def marcum_q1(a, b):
    """
    First-order Marcum Q function

        Q1(a, b) = int_b^inf t exp(-(t^2 + a^2)/2) I0(a t) dt,   a, b >= 0.
    """
    logq, _ = marcum_logs(a, b)
    return _scalar(np.exp(logq))


def log_marcum_q1(a, b):
    return _scalar(marcum_logs(a, b)[0])


def marcum_p1(a, b):
    """Complement ``1 - Q1(a, b)``, accurate when it is small."""
    _, logp = marcum_logs(a, b)
    return _scalar(np.exp(logp))
