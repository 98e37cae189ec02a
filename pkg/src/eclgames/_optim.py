"""Small scalar-search utilities used by the set and solver code."""

import math

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(f, lo, hi, tol=1e-11, max_iter=300):
    """Golden-section search for the maximum of a unimodal function on [lo, hi].

    Returns (argmax, value, iterations).  Values of -inf are allowed near
    the interval ends (log-barrier objectives).
    """
    a, b = float(lo), float(hi)
    if b < a:
        a, b = b, a
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x), 0
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = f(c), f(d)
    it = 0
    while h > tol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = f(d)
        it += 1
    if fc >= fd:
        return c, fc, it
    return d, fd, it


def golden_min(f, lo, hi, tol=1e-11, max_iter=300):
    x, v, it = golden_max(lambda t: -f(t), lo, hi, tol=tol, max_iter=max_iter)
    return x, -v, it


def scan_then_golden_min(f, lo, hi, scan=97, tol=1e-12):
    """Coarse scan followed by golden refinement around the best sample."""
    ts = np.linspace(lo, hi, scan)
    vals = [f(t) for t in ts]
    i = int(np.argmin(vals))
    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, scan - 1)]
    x, v, _ = golden_min(f, a, b, tol=tol)
    if vals[i] < v:
        return ts[i], vals[i]
    return x, v


def bisect_boundary(pred, lo, hi, iters=80):
    """Largest t in [lo, hi] with pred(t) true, assuming pred(lo) is true
    and pred is monotone (true then false)."""
    a, b = float(lo), float(hi)
    if pred(b):
        return b
    for _ in range(iters):
        mid = 0.5 * (a + b)
        if pred(mid):
            a = mid
        else:
            b = mid
    return a


def simplex_grid(k, step):
    """Strictly positive weight vectors with entries that are multiples of
    ``step`` and sum to one.  Used for sampling Pareto-optimal directions."""
    m = int(round(1.0 / step))
    if m < k:
        m = k
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for v in range(1, remaining - (slots - 1) + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], m, k)
    return [np.asarray(w, dtype=float) / m for w in out]
