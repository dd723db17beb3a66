"""Hot numeric kernels.

Every kernel exists twice: a scalar-loop body compiled with ``numba.njit`` and
a vectorised numpy body used when numba is unavailable or disabled through
``OMEGAFN_DISABLE_NUMBA``.  The adaptive quadrature driver is written once in
the numba subset and runs unchanged in either mode; only the integrand and
series kernels it calls are swapped.

Integrand kinds (all integrate over a real parameter ``x``):

``POWER``
    ``t = w * x**q`` and value ``x**(q*s - 1) * W(t) * exp(P(t))``.  With
    ``q = 1`` this is the ray integrand ``u**(s-1) W(w u) e^{P(w u)}``; with
    ``q = 1/Re s`` it is the singularity-removing substitution on ``[0, 1]``.
``ARC``
    ``t = exp(i x)`` and value ``i exp(i s x) W(t) exp(P(t))``, i.e.
    ``t**(s-1) W(t) e^{P(t)} dt/dx`` with the branch continuous from ``x = 0``.
"""
import cmath

import numpy as np

from ._accel import HAVE_NUMBA, njit

POWER = 0
ARC = 1

_GL_LOW = np.polynomial.legendre.leggauss(16)
_GL_HIGH = np.polynomial.legendre.leggauss(32)
GL_NODES = (
    np.ascontiguousarray(_GL_LOW[0]),
    np.ascontiguousarray(_GL_LOW[1]),
    np.ascontiguousarray(_GL_HIGH[0]),
    np.ascontiguousarray(_GL_HIGH[1]),
)

# relative size below which a series term counts as negligible
SERIES_RTOL = 1e-17
SERIES_RUN = 10


# ---------------------------------------------------------------------------
# scalar-loop bodies (numba)
# ---------------------------------------------------------------------------

def _horner(c, t):
    acc = 0j
    for i in range(c.shape[0] - 1, -1, -1):
        acc = acc * t + c[i]
    return acc


def _values_loop(kind, x, s, pcoef, wcoef, w, q):
    n = x.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for j in range(n):
        xj = x[j]
        if kind == ARC:
            t = cmath.exp(1j * xj)
            pre = 1j * cmath.exp(1j * s * xj)
        else:
            lx = np.log(xj)
            t = w * np.exp(q * lx)
            pre = cmath.exp((q * s - 1.0) * lx)
        out[j] = pre * _horner_k(wcoef, t) * cmath.exp(_horner_k(pcoef, t))
    return out


def _series_loop(lam, s, w, rtol, run):
    total = 0j
    wn = 1.0 + 0j
    biggest = 0.0
    small = 0
    for n in range(lam.shape[0]):
        term = lam[n] * wn / (s + n)
        total += term
        a = abs(term)
        if a > biggest:
            biggest = a
        scale = max(abs(total), biggest)
        if a <= rtol * scale:
            small += 1
            if small >= run:
                return total, n + 1, True
        else:
            small = 0
        wn *= w
    return total, lam.shape[0], False


def _exp_series_loop(ka, lam_old, n_new):
    d = ka.shape[0] - 1
    lam = np.zeros(n_new + 1, dtype=np.complex128)
    m = min(lam_old.shape[0], n_new + 1)
    for i in range(m):
        lam[i] = lam_old[i]
    if m == 0:
        lam[0] = 1.0
        m = 1
    for n in range(m, n_new + 1):
        acc = 0j
        for k in range(1, min(d, n) + 1):
            acc += ka[k] * lam[n - k]
        lam[n] = acc / n
    return lam


# ---------------------------------------------------------------------------
# vectorised bodies (numpy fallback)
# ---------------------------------------------------------------------------

def _values_vec(kind, x, s, pcoef, wcoef, w, q):
    if kind == ARC:
        t = np.exp(1j * x)
        pre = 1j * np.exp(1j * s * x)
    else:
        lx = np.log(x)
        t = w * np.exp(q * lx)
        pre = np.exp((q * s - 1.0) * lx)
    return pre * np.polynomial.polynomial.polyval(t, wcoef) * np.exp(
        np.polynomial.polynomial.polyval(t, pcoef)
    )


def _series_vec(lam, s, w, rtol, run):
    n = lam.shape[0]
    idx = np.arange(n)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = lam * np.power(complex(w), idx) / (s + idx)
    terms = np.where(lam == 0, 0j, terms)
    partial = np.cumsum(terms)
    mags = np.abs(terms)
    scale = np.maximum(np.abs(partial), np.maximum.accumulate(mags))
    small = mags <= rtol * scale
    if n >= run:
        runs = np.convolve(small.astype(np.int64), np.ones(run, dtype=np.int64), "valid")
        hits = np.flatnonzero(runs >= run)
        if hits.size:
            stop = hits[0] + run
            return partial[stop - 1], stop, True
    return partial[-1] if n else 0j, n, False


def _exp_series_vec(ka, lam_old, n_new):
    d = ka.shape[0] - 1
    lam = np.zeros(n_new + 1, dtype=np.complex128)
    m = min(lam_old.shape[0], n_new + 1)
    lam[:m] = lam_old[:m]
    if m == 0:
        lam[0] = 1.0
        m = 1
    rev = ka[1:][::-1]  # ka[d], ..., ka[1]
    for n in range(m, n_new + 1):
        lo = max(0, n - d)
        lam[n] = np.dot(rev[d - (n - lo):], lam[lo:n]) / n
    return lam


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre driver (shared source)
# ---------------------------------------------------------------------------

def _gl_panel(kind, s, pcoef, wcoef, w, q, lo, hi, xs, ws, xl, wl):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fs = values(kind, mid + half * xs, s, pcoef, wcoef, w, q)
    fl = values(kind, mid + half * xl, s, pcoef, wcoef, w, q)
    i_low = half * np.sum(ws * fs)
    i_high = half * np.sum(wl * fl)
    l1 = half * np.sum(wl * np.abs(fl))
    err = abs(i_high - i_low)
    if not (np.isfinite(err) and np.isfinite(l1)):
        err = np.inf
    return i_high, err, l1


def _gl_adaptive(kind, s, pcoef, wcoef, w, q, breaks, tol, max_depth, xs, ws, xl, wl):
    cap = 8192
    lo_a = np.empty(cap)
    hi_a = np.empty(cap)
    val = np.empty(cap, dtype=np.complex128)
    err = np.empty(cap)
    l1 = np.empty(cap)
    depth = np.zeros(cap, dtype=np.int64)
    n = 0
    for i in range(breaks.shape[0] - 1):
        v, e, a = gl_panel(kind, s, pcoef, wcoef, w, q, breaks[i], breaks[i + 1], xs, ws, xl, wl)
        lo_a[n] = breaks[i]
        hi_a[n] = breaks[i + 1]
        val[n] = v
        err[n] = e
        l1[n] = a
        n += 1
    ok = True
    etot = 0.0
    ltot = 0.0
    while True:
        tot = 0j
        etot = 0.0
        ltot = 0.0
        for i in range(n):
            tot += val[i]
            etot += err[i]
            ltot += l1[i]
        if etot <= max(tol * abs(tot), 2e-15 * ltot):
            break
        j = -1
        emax = -1.0
        for i in range(n):
            if depth[i] < max_depth and err[i] > emax:
                emax = err[i]
                j = i
        if j < 0 or n >= cap or not np.isfinite(ltot):
            ok = False
            break
        mid = 0.5 * (lo_a[j] + hi_a[j])
        v1, e1, a1 = gl_panel(kind, s, pcoef, wcoef, w, q, lo_a[j], mid, xs, ws, xl, wl)
        v2, e2, a2 = gl_panel(kind, s, pcoef, wcoef, w, q, mid, hi_a[j], xs, ws, xl, wl)
        lo_a[n] = mid
        hi_a[n] = hi_a[j]
        val[n] = v2
        err[n] = e2
        l1[n] = a2
        depth[n] = depth[j] + 1
        n += 1
        hi_a[j] = mid
        val[j] = v1
        err[j] = e1
        l1[j] = a1
        depth[j] += 1
    # fixed summation order over the final panel list
    order = np.argsort(lo_a[:n])
    total = 0j
    for i in order:
        total += val[i]
    return total, etot, ltot, ok


if HAVE_NUMBA:
    _horner_k = njit(_horner)
    values = njit(_values_loop)
    series_sum = njit(_series_loop)
    exp_series_extend = njit(_exp_series_loop)
else:
    _horner_k = _horner
    values = _values_vec
    series_sum = _series_vec
    exp_series_extend = _exp_series_vec

gl_panel = njit(_gl_panel)
gl_adaptive = njit(_gl_adaptive)


def adaptive(kind, s, pcoef, wcoef, w, q, breaks, tol, max_depth):
    """Run the adaptive driver; returns ``(value, error, l1_norm, converged)``."""
    xs, ws, xl, wl = GL_NODES
    return gl_adaptive(
        kind,
        complex(s),
        np.ascontiguousarray(pcoef, dtype=np.complex128),
        np.ascontiguousarray(wcoef, dtype=np.complex128),
        complex(w),
        float(q),
        np.ascontiguousarray(breaks, dtype=np.float64),
        float(tol),
        int(max_depth),
        xs,
        ws,
        xl,
        wl,
    )
