"""Complex path quadrature and ray truncation.

Generic integrands go through :func:`integrate_segment` / :func:`integrate_ray`
(numpy-vectorised callables).  The exponential-period integrands used by the
Omega evaluator have dedicated fast paths (:func:`expperiod_ray`,
:func:`expperiod_arc`, :func:`expperiod_origin`) that run the compiled
adaptive kernel.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .algebra import Poly, Potential
from .errors import ToleranceError

__all__ = [
    "QuadConfig",
    "integrate_segment",
    "integrate_ray",
    "truncation_radius",
    "tail_bound",
    "expperiod_ray",
    "expperiod_arc",
    "expperiod_origin",
]

# relative roundoff floor, in units of the integral of |f|
_L1_FLOOR = 2e-15
_ONE = np.ones(1, dtype=np.complex128)


@dataclass(frozen=True)
class QuadConfig:
    tol: float = 1e-10
    max_depth: int = 40
    pole_tol: float = 1e-8
    series_max: int = 10000

    def __post_init__(self):
        if not 0 < self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")
        if self.max_depth < 1 or self.series_max < 1:
            raise ValueError("max_depth and series_max must be positive")

    @property
    def quad_tol(self) -> float:
        # the |G32 - G16| estimate is pessimistic by orders of magnitude; a
        # margin of 100 keeps the delivered error well inside ``tol``
        return min(self.tol / 100.0, 1e-15)


def _panel(g, lo, hi):
    xs, ws, xl, wl = _kernels.GL_NODES
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    fl = g(mid + half * xl)
    fs = g(mid + half * xs)
    i_high = half * np.dot(wl, fl)
    i_low = half * np.dot(ws, fs)
    err = abs(i_high - i_low)
    l1 = half * np.dot(wl, np.abs(fl))
    if not (np.isfinite(err) and np.isfinite(l1)):
        err = math.inf
    return complex(i_high), float(err), float(l1)


def _adaptive(g, breaks, tol, max_depth):
    """Global adaptive bisection; returns ``(value, error, converged)``."""
    panels = []  # heap of (-err, lo, hi, depth, value, err, l1)
    done = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        v, e, a = _panel(g, lo, hi)
        heapq.heappush(panels, (-e, lo, hi, 0, v, e, a))
    ok = True
    while True:
        allp = panels + done
        total = sum(p[4] for p in allp)
        err = sum(p[5] for p in allp)
        l1 = sum(p[6] for p in allp)
        if err <= max(tol * abs(total), _L1_FLOOR * l1):
            break
        if not panels or not math.isfinite(l1):
            ok = False
            break
        item = heapq.heappop(panels)
        _, lo, hi, depth, *_ = item
        if depth >= max_depth:
            done.append(item)
            continue
        mid = 0.5 * (lo + hi)
        for a, b in ((lo, mid), (mid, hi)):
            v, e, w = _panel(g, a, b)
            heapq.heappush(panels, (-e, a, b, depth + 1, v, e, w))
    ordered = sorted(panels + done, key=lambda p: p[1])
    return sum((p[4] for p in ordered), 0j), err, ok


def integrate_segment(f: Callable, a: complex, b: complex, cfg: QuadConfig = QuadConfig()):
    """Integrate ``f`` along the straight segment ``[a, b]`` in the complex plane.

    ``f`` must accept a complex ndarray.  Returns ``(value, error_estimate)``;
    raises :class:`ToleranceError` (carrying the best estimate) when
    ``max_depth`` bisections do not reach ``cfg.tol``.
    """
    a, b = complex(a), complex(b)
    if a == b:
        return 0j, 0.0
    h = b - a
    value, err, ok = _adaptive(lambda x: h * f(a + h * x), np.linspace(0.0, 1.0, 3), cfg.quad_tol, cfg.max_depth)
    if not ok:
        raise ToleranceError(f"segment quadrature did not converge (err {err:.3g})", value, err)
    return value, err


def _decay_rate(P0: Potential) -> float:
    # fraction theta of u^d/d guaranteed in -Re P0(omega_k u) beyond R0
    return 1.0 if P0.d == 1 else 0.5


def _coefficient_radius(P0: Potential) -> float:
    """Smallest ``R0 >= 1`` with ``u^d/(2d) >= sum_j |a_j| u^j`` for ``u >= R0``."""
    d = P0.d
    mags = np.abs(np.asarray(P0.a, dtype=np.complex128))
    if d == 1 or not mags.any():
        return 1.0

    def ok(u):
        return 1.0 / (2 * d) >= sum(m * u ** (j + 1 - d) for j, m in enumerate(mags))

    lo, hi = 1.0, 1.0
    if ok(hi):
        return 1.0
    while not ok(hi):
        lo, hi = hi, 2 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def tail_bound(P0: Potential, sigma: float, R: float) -> float:
    """Upper bound for ``int_R^inf u^(sigma-1) exp(-theta u^d / d) du``.

    Uses ``Gamma(a, x) <= x^(a-1) e^(-x) / (1 - (a-1)/x)`` (``a > 1``,
    ``x > a - 1``) and ``Gamma(a, x) <= x^(a-1) e^(-x)`` (``a <= 1``) after
    the substitution ``v = theta u^d / d``.  Returns ``inf`` where neither
    inequality applies.
    """
    d = P0.d
    theta = _decay_rate(P0)
    a = sigma / d
    x = theta * R**d / d
    log_c = -math.log(d) + a * math.log(d / theta)
    logb = log_c + (a - 1) * math.log(x) - x
    if a > 1:
        if x <= a - 1:
            return math.inf
        logb -= math.log1p(-(a - 1) / x)
    return math.exp(logb) if logb < 700 else math.inf


def truncation_radius(P0: Potential, k: int, sigma: float, eps: float) -> float:
    """Ray cutoff ``R`` with certified tail ``int_R^inf |integrand| <= eps``.

    Beyond ``R0`` (coefficient bound) ``Re P0(omega_k u) <= -theta u^d/d``
    with ``theta = 1/2`` (``theta = 1`` for ``d = 1``, where ``P0 = -t``
    exactly); ``R`` is the smallest radius past ``R0`` whose analytic tail
    bound is below ``eps``, found by doubling then bisection.
    """
    if not 0 <= k < P0.d:
        raise ValueError(f"ray index {k} out of range for d={P0.d}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    sigma = float(sigma)
    r0 = _coefficient_radius(P0)

    def ok(R):
        return tail_bound(P0, sigma, R) <= eps

    if ok(r0):
        return r0
    lo, hi = r0, 2 * r0
    while not ok(hi):
        lo, hi = hi, 2 * hi
    for _ in range(100):
        if hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def integrate_ray(f: Callable, k: int, P0: Potential, sigma: float, cfg: QuadConfig = QuadConfig(), eps=None):
    """Integrate ``f(u)`` over ``u in [1, R]`` for a ray integrand.

    ``f`` takes the real ray parameter ``u`` (ndarray) and must be dominated by
    ``u^(sigma-1) e^{Re P0(omega_k u)}``.  ``R`` comes from
    :func:`truncation_radius` with ``eps`` (default ``cfg.tol / 10``); the
    truncation bound is added to the returned error estimate.
    """
    eps = cfg.tol / 10 if eps is None else eps
    R = truncation_radius(P0, k, sigma, eps)
    if R <= 1.0:
        return 0j, eps
    value, err, ok = _adaptive(f, _ray_breaks(R), cfg.quad_tol, cfg.max_depth)
    if not ok:
        raise ToleranceError(f"ray quadrature did not converge (err {err:.3g})", value, err + eps)
    return value, err + eps


def _ray_breaks(R: float) -> np.ndarray:
    n = int(min(16, max(4, math.ceil(2 * math.log2(R + 1)))))
    return np.geomspace(1.0, R, n + 1)


def _coef(weight: Optional[Poly]) -> np.ndarray:
    if weight is None:
        return _ONE
    return weight.coeffs if weight.coeffs.size else np.zeros(1, dtype=np.complex128)


def _weight_bound(weight: Optional[Poly]):
    # |W(t)| <= C |t|^m for |t| >= 1
    if weight is None or weight.is_zero():
        return 1.0, 0
    return float(np.sum(np.abs(weight.coeffs))), weight.deg


def expperiod_ray(P0: Potential, k: int, s: complex, cfg: QuadConfig, weight: Optional[Poly] = None, eps=None):
    """``int_1^inf u^(s-1) W(w_k u) exp(P0(w_k u)) du`` via the compiled kernel.

    Returns ``(value, error)``; the tail beyond the truncation radius is
    certified below ``eps`` (default ``1e-12 * cfg.tol``, so the bound stays
    negligible even when the integral itself is tiny).
    """
    s = complex(s)
    eps = 1e-12 * cfg.tol if eps is None else eps
    cw, m = _weight_bound(weight)
    R = truncation_radius(P0, k, s.real + m, eps / cw)
    if R <= 1.0:
        return 0j, eps
    value, err, _, ok = _kernels.adaptive(
        _kernels.POWER, s, P0.coeffs, _coef(weight), P0.omega_k(k), 1.0, _ray_breaks(R), cfg.quad_tol, cfg.max_depth
    )
    if not ok:
        raise ToleranceError(f"ray quadrature did not converge (err {err:.3g})", value, err + eps)
    return value, err + eps


def expperiod_arc(P0: Potential, k: int, s: complex, cfg: QuadConfig, weight: Optional[Poly] = None):
    """``int t^(s-1) W(t) exp(P0(t)) dt`` along the unit arc from 1 to ``omega_k``.

    The argument of ``t`` runs continuously from 0 to ``2 pi k / d``.
    """
    if k % P0.d == 0:
        return 0j, 0.0
    theta = 2 * math.pi * (k % P0.d) / P0.d
    n = max(2, 2 * (k % P0.d) + 1)
    value, err, _, ok = _kernels.adaptive(
        _kernels.ARC, complex(s), P0.coeffs, _coef(weight), 1.0, 1.0, np.linspace(0.0, theta, n), cfg.quad_tol, cfg.max_depth
    )
    if not ok:
        raise ToleranceError(f"arc quadrature did not converge (err {err:.3g})", value, err)
    return value, err


def expperiod_origin(
    P0: Potential, s: complex, z: complex, cfg: QuadConfig, weight: Optional[Poly] = None, arg=None, max_depth=None
):
    """``int_0^z t^(s-1) W(t) exp(P0(t)) dt`` on the segment ``[0, z]`` by quadrature.

    The endpoint singularity is removed with ``t = z v^(1/Re s)``, which turns
    ``t^(s-1) dt`` into ``(z^s / Re s) v^(i Im s / Re s) dv``.  ``z^s`` uses
    ``arg`` as the argument of ``z`` (principal argument by default).
    """
    s, z = complex(s), complex(z)
    sigma = s.real
    if sigma <= 0:
        raise ValueError("need Re s > 0")
    q = 1.0 / sigma
    breaks = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    depth = max(cfg.max_depth, 50) if max_depth is None else max_depth
    value, err, _, ok = _kernels.adaptive(_kernels.POWER, s, P0.coeffs, _coef(weight), z, q, breaks, cfg.quad_tol, depth)
    logz = complex(np.log(z)) if arg is None else complex(math.log(abs(z)), arg)
    pref = np.exp(s * logz) * q
    if not ok:
        raise ToleranceError(f"origin quadrature did not converge (err {err:.3g})", pref * value, abs(pref) * err)
    return pref * value, abs(pref) * err
