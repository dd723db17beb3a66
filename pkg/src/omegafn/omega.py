"""Omega functions and Incomplete Omega functions.

``Omega_k(s) = int_0^{inf * omega_k} t^(s-1) exp(P0(t)) dt`` with the branch
``arg t = 2 pi k / d`` along ray ``k``, so ``omega_k^s = exp(2 pi i k s / d)``.
The singular end ``t -> 0`` is always handled by the exponential series
``sum lambda_n t^n``; quadrature only ever starts at ``|t| = 1``.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _kernels
from .algebra import ExpSeries, Poly, Potential
from .errors import PoleError, ToleranceError
from .quadrature import QuadConfig, expperiod_arc, expperiod_origin, expperiod_ray

__all__ = ["PoleInfo", "OmegaEvaluator"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PoleInfo:
    """In-band report for a pole at ``s = -n`` with residue ``lambda_n``."""

    n: int
    residue: complex


@dataclass(frozen=True, eq=False)
class OmegaEvaluator:
    """Evaluator bound to one potential and one numeric configuration.

    Immutable apart from the append-only exponential-series cache, so a
    single instance may be shared between threads.
    """

    potential: Potential
    cfg: QuadConfig = QuadConfig()
    series: ExpSeries = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "series", ExpSeries(self.potential, 64))

    @property
    def d(self) -> int:
        return self.potential.d

    # -- helpers -----------------------------------------------------------

    def _check_k(self, k: int) -> int:
        if not 0 <= k < self.d:
            raise ValueError(f"ray index {k} out of range for d={self.d}")
        return int(k)

    def pole_index(self, s: complex) -> Optional[int]:
        """``n`` if ``s`` lies within ``pole_tol`` of ``-n`` (``n >= 0``), else None."""
        s = complex(s)
        n = -round(s.real)
        if n >= 0 and abs(s + n) < self.cfg.pole_tol:
            return int(n)
        return None

    def _series(self, s: complex, w: complex):
        """``sum_n lambda_n w^n / (s + n)`` with adaptive truncation."""
        n = max(self.series.N, 64)
        while True:
            lam = self.series.extend(n)
            total, used, ok = _kernels.series_sum(lam, complex(s), complex(w), _kernels.SERIES_RTOL, _kernels.SERIES_RUN)
            total = complex(total)
            if ok and cmath.isfinite(total):
                return total, 8 * _EPS * used * max(abs(total), 1e-300), int(used)
            if n >= self.cfg.series_max or not cmath.isfinite(total):
                raise ToleranceError(f"exponential series did not converge at s={s}, w={w}", total, math.inf)
            n = min(2 * n, self.cfg.series_max)

    def _window_start(self, s: complex) -> float:
        # Lowest real part of the d-value window the downward recurrence starts
        # from.  Ray quadrature loses ~eps * int|f| / |Omega| to cancellation,
        # and that ratio shrinks as Re s grows towards |Im s|.
        return min(1.0 + abs(s.imag) / (2.0 * self.d), 12.0)

    def _ray_phase(self, k: int, s: complex) -> complex:
        return cmath.exp(2j * math.pi * k * s / self.d)

    # -- Omega_k -------------------------------------------------------------

    def omega_pos_err(self, k: int, s: complex):
        """``(Omega_k(s), error)`` for ``Re s > 0``."""
        k = self._check_k(k)
        s = complex(s)
        if s.real <= 0:
            raise ValueError("omega_pos needs Re s > 0")
        series, serr, _ = self._series(s, self.potential.omega_k(k))
        tail, terr = expperiod_ray(self.potential, k, s, self.cfg)
        pref = self._ray_phase(k, s)
        return pref * (series + tail), abs(pref) * (serr + terr)

    def omega_pos(self, k: int, s: complex) -> complex:
        value, err = self.omega_pos_err(k, s)
        return value

    def omega_err(self, k: int, s: complex):
        """``(value or PoleInfo, error)`` anywhere in the plane.

        For ``Re s <= 0`` the functional equation
        ``Omega(s) = (Omega(s+d) + sum_l alpha_l Omega(s+l)) / s``
        is run downward from a window of ``d`` values with positive real part.
        """
        k = self._check_k(k)
        s = complex(s)
        n = self.pole_index(s)
        if n is not None:
            return PoleInfo(n, self.residue(n)), 0.0
        if s.real > 0:
            return self.omega_pos_err(k, s)
        d = self.d
        alpha = self.potential.alpha
        m0 = math.ceil(self._window_start(s) - s.real)
        vals, errs = {}, {}
        for j in range(m0, m0 + d):
            vals[j], errs[j] = self.omega_pos_err(k, s + j)
        for m in range(m0 - 1, -1, -1):
            acc = vals[m + d]
            e = errs[m + d]
            for l in range(1, d):
                acc += alpha[l] * vals[m + l]
                e += abs(alpha[l]) * errs[m + l]
            den = s + m
            vals[m] = acc / den
            errs[m] = (e + _EPS * abs(acc)) / abs(den)
        return vals[0], errs[0]

    def omega(self, k: int, s: complex) -> Union[complex, PoleInfo]:
        value, err = self.omega_err(k, s)
        return value

    def omega_value(self, k: int, s: complex) -> complex:
        """Like :meth:`omega` but raises :class:`PoleError` at poles."""
        value = self.omega(k, s)
        if isinstance(value, PoleInfo):
            raise PoleError(f"Omega_{k} has a pole at s={-value.n}", value.n, value.residue)
        return value

    def omega_many(self, k: int, s_values, workers: Optional[int] = None) -> list:
        """Evaluate a batch of points; output order follows input order."""
        pts = [complex(s) for s in s_values]
        if workers is None or workers <= 1 or len(pts) < 2:
            return [self.omega(k, s) for s in pts]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda s: self.omega(k, s), pts))

    def residue(self, n: int) -> complex:
        """Residue of every ``Omega_k`` at ``s = -n``: the coefficient ``lambda_n``."""
        if n < 0:
            raise ValueError("n must be >= 0")
        return self.series[n]

    # -- Mittag-Leffler and entire differences ------------------------------

    def tail_err(self, k: int, s: complex):
        """``int_1^{inf * omega_k} t^(s-1) e^{P0} dt`` (unit arc, then ray)."""
        k = self._check_k(k)
        s = complex(s)
        arc, aerr = expperiod_arc(self.potential, k, s, self.cfg)
        ray, rerr = expperiod_ray(self.potential, k, s, self.cfg)
        pref = self._ray_phase(k, s)
        return arc + pref * ray, aerr + abs(pref) * rerr

    def mittag_leffler_err(self, k: int, s: complex, N: Optional[int] = None):
        k = self._check_k(k)
        s = complex(s)
        n = self.pole_index(s)
        if n is not None:
            raise PoleError(f"s={s} is within pole_tol of the pole at {-n}", n, self.residue(n))
        if N is None:
            principal, perr, _ = self._series(s, 1.0)
        else:
            lam = self.series.extend(N)[: N + 1]
            principal = complex(np.sum(lam / (s + np.arange(N + 1))))
            perr = math.nan
        tail, terr = self.tail_err(k, s)
        return principal + tail, perr + terr

    def mittag_leffler(self, k: int, s: complex, N: Optional[int] = None) -> complex:
        """``sum_{n<=N} lambda_n/(s+n) + int_1^{inf omega_k} t^(s-1) e^{P0} dt``.

        ``N=None`` truncates adaptively.
        """
        value, err = self.mittag_leffler_err(k, s, N)
        return value

    def omega_diff(self, k: int, l: int, s: complex) -> complex:
        """Entire function ``Omega_k(s) - Omega_l(s)``.

        The principal parts of both Mittag-Leffler expansions are identical and
        cancel term by term, leaving the difference of the entire tails.
        """
        if k == l:
            raise ValueError("omega_diff needs k != l")
        tk, _ = self.tail_err(k, s)
        tl, _ = self.tail_err(l, s)
        return tk - tl

    # -- Incomplete Omega -------------------------------------------------------

    def incomplete_err(self, s: complex, z: complex):
        s, z = complex(s), complex(z)
        if s.real <= 0:
            raise ValueError("incomplete needs Re s > 0")
        if z == 0:
            raise ValueError("incomplete needs z != 0")
        total, err, _ = self._series(s, z)
        pref = cmath.exp(s * cmath.log(z))
        return pref * total, abs(pref) * err

    def incomplete(self, s: complex, z: complex) -> complex:
        """``Omega(s, z) = int_0^z t^(s-1) e^{P0(t)} dt`` (principal ``arg z``), by series."""
        value, err = self.incomplete_err(s, z)
        return value

    def incomplete_quad(self, s: complex, z: complex, weight: Optional[Poly] = None) -> complex:
        """Direct quadrature of ``int_0^z t^(s-1) W(t) e^{P0(t)} dt``.

        Independent of the series; used as an oracle for :meth:`incomplete`
        and the reduction algorithm.  Needs ``Re s > 0.1``.
        """
        s, z = complex(s), complex(z)
        if s.real <= 0.1:
            raise ValueError("incomplete_quad needs Re s > 0.1")
        if z == 0:
            raise ValueError("incomplete_quad needs z != 0")
        value, err = expperiod_origin(self.potential, s, z, self.cfg, weight)
        return value

    def omega_quad(self, k: int, s: complex, weight: Optional[Poly] = None) -> complex:
        """Quadrature-only ``int_0^{inf omega_k} t^(s-1) W(t) e^{P0(t)} dt`` (``Re s > 0.1``)."""
        k = self._check_k(k)
        s = complex(s)
        if s.real <= 0.1:
            raise ValueError("omega_quad needs Re s > 0.1")
        theta = 2 * math.pi * k / self.d
        head, _ = expperiod_origin(self.potential, s, self.potential.omega_k(k), self.cfg, weight, arg=theta)
        ray, _ = expperiod_ray(self.potential, k, s, self.cfg, weight)
        return head + self._ray_phase(k, s) * ray

    # -- functional equation ----------------------------------------------------

    def functional_residual(self, k: int, s: complex) -> float:
        """Relative defect of ``Omega(s+d) + sum alpha_l Omega(s+l) = s Omega(s)``."""
        s = complex(s)
        n = self.pole_index(s)
        if n is not None:
            raise PoleError(f"s={s} is within pole_tol of the pole at {-n}", n, self.residue(n))
        alpha = self.potential.alpha
        lhs = self.omega_value(k, s + self.d)
        for l in range(1, self.d):
            lhs += alpha[l] * self.omega_value(k, s + l)
        rhs = s * self.omega_value(k, s)
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
