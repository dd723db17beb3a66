"""Symbolic reduction of polynomial exponential periods.

``int_0^z t^s Q(t) e^{P0(t)} dt`` is rewritten as
``A(s, z, z^s) e^{P0(z)} + sum_j c_j(s) Omega(s + j, z)`` with polynomial
coefficients ``c_j`` in ``s``.

Conventions
-----------
* An :data:`SPoly` is a :class:`~omegafn.algebra.Poly` in the variable ``s``.
* :class:`ExpPolyExpr` maps ``(i, m)`` to an SPoly and stands for
  ``sum A_{i,m}(s) z^i (z^s)^m``.
* Mixed integrands are ``Q(t, t^s) e^{P0(t)}`` (no implicit ``t^(s-1)``).  The
  group ``y^m Q_m(t)`` is the period ``int t^(m s) Q_m(t) e^{P0} dt`` and is
  reported in the basis ``Omega(m s + offset + j, z)``, ``j = 0 .. d-1``.
  ``offset`` is 0 except for ``m = 0``, where ``Omega(0, z)`` does not exist
  and the window starts at ``Omega(1, z)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .algebra import Poly, Potential
from .errors import InputError

__all__ = [
    "SPoly",
    "ExpPolyExpr",
    "PeriodReduction",
    "reduce_tpoly",
    "reduce_mixed",
    "rewrite_shift",
    "eval_reduction",
    "reduce_ray_limit",
    "eval_ray_limit",
    "mixed_groups",
]

SPoly = Poly


# ---------------------------------------------------------------------------
# coefficient arithmetic: 2-D arrays ``X[t_power, s_power]``
# ---------------------------------------------------------------------------

def _pad_s(x: np.ndarray, n: int) -> np.ndarray:
    if x.shape[-1] >= n:
        return x
    pad = [(0, 0)] * (x.ndim - 1) + [(0, n - x.shape[-1])]
    return np.pad(x, pad)


def _add_s(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(a.shape[-1], b.shape[-1])
    return _pad_s(a, n) + _pad_s(b, n)


def _times_s(x: np.ndarray) -> np.ndarray:
    """Multiply by the variable ``s`` (shift along the last axis)."""
    pad = [(0, 0)] * (x.ndim - 1) + [(1, 0)]
    return np.pad(x, pad)


def _trim_t(q: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.any(q != 0, axis=1))
    return q[: nz[-1] + 1] if nz.size else q[:0]


def _divmod_t(q: np.ndarray, den: np.ndarray):
    """Division in ``t`` of ``q[t, s]`` by an ``s``-free polynomial ``den``."""
    dd = den.shape[0] - 1
    r = q.copy()
    if q.shape[0] - 1 < dd:
        return np.zeros((0, q.shape[1]), dtype=complex), r
    quo = np.zeros((q.shape[0] - dd, q.shape[1]), dtype=complex)
    lead = den[-1]
    for i in range(q.shape[0] - 1 - dd, -1, -1):
        c = r[i + dd] / lead
        quo[i] = c
        r[i : i + dd + 1] -= np.outer(den, c)
        r[i + dd] = 0.0
    return quo, r[:dd]


# ---------------------------------------------------------------------------
# result types
# ---------------------------------------------------------------------------

class ExpPolyExpr(dict):
    """``{(i, m): SPoly}`` for ``sum A_{i,m}(s) z^i (z^s)^m``; zero entries are dropped."""

    def add(self, key, coeffs) -> None:
        key = (int(key[0]), int(key[1]))
        cur = self.get(key)
        new = Poly(coeffs) if cur is None else cur + Poly(coeffs)
        if new.is_zero():
            self.pop(key, None)
        else:
            self[key] = new

    def evaluate(self, s: complex, z: complex) -> complex:
        s, z = complex(s), complex(z)
        logz = np.log(z)
        total = 0j
        for (i, m), p in sorted(self.items()):
            total += complex(p(s)) * z**i * np.exp(m * s * logz)
        return complex(total)


@dataclass(frozen=True, eq=False)
class PeriodReduction:
    """``A(s, z, z^s) e^{P0(z)} + sum_j c[j](s) Omega(m s + offset + j, z)`` with ``m = sigma_shift``."""

    A: ExpPolyExpr
    c: tuple
    sigma_shift: int = 1
    offset: int = 0
    d: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(Poly(x.coeffs if isinstance(x, Poly) else x) for x in self.c))
        object.__setattr__(self, "d", len(self.c))

    def exponent(self, s: complex, j: int) -> complex:
        return self.sigma_shift * complex(s) + self.offset + j

    def s_degree(self) -> int:
        return max((p.deg for p in self.c), default=-1)

    def __add__(self, other: PeriodReduction) -> PeriodReduction:
        if (self.sigma_shift, self.offset, self.d) != (other.sigma_shift, other.offset, other.d):
            raise ValueError("reductions live in different bases")
        A = ExpPolyExpr(self.A)
        for key, p in other.A.items():
            A.add(key, p.coeffs)
        return PeriodReduction(A, tuple(x + y for x, y in zip(self.c, other.c)), self.sigma_shift, self.offset)

    def allclose(self, other: PeriodReduction, atol: float = 1e-12) -> bool:
        diff = self + PeriodReduction(
            ExpPolyExpr({k: -1.0 * p for k, p in other.A.items()}),
            tuple(-1.0 * p for p in other.c),
            other.sigma_shift,
            other.offset,
        )
        mags = [np.max(np.abs(p.coeffs)) for p in list(diff.A.values()) + list(diff.c) if not p.is_zero()]
        return all(m <= atol for m in mags)

    def to_dict(self) -> dict:
        def cl(p: Poly):
            return [[float(x.real), float(x.imag)] for x in p.coeffs]

        return {
            "A": [{"i": i, "m": m, "spoly": cl(p)} for (i, m), p in sorted(self.A.items())],
            "c": [cl(p) for p in self.c],
            "sigma_shift": self.sigma_shift,
            "offset": self.offset,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> PeriodReduction:
        def pl(rows):
            return [complex(re, im) for re, im in rows]

        A = ExpPolyExpr()
        for entry in data["A"]:
            A.add((entry["i"], entry["m"]), pl(entry["spoly"]))
        return cls(A, tuple(pl(r) for r in data["c"]), int(data["sigma_shift"]), int(data.get("offset", 0)))


# ---------------------------------------------------------------------------
# the descent
# ---------------------------------------------------------------------------

def _descent(P0: Potential, q: np.ndarray):
    """Reduce ``int t^sigma q(t, sigma) e^{P0}`` (``q[t, s]``) in the formal variable ``sigma``.

    Returns ``(A, c)`` with ``A[i]`` the s-vector multiplying ``z^i z^sigma e^{P0(z)}``
    and ``c[j]`` the s-vector multiplying ``Omega(sigma + j, z)``.
    """
    d = P0.d
    dp = P0.derivative.coeffs
    A: dict = {}
    c = [np.zeros(1, dtype=complex) for _ in range(d)]
    q = _trim_t(np.asarray(q, dtype=complex))
    while q.shape[0] - 1 > d - 2:
        a1, b1 = _divmod_t(q, dp)
        # t^sigma A1 P0' e^{P0} integrates by parts
        for i, row in enumerate(a1):
            A[i] = _add_s(A.get(i, np.zeros(1, dtype=complex)), row)
        c[0] = _add_s(c[0], -_times_s(a1[0]))
        da1 = a1[1:] * np.arange(1, a1.shape[0])[:, None]
        nxt = _times_s(a1[1:])  # sigma (A1 - A1(0)) / t
        width = max(b1.shape[1], da1.shape[1], nxt.shape[1])
        rows = max(b1.shape[0], da1.shape[0], nxt.shape[0])
        new = np.zeros((rows, width), dtype=complex)
        new[: b1.shape[0], : b1.shape[1]] += b1
        new[: da1.shape[0], : da1.shape[1]] -= da1
        new[: nxt.shape[0], : nxt.shape[1]] -= nxt
        q = _trim_t(new)
    # deg q <= d - 2: t^(sigma + i) lands on Omega(sigma + i + 1)
    for i, row in enumerate(q):
        c[i + 1] = _add_s(c[i + 1], row)
    return A, c


def _explicit_d1(q: np.ndarray):
    """``d = 1``: ``int t^(sigma+n) e^{-t} = -e^{-z} sum_j prod_{i>j}(sigma+i) z^(sigma+j) + prod_{i<=n}(sigma+i) Omega``."""
    A: dict = {}
    c0 = np.zeros(1, dtype=complex)
    q = _trim_t(np.asarray(q, dtype=complex))
    for n, row in enumerate(q):
        if not np.any(row):
            continue
        # prods[j] = prod_{i=j+1}^{n} (sigma + i) as an s-vector
        prod = np.ones(1, dtype=complex)
        for j in range(n, -1, -1):
            term = np.convolve(prod, row)
            A[j] = _add_s(A.get(j, np.zeros(1, dtype=complex)), -term)
            prod = np.convolve(prod, np.array([j, 1.0], dtype=complex))
        c0 = _add_s(c0, np.convolve(prod, row))
    return A, [c0]


def _reduce_sigma(P0: Potential, q: np.ndarray):
    if P0.d == 1:
        return _explicit_d1(q)
    return _descent(P0, q)


def _substitute(A: dict, c: list, m: int, offset: int) -> PeriodReduction:
    """Replace the formal ``sigma`` by ``m s`` and package the result."""
    scale = lambda v: v * float(m) ** np.arange(v.shape[0])  # noqa: E731
    expr = ExpPolyExpr()
    for i, v in A.items():
        expr.add((i, m), scale(v))
    return PeriodReduction(expr, tuple(Poly(scale(v)) for v in c), m, offset)


def _as_tq(Q) -> np.ndarray:
    coeffs = Q.coeffs if isinstance(Q, Poly) else np.atleast_1d(np.asarray(Q, dtype=complex))
    return coeffs.reshape(-1, 1).astype(complex)


def reduce_tpoly(P0: Potential, Q: Union[Poly, Sequence[complex]]) -> PeriodReduction:
    """Reduce ``int_0^z t^s Q(t) e^{P0(t)} dt`` to the window ``Omega(s + j, z)``.

    For ``d >= 2`` this is the Euclidean descent: write ``Q = A1 P0' + B1``,
    integrate the first part by parts and repeat on the remainder until the
    degree drops below ``d - 1``.  ``d = 1`` uses the closed form obtained by
    repeated integration by parts.

    >>> r = reduce_tpoly(Potential(2), Poly([0, 1]))
    >>> r.A[(0, 1)].coeffs.tolist(), r.c[0].coeffs.tolist()
    ([(-1+0j)], [0j, (1+0j)])
    """
    A, c = _reduce_sigma(P0, _as_tq(Q))
    return _substitute(A, c, 1, 0)


def _window_from_zero(P0: Potential, A: dict, c: list):
    """Move ``c_0(sigma) Omega(sigma, z)`` (``c_0`` divisible by ``sigma``) onto ``Omega(sigma + 1 .. sigma + d)``.

    Uses ``sigma Omega(sigma, z) = Omega(sigma+d, z) + sum alpha_l Omega(sigma+l, z) + z^sigma e^{P0(z)}``,
    which stays valid at ``sigma = 0``.
    """
    d = P0.d
    c0 = c[0]
    if np.any(c0[:1]):
        raise AssertionError("c_0 must vanish at sigma = 0")
    ct = c0[1:] if c0.shape[0] > 1 else np.zeros(1, dtype=complex)
    alpha = P0.alpha
    out = [np.zeros(1, dtype=complex) for _ in range(d)]
    for j in range(1, d):
        out[j - 1] = _add_s(c[j], alpha[j] * ct)
    out[d - 1] = _add_s(out[d - 1], ct)
    A = dict(A)
    A[0] = _add_s(A.get(0, np.zeros(1, dtype=complex)), ct)
    return A, out


def mixed_groups(Q) -> dict:
    """Split a bivariate ``Q(t, y)`` into ``{m: coefficient array of Q_m(t)}``.

    ``Q`` may be a mapping ``{(i, m): coeff}`` or a 2-D array ``Q[i, m]``.
    """
    if isinstance(Q, Mapping):
        items = Q.items()
    else:
        arr = np.atleast_2d(np.asarray(Q, dtype=complex))
        items = (((i, m), arr[i, m]) for i in range(arr.shape[0]) for m in range(arr.shape[1]))
    groups: dict = {}
    for (i, m), v in items:
        if int(i) < 0 or int(m) < 0:
            raise InputError("negative exponent in polynomial")
        v = complex(v)
        if v == 0:
            continue
        g = groups.setdefault(int(m), {})
        g[int(i)] = g.get(int(i), 0j) + v
    out = {}
    for m in sorted(groups):
        g = groups[m]
        arr = np.zeros(max(g) + 1, dtype=complex)
        for i, v in g.items():
            arr[i] = v
        if np.any(arr):
            out[m] = arr
    return out


def reduce_mixed(P0: Potential, Q) -> list:
    """Reduce ``int_0^z Q(t, t^s) e^{P0(t)} dt`` group by group in the power of ``t^s``.

    Returns one :class:`PeriodReduction` per nonzero group, ordered by ``m``.
    """
    out = []
    for m, coeffs in mixed_groups(Q).items():
        A, c = _reduce_sigma(P0, coeffs.reshape(-1, 1))
        if m == 0:
            A, c = _window_from_zero(P0, A, c)
            out.append(_substitute(A, c, 0, 1))
        else:
            out.append(_substitute(A, c, m, 0))
    return out


def rewrite_shift(P0: Potential, k: int):
    """Express ``Omega(s + k, z)`` (``k >= d``) in the window ``Omega(s + j, z)``, ``j < d``.

    Repeatedly applies
    ``Omega(s+j+d, z) = (s+j) Omega(s+j, z) - z^(s+j) e^{P0(z)} - sum_l alpha_l Omega(s+j+l, z)``
    from the top index down.  Returns ``(c, boundary)``.
    """
    d = P0.d
    if int(k) != k or k < d:
        raise InputError(f"rewrite_shift needs k >= d = {d}")
    k = int(k)
    alpha = P0.alpha
    coef = [np.zeros(1, dtype=complex) for _ in range(k + 1)]
    coef[k] = np.ones(1, dtype=complex)
    boundary = ExpPolyExpr()
    for idx in range(k, d - 1, -1):
        cur = coef[idx]
        if not np.any(cur):
            continue
        j = idx - d
        coef[j] = _add_s(coef[j], np.convolve(cur, np.array([j, 1.0], dtype=complex)))
        for l in range(1, d):
            coef[j + l] = _add_s(coef[j + l], -alpha[l] * cur)
        boundary.add((j, 1), -cur)
        coef[idx] = np.zeros(1, dtype=complex)
    return tuple(Poly(v) for v in coef[:d]), boundary


def eval_reduction(red: PeriodReduction, evaluator, s: complex, z: complex) -> complex:
    """Numeric value of the reduced form, using the series for each ``Omega(., z)``."""
    s, z = complex(s), complex(z)
    if s.real <= 0 and red.sigma_shift > 0:
        raise InputError("eval_reduction needs Re s > 0")
    if z == 0:
        raise InputError("eval_reduction needs z != 0")
    total = red.A.evaluate(s, z) * np.exp(evaluator.potential(z))
    for j, p in enumerate(red.c):
        if p.is_zero():
            continue
        total += complex(p(s)) * evaluator.incomplete(red.exponent(s, j), z)
    return complex(total)


def reduce_ray_limit(red: PeriodReduction, k: Optional[int] = None) -> tuple:
    """Coefficients of ``Omega_k(m s + offset + j)`` for the full ray integral.

    The boundary term ``A e^{P0}`` vanishes along every ray, so only ``c``
    survives.  Restricted to ``sigma_shift`` 0 and 1.
    """
    if red.sigma_shift not in (0, 1):
        raise InputError(f"ray limit for sigma_shift={red.sigma_shift} leaves the window basis")
    if k is not None and not 0 <= k < red.d:
        raise InputError(f"ray index {k} out of range for d={red.d}")
    return red.c


def eval_ray_limit(red: PeriodReduction, evaluator, k: int, s: complex) -> complex:
    """``sum_j c_j(s) Omega_k(m s + offset + j)``."""
    c = reduce_ray_limit(red, k)
    s = complex(s)
    total = 0j
    for j, p in enumerate(c):
        if not p.is_zero():
            total += complex(p(s)) * evaluator.omega_value(k, red.exponent(s, j))
    return total
