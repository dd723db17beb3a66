"""Omega matrix, its determinant and the difference-equation solver."""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import Poly, Potential, poly_derive
from .errors import PoleError
from .gamma_ref import gamma_complex
from .omega import OmegaEvaluator, PoleInfo

__all__ = [
    "OmegaMatrix",
    "DetReport",
    "SolutionSpec",
    "IllConditionedWarning",
    "omega_matrix",
    "delta",
    "delta_closed_monomial",
    "delta_printed_constant",
    "dft_determinant",
    "root_product_vandermonde",
    "solve_samples",
    "eval_solution",
    "common_zero_gap",
    "log_ratio_differences",
]

COND_WARN = 1e8


class IllConditionedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class OmegaMatrix:
    """``entries[k, l] = Omega_k(s0 + l + 1)``."""

    s0: complex
    entries: np.ndarray

    @property
    def d(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DetReport:
    value: complex
    closed_form_monomial: Optional[complex] = None
    printed_formula_value: Optional[complex] = None
    smallest_singular_value: float = math.nan
    norm: float = math.nan

    @property
    def printed_ratio(self) -> Optional[complex]:
        """Printed constant divided by the computed determinant (``a = 0`` only)."""
        if self.printed_formula_value is None:
            return None
        return self.printed_formula_value / self.value


@dataclass(frozen=True)
class SolutionSpec:
    """``f(s) = scale**s * sum_k c[k] Omega_k(s)``."""

    c: tuple
    scale: complex = 1.0
    residual: float = math.nan
    condition: float = math.nan


def omega_matrix(ev: OmegaEvaluator, s0: complex) -> OmegaMatrix:
    """Build the ``d x d`` matrix with columns at ``s0 + 1 .. s0 + d``.

    Raises :class:`PoleError` naming the first column that sits on a pole.
    """
    s0 = complex(s0)
    d = ev.d
    for l in range(d):
        n = ev.pole_index(s0 + l + 1)
        if n is not None:
            raise PoleError(f"column {l} (s={s0 + l + 1}) is on the pole at {-n}", n, ev.residue(n))
    m = np.empty((d, d), dtype=complex)
    for k in range(d):
        for l in range(d):
            v = ev.omega(k, s0 + l + 1)
            assert not isinstance(v, PoleInfo)
            m[k, l] = v
    return OmegaMatrix(s0, m)


def _det(m: np.ndarray) -> complex:
    # rows can differ by many orders of magnitude (the omega_k^s factors);
    # equilibrate before the LU factorisation
    scale = np.max(np.abs(m), axis=1)
    scale[scale == 0] = 1.0
    return complex(np.prod(scale) * np.linalg.det(m / scale[:, None]))


def dft_determinant(d: int) -> complex:
    """``det[omega^(k l)]`` for ``k = 0 .. d-1``, ``l = 1 .. d``."""
    w = cmath.exp(2j * math.pi / d)
    k = np.arange(d)[:, None]
    l = np.arange(1, d + 1)[None, :]
    return complex(np.linalg.det(w ** (k * l)))


def delta_closed_monomial(d: int, s0: complex) -> complex:
    """Determinant of the Omega matrix for ``P0 = -t^d/d`` in closed form.

    ``omega^(d(d-1) s0/2) (2 pi)^((d-1)/2) d^(-d/2) D_d Gamma(s0 + 1)`` with
    ``D_d`` the determinant of :func:`dft_determinant`.  Follows from
    ``Omega_k(s|0) = omega^(k s) d^(s/d - 1) Gamma(s/d)`` and the Gauss
    multiplication formula.
    """
    s0 = complex(s0)
    w_pow = cmath.exp(2j * math.pi / d * (d * (d - 1) / 2) * s0)
    return w_pow * (2 * math.pi) ** ((d - 1) / 2) * d ** (-d / 2) * dft_determinant(d) * gamma_complex(s0 + 1)


def delta_printed_constant(d: int, s0: complex) -> complex:
    """Alternative closed form ``(2 pi d)^(d/2) / sqrt(2 pi) omega^(d(d-1) s0/2) s0 Gamma(s0)``.

    Kept for comparison only: it agrees with :func:`delta_closed_monomial` at
    ``d = 1`` and is off by ``d^d / D_d`` (modulus ``d^(d/2)``) otherwise.
    """
    s0 = complex(s0)
    w_pow = cmath.exp(2j * math.pi / d * (d * (d - 1) / 2) * s0)
    return (2 * math.pi * d) ** (d / 2) / math.sqrt(2 * math.pi) * w_pow * gamma_complex(s0 + 1)


def delta(ev: OmegaEvaluator, s0: complex) -> DetReport:
    mat = omega_matrix(ev, s0).entries
    value = _det(mat)
    sv = np.linalg.svd(mat, compute_uv=False)
    closed = printed = None
    if ev.potential.is_monomial:
        closed = delta_closed_monomial(ev.d, s0)
        printed = delta_printed_constant(ev.d, s0)
    return DetReport(value, closed, printed, float(sv[-1]), float(sv[0]))


def root_product_vandermonde(Q: Poly, roots: Sequence[complex]) -> complex:
    """``prod_i Q'(xi_i)`` over the given roots of the monic polynomial ``Q``.

    Equals ``prod_{i != j} (xi_i - xi_j)``, the discriminant up to sign,
    which is the *square* of the Vandermonde determinant up to sign.
    """
    dq = poly_derive(Q)
    out = 1 + 0j
    for r in roots:
        out *= complex(dq(complex(r)))
    return out


def solve_samples(
    ev: OmegaEvaluator, s0: complex, v: Sequence[complex], scale: complex = 1.0
) -> SolutionSpec:
    """Coordinates ``c`` with ``scale^x sum_k c_k Omega_k(x) = v_l`` at ``x = s0 + l + 1``.

    ``scale`` comes from :func:`~omegafn.algebra.normalize_dfe` when the
    samples belong to a non-normalised equation; the samples are divided by
    ``scale^x`` before solving.  Warns with :class:`IllConditionedWarning`
    when the condition number exceeds ``1e8``.
    """
    s0 = complex(s0)
    d = ev.d
    v = np.asarray([complex(x) for x in v], dtype=complex)
    if v.shape != (d,):
        raise ValueError(f"need exactly d={d} samples")
    scale = complex(scale)
    if scale != 1:
        xs = s0 + np.arange(1, d + 1)
        v = v / np.exp(xs * np.log(scale))
    mt = omega_matrix(ev, s0).entries.T
    c = np.linalg.solve(mt, v)
    resid = float(np.linalg.norm(mt @ c - v) / max(np.linalg.norm(v), 1e-300))
    cond = float(np.linalg.cond(mt))
    if cond > COND_WARN:
        warnings.warn(f"Omega matrix condition number {cond:.3g} exceeds {COND_WARN:.0e}", IllConditionedWarning)
    return SolutionSpec(tuple(complex(x) for x in c), scale, resid, cond)


def eval_solution(spec: SolutionSpec, ev: OmegaEvaluator, s: complex) -> complex:
    s = complex(s)
    total = 0j
    for k, ck in enumerate(spec.c):
        if ck != 0:
            total += ck * ev.omega_value(k, s)
    if spec.scale != 1:
        total *= cmath.exp(s * cmath.log(spec.scale))
    return total


def common_zero_gap(ev: OmegaEvaluator, s: complex) -> float:
    """``max_k |Omega_k(s)|``; strictly positive away from the poles."""
    return max(abs(ev.omega_value(k, s)) for k in range(ev.d))


def log_ratio_differences(ev: OmegaEvaluator, s_values: Sequence[complex], max_order: Optional[int] = None):
    """Finite-difference table of ``log(Delta(s|a) / Delta(s|0))`` along ``s_values``.

    The logarithm is unwrapped along the samples.  Returns ``(table, order)``:
    ``table[j]`` holds the ``j``-th differences and ``order`` is the first
    ``j`` whose differences are all below ``1e-6`` relative to the sample
    magnitude (``None`` if none is).
    """
    mono = OmegaEvaluator(Potential(ev.d), ev.cfg)
    ratios = np.array([delta(ev, s).value / delta(mono, s).value for s in s_values])
    logs = np.log(np.abs(ratios)) + 1j * np.unwrap(np.angle(ratios))
    scale = max(1.0, float(np.max(np.abs(logs))))
    table = [logs]
    order = None
    limit = len(logs) - 1 if max_order is None else min(max_order, len(logs) - 1)
    for j in range(1, limit + 1):
        table.append(np.diff(table[-1]))
        if order is None and np.all(np.abs(table[-1]) <= 1e-6 * scale):
            order = j
    return table, order
