"""Complex polynomials, the normalized potential and its exponential series.

The potential is ``P0(t) = -t**d / d + a_1 t + ... + a_{d-1} t**(d-1)``; it is
the single source of the degree ``d``, the roots of unity ``omega_k`` and the
difference-equation coefficients ``alpha_l = -l a_l`` (``alpha_d = 1``).
"""
from __future__ import annotations

import cmath
import math
import re
import threading
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InputError

__all__ = [
    "Poly",
    "Potential",
    "ExpSeries",
    "NormalizedDFE",
    "poly_eval",
    "poly_derive",
    "poly_divmod",
    "exp_series",
    "normalize_dfe",
    "parse_complex",
    "parse_potential",
    "format_complex",
]


def _as_coeffs(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).copy()
    if not np.all(np.isfinite(c)):
        raise InputError("polynomial coefficients must be finite")
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:0]


@dataclass(frozen=True, eq=False)
class Poly:
    """Dense complex polynomial, coefficients in ascending powers.

    The zero polynomial has an empty coefficient array and degree -1.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))
        self.coeffs.flags.writeable = False

    @property
    def deg(self) -> int:
        return self.coeffs.shape[0] - 1

    def is_zero(self) -> bool:
        return self.coeffs.shape[0] == 0

    def __call__(self, t):
        return poly_eval(self, t)

    def __add__(self, other: Poly) -> Poly:
        n = max(self.coeffs.size, other.coeffs.size)
        out = np.zeros(n, dtype=np.complex128)
        out[: self.coeffs.size] += self.coeffs
        out[: other.coeffs.size] += other.coeffs
        return Poly(out)

    def __sub__(self, other: Poly) -> Poly:
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero() or other.is_zero():
                return Poly([])
            return Poly(np.convolve(self.coeffs, other.coeffs))
        return Poly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()!r})"


def poly_eval(p: Poly, t):
    """Evaluate ``p`` at ``t`` (scalar or array) by Horner's rule."""
    acc = np.zeros_like(np.asarray(t, dtype=np.complex128))
    for c in p.coeffs[::-1]:
        acc = acc * t + c
    return acc[()] if np.ndim(acc) == 0 else acc


def poly_derive(p: Poly) -> Poly:
    if p.deg < 1:
        return Poly([])
    return Poly(p.coeffs[1:] * np.arange(1, p.deg + 1))


def poly_divmod(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Euclidean division ``num = q * den + r`` with ``deg r < deg den``."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    r = num.coeffs.copy()
    dd = den.deg
    if num.deg < dd:
        return Poly([]), Poly(r)
    lead = den.coeffs[-1]
    q = np.zeros(num.deg - dd + 1, dtype=np.complex128)
    for i in range(num.deg - dd, -1, -1):
        c = r[i + dd] / lead
        q[i] = c
        r[i : i + dd + 1] -= c * den.coeffs
        r[i + dd] = 0.0
    return Poly(q), Poly(r[:dd])


@dataclass(frozen=True, eq=False)
class Potential:
    """Normalized potential ``P0(t) = -t^d/d + sum_{k<d} a_k t^k``."""

    d: int
    a: tuple = ()

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InputError(f"degree must be a positive integer, got {self.d!r}")
        a = tuple(complex(x) for x in self.a)
        if len(a) > self.d - 1:
            raise InputError(f"degree {self.d} potential takes at most {self.d - 1} free coefficients")
        if not all(cmath.isfinite(x) for x in a):
            raise InputError("potential coefficients must be finite")
        a = a + (0j,) * (self.d - 1 - len(a))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "a", a)

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients ``a_0 .. a_d`` with ``a_0 = 0`` and ``a_d = -1/d``."""
        c = np.zeros(self.d + 1, dtype=np.complex128)
        c[1 : self.d] = self.a
        c[self.d] = -1.0 / self.d
        return c

    @property
    def poly(self) -> Poly:
        return Poly(self.coeffs)

    @property
    def derivative(self) -> Poly:
        return poly_derive(self.poly)

    @property
    def omega(self) -> complex:
        return cmath.exp(2j * math.pi / self.d)

    def omega_k(self, k: int) -> complex:
        return cmath.exp(2j * math.pi * (k % self.d) / self.d)

    @property
    def alpha(self) -> np.ndarray:
        """``alpha_1 .. alpha_d`` (index 0 unused, kept as 0)."""
        c = self.coeffs
        al = -np.arange(self.d + 1) * c
        al[0] = 0.0
        al[self.d] = 1.0
        return al

    @property
    def is_real(self) -> bool:
        return all(x.imag == 0 for x in self.a)

    @property
    def is_monomial(self) -> bool:
        return all(x == 0 for x in self.a)

    def __call__(self, t):
        return poly_eval(self.poly, t)

    def conjugate(self) -> Potential:
        return Potential(self.d, tuple(x.conjugate() for x in self.a))

    def __eq__(self, other):
        return isinstance(other, Potential) and self.d == other.d and self.a == other.a

    def __hash__(self):
        return hash((self.d, self.a))

    def __str__(self):
        parts = [f"d={self.d}"]
        parts += [f"a{i}={format_complex(x)}" for i, x in enumerate(self.a, 1) if x != 0]
        return ";".join(parts)


class ExpSeries:
    """Taylor coefficients ``lambda_n`` of ``exp(P0(t))``.

    Grown by the recurrence ``n lambda_n = sum_k k a_k lambda_{n-k}``.  The
    cache is append-only: extending never alters existing entries, so readers
    holding an older prefix stay consistent.
    """

    def __init__(self, potential: Potential, n: int = 0):
        self.potential = potential
        c = potential.coeffs
        self._ka = np.arange(potential.d + 1) * c
        self._lam = np.ones(1, dtype=np.complex128)
        self._lam.flags.writeable = False
        self._lock = threading.Lock()
        if n > 0:
            self.extend(n)

    @property
    def N(self) -> int:
        return self._lam.shape[0] - 1

    @property
    def lam(self) -> np.ndarray:
        return self._lam

    def extend(self, n: int) -> np.ndarray:
        """Ensure entries up to ``lambda_n`` exist; returns the (read-only) prefix."""
        if n < 0:
            raise ValueError("truncation order must be >= 0")
        with self._lock:
            if n > self.N:
                lam = _kernels.exp_series_extend(self._ka, self._lam, n)
                lam.flags.writeable = False
                self._lam = lam
            return self._lam

    def __getitem__(self, n: int) -> complex:
        return complex(self.extend(n)[n])

    def __len__(self):
        return self.N + 1


def exp_series(P0: Potential, N: int) -> ExpSeries:
    if N < 0:
        raise ValueError("truncation order must be >= 0")
    return ExpSeries(P0, N)


@dataclass(frozen=True)
class NormalizedDFE:
    """Canonical form of ``s f(s) = sum alpha_k f(s+k)``.

    ``f`` solves the raw equation iff ``h(s) = scale**(-s) f(s)`` solves the
    canonical equation attached to ``potential``.
    """

    potential: Potential
    scale: complex = 1.0

    @property
    def canonical_alpha(self) -> np.ndarray:
        return self.potential.alpha


def normalize_dfe(alpha) -> NormalizedDFE:
    """Rescale ``s f(s) = sum_{k=1}^d alpha_k f(s+k)`` to leading coefficient 1.

    ``alpha`` lists ``alpha_1 .. alpha_d``.  With ``c = alpha_d**(-1/d)``
    (principal root) the substitution ``f(s) = c**s h(s)`` gives the canonical
    equation with coefficients ``alpha_k c**k``.
    """
    al = [complex(x) for x in alpha]
    d = len(al)
    if d == 0:
        raise InputError("need at least one coefficient")
    if al[-1] == 0:
        raise InputError("leading coefficient alpha_d must be nonzero")
    c = cmath.exp(-cmath.log(al[-1]) / d)
    a = tuple(-(al[l - 1] * c**l) / l for l in range(1, d))
    return NormalizedDFE(Potential(d, a), c)


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------

_COMPLEX_RE = re.compile(
    r"""^\s*(
        [+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?                     # re
        ([+-](\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?i)?                  # [+-im i]
      | [+-]?(\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?i                    # im i
    )\s*$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re+imi``, ``re-imi``, ``imi`` or ``i``."""
    s = str(text).strip()
    if not _COMPLEX_RE.match(s):
        raise InputError(f"not a complex literal: {text!r}")
    s = s.replace(" ", "")
    if s.endswith("i"):
        head = s[:-1]
        if head == "" or head[-1] in "+-":
            head += "1"
        s = head + "j"
    try:
        z = complex(s)
    except ValueError as exc:
        raise InputError(f"not a complex literal: {text!r}") from exc
    if not cmath.isfinite(z):
        raise InputError(f"complex literal must be finite: {text!r}")
    return z


def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    sign = "+" if z.imag >= 0 or math.isnan(z.imag) else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_potential(text: str) -> Potential:
    """Parse ``d=<int>;a1=<cplx>;a2=<cplx>;...`` (omitted ``a_k`` are 0)."""
    fields = {}
    for chunk in str(text).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, sep, value = chunk.partition("=")
        key = key.strip()
        if not sep or key in fields:
            raise InputError(f"bad potential field {chunk!r}")
        fields[key] = value.strip()
    if "d" not in fields:
        raise InputError("potential needs a degree field 'd=<int>'")
    try:
        d = int(fields.pop("d"))
    except ValueError as exc:
        raise InputError("degree must be an integer") from exc
    if d < 1:
        raise InputError("degree must be >= 1")
    a = [0j] * (d - 1)
    for key, value in fields.items():
        m = re.fullmatch(r"a(\d+)", key)
        if not m:
            raise InputError(f"unknown potential field {key!r}")
        idx = int(m.group(1))
        if not 1 <= idx <= d - 1:
            raise InputError(f"coefficient {key} out of range for d={d}")
        a[idx - 1] = parse_complex(value)
    return Potential(d, tuple(a))
