"""Reference complex Gamma function (Lanczos approximation with reflection)."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

__all__ = ["GammaValue", "gamma", "gamma_complex"]

# Lanczos g = 7, n = 9 coefficient set (P. Godfrey's table, as reproduced in
# Numerical Recipes 3rd ed. and most open-source complex gamma routines).
# Relative accuracy ~1e-15 in the right half plane.
_G = 7.0
_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
POLE_TOL = 1e-8


@dataclass(frozen=True)
class GammaValue:
    """Either a finite ``value`` or ``at_pole = n`` for the pole at ``-n``."""

    value: Optional[complex] = None
    at_pole: Optional[int] = None

    def __post_init__(self):
        if (self.value is None) == (self.at_pole is None):
            raise ValueError("exactly one of value / at_pole must be set")


def _lanczos(z: complex) -> complex:
    # Gamma(z) for Re z >= 1/2
    z = z - 1.0
    x = _P[0]
    for i in range(1, len(_P)):
        x += _P[i] / (z + i)
    t = z + _G + 0.5
    return cmath.exp(_LOG_SQRT_2PI + (z + 0.5) * cmath.log(t) - t) * x


def _sin_pi(z: complex) -> complex:
    # sin(pi z) with the integer part removed exactly first
    n = round(z.real)
    r = complex(z.real - n, z.imag)
    v = cmath.sin(math.pi * r)
    return -v if n % 2 else v


def gamma_complex(s: complex) -> complex:
    """Gamma(s) as a plain complex number; raises ``ZeroDivisionError`` at poles."""
    s = complex(s)
    if s.real < 0.5:
        sp = _sin_pi(s)
        if sp == 0:
            raise ZeroDivisionError(f"Gamma has a pole at {s}")
        return math.pi / (sp * _lanczos(1.0 - s))
    return _lanczos(s)


def gamma(s: complex) -> GammaValue:
    s = complex(s)
    if s.real < 0.5:
        n = -round(s.real)
        if n >= 0 and abs(s + n) < POLE_TOL:
            return GammaValue(at_pole=int(n))
    return GammaValue(value=gamma_complex(s))
