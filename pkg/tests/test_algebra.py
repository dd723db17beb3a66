import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omegafn.algebra import (
    ExpSeries,
    Poly,
    Potential,
    exp_series,
    format_complex,
    normalize_dfe,
    parse_complex,
    parse_potential,
    poly_derive,
    poly_divmod,
)
from omegafn.errors import InputError

# quantised so leading coefficients never sit near the underflow range
part = st.integers(-1000, 1000).map(lambda n: n / 100)
coef = st.builds(complex, part, part)
polys = st.lists(coef, min_size=0, max_size=7).map(Poly)


def test_poly_basics():
    p = Poly([1, 2, 0, 0])
    assert p.deg == 1 and p(2) == 5
    assert Poly([]).deg == -1 and Poly([0, 0]).is_zero()
    assert poly_derive(Poly([3, 1, 4])) == Poly([1, 8])
    with pytest.raises(ZeroDivisionError):
        poly_divmod(p, Poly([]))


@settings(max_examples=60, deadline=None)
@given(polys, polys.filter(lambda p: not p.is_zero()))
def test_divmod_identity(a, b):
    q, r = poly_divmod(a, b)
    assert r.deg < b.deg
    back = q * b + r
    n = max(a.coeffs.size, back.coeffs.size)
    lhs = np.pad(a.coeffs, (0, n - a.coeffs.size))
    rhs = np.pad(back.coeffs, (0, n - back.coeffs.size))
    scale = 1 + np.max(np.abs(a.coeffs), initial=0) * (1 + np.max(np.abs(q.coeffs), initial=0))
    assert np.allclose(lhs, rhs, atol=1e-9 * scale)


def test_potential_fields():
    P = Potential(3, (0.5, -0.25j))
    assert P.coeffs.tolist() == [0, 0.5, -0.25j, -1 / 3]
    assert np.allclose(P.alpha[1:], [-0.5, 0.5j, 1])
    assert cmath.isclose(P.omega, cmath.exp(2j * math.pi / 3))
    assert P.omega_k(3) == P.omega_k(0) == 1
    assert not P.is_real and Potential(2).is_monomial
    with pytest.raises(InputError):
        Potential(0)
    with pytest.raises(InputError):
        Potential(2, (1, 2))


def test_exp_series_known():
    lam = exp_series(Potential(1), 10).lam
    assert np.allclose(lam, [(-1) ** n / math.factorial(n) for n in range(11)], rtol=1e-15, atol=0)
    lam2 = exp_series(Potential(2), 6).lam
    assert np.allclose(lam2, [1, 0, -0.5, 0, 0.125, 0, -1 / 48], rtol=1e-15, atol=0)


def test_exp_series_against_mpmath_taylor():
    P = Potential(4, (0.3 - 0.1j, 0.2j, -0.4))
    ref = mpmath.taylor(lambda t: mpmath.exp(sum(complex(c) * t**i for i, c in enumerate(P.coeffs))), 0, 25)
    got = exp_series(P, 25).lam
    assert np.allclose(got, [complex(x) for x in ref], rtol=1e-12, atol=1e-14)


def test_exp_series_cache_is_append_only():
    s = ExpSeries(Potential(3, (0.1, 0.2)), 5)
    first = s.lam
    s.extend(40)
    assert np.array_equal(s.lam[:6], first)
    assert not s.lam.flags.writeable
    assert s[3] == first[3] and len(s) == 41


def test_normalize_dfe():
    alpha = [0.5 + 0.1j, -0.3, 4.0]
    norm = normalize_dfe(alpha)
    c = norm.scale
    assert cmath.isclose(c, 4 ** (-1 / 3))
    assert np.allclose(norm.canonical_alpha[1:], [a * c ** (k + 1) for k, a in enumerate(alpha)])
    with pytest.raises(InputError):
        normalize_dfe([1, 0])


@pytest.mark.parametrize(
    "text,value",
    [("1", 1), ("-2.5", -2.5), ("1+2i", 1 + 2j), ("0.5-0.25i", 0.5 - 0.25j), ("3i", 3j), ("-i", -1j), ("1e-3+1e2i", 1e-3 + 100j)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("bad", ["", "1+", "abc", "1j", "nan", "1+2i+3"])
def test_parse_complex_rejects(bad):
    with pytest.raises(InputError):
        parse_complex(bad)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_format_roundtrip(z):
    assert parse_complex(format_complex(z)) == z


def test_parse_potential():
    P = parse_potential("d=3;a1=0.5-0.25i")
    assert P == Potential(3, (0.5 - 0.25j, 0))
    assert parse_potential(str(P)) == P
    for bad in ["a1=1", "d=2;a2=1", "d=2;b1=1", "d=0", "d=2;a1=1;a1=2", "d=x"]:
        with pytest.raises(InputError):
            parse_potential(bad)
