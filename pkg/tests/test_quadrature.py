import cmath
import math

import numpy as np
import pytest
from scipy.special import erfc, gammaincc, gamma as sp_gamma

from omegafn.algebra import Poly, Potential
from omegafn.errors import ToleranceError
from omegafn.quadrature import (
    QuadConfig,
    expperiod_arc,
    expperiod_origin,
    expperiod_ray,
    integrate_ray,
    integrate_segment,
    tail_bound,
    truncation_radius,
)

CFG = QuadConfig()


def test_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(tol=0)
    with pytest.raises(ValueError):
        QuadConfig(max_depth=0)
    assert QuadConfig(tol=1e-6).quad_tol == 1e-15


@pytest.mark.parametrize(
    "f,a,b,expected",
    [
        (lambda t: t, 0, 1, 0.5),
        (np.exp, 0, 1, math.e - 1),
        (np.exp, 0, 1j, cmath.exp(1j) - 1),
        (lambda t: 1 / (1 + t * t), -5, 5, 2 * math.atan(5)),
    ],
)
def test_segment(f, a, b, expected):
    v, err = integrate_segment(f, a, b)
    assert abs(v - expected) <= 1e-12 * max(1, abs(expected))


def test_segment_additivity():
    f = lambda t: np.exp(-t * t) * np.cos(3 * t)
    ab, _ = integrate_segment(f, 0, 1 + 1j)
    bc, _ = integrate_segment(f, 1 + 1j, 2)
    ac, _ = integrate_segment(f, 0, 2)
    assert abs(ab + bc - ac) < 1e-12


def test_segment_reports_failure():
    with pytest.raises(ToleranceError) as info:
        integrate_segment(lambda t: np.abs(np.sin(1000 * t.real)) ** 0.1 * 0 + 1 / np.sqrt(np.abs(t.real - 0.3) + 1e-300),
                          0, 1, QuadConfig(max_depth=3))
    assert info.value.value is not None


def test_truncation_radius_examples():
    R1 = truncation_radius(Potential(1), 0, 1.0, 1e-16)
    assert R1 == pytest.approx(16 * math.log(10), rel=1e-9)
    R2 = truncation_radius(Potential(2), 0, 1.0, 1e-16)
    # exact tail of the comparison integrand at the returned radius
    assert math.sqrt(math.pi) * erfc(R2 / 2) <= 1e-16
    assert 11 < R2 < 12.5


def test_truncation_radius_monotone():
    P = Potential(3, (0.4, -0.3j))
    radii = [truncation_radius(P, 1, 2.5, eps) for eps in (1e-4, 1e-8, 1e-12, 1e-16)]
    assert radii == sorted(radii)


@pytest.mark.parametrize("d,sigma", [(1, 0.5), (1, 3.0), (2, 1.0), (3, 4.5), (4, 0.2)])
def test_tail_bound_dominates_exact_tail(d, sigma):
    # monomial comparison integral: int_R^inf u^(sigma-1) exp(-theta u^d/d) du
    theta = 1.0 if d == 1 else 0.5
    P = Potential(d)
    for R in (2.0, 5.0, 9.0):
        a, x = sigma / d, theta * R**d / d
        exact = (1 / d) * (d / theta) ** a * gammaincc(a, x) * sp_gamma(a)
        bound = tail_bound(P, sigma, R)
        assert bound >= exact * (1 - 1e-12)


def test_truncation_soundness_random(rng):
    for _ in range(10):
        d = int(rng.integers(1, 5))
        P = Potential(d, tuple(rng.uniform(-0.5, 0.5, d - 1) + 1j * rng.uniform(-0.5, 0.5, d - 1)))
        k = int(rng.integers(d))
        sigma = rng.uniform(0.2, 4)
        eps = 1e-8
        R = truncation_radius(P, k, sigma, eps)
        w = P.omega_k(k)
        f = lambda u: u ** (sigma - 1) * np.abs(np.exp(P(w * u)))
        piece, _ = integrate_segment(f, R, 2 * R)
        assert abs(piece) <= 2 * eps


def test_integrate_ray_examples():
    P1, P2 = Potential(1), Potential(2)
    # default truncation eps is tol/10, so agreement is at the tol level
    v, _ = integrate_ray(lambda u: u * np.exp(-u), 0, P1, 2.0)
    assert abs(v - 2 / math.e) <= CFG.tol
    g = lambda u: np.exp(-u * u / 2)
    v, _ = integrate_ray(g, 0, P2, 1.0)
    assert abs(v - math.sqrt(math.pi / 2) * erfc(1 / math.sqrt(2))) <= CFG.tol
    v2, _ = integrate_ray(lambda u: 2 * g(u), 0, P2, 1.0)
    assert abs(v2 - 2 * v) < 1e-13


def test_fast_paths_match_generic():
    P = Potential(3, (0.3 + 0.2j, -0.1))
    s = 1.7 - 0.4j
    for k in range(3):
        w = P.omega_k(k)
        fast, _ = expperiod_ray(P, k, s, CFG)
        slow, _ = integrate_ray(lambda u: u ** (s - 1) * np.exp(P(w * u)), k, P, s.real, CFG, eps=1e-14)
        assert abs(fast - slow) < 1e-12
    arc, _ = expperiod_arc(P, 2, s, CFG)
    th = 4 * math.pi / 3
    slow, _ = integrate_segment(lambda x: 1j * np.exp(1j * s * x.real) * np.exp(P(np.exp(1j * x.real))), 0, th)
    assert abs(arc - slow) < 1e-12
    W = Poly([1, -2, 0.5j])
    org, _ = expperiod_origin(P, s, 1 + 1j, CFG, W)
    # independent: straight segment with a small cut-out handled by the series of t^(s-1)
    ref, _ = integrate_segment(lambda t: t ** (s - 1) * W(t) * np.exp(P(t)), 1e-9 * (1 + 1j), 1 + 1j)
    assert abs(org - ref) < 1e-8
