import cmath
import math
import threading

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omegafn import OmegaEvaluator, PoleError, PoleInfo, Poly, Potential, QuadConfig
from omegafn.gamma_ref import gamma_complex

SQ = math.sqrt(math.pi / 2)


def mp_omega(P, k, s):
    """Ray integral in extended precision; independent of every package routine."""
    mpmath.mp.dps = 30
    w = mpmath.exp(2j * mpmath.pi * k / P.d)
    c = [mpmath.mpc(x) for x in P.coeffs]
    f = lambda u: u ** (s - 1) * mpmath.exp(sum(ci * (w * u) ** i for i, ci in enumerate(c)))
    return complex(mpmath.exp(2j * mpmath.pi * k * s / P.d) * mpmath.quad(f, [0, 1, 4, mpmath.inf]))


def test_examples(ev1, ev2):
    assert ev1.omega(0, 1) == pytest.approx(1, rel=1e-13)
    assert ev2.omega(0, 1) == pytest.approx(SQ, rel=1e-13)
    assert ev2.omega(1, 3) == pytest.approx(-SQ, rel=1e-13)
    assert ev1.omega(0, -0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-12)


def test_pole_reports(ev2):
    assert ev2.omega(0, 0) == PoleInfo(0, 1)
    info = ev2.omega(0, -2 + 1e-10j)
    assert info.n == 2 and info.residue == -0.5
    with pytest.raises(PoleError) as exc:
        ev2.omega_value(1, -4)
    assert exc.value.n == 4
    assert ev2.residue(1) == 0 and ev2.residue(0) == 1
    assert OmegaEvaluator(Potential(1)).residue(3) == pytest.approx(-1 / 6)


@pytest.mark.parametrize("s", [0.7 + 0.3j, 2.5 - 1j, -1.4 + 0.8j, -3.2 - 2j])
def test_against_extended_precision(s):
    P = Potential(3, (0.35 - 0.2j, 0.1 + 0.4j))
    ev = OmegaEvaluator(P)
    for k in range(3):
        if s.real > 0:
            ref = mp_omega(P, k, s)
        else:
            # continue the reference itself through the functional equation
            al = P.alpha
            m = math.ceil(-s.real) + 1
            vals = {j: mp_omega(P, k, s + j) for j in range(m, m + 3)}
            for j in range(m - 1, -1, -1):
                vals[j] = (vals[j + 3] + al[1] * vals[j + 1] + al[2] * vals[j + 2]) / (s + j)
            ref = vals[0]
        assert abs(ev.omega(k, s) - ref) <= 1e-10 * abs(ref)


def test_monomial_gamma_formula():
    for d in (2, 3, 4):
        ev = OmegaEvaluator(Potential(d))
        for k in range(d):
            for s in (0.4, 1.7 + 2j, -2.3 + 0.5j):
                ref = cmath.exp(2j * math.pi * k * s / d) * d ** (s / d - 1) * gamma_complex(s / d)
                assert abs(ev.omega(k, s) - ref) <= 1e-10 * abs(ref)


def test_mittag_leffler_examples(ev1, ev2):
    assert ev2.mittag_leffler(0, 1) == pytest.approx(SQ, rel=1e-12)
    assert ev1.mittag_leffler(0, 2) == pytest.approx(1, rel=1e-12)
    assert ev1.mittag_leffler(0, -0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-12)
    assert ev1.mittag_leffler(0, 2.5, N=60) == pytest.approx(ev1.omega(0, 2.5), rel=1e-12)
    with pytest.raises(PoleError):
        ev1.mittag_leffler(0, -3)


def test_omega_diff(ev2):
    assert ev2.omega_diff(1, 0, 1) == pytest.approx(-math.sqrt(2 * math.pi), rel=1e-12)
    assert abs(ev2.omega_diff(1, 0, 2)) < 1e-12
    v = ev2.omega_diff(1, 0, -2)
    assert cmath.isfinite(v)
    # continuity across the pole: the entire difference is smooth there
    h = 1e-5
    assert abs(ev2.omega_diff(1, 0, -2 + h) - v) < 1e-3
    with pytest.raises(ValueError):
        ev2.omega_diff(0, 0, 1)


def test_omega_diff_matches_values_off_poles():
    ev = OmegaEvaluator(Potential(3, (0.2, -0.3j)))
    for s in (1.3 + 0.2j, -0.6 + 1j):
        assert abs(ev.omega_diff(2, 1, s) - (ev.omega(2, s) - ev.omega(1, s))) < 1e-10 * max(1, abs(ev.omega(1, s)))


def test_incomplete_examples(ev1, ev2):
    assert ev1.incomplete(1, 1) == pytest.approx(1 - 1 / math.e, rel=1e-14)
    assert ev2.incomplete(2, 2) == pytest.approx(1 - math.exp(-2), rel=1e-14)
    assert abs(ev2.incomplete(2, 1 + 1j) - ev2.incomplete_quad(2, 1 + 1j)) < 1e-9
    assert ev1.incomplete_quad(1, 1) == pytest.approx(1 - 1 / math.e, rel=1e-12)
    with pytest.raises(ValueError):
        ev1.incomplete(-1, 1)
    with pytest.raises(ValueError):
        ev1.incomplete_quad(0.05, 1)


def test_incomplete_limit_along_ray():
    from omegafn.quadrature import truncation_radius

    P = Potential(3, (0.2, 0.1j))
    ev = OmegaEvaluator(P)
    for k in range(3):
        R = truncation_radius(P, k, 1.0, 1e-12)
        # principal branch of z^s coincides with the ray branch for k = 0, 1 only
        z = R * P.omega_k(k)
        expected = ev.omega(k, 1.0)
        got = ev.incomplete_quad(1.0, z)
        assert abs(got - expected) <= 2 * QuadConfig().tol * max(1, abs(expected))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 4), st.floats(-3, 3), st.floats(0.2, 1.8), st.floats(-3.1, 3.1))
def test_incomplete_series_vs_quadrature(sr, si, r, th):
    ev = OmegaEvaluator(Potential(3, (0.4 - 0.1j, 0.2)))
    s, z = complex(sr, si), r * cmath.exp(1j * th)
    a, b = ev.incomplete(s, z), ev.incomplete_quad(s, z)
    assert abs(a - b) <= 1e-9 * max(1, abs(a))


def test_functional_residual_examples(ev1, ev2):
    assert ev2.functional_residual(0, 1) <= 1e-9
    assert ev1.functional_residual(0, 5) <= 1e-11
    ev3 = OmegaEvaluator(Potential(3, (0.3 - 0.2j, 0.1)))
    assert ev3.functional_residual(2, 2 + 3j) <= 1e-8


def test_omega_quad_oracle():
    ev = OmegaEvaluator(Potential(3, (0.3, -0.2j)))
    for k in range(3):
        assert abs(ev.omega_quad(k, 1.4 + 0.5j) - ev.omega(k, 1.4 + 0.5j)) < 1e-10


def test_omega_many_order_and_threads():
    ev = OmegaEvaluator(Potential(2, (0.3,)))
    pts = [complex(x, 0.5) for x in np.linspace(-3, 5, 17)]
    serial = ev.omega_many(1, pts)
    parallel = ev.omega_many(1, pts, workers=4)
    assert serial == parallel


def test_shared_series_cache_under_threads():
    ev = OmegaEvaluator(Potential(3, (0.3, 0.2)))
    errors = []

    def work(n):
        try:
            ev.series.extend(n)
            assert ev.series[n // 2] == ev.series.lam[n // 2]
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=work, args=(100 * i,)) for i in range(1, 9)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors and ev.series.N == 800


def test_bad_ray_index(ev2):
    with pytest.raises(ValueError):
        ev2.omega(2, 1)
