"""Invariant suites shared by ``omega selftest`` and the acceptance tests.

Every check returns a :class:`CheckResult`; ``scale`` shrinks sample counts
(1.0 is the full acceptance size).  Random draws use fixed seeds.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .algebra import Poly, Potential, normalize_dfe
from .basis import (
    common_zero_gap,
    delta,
    delta_closed_monomial,
    eval_solution,
    omega_matrix,
    solve_samples,
    SolutionSpec,
)
from .gamma_ref import gamma_complex
from .omega import OmegaEvaluator
from .quadrature import QuadConfig
from .reduction import eval_ray_limit, eval_reduction, reduce_mixed

__all__ = ["CheckResult", "CHECKS", "run_all"]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    metric: float
    threshold: float
    seconds: float = 0.0
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.metric = float(self.metric)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"CRITERION {self.number} {status}: {self.name} "
            f"(worst {self.metric:.3g}, limit {self.threshold:.3g}, {self.seconds:.2f}s)"
        )


def _count(n: int, scale: float) -> int:
    return max(1, int(round(n * scale)))


def _random_potential(rng, d: int, amax: float = 0.5, real: bool = False) -> Potential:
    r = rng.uniform(0, amax, d - 1)
    if real:
        return Potential(d, tuple(r * rng.choice([-1.0, 1.0], d - 1)))
    ph = rng.uniform(0, 2 * math.pi, d - 1)
    return Potential(d, tuple(r * np.exp(1j * ph)))


def _off_pole(s: complex, gap: float) -> bool:
    n = round(s.real)
    return n > 0 or abs(s - n) >= gap


def _random_s(rng, re, im, gap=1e-6) -> complex:
    while True:
        s = complex(rng.uniform(*re), rng.uniform(*im))
        if _off_pole(s, gap):
            return s


def _gamma_entry(d: int, k: int, x: complex) -> complex:
    # Omega_k(x) for P0 = -t^d/d via Gamma
    return cmath.exp(2j * math.pi * k * x / d) * d ** (x / d - 1) * gamma_complex(x / d)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def check_gamma_regression(scale: float = 1.0) -> CheckResult:
    """Omega for ``d = 1`` against the Lanczos Gamma on a grid of the strip."""
    ev = OmegaEvaluator(Potential(1))
    step_re = 0.25 if scale >= 1 else 0.75
    step_im = 1.0 if scale >= 1 else 2.5
    res = np.arange(-4.5, 8.0 + 1e-9, step_re)
    ims = np.arange(-10.0, 10.0 + 1e-9, step_im)
    t0 = time.perf_counter()
    worst, n = 0.0, 0
    for x in res:
        for y in ims:
            s = complex(x, y)
            if not _off_pole(s, 0.05):
                continue
            g = gamma_complex(s)
            v = ev.omega_value(0, s)
            worst = max(worst, abs(v - g) / abs(g))
            n += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 10.0
    return CheckResult(1, f"Gamma regression on {n} points", ok, worst, 1e-9, dt)


def check_functional_equation(scale: float = 1.0) -> CheckResult:
    rng = np.random.default_rng(20240101)
    t0 = time.perf_counter()
    worst = 0.0
    per_d = _count(200, scale)
    for d in (1, 2, 3):
        for i in range(per_d):
            if i % 20 == 0:
                ev = OmegaEvaluator(_random_potential(rng, d))
            s = _random_s(rng, (-3, 6), (-5, 5))
            k = int(rng.integers(d))
            worst = max(worst, ev.functional_residual(k, s))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 60.0
    return CheckResult(2, f"functional equation, {3 * per_d} points", ok, worst, 1e-8, dt)


def _numeric_residue(ev: OmegaEvaluator, k: int, n: int, h: float = 1e-4) -> complex:
    r1 = h * ev.omega_value(k, -n + h)
    r2 = (h / 2) * ev.omega_value(k, -n + h / 2)
    return 2 * r2 - r1


def check_residues(scale: float = 1.0) -> CheckResult:
    rng = np.random.default_rng(7)
    pots = [Potential(1), Potential(2), Potential(4, (0, 0.3)), _random_potential(rng, 3)]
    if scale >= 1:
        pots.append(_random_potential(rng, 2))
    t0 = time.perf_counter()
    worst = 0.0
    notes = []
    ok = True
    for P in pots:
        ev = OmegaEvaluator(P)
        for n in range(11):
            lam = ev.residue(n)
            ests = [_numeric_residue(ev, k, n) for k in range(P.d)]
            for est in ests:
                worst = max(worst, abs(est - lam) / (1 + abs(lam)))
            spread = max(abs(e - ests[0]) for e in ests) / (1 + abs(lam))
            worst = max(worst, spread)
    # closed form for d = 1 and the forced zeros of even potentials
    ev1 = OmegaEvaluator(Potential(1))
    for n in range(11):
        exact = (-1) ** n / math.factorial(n)
        if abs(ev1.residue(n) - exact) > 1e-15 * max(1, abs(exact)):
            ok = False
            notes.append(f"d=1 lambda_{n} != (-1)^n/n!")
    for P, period in ((Potential(2), 2), (Potential(4, (0, 0.3)), 2), (Potential(3), 3)):
        ev = OmegaEvaluator(P)
        for n in range(11):
            if n % period and ev.residue(n) != 0:
                ok = False
                notes.append(f"{P}: lambda_{n} should vanish")
    dt = time.perf_counter() - t0
    ok = ok and worst <= 1e-5
    return CheckResult(3, "residues equal lambda_n on every ray", ok, worst, 1e-5, dt, notes)


def check_mittag_leffler(scale: float = 1.0) -> CheckResult:
    rng = np.random.default_rng(11)
    cfg = QuadConfig()
    t0 = time.perf_counter()
    worst = 0.0
    pots = [Potential(1), Potential(2), _random_potential(rng, 2), _random_potential(rng, 3)]
    for P in pots:
        ev = OmegaEvaluator(P, cfg)
        for _ in range(_count(50, scale)):
            s = _random_s(rng, (-3, 6), (-5, 5))
            k = int(rng.integers(P.d))
            o = ev.omega_value(k, s)
            m = ev.mittag_leffler(k, s)
            worst = max(worst, abs(m - o) / max(1.0, abs(o)))
    dt = time.perf_counter() - t0
    return CheckResult(4, "Mittag-Leffler form matches omega", worst <= 2 * cfg.tol, worst, 2 * cfg.tol, dt)


def check_determinant(scale: float = 1.0) -> CheckResult:
    t0 = time.perf_counter()
    worst = 0.0
    notes = []
    ok = True
    for d in range(1, 5):
        ev = OmegaEvaluator(Potential(d))
        for s0 in (0.3, 1, 2, 1 + 2j):
            rep = delta(ev, s0)
            worst = max(worst, abs(rep.value - rep.closed_form_monomial) / abs(rep.value))
            # independent oracle: determinant of the Gamma-based matrix
            g = np.array([[_gamma_entry(d, k, s0 + l + 1) for l in range(d)] for k in range(d)])
            worst = max(worst, abs(np.linalg.det(g) - rep.closed_form_monomial) / abs(rep.value))
            ratio = rep.printed_ratio
            if d == 1 and abs(ratio - 1) > 1e-12:
                ok = False
                notes.append(f"d=1 printed constant differs at s0={s0}")
            if d == 2 and abs(ratio - 2) > 1e-12:
                ok = False
                notes.append(f"d=2 ratio {ratio} instead of 2 at s0={s0}")
            if abs(abs(ratio) - d ** (d / 2)) > 1e-10 * d ** (d / 2):
                ok = False
                notes.append(f"|ratio| != d^(d/2) at d={d}, s0={s0}")
    ev2 = OmegaEvaluator(Potential(2))
    gauss = 1.0 * (-math.sqrt(math.pi / 2)) - math.sqrt(math.pi / 2) * 1.0
    rep = delta(ev2, 1)
    if abs(rep.value - gauss) > 1e-9 or abs(rep.printed_formula_value + math.sqrt(8 * math.pi)) > 1e-9:
        ok = False
        notes.append("d=2, s0=1 values differ from -sqrt(2 pi) / -sqrt(8 pi)")
    notes.append(f"d=2, s0=1: computed {rep.value.real:.10f}, printed constant {rep.printed_formula_value.real:.10f}")
    dt = time.perf_counter() - t0
    return CheckResult(5, "determinant closed form (a = 0)", ok and worst <= 1e-8, worst, 1e-8, dt, notes)


def check_nonvanishing(scale: float = 1.0) -> CheckResult:
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    worst = math.inf
    notes = []
    fails = 0
    for _ in range(_count(100, scale)):
        d = int(rng.integers(1, 5))
        ev = OmegaEvaluator(_random_potential(rng, d))
        while True:
            s0 = complex(rng.uniform(-2.5, 3), rng.uniform(-1, 1))
            if all(_off_pole(s0 + l, 0.05) for l in range(1, d + 1)):
                break
        m = omega_matrix(ev, s0).entries
        rep = delta(ev, s0)
        margin = abs(rep.value) / np.max(np.abs(m)) ** d
        worst = min(worst, margin / 1e-10)
        if margin <= 1e-10 or rep.smallest_singular_value <= 1e-10 * rep.norm:
            fails += 1
    # no common zero: random d = 3 potential, gap relative to the monomial scale
    ev = OmegaEvaluator(_random_potential(rng, 3))
    mono = OmegaEvaluator(Potential(3))
    for _ in range(_count(50, scale)):
        s = _random_s(rng, (-2.5, 4), (-3, 3), gap=0.05)
        local = common_zero_gap(mono, s)
        gap = common_zero_gap(ev, s)
        worst = min(worst, gap / (1e-10 * local))
        if gap <= 1e-10 * local:
            fails += 1
    notes.append(f"{fails} failures")
    dt = time.perf_counter() - t0
    # metric: smallest margin over the threshold (must exceed 1)
    return CheckResult(6, "determinant and common-zero sweeps", fails == 0, worst, 1.0, dt, notes)


def _random_q(rng, max_deg: int = 6, groups: int = 3) -> np.ndarray:
    deg = int(rng.integers(0, max_deg + 1))
    q = rng.normal(size=(deg + 1, groups)) + 1j * rng.normal(size=(deg + 1, groups))
    # drop whole groups at random so single-group cases occur too
    mask = rng.random(groups) < 0.7
    if not mask.any():
        mask[int(rng.integers(groups))] = True
    return q * mask[None, :]


def check_reduction(scale: float = 1.0) -> CheckResult:
    rng = np.random.default_rng(13)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(_count(50, scale)):
        d = int(rng.integers(1, 5))
        ev = OmegaEvaluator(_random_potential(rng, d))
        Q = _random_q(rng)
        s = complex(rng.uniform(0.5, 3), rng.uniform(-1, 1))
        r, ph = rng.uniform(0.2, 2), rng.uniform(-math.pi, math.pi)
        z = r * cmath.exp(1j * ph)
        reds = reduce_mixed(ev.potential, Q)
        value = sum(eval_reduction(red, ev, s, z) for red in reds)
        lhs = sum(ev.incomplete_quad(m * s + 1, z, Poly(Q[:, m])) for m in range(Q.shape[1]) if Q[:, m].any())
        worst = max(worst, abs(value - lhs) / (1 + abs(lhs)))
        k = int(rng.integers(d))
        for red in reds:
            if red.sigma_shift > 1:
                continue
            m = red.sigma_shift
            lim = eval_ray_limit(red, ev, k, s)
            direct = ev.omega_quad(k, m * s + 1, Poly(Q[:, m]))
            worst = max(worst, abs(lim - direct) / (1 + abs(direct)))
    dt = time.perf_counter() - t0
    return CheckResult(7, "reduction against direct quadrature", worst <= 1e-7, worst, 1e-7, dt)


def check_solver(scale: float = 1.0) -> CheckResult:
    rng = np.random.default_rng(17)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(_count(20, scale)):
        d = int(rng.integers(1, 5))
        if i % 2:
            # non-normalised equation: random alpha, solved through its canonical form
            alpha = list(rng.normal(size=d) * 0.4 + 1j * rng.normal(size=d) * 0.4)
            alpha[-1] = complex(rng.uniform(0.5, 2), rng.uniform(-0.5, 0.5))
            norm = normalize_dfe(alpha)
            ev, scl = OmegaEvaluator(norm.potential), norm.scale
        else:
            ev, scl = OmegaEvaluator(_random_potential(rng, d)), 1.0
        c_true = rng.normal(size=d) + 1j * rng.normal(size=d)
        truth = SolutionSpec(tuple(c_true), scl)
        s0 = complex(rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 0.5))
        v = [eval_solution(truth, ev, s0 + l + 1) for l in range(d)]
        sol = solve_samples(ev, s0, v, scale=scl)
        worst = max(worst, float(np.max(np.abs(np.array(sol.c) - c_true)) / np.max(np.abs(c_true))))
        for _ in range(3):
            s = _random_s(rng, (-2.5, 4), (-2, 2), gap=0.05)
            a, b = eval_solution(sol, ev, s), eval_solution(truth, ev, s)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    dt = time.perf_counter() - t0
    return CheckResult(8, "solver roundtrip", worst <= 1e-6, worst, 1e-6, dt)


def check_symmetry_growth(scale: float = 1.0) -> CheckResult:
    rng = np.random.default_rng(19)
    t0 = time.perf_counter()
    worst = 0.0
    notes = []
    growth_ok = True
    for d in (2, 3):
        P = _random_potential(rng, d, real=True)
        ev = OmegaEvaluator(P)
        for _ in range(_count(20, scale)):
            s = _random_s(rng, (-2.5, 4), (-3, 3), gap=0.05)
            for k in range(d):
                kk = (d - k) % d
                lhs = ev.omega_value(k, s.conjugate()).conjugate()
                rhs = ev.omega_value(kk, s)
                if k:
                    rhs *= cmath.exp(-2j * math.pi * s)
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        # literal form at integer points
        for n in range(1, 5):
            for k in range(d):
                lhs = ev.omega_value(k, n).conjugate()
                rhs = ev.omega_value((d - k) % d, n)
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        # growth along vertical lines
        for sigma in np.linspace(1, d, 3):
            for k in range(d):
                base = abs(ev.omega_value(k, sigma))
                for tau in np.linspace(0, 20, _count(21, scale) + 1):
                    r = abs(ev.omega_value(k, complex(sigma, tau))) * math.exp(2 * math.pi * k * tau / d)
                    if r > 10 * base:
                        growth_ok = False
                        notes.append(f"growth d={d} k={k} sigma={sigma} tau={tau}: {r / base:.3g}x")
        # e^{2 pi i s} Omega_0 also solves the equation
        alpha = P.alpha
        for _ in range(5):
            s = _random_s(rng, (0.2, 4), (-3, 3))
            g = lambda x: cmath.exp(2j * math.pi * x) * ev.omega_value(0, x)  # noqa: E731
            lhs = g(s + d) + sum(alpha[l] * g(s + l) for l in range(1, d))
            rhs = s * g(s)
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
    dt = time.perf_counter() - t0
    return CheckResult(9, "conjugation symmetry and growth", growth_ok and worst <= 1e-9, worst, 1e-9, dt, notes)


CHECKS: List[Callable[[float], CheckResult]] = [
    check_gamma_regression,
    check_functional_equation,
    check_residues,
    check_mittag_leffler,
    check_determinant,
    check_nonvanishing,
    check_reduction,
    check_solver,
    check_symmetry_growth,
]


def run_all(scale: float = 1.0) -> List[CheckResult]:
    return [check(scale) for check in CHECKS]
