"""Omega functions: exponential periods along the decay rays of a polynomial potential."""
from ._accel import HAVE_NUMBA
from .algebra import ExpSeries, Poly, Potential, exp_series, normalize_dfe, parse_complex, parse_potential
from .basis import (
    DetReport,
    OmegaMatrix,
    SolutionSpec,
    common_zero_gap,
    delta,
    delta_closed_monomial,
    eval_solution,
    omega_matrix,
    root_product_vandermonde,
    solve_samples,
)
from .errors import InputError, OmegaError, PoleError, ToleranceError
from .gamma_ref import gamma, gamma_complex
from .omega import OmegaEvaluator, PoleInfo
from .quadrature import QuadConfig, truncation_radius
from .reduction import (
    PeriodReduction,
    eval_ray_limit,
    eval_reduction,
    reduce_mixed,
    reduce_ray_limit,
    reduce_tpoly,
    rewrite_shift,
)

__version__ = "0.1.0"
