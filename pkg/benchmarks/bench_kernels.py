"""Compare the numba kernels with the numpy fallback.

Each mode runs in its own interpreter because the switch is read at import
time.  Usage: ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import numpy as np
from omegafn import HAVE_NUMBA, OmegaEvaluator, Potential
from omegafn import _kernels

def best(fn, repeat):
    fn()  # warm-up (includes JIT compilation for numba)
    times = []
    for _ in range(repeat):
        t = time.perf_counter(); fn(); times.append(time.perf_counter() - t)
    return min(times)

repeat = {repeat}
P = Potential(3, (0.3 - 0.2j, 0.1))
ev = OmegaEvaluator(P)
x = np.linspace(0.01, 5, 4096)
lam = ev.series.extend(400)
grid = [complex(a, b) for a in np.linspace(-3.7, 6, 25) for b in np.linspace(-5, 5, 9)]

res = {{
    "numba": HAVE_NUMBA,
    "integrand_4096": best(lambda: _kernels.values(0, x, 1.5 + 2j, P.coeffs, np.ones(1, complex), P.omega_k(1), 1.0), repeat),
    "series_400": best(lambda: _kernels.series_sum(lam, 0.5 + 1j, 1.3 + 0j, 1e-17, 10), repeat),
    "exp_series_2000": best(lambda: _kernels.exp_series_extend(np.arange(4) * P.coeffs, np.ones(1, complex), 2000), repeat),
    "omega_grid_225": best(lambda: [ev.omega(1, s) for s in grid], max(1, repeat // 5)),
}}
print(json.dumps(res))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, OMEGAFN_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run(
        [sys.executable, "-c", WORKLOAD.format(repeat=repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=10)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    if not fast["numba"]:
        print("numba is not installed; both columns use the numpy kernels")
    print(f"{'kernel':<18}{'numba [ms]':>12}{'numpy [ms]':>12}{'speed-up':>10}")
    for key in fast:
        if key == "numba":
            continue
        a, b = fast[key] * 1e3, slow[key] * 1e3
        print(f"{key:<18}{a:>12.3f}{b:>12.3f}{b / a:>10.1f}")


if __name__ == "__main__":
    main()
