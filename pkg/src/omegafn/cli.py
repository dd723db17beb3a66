"""``omega`` command-line front end.

JSON responses go to stdout, diagnostics to stderr.  Exit codes: 0 success,
2 input error, 3 tolerance not met, 4 pole at the requested point.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import os
import re
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from .algebra import Poly, Potential, normalize_dfe, parse_complex, parse_potential
from .errors import InputError, PoleError, ToleranceError
from .omega import OmegaEvaluator, PoleInfo
from .quadrature import QuadConfig

EXIT_OK, EXIT_INPUT, EXIT_TOL, EXIT_POLE = 0, 2, 3, 4
DEFAULT_TOL = 1e-10

_VALUE_FLAGS = {"--s", "--s0", "--z", "--v", "--alpha", "--q"}


def cjson(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _finite(x: float):
    return x if math.isfinite(x) else None


class _Response:
    def __init__(self, command: str):
        self.data = {"command": command, "status": "ok", "values": [], "achieved_error": None,
                     "poles": [], "warnings": []}
        self.code = EXIT_OK

    def fail(self, status: str, code: int, message: str):
        self.data["status"] = status
        self.data["error"] = message
        self.code = code

    def pole(self, info: PoleInfo):
        self.data["poles"].append({"n": info.n, "s": cjson(-info.n), "residue": cjson(info.residue)})
        self.data["status"] = "pole"
        self.code = EXIT_POLE


# ---------------------------------------------------------------------------
# Q expression grammar: polynomial in t and T (T = t^s)
# ---------------------------------------------------------------------------

_IMAG_LIT = re.compile(r"(?<![\w.])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i\b")


def _padd(a: dict, b: dict, sign: float = 1.0) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0j) + sign * v
    return {k: v for k, v in out.items() if v != 0}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i1, m1), v1 in a.items():
        for (i2, m2), v2 in b.items():
            key = (i1 + i2, m1 + m2)
            out[key] = out.get(key, 0j) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def parse_q(text: str) -> dict:
    """Parse ``Q(t, T)`` into ``{(power of t, power of T): coefficient}``.

    Accepts ``+ - *``, ``^`` or ``**`` with non-negative integer exponents,
    parentheses, real literals and imaginary literals such as ``1i``.
    """
    src = _IMAG_LIT.sub(r"\1j", str(text).replace("^", "**"))
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse polynomial {text!r}") from exc

    def ev(node) -> dict:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) \
                and not isinstance(node.value, bool):
            v = complex(node.value)
            return {(0, 0): v} if v != 0 else {}
        if isinstance(node, ast.Name):
            if node.id == "t":
                return {(1, 0): 1 + 0j}
            if node.id == "T":
                return {(0, 1): 1 + 0j}
            if node.id == "i":
                return {(0, 0): 1j}
            raise InputError(f"unknown symbol {node.id!r} (use t and T)")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return {k: -x for k, x in v.items()} if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return _padd(ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Sub):
                return _padd(ev(node.left), ev(node.right), -1.0)
            if isinstance(node.op, ast.Mult):
                return _pmul(ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Pow):
                exp = node.right
                if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int) and 0 <= exp.value <= 64):
                    raise InputError("exponents must be integer literals in 0..64")
                base, out = ev(node.left), {(0, 0): 1 + 0j}
                for _ in range(exp.value):
                    out = _pmul(out, base)
                return out
        raise InputError(f"unsupported syntax in polynomial {text!r}")

    return ev(tree)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _need(args, name: str):
    v = getattr(args, name)
    if v is None:
        raise InputError(f"--{name} is required for '{args.command}'")
    return v


def _cplx(args, name: str) -> complex:
    return parse_complex(_need(args, name))


def _clist(text: str) -> list:
    return [parse_complex(x) for x in text.split(",") if x.strip()]


def _evaluator(args) -> OmegaEvaluator:
    return OmegaEvaluator(parse_potential(_need(args, "pot")), QuadConfig(tol=args.tol))


def _value_into(resp: _Response, value, err: float, tol: float, name: str = "value"):
    if isinstance(value, PoleInfo):
        resp.pole(value)
        return
    resp.data["values"].append({"name": name, **cjson(value)})
    prev = resp.data["achieved_error"] or 0.0
    resp.data["achieved_error"] = _finite(max(prev, err))
    if not err <= tol * max(1.0, abs(value)) and resp.code == EXIT_OK:
        resp.fail("tolerance_unmet", EXIT_TOL, f"error estimate {err:.3g} above requested tolerance")


def cmd_eval(args, resp):
    ev = _evaluator(args)
    value, err = ev.omega_err(args.k, _cplx(args, "s"))
    _value_into(resp, value, err, args.tol)


def cmd_incomplete(args, resp):
    ev = _evaluator(args)
    value, err = ev.incomplete_err(_cplx(args, "s"), _cplx(args, "z"))
    _value_into(resp, value, err, args.tol)


def cmd_residues(args, resp):
    ev = _evaluator(args)
    n = _need(args, "n")
    if n < 0:
        raise InputError("--n must be >= 0")
    for i in range(n + 1):
        resp.data["values"].append({"name": f"lambda_{i}", **cjson(ev.residue(i))})
    resp.data["achieved_error"] = 0.0


def cmd_ml(args, resp):
    ev = _evaluator(args)
    value, err = ev.mittag_leffler_err(args.k, _cplx(args, "s"), args.n)
    _value_into(resp, value, 0.0 if math.isnan(err) else err, args.tol)


def cmd_diff(args, resp):
    ev = _evaluator(args)
    s = _cplx(args, "s")
    if args.l is None:
        raise InputError("--l is required for 'diff'")
    tk, ek = ev.tail_err(args.k, s)
    tl, el = ev.tail_err(args.l, s)
    if args.k == args.l:
        raise InputError("--k and --l must differ")
    _value_into(resp, tk - tl, ek + el, args.tol)


def cmd_det(args, resp):
    from .basis import delta

    ev = _evaluator(args)
    rep = delta(ev, _cplx(args, "s0"))
    resp.data["values"].append({"name": "delta", **cjson(rep.value)})
    if rep.closed_form_monomial is not None:
        resp.data["values"].append({"name": "closed_form_monomial", **cjson(rep.closed_form_monomial)})
        resp.data["values"].append({"name": "printed_constant_formula", **cjson(rep.printed_formula_value)})
        ratio = rep.printed_ratio
        if abs(ratio - 1) > 1e-9:
            resp.data["warnings"].append(
                "closed form (2*pi*d)^(d/2)/sqrt(2*pi)*omega^(d(d-1)s0/2)*Gamma(s0+1) differs from the "
                f"computed determinant by a factor {ratio.real:.12g}{ratio.imag:+.12g}i"
            )
    resp.data["smallest_singular_value"] = rep.smallest_singular_value
    resp.data["achieved_error"] = None


def cmd_solve(args, resp):
    from .basis import IllConditionedWarning, eval_solution, solve_samples

    scale = 1.0
    if args.alpha is not None:
        if args.pot is not None:
            raise InputError("give either --pot or --alpha, not both")
        norm = normalize_dfe(_clist(args.alpha))
        ev, scale = OmegaEvaluator(norm.potential, QuadConfig(tol=args.tol)), norm.scale
        resp.data["potential"] = str(norm.potential)
    else:
        ev = _evaluator(args)
    s0 = parse_complex(args.s0) if args.s0 is not None else 0j
    v = _clist(_need(args, "v"))
    if len(v) != ev.d:
        raise InputError(f"--v needs exactly d={ev.d} values")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IllConditionedWarning)
        spec = solve_samples(ev, s0, v, scale=scale)
    resp.data["warnings"] += [str(w.message) for w in caught]
    for k, c in enumerate(spec.c):
        resp.data["values"].append({"name": f"c_{k}", **cjson(c)})
    resp.data["scale"] = cjson(spec.scale)
    resp.data["residual"] = spec.residual
    resp.data["condition"] = spec.condition
    if args.s is not None:
        resp.data["values"].append({"name": "f(s)", **cjson(eval_solution(spec, ev, parse_complex(args.s)))})


def cmd_reduce(args, resp):
    from .reduction import eval_ray_limit, eval_reduction, reduce_mixed, reduce_tpoly

    ev = _evaluator(args)
    q = parse_q(_need(args, "q"))
    if args.tpoly:
        if any(m for _, m in q):
            raise InputError("--tpoly takes a polynomial in t only")
        deg = max((i for i, _ in q), default=-1)
        coeffs = np.zeros(deg + 1, dtype=complex)
        for (i, _), v in q.items():
            coeffs[i] = v
        reds = [reduce_tpoly(ev.potential, Poly(coeffs))]
    else:
        reds = reduce_mixed(ev.potential, q)
    resp.data["reductions"] = [r.to_dict() for r in reds]
    if args.s is not None and args.z is not None:
        s, z = parse_complex(args.s), parse_complex(args.z)
        resp.data["values"].append({"name": "value", **cjson(sum(eval_reduction(r, ev, s, z) for r in reds))})
    if args.s is not None and args.k is not None and args.z is None:
        s = parse_complex(args.s)
        if any(r.sigma_shift > 1 for r in reds):
            raise InputError("ray limit needs T-degree <= 1")
        resp.data["values"].append({"name": "ray_limit", **cjson(sum(eval_ray_limit(r, ev, args.k, s) for r in reds))})


def cmd_selftest(args, resp):
    from .checks import run_all

    results = run_all(args.scale)
    for r in results:
        print(r.line(), file=sys.stderr)
    resp.data["checks"] = [
        {"criterion": r.number, "name": r.name, "passed": r.passed, "metric": _finite(r.metric),
         "threshold": r.threshold, "seconds": r.seconds, "notes": r.notes}
        for r in results
    ]
    if not all(r.passed for r in results):
        resp.fail("selftest_failed", 1, "one or more checks failed")


COMMANDS = {
    "eval": cmd_eval,
    "incomplete": cmd_incomplete,
    "residues": cmd_residues,
    "ml": cmd_ml,
    "diff": cmd_diff,
    "det": cmd_det,
    "solve": cmd_solve,
    "reduce": cmd_reduce,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# batch mode
# ---------------------------------------------------------------------------

def _read_points(path: str) -> list:
    pts = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            if len(cells) > 2:
                raise InputError(f"{path}:{lineno}: expected 're[,im]'")
            try:
                pts.append(complex(float(cells[0]), float(cells[1]) if len(cells) == 2 else 0.0))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    return pts


def run_batch(args, out) -> int:
    if args.command not in ("eval", "ml"):
        raise InputError("--batch is supported for 'eval' and 'ml'")
    ev = _evaluator(args)
    pts = _read_points(args.batch)

    def row(s):
        try:
            if args.command == "eval":
                value, err = ev.omega_err(args.k, s)
            else:
                value, err = ev.mittag_leffler_err(args.k, s, args.n)
            if isinstance(value, PoleInfo):
                return (s, value.residue, 0.0, True, "")
            return (s, value, err, False, "")
        except PoleError as exc:
            return (s, exc.residue if exc.residue is not None else math.nan, math.nan, True, "")
        except (ToleranceError, ValueError) as exc:
            return (s, math.nan, math.nan, False, str(exc))

    workers = min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, pts))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["s_re", "s_im", "value_re", "value_im", "achieved_error", "pole", "error"])
    for s, v, e, pole, msg in rows:
        v = complex(v)
        w.writerow([repr(s.real), repr(s.imag), repr(v.real), repr(v.imag), repr(float(e)), int(pole), msg])
    if rows and all(r[4] for r in rows):
        return EXIT_TOL
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="omega", description="Omega functions: evaluation, reduction, determinants.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--pot", help="potential, e.g. 'd=3;a1=0.5-0.25i'")
    p.add_argument("--k", type=int, default=0, help="ray index")
    p.add_argument("--l", type=int, help="second ray index (diff)")
    p.add_argument("--s", help="complex argument")
    p.add_argument("--s0", help="matrix anchor (columns at s0+1 .. s0+d)")
    p.add_argument("--z", help="endpoint of the incomplete integral")
    p.add_argument("--n", type=int, help="truncation order or residue count")
    p.add_argument("--q", help="polynomial in t and T (T = t^s)")
    p.add_argument("--tpoly", action="store_true", help="reduce: integrand t^s Q(t) instead of Q(t, t^s)")
    p.add_argument("--v", help="comma-separated samples for solve")
    p.add_argument("--alpha", help="comma-separated alpha_1..alpha_d of s f(s) = sum alpha_k f(s+k)")
    p.add_argument("--tol", type=float, help="target tolerance (default $OMEGA_TOL or 1e-10)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--batch", help="file with one s per line: re[,im]")
    p.add_argument("--scale", type=float, default=0.25, help="selftest sample-count factor")
    return p


def _merge_negative_values(argv: Sequence[str]) -> list:
    # '--s -2+1i' would otherwise be read as an unknown option
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _emit(resp: _Response, fmt: str, out):
    if fmt == "json":
        out.write(json.dumps(resp.data) + "\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["name", "re", "im"])
    for v in resp.data["values"]:
        w.writerow([v["name"], repr(v["re"]), repr(v["im"])])
    for p in resp.data["poles"]:
        w.writerow([f"pole_residue_{p['n']}", repr(p["residue"]["re"]), repr(p["residue"]["im"])])
    for msg in resp.data["warnings"]:
        print(f"warning: {msg}", file=sys.stderr)
    if "error" in resp.data:
        print(f"error: {resp.data['error']}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(_merge_negative_values(argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    resp = _Response(args.command)
    try:
        if args.tol is None:
            args.tol = float(os.environ.get("OMEGA_TOL", DEFAULT_TOL))
        if not 0 < args.tol < 1:
            raise InputError("tolerance must lie in (0, 1)")
        if args.pot is not None:
            parse_potential(args.pot)  # reject bad input before any work
        if args.batch is not None:
            return run_batch(args, out)
        COMMANDS[args.command](args, resp)
    except PoleError as exc:
        resp.pole(PoleInfo(exc.n, exc.residue if exc.residue is not None else math.nan))
        resp.data["error"] = str(exc)
    except ToleranceError as exc:
        resp.fail("tolerance_unmet", EXIT_TOL, str(exc))
        if exc.value is not None:
            resp.data["values"].append({"name": "estimate", **cjson(exc.value)})
    except (InputError, ValueError, OSError) as exc:
        resp.fail("input_error", EXIT_INPUT, str(exc))
    _emit(resp, args.format, out)
    return resp.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
