"""Batch command-line front end: ``dq <group> <action> [options]``.

Every command prints one JSON report on stdout.  Exit status is 0 when all
checks pass, 1 when a check fails and 2 on usage or input errors (with a JSON
error object on stderr).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from ..symcore import I, Poly, coord_space, phase_space
from .parser import ParseError, parse
from .report import Check, Report, error_json, exact_check, numeric_check

DEFAULTS = {"N": 256, "L": 8.0, "hbar": 1.0, "max_degree": 4, "boundary_threshold": 1e-8}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load_config(path: str | None) -> dict:
    cfg = dict(DEFAULTS)
    if path:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"config line {lineno}: expected key=value")
                key, value = (s.strip() for s in line.split("=", 1))
                if key not in DEFAULTS:
                    raise UsageError(f"config line {lineno}: unknown key {key!r}")
                cfg[key] = type(DEFAULTS[key])(float(value)) if key in ("N", "max_degree") else float(value)
    env = os.environ.get("DQ_MAX_DEGREE")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise UsageError(f"DQ_MAX_DEGREE must be an integer, got {env!r}") from None
        cfg["max_degree"] = min(cfg["max_degree"], cap)
    return cfg


def _grid_params(args, cfg):
    N = args.N if args.N is not None else int(cfg["N"])
    L = args.L if args.L is not None else float(cfg["L"])
    h = args.hbar if args.hbar is not None else float(cfg["hbar"])
    return N, L, h


# ---------------------------------------------------------------- star
def cmd_star(args, cfg) -> Report:
    from ..spectral import quadratic_closed_form, star_exp
    from ..starops import moyal_bracket, ordering_product, poisson

    S = phase_space(args.ell)
    rep = Report(f"star {args.action}", {"ell": args.ell})
    u = parse(args.u, S)
    rep.inputs["u"] = str(u)
    one = Poly.const(S, 1)
    if args.action == "exp":
        K = args.order
        rep.inputs["order"] = K
        ser = star_exp(u, K)
        rep.result["coefficients"] = [str(c) for c in ser.coeffs]
        rep.add(exact_check("leading-unit", ser.coeffs[0] - one))
        qh = _as_quadratic(u)
        if qh is not None:
            try:
                closed = quadratic_closed_form(qh, K)
            except ValueError as e:
                rep.result["closed_form"] = str(e)
            else:
                rep.add(exact_check("closed-form-match", _series_residual(ser, closed)))
        return rep
    if args.v is None:
        raise UsageError(f"star {args.action} needs -v")
    v = parse(args.v, S)
    rep.inputs["v"] = str(v)
    classical = u.hbar_min() >= 0 and v.hbar_min() >= 0 and not u.hbar_degree() and not v.hbar_degree()
    if args.action == "mul":
        rep.inputs["ordering"] = args.ordering
        out = ordering_product(u, v, args.ordering)
        rep.result["product"] = str(out)
        rep.add(exact_check("unit-left", ordering_product(one, u, args.ordering) - u))
        rep.add(exact_check("unit-right", ordering_product(u, one, args.ordering) - u))
        if classical:
            rep.add(exact_check("classical-limit", out.subs_hbar_zero() - u * v))
            comm = out - ordering_product(v, u, args.ordering)
            lead = (comm * Poly.const(S, -I) * Poly.hbar(S, -1)).hbar_part(0)
            rep.add(exact_check("commutator-poisson", lead - poisson(u, v)))
        return rep
    out = moyal_bracket(u, v)
    rep.result["bracket"] = str(out)
    rep.add(exact_check("skew", out + moyal_bracket(v, u)))
    if classical:
        rep.add(exact_check("classical-limit", out.hbar_part(0) - poisson(u, v)))
    return rep


def _series_residual(a, b) -> list[Poly]:
    return [x - y for x, y in zip(a.coeffs, b.coeffs)]


def _as_quadratic(u: Poly):
    """Recover (alpha, beta, gamma) if u is a rotation-symmetric quadratic, else None."""
    from ..spectral import QuadraticHamiltonian

    if u.degree() != 2 or u.hbar_degree() or u.hbar_min():
        return None
    S = u.space
    p, q = S.p(1), S.q(1)
    a = u.derive(p, 2).constant_value() / 2
    b = u.derive(p).derive(q).constant_value()
    g = u.derive(q, 2).constant_value() / 2
    try:
        qh = QuadraticHamiltonian(a, b, g, S.ell)
    except (ValueError, TypeError):
        return None
    return qh if qh.poly() == u else None


# ---------------------------------------------------------------- spectrum
def cmd_spectrum(args, cfg) -> Report:
    from ..spectral import QuadraticHamiltonian, quadratic_closed_form, star_exp

    qh = QuadraticHamiltonian.oscillator(args.ell) if args.action == "oscillator" else QuadraticHamiltonian.dilation(args.ell)
    K = args.order
    rep = Report(f"spectrum {args.action}", {"ell": args.ell, "order": K})
    ser = star_exp(qh.poly(), K)
    closed = quadratic_closed_form(qh, K)
    rep.result.update({
        "hamiltonian": str(qh.poly()),
        "d": str(qh.d),
        "delta": str(qh.delta),
        "branch": {1: "d>0", 0: "d=0", -1: "d<0"}[qh.sign],
        "coefficients": [str(c) for c in ser.coeffs],
    })
    if args.action == "oscillator":
        rep.result["levels"] = f"(n + {Fraction(args.ell, 2)}) hbar"
    rep.add(exact_check("closed-form-match", _series_residual(ser, closed)))
    return rep


# ---------------------------------------------------------------- cohomology
def cmd_cohomology(args, cfg) -> Report:
    from ..cohomlab import (MultiDiffOp, agree_on_probes, chevalley_d, hochschild_b,
                            obstruction_chevalley, obstruction_hochschild)
    from ..starops import PoissonTensor, moyal_cochains, poisson_power_op, standard_equivalence

    S = phase_space(args.ell)
    tensor = PoissonTensor.canonical(S)
    Pop = tensor.as_cochain()
    deg = int(cfg["max_degree"])
    rep = Report(f"cohomology {args.action}", {"ell": args.ell, "max_degree": deg})
    if args.action == "b":
        Ident = MultiDiffOp.identity(S)
        T1 = standard_equivalence(S, 1).T(1)
        C2 = moyal_cochains(tensor, 2).C(2)
        rep.add(exact_check("b(identity)=multiplication", hochschild_b(Ident) - MultiDiffOp.multiplication(S)))
        rep.add(exact_check("bP=0", hochschild_b(Pop)))
        rep.add(exact_check("bb(T1)=0", hochschild_b(hochschild_b(T1))))
        rep.add(exact_check("bb(C2)=0", hochschild_b(hochschild_b(C2))))
    elif args.action == "d":
        Ident = MultiDiffOp.identity(S)
        B1 = poisson_power_op(tensor, 3).scale(Fraction(1, 6))
        rep.add(exact_check("d(identity)=P", chevalley_d(Ident) - Pop))
        rep.add(exact_check("dP=0", chevalley_d(Pop)))
        rep.add(exact_check("dd(B1)=0", chevalley_d(chevalley_d(B1))))
    else:
        r = args.r
        rep.inputs.update({"r": r, "theory": args.theory})
        if args.theory == "hochschild":
            ob = obstruction_hochschild(moyal_cochains(tensor, r), r)
        else:
            from math import factorial
            Bs = [poisson_power_op(tensor, 2 * k + 1).scale(Fraction(1, factorial(2 * k + 1))) for k in range(1, r + 1)]
            ob = obstruction_chevalley(Bs, r)
        rep.result["lhs_terms"] = len(ob.lhs.terms)
        rep.result["rhs_terms"] = len(ob.rhs.terms)
        rep.add(exact_check(f"obstruction-r{r}", ob.residual()))
        ok = agree_on_probes(ob.lhs, ob.rhs, deg)
        rep.add(Check(f"obstruction-r{r}-probes", ok, 0.0 if ok else 1.0, 0.0, ok))
    return rep


# ---------------------------------------------------------------- schouten
def cmd_schouten(args, cfg) -> Report:
    from ..cohomlab import jacobi_trivector, schouten_self
    from ..starops import PoissonTensor

    if args.tensor == "canonical":
        L = PoissonTensor.canonical(args.ell)
    elif args.tensor == "so3":
        L = PoissonTensor.so3()
    else:
        if not args.entry:
            raise UsageError("custom tensors need at least one --entry i,j=EXPR")
        S = coord_space(args.dim)
        comps = {}
        for spec in args.entry:
            try:
                ij, expr = spec.split("=", 1)
                i, j = (int(x) - 1 for x in ij.split(","))
            except ValueError:
                raise UsageError(f"bad --entry {spec!r}; expected i,j=EXPR with 1-based indices") from None
            comps[(i, j)] = parse(expr, S)
        L = PoissonTensor(S, comps)
    rep = Report("schouten", {"tensor": args.tensor, "components": {f"{i + 1},{j + 1}": str(c) for (i, j), c in sorted(L.components.items())}})
    T = schouten_self(L)
    rep.result["schouten"] = {f"{i + 1},{j + 1},{k + 1}": str(c) for (i, j, k), c in sorted(T.components.items())}
    rep.add(exact_check("jacobi-crosscheck", _trivector_residual(T, jacobi_trivector(L))))
    rep.add(exact_check("schouten-zero", _trivector_residual(T, None)))
    return rep


def _trivector_residual(A, B) -> list[Poly]:
    if B is None:
        return list(A.components.values())
    keys = sorted(set(A.components) | set(B.components))
    return [A.entry(*k) - B.entry(*k) for k in keys]


# ---------------------------------------------------------------- nambu
def cmd_nambu(args, cfg) -> Report:
    from ..nambu import FlowAborted, euler_top, fi_residual, integrate, leibniz_residual, nahm_system, nambu_bracket

    rep = Report(f"nambu {args.action}")
    if args.action == "bracket":
        S = coord_space(args.dim)
        fs = [parse(f, S) for f in (args.f or [])]
        rep.inputs.update({"dim": args.dim, "f": [str(f) for f in fs]})
        out = nambu_bracket(*fs)
        rep.result["bracket"] = str(out)
        if len(fs) >= 2:
            swapped = [fs[1], fs[0]] + fs[2:]
            rep.add(exact_check("skew", out + nambu_bracket(*swapped)))
        return rep
    if args.action == "fi":
        S = coord_space(args.dim)
        xs = [parse(x, S) for x in (args.x or [])]
        ys = [parse(y, S) for y in (args.y or [])]
        rep.inputs.update({"dim": args.dim, "x": [str(x) for x in xs], "y": [str(y) for y in ys]})
        rep.add(exact_check("fundamental-identity", fi_residual(xs, ys)))
        if len(ys) >= 2:
            rep.add(exact_check("leibniz", leibniz_residual(xs[0] if xs else ys[0], *ys)))
        return rep
    system = euler_top(*args.inertia) if args.system == "euler" else nahm_system()
    r0 = args.r0 if args.r0 is not None else ([1.0, 1.0, 1.0] if args.system == "euler" else [1.0, 0.5, -0.5])
    rep.inputs.update({"system": args.system, "r0": r0, "dt": args.dt, "steps": args.steps})
    if args.system == "euler":
        rep.inputs["inertia"] = list(args.inertia)
    try:
        res = integrate(system, r0, args.dt, args.steps)
    except FlowAborted as e:
        rep.result["aborted_at_step"] = e.step
        rep.add(Check("finite-flow", False, float("inf"), 0.0, None))
        if args.trajectory:
            with open(args.trajectory, "w") as fh:
                fh.write(e.partial.ndjson(args.every))
        return rep
    rep.result["final"] = [float(x) for x in res.final]
    rep.result["drifts"] = list(res.drifts)
    for name, d in zip(("g", "h"), res.drifts):
        rep.add(numeric_check(f"drift-{name}", d, args.tol))
    if args.trajectory:
        with open(args.trajectory, "w") as fh:
            fh.write(res.ndjson(args.every))
    return rep


# ---------------------------------------------------------------- graphs
def cmd_graphs(args, cfg) -> Report:
    from ..kgraphs import AdmissibleGraph, enumerate_graphs, graph_count, graph_operator
    from ..starops import PoissonTensor, poisson

    if args.action == "enumerate":
        gs = enumerate_graphs(args.n, args.bound)
        rep = Report("graphs enumerate", {"n": args.n})
        rep.result["count"] = len(gs)
        if args.list:
            rep.result["graphs"] = [g.text() for g in gs]
        ok = len(gs) == graph_count(args.n)
        rep.add(Check("count-formula", ok, abs(len(gs) - graph_count(args.n)), 0.0, ok))
        return rep
    if not args.graph or args.u is None or args.v is None:
        raise UsageError("graphs operator needs --graph, -u and -v")
    S = phase_space(args.ell)
    g = AdmissibleGraph.parse(args.graph)
    u, v = parse(args.u, S), parse(args.v, S)
    T = PoissonTensor.canonical(S)
    rep = Report("graphs operator", {"graph": g.text(), "ell": args.ell, "u": str(u), "v": str(v)})
    out = graph_operator(g, T, u, v)
    rep.result["operator"] = str(out)
    if g.n == 1 and g.edges[0] in (("L", "R"), ("R", "L")):
        sign = 1 if g.edges[0] == ("L", "R") else -1
        rep.add(exact_check("matches-poisson", out - poisson(u, v) * sign))
    return rep


# ---------------------------------------------------------------- grid
def cmd_grid(args, cfg) -> Report:
    import numpy as np

    from .. import phasegrid as pg

    N, L, h = _grid_params(args, cfg)
    thr = float(cfg["boundary_threshold"])
    rep = Report(f"grid {args.action}", {"N": N, "L": L, "hbar": h})
    dump = None
    if args.action == "projector":
        rep.inputs["n"] = args.n
        pi = pg.oscillator_projector(args.n, N, L, h)
        hw = pg.hermite_wigner(args.n, args.n, N, L, h)
        rep.result["trace"] = pi.integral().real
        rep.add(numeric_check("hermite-wigner-match", pg.relative_l2(pi, hw), 1e-8))
        rep.add(numeric_check("trace", abs(pi.integral() - 1), 1e-8))
        dump = pi
    elif args.action == "moyal":
        n, m = args.n, args.m if args.m is not None else args.n
        rep.inputs.update({"n": n, "m": m})
        a, b = pg.oscillator_projector(n, N, L, h), pg.oscillator_projector(m, N, L, h)
        prod = pg.numeric_moyal(a, b, thr)
        if n == m:
            rep.add(numeric_check("idempotent", pg.relative_l2(prod, a), 1e-5))
        else:
            rep.add(numeric_check("orthogonal", float(np.linalg.norm(prod.values) / np.linalg.norm(a.values)), 1e-5))
        S = phase_space(1)
        H = parse("(p1^2 + q1^2)/2", S)
        eig = pg.numeric_moyal(H, a, thr)
        rep.add(numeric_check("eigenvalue", pg.relative_l2(eig, a.scale((n + 0.5) * h)), 1e-6))
        if prod.warnings:
            rep.result["warnings"] = list(prod.warnings)
        dump = prod
    else:
        p, q = args.point
        rep.inputs.update({"n": args.n, "eps": args.eps, "point": [p, q], "shift": args.shift, "window": args.window})
        (res,) = pg.spectral_fourier(args.n, args.eps, [(p, q)], hbar=h, shift=args.shift, window=args.window)
        rep.result.update({"value": [res.value.real, res.value.imag], "converged": res.converged,
                           "disagreement": res.disagreement})
        rep.add(Check("richardson-converged", res.converged, res.disagreement, 1e-4, None))
        if args.shift == 0:
            import math
            from scipy.special import eval_laguerre
            H = (p * p + q * q) / 2
            exact = 2 * (-1) ** args.n * math.exp(-2 * H / h) * eval_laguerre(args.n, 4 * H / h)
            rep.result["projector"] = exact
            rep.add(numeric_check("projector-match", abs(res.value - exact), 1e-4))
        else:
            rep.add(numeric_check("off-spectrum-small", abs(res.value), 1e-3))
    if args.dump_grid and dump is not None:
        pg.dump_grid(dump, args.dump_grid)
        rep.result["dumped"] = os.path.basename(args.dump_grid)
    return rep


# ---------------------------------------------------------------- argument parsing
def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p,q but got {text!r}") from None
    return a, b


def _triple(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dq", description="Exact star products, deformation cohomology and phase-space numerics.")
    ap.add_argument("--config", help="key=value file with grid defaults (N, L, hbar, max_degree, boundary_threshold)")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-stable output)")
    sub = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    p = sub.add_parser("star", help="Moyal and ordered star products")
    p.add_argument("action", choices=["mul", "bracket", "exp"])
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("-u", required=True)
    p.add_argument("-v")
    p.add_argument("--ordering", choices=["weyl", "standard", "normal"], default="weyl")
    p.add_argument("--order", type=int, default=4)

    p = sub.add_parser("spectrum", help="star exponential against its closed form")
    p.add_argument("action", choices=["oscillator", "dilation"])
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--order", type=int, default=8)

    p = sub.add_parser("cohomology", help="coboundary and obstruction checks")
    p.add_argument("action", choices=["b", "d", "obstruction"])
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--theory", choices=["hochschild", "chevalley"], default="hochschild")

    p = sub.add_parser("schouten", help="Schouten self-bracket of a bivector")
    p.add_argument("--tensor", choices=["canonical", "so3", "custom"], default="canonical")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--entry", action="append", help="custom component i,j=EXPR (1-based, x1..xn)")

    p = sub.add_parser("nambu", help="Nambu brackets and flows")
    p.add_argument("action", choices=["bracket", "fi", "simulate"])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("-f", action="append")
    p.add_argument("-x", action="append")
    p.add_argument("-y", action="append")
    p.add_argument("--system", choices=["euler", "nahm"], default="euler")
    p.add_argument("--inertia", type=_triple, default=[1.0, 2.0, 3.0])
    p.add_argument("--r0", type=_triple, help="initial state (default 1,1,1 for euler, 1,0.5,-0.5 for nahm)")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--trajectory", help="write NDJSON samples to this path")
    p.add_argument("--every", type=int, default=100)

    p = sub.add_parser("graphs", help="admissible graphs")
    p.add_argument("action", choices=["enumerate", "operator"])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--bound", type=int, default=4)
    p.add_argument("--list", action="store_true")
    p.add_argument("--graph")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("-u")
    p.add_argument("-v")

    p = sub.add_parser("grid", help="numeric phase-space checks")
    p.add_argument("action", choices=["moyal", "projector", "fourier"])
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--m", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--L", type=float)
    p.add_argument("--hbar", type=float)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--point", type=_pair, default=(0.0, 0.0))
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--window", choices=["rect", "gauss"], default="rect")
    p.add_argument("--dump-grid", dest="dump_grid")
    return ap


HANDLERS = {
    "star": cmd_star, "spectrum": cmd_spectrum, "cohomology": cmd_cohomology, "schouten": cmd_schouten,
    "nambu": cmd_nambu, "graphs": cmd_graphs, "grid": cmd_grid,
}


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        t0 = time.perf_counter()
        rep = HANDLERS[args.group](args, cfg)
        if args.timing:
            rep.timing = {"seconds": round(time.perf_counter() - t0, 6)}
    except UsageError as e:
        stderr.write(error_json("usage", str(e)))
        return 2
    except ParseError as e:
        stderr.write(error_json("parse", e.message, line=e.line, column=e.column))
        return 2
    except (ValueError, KeyError, OSError, ArithmeticError) as e:
        stderr.write(error_json(type(e).__name__, str(e)))
        return 2
    stdout.write(rep.to_json())
    return 0 if rep.passed else 1


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
