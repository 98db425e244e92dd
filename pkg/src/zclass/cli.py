"""Command-line front end.

Every subcommand writes CSV (or JSON records with ``--json``) to stdout or
``--out``.  Floats are printed with 17 significant digits and complex
quantities as ``_re``/``_im`` column pairs.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numerical-contract failure (operator not positive, truncation failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diagonal import PolySample, composition_residual, monomial_norm, similarity_residual
from .fredholm import NumericalContractError, default_interval, discretize, log_det
from .kernels import TruncationError, builtin_profile, cd_representation, kernel_eval, profile_from_csv, zclass_jmodule
from .monodromy import boundary_pair, jump_residual, transfer
from .prediction import ModulusProfile, outer_transfer
from .spectral import density_fd, diz_residual, m_matrix, sigma1_at, sigma1_density
from .verify import report, run_suite

ENTRIES = ("11", "12", "21", "22")

HEADERS = {
    "det": ["zeta", "left", "right", "nodes", "log_det", "det"],
    "sigma": ["zeta"] + [f"s{e}_{p}" for e in ENTRIES for p in ("re", "im")] + [f"m{e}_{p}" for e in ENTRIES for p in ("re", "im")],
    "density": ["zeta"]
    + [f"chol{e}_{p}" for e in ENTRIES for p in ("re", "im")]
    + [f"fd{e}_{p}" for e in ENTRIES for p in ("re", "im")]
    + ["residual"],
    "monodromy": ["z_re", "z_im", "steps"] + [f"w{e}_{p}" for e in ENTRIES for p in ("re", "im")] + ["det_re", "det_im", "junit_residual"],
    "jump": ["x", "eps", "residual", "trace_re", "trace_im"],
    "diz": ["zeta", "lhs", "rhs", "residual"],
    "outer": ["z_re", "z_im", "w_re", "w_im", "abs_w", "R"],
    "diag": ["n", "alpha", "similarity_residual", "composition_residual", "norm"],
    "cd": ["kernel", "alpha", "x", "t", "direct", "cd", "residual"],
}


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument helpers


def _zeta_grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise UsageError(f"--zeta-grid expects start:stop:step, got {spec!r}") from None
    if not step > 0 or stop < start:
        raise UsageError("--zeta-grid needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def _complex(spec: str) -> complex:
    try:
        re, im = (float(v) for v in spec.split(","))
    except ValueError:
        raise UsageError(f"--z expects re,im, got {spec!r}") from None
    return complex(re, im)


def _floats(spec: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated list of numbers, got {spec!r}") from None


def _zetas(args) -> np.ndarray:
    if args.zeta_grid:
        return _zeta_grid(args.zeta_grid)
    if args.zeta is not None:
        return np.array([args.zeta])
    raise UsageError("give --zeta or --zeta-grid")


def _profile(args):
    kind = args.kernel
    if kind == "csv":
        if not args.profile:
            raise UsageError("--kernel csv needs --profile PATH")
        return profile_from_csv(args.profile)
    if kind == "sine":
        return builtin_profile("sine", gamma=args.gamma)
    if kind in ("bessel", "bessel_sqrtarg"):
        return builtin_profile(kind, alpha=args.alpha, gamma=args.gamma)
    return builtin_profile(kind)


def _left(args, prof) -> float:
    if args.a is not None:
        return args.a
    return max(prof.domain[0], 0.0)


# --------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _cplx(values) -> list[float]:
    out = []
    for v in np.ravel(values):
        out += [float(np.real(v)), float(np.imag(v))]
    return out


def _emit(args, header: list[str], rows: list[list]) -> None:
    if args.json:
        recs = [{h: (float(v) if isinstance(v, np.floating) else v) for h, v in zip(header, r)} for r in rows]
        text = json.dumps(recs, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    _write(args, text)


def _write(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands


def cmd_det(args) -> int:
    prof = _profile(args)
    rows = []
    for z in _zetas(args):
        if prof.kind == "zclass":
            left, right = _left(args, prof), float(z)
            if not right > left:
                raise UsageError(f"zeta = {z} must exceed a = {left}")
        else:
            left, right, _ = default_interval(prof, float(z))
        ld = log_det(discretize(prof, left, right, args.nodes))
        rows.append([float(z), left, right, args.nodes, ld, math.exp(ld)])
    _emit(args, HEADERS["det"], rows)
    return 0


def _need_zclass(prof) -> None:
    if prof.kind != "zclass":
        raise UsageError(f"this subcommand needs a Z-class kernel, not {prof.kind!r}")


def cmd_sigma(args) -> int:
    prof = _profile(args)
    _need_zclass(prof)
    a = _left(args, prof)
    rows = []
    for z in _zetas(args):
        s = sigma1_at(prof, a, float(z), args.nodes)
        rows.append([float(z)] + _cplx(s) + _cplx(m_matrix(s)))
    _emit(args, HEADERS["sigma"], rows)
    return 0


def cmd_density(args) -> int:
    prof = _profile(args)
    _need_zclass(prof)
    a = _left(args, prof)
    grid = _zetas(args)
    b = args.b if args.b is not None else float(grid[-1])
    chol = sigma1_density(prof, a, b, args.nodes)(grid)
    fd = density_fd(prof, a, b, grid, args.nodes)
    rows = []
    for z, c, f in zip(grid, chol, fd):
        rows.append([float(z)] + _cplx(c) + _cplx(f) + [float(np.max(np.abs(c - f)))])
    _emit(args, HEADERS["density"], rows)
    return 0


def _interval(args, prof) -> tuple[float, float]:
    a = _left(args, prof)
    b = args.b if args.b is not None else (args.zeta if args.zeta is not None else None)
    if b is None:
        raise UsageError("give --b (right end of the interval)")
    if not b > a:
        raise UsageError("need b > a")
    return a, b


def cmd_monodromy(args) -> int:
    from .kernels import J

    prof = _profile(args)
    _need_zclass(prof)
    a, b = _interval(args, prof)
    dens = sigma1_density(prof, a, b, args.nodes)
    zs = [_complex(s) for s in (args.z or ["0,2"])]
    rows = []
    for z in zs:
        W = transfer(dens, a, b, z, args.steps).W
        Wc = transfer(dens, a, b, z.conjugate(), args.steps).W
        junit = float(np.max(np.abs(Wc.conj().T @ J @ W - J)))
        rows.append([z.real, z.imag, args.steps] + _cplx(W) + _cplx(np.linalg.det(W)) + [junit])
    _emit(args, HEADERS["monodromy"], rows)
    return 0


def cmd_jump(args) -> int:
    prof = _profile(args)
    _need_zclass(prof)
    a, b = _interval(args, prof)
    dens = sigma1_density(prof, a, b, args.nodes)
    xs = _floats(args.x, "--x") if args.x else [0.5 * (a + b)]
    eps = _floats(args.eps, "--eps") if args.eps else [1e-1, 1e-2, 1e-3]
    rows = []
    for x in xs:
        Rsq = zclass_jmodule(complex(prof.psi(np.array([x]))[0])).Rsq
        for e in eps:
            Wp, Wm = boundary_pair(dens, a, b, x, e)
            tr = np.trace(Wp @ np.linalg.inv(Wm))
            rows.append([x, e, jump_residual(Wp, Wm, Rsq), tr.real, tr.imag])
    _emit(args, HEADERS["jump"], rows)
    return 0


def cmd_diz(args) -> int:
    if args.kernel != "sine":
        raise UsageError("diz is defined for the sine kernel only")
    grid = _zeta_grid(args.zeta_grid) if args.zeta_grid else _zeta_grid("0.2:2:0.02")
    recs = diz_residual(args.gamma, grid, args.nodes)
    _emit(args, HEADERS["diz"], [[r.zeta, r.lhs, r.rhs, r.residual] for r in recs])
    return 0


def cmd_outer(args) -> int:
    if not args.modulus:
        raise UsageError("outer needs --modulus PATH (CSV with header x,R)")
    prof = ModulusProfile.from_csv(args.modulus)
    zs = [_complex(s) for s in (args.z or [])]
    if args.x:
        eps = _floats(args.eps, "--eps") if args.eps else [1e-1, 1e-2, 1e-3]
        zs += [complex(x, e) for x in _floats(args.x, "--x") for e in eps]
    if not zs:
        raise UsageError("give --z and/or --x")
    rows = []
    for z in zs:
        w = outer_transfer(prof, z)
        rows.append([z.real, z.imag, w.real, w.imag, abs(w), float(prof.R(np.array([z.real]))[0])])
    _emit(args, HEADERS["outer"], rows)
    return 0


def cmd_diag(args) -> int:
    alphas = _floats(args.alphas, "--alphas") if args.alphas else [args.alpha]
    ell = args.ell
    grid = [ell / 4, ell / 2, 3 * ell / 4]
    rows = []
    for al in alphas:
        for n in range(args.degree + 1):
            p = PolySample.monomial(n, ell, al)
            rows.append([n, al, similarity_residual(p, grid), composition_residual(p, grid + [ell]), monomial_norm(n, al)])
    _emit(args, HEADERS["diag"], rows)
    return 0


def _pairs(spec: str) -> list[tuple[float, float]]:
    out = []
    for part in spec.split(";"):
        vals = _floats(part, "--pairs")
        if len(vals) != 2:
            raise UsageError(f"--pairs expects x,t;x,t;..., got {spec!r}")
        out.append((vals[0], vals[1]))
    return out


def cmd_cd(args) -> int:
    rows = []
    if args.kernel == "airy":
        prof = builtin_profile("airy")
        pairs = _pairs(args.pairs) if args.pairs else [(0.0, 1.0), (1.0, 1.0), (2.0, 0.5)]
        for x, t in pairs:
            d, c = kernel_eval(prof, x, t), cd_representation("airy_cd", x, t)
            rows.append(["airy", 0.0, x, t, d, c, abs(d - c)])
    elif args.kernel in ("bessel", "bessel_sqrtarg"):
        prof = builtin_profile(args.kernel, alpha=args.alpha, gamma=args.gamma)
        pairs = _pairs(args.pairs) if args.pairs else [(1.0, 2.0), (0.5, 3.0), (2.0, 2.0)]
        for x, t in pairs:
            d, c = kernel_eval(prof, x, t), cd_representation("bessel_cd", x, t, (args.alpha, args.gamma))
            rows.append([args.kernel, args.alpha, x, t, d, c, abs(d - c)])
    else:
        raise UsageError("cd supports --kernel airy, bessel or bessel_sqrtarg")
    _emit(args, HEADERS["cd"], rows)
    return 0


def cmd_verify(args) -> int:
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    try:
        checks = run_suite(only)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    if args.json:
        _write(args, json.dumps(report(checks), indent=2) + "\n")
    else:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name}  measured={_fmt(c.measured)}  tolerance={_fmt(c.tolerance)}  {c.details}".rstrip()
            for c in checks
        ]
        _write(args, "\n".join(lines) + "\n")
    return 0 if all(c.passed for c in checks) else 1


COMMANDS = {
    "det": (cmd_det, "log-determinant over a zeta grid"),
    "sigma": (cmd_sigma, "sigma_1 and M over a zeta grid"),
    "density": (cmd_density, "sigma_1' by the factor route and by finite differences"),
    "monodromy": (cmd_monodromy, "transfer matrix W(z)"),
    "jump": (cmd_jump, "boundary jump residual against R^2"),
    "diz": (cmd_diz, "log-determinant derivative identity table (sine kernel)"),
    "outer": (cmd_outer, "scalar outer factor from a modulus CSV"),
    "diag": (cmd_diag, "fractional-integration similarity residuals"),
    "cd": (cmd_cd, "Christoffel-Darboux identity residuals"),
    "verify": (cmd_verify, "run the acceptance suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--kernel",
        default="sine",
        choices=["sine", "bessel", "bessel_sqrtarg", "airy", "gaussian", "csv"],
        help="kernel family (default: sine)",
    )
    common.add_argument("--profile", help="CSV with header x,A,B,Aprime,Bprime (for --kernel csv)")
    common.add_argument("--gamma", type=float, default=1.0)
    common.add_argument("--alpha", type=float, default=0.0, help="Bessel order, or similarity exponent for diag")
    common.add_argument("--a", type=float, default=None, help="left end (default: 0 or the domain start)")
    common.add_argument("--b", type=float, default=None, help="right end of the interval")
    common.add_argument("--zeta", type=float, default=None)
    common.add_argument("--zeta-grid", default=None, metavar="START:STOP:STEP")
    common.add_argument("--nodes", type=int, default=64)
    common.add_argument("--steps", type=int, default=2000)
    common.add_argument("--z", action="append", metavar="RE,IM", help="spectral point; repeatable")
    common.add_argument("--x", default=None, help="comma-separated interior points")
    common.add_argument("--eps", default=None, help="comma-separated distances from the cut")
    common.add_argument("--out", default=None, help="write to this path instead of stdout")
    common.add_argument("--json", action="store_true", help="JSON instead of CSV")

    parser = argparse.ArgumentParser(prog="zclass", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "outer":
            p.add_argument("--modulus", help="CSV with header x,R")
        if name == "diag":
            p.add_argument("--alphas", default="0.3,0.7,1.5")
            p.add_argument("--degree", type=int, default=10)
            p.add_argument("--ell", type=float, default=1.0)
        if name == "cd":
            p.add_argument("--pairs", default=None, help="x,t;x,t;...")
        if name == "verify":
            p.add_argument("--only", default=None, help="comma-separated criteria, e.g. A1,A5")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.nodes < 2:
        parser.error("--nodes must be at least 2")
    if args.steps < 1:
        parser.error("--steps must be positive")
    func = COMMANDS[args.command][0]
    try:
        return func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (NumericalContractError, TruncationError, np.linalg.LinAlgError) as exc:
        print(f"zclass: error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError, OSError) as exc:
        print(f"zclass: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
