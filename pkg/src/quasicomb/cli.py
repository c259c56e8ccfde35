"""Command-line entry point ``quasicomb``.

Exit codes: 0 success, 2 bad input, 3 unsupported term, 4 failed check.
"""
import argparse
import json
import sys

from . import presets, serial
from .cosets import normalize
from .detect import fit_cosets, verify_fit
from .errors import (DimensionMismatch, FormatError, NoFit, NumericLatticeError,
                     QuasicombError, RankDeficientIntersection, UnsupportedTerm)
from .fourier import fourier, inverse_fourier
from .lattice import dual, index_in, intersect
from .numerics import almost_periods, pair, poisson_check

OK, INPUT_ERROR, UNSUPPORTED, CHECK_FAILED = 0, 2, 3, 4


class CheckFailed(Exception):
    pass


def _emit(args, obj, kind=None, meta=None):
    text = serial.dumps(obj, kind, meta)
    out = getattr(args, "out", None) or getattr(args, "out_path", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(line):
    print(line, file=sys.stderr)


def cmd_fourier(args):
    f = serial.load(args.input, "distribution")
    op = inverse_fourier if args.command == "ifourier" else fourier
    _emit(args, op(f), meta={"op": args.command})


def cmd_pair(args):
    f = serial.load(args.distribution, "distribution")
    phi = serial.load(args.testfunction, "testfunction")
    r = pair(f, phi, tail_tol=args.tol, min_radius=args.radius or 0.0)
    _summary(f"value = {r.value!r}  bound = {r.bound:.3e}  radius = {r.radius:g}")
    _emit(args, {"value": r.value, "bound": r.bound, "radius": r.radius})


def cmd_poisson(args):
    L = serial.load(args.lattice, "lattice")
    phi = serial.load(args.testfunction, "testfunction")
    r = poisson_check(L, phi, tol=args.tol)
    _summary(f"lhs = {r.lhs!r}\nrhs = {r.rhs!r}\nresidual = {r.residual:.3e}  (tol {args.tol:g})")
    _emit(args, {"ok": r.ok, "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual, "bound": r.bound})
    if not r.ok:
        raise CheckFailed(f"residual {r.residual:.3e} >= {args.tol:g}")


def cmd_lattice(args):
    A = serial.load(args.a, "lattice")
    if args.op == "dual":
        _emit(args, dual(A))
        return
    if args.b is None:
        raise FormatError(f"lattice {args.op} needs two lattice documents")
    B = serial.load(args.b, "lattice")
    if args.op == "intersect":
        try:
            _emit(args, intersect(A, B))
        except RankDeficientIntersection as e:
            _summary(f"intersection has rank {e.rank}")
            _emit(args, e.subgroup, meta={"rank": e.rank})
    else:
        idx = index_in(A, B)
        _summary(f"index = {idx}")
        _emit(args, {"index": idx})


def cmd_normalize(args):
    expr = serial.load(args.input, "coset_expression")
    sysm = normalize(expr)
    _summary(f"{len(sysm.full_rank_cosets)} disjoint cosets, density {sysm.density()}, "
             f"{len(sysm.residue)} residue terms")
    _emit(args, sysm)


def _read_cloud(path, dim):
    if path.lower().endswith(".json"):
        return serial.load(path, "point_cloud")
    return serial.read_cloud_csv(path, dim)


def cmd_detect(args):
    cloud = _read_cloud(args.input, args.dim)
    fit = fit_cosets(cloud, max_J=args.max_j, dist_tol=args.tol)
    rep = verify_fit(cloud, fit, args.tol)
    _summary(f"J = {fit.J}  uncovered = {len(rep.uncovered)}  overcover = {len(rep.overcover)}")
    _emit(args, fit)


def cmd_almost_periods(args):
    f = serial.load(args.input, "distribution")
    if not f.terms or not 0 <= args.term < len(f.terms):
        raise FormatError(f"term index {args.term} out of range")
    g = f.terms[args.term].coeff
    rep = almost_periods(g, args.tol, tuple(args.window), args.pitch, direction=args.direction,
                         n_samples=args.samples)
    _summary(f"{len(rep.periods_found)} almost periods, max gap {rep.max_gap:g}")
    _emit(args, {"epsilon": rep.epsilon, "periods": rep.periods_found, "max_gap": rep.max_gap,
                 "window": list(rep.window), "pitch": rep.grid_pitch, "samples": rep.sample_count,
                 "direction": list(rep.direction)})


def cmd_verify(args):
    if args.name not in presets.PRESETS:
        raise FormatError(f"unknown example {args.name!r}; choose from {', '.join(presets.PRESETS)}")
    rep = presets.run(args.name)
    _summary(f"{rep['name']}: lhs = {rep['lhs'][:3]}  rhs = {rep['rhs'][:3]}  "
             f"residual = {rep['residual']:.3e}  tol = {rep['tolerance']:g}  "
             f"{'PASS' if rep['ok'] else 'FAIL'}")
    _emit(args, rep)
    if not rep["ok"]:
        raise CheckFailed(f"residual {rep['residual']:.3e}")


def build_parser():
    p = argparse.ArgumentParser(prog="quasicomb", description="Lattice combs and their Fourier transforms.")
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("fourier", "ifourier"):
        s = sub.add_parser(name, help=f"{name} of a distribution document")
        s.add_argument("input")
        s.add_argument("out_path", nargs="?")
        s.add_argument("--out")
        s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("pair", help="pair a distribution with a test function")
    s.add_argument("distribution")
    s.add_argument("testfunction")
    s.add_argument("--tol", type=float, default=1e-12, help="tail tolerance")
    s.add_argument("--radius", type=float, default=None, help="minimum truncation radius")
    s.add_argument("--out")
    s.set_defaults(func=cmd_pair)

    s = sub.add_parser("poisson-check", help="compare both sides of Poisson summation")
    s.add_argument("lattice")
    s.add_argument("testfunction")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--out")
    s.set_defaults(func=cmd_poisson)

    s = sub.add_parser("lattice", help="dual, intersection or index of lattices")
    s.add_argument("op", choices=["dual", "intersect", "index"])
    s.add_argument("a")
    s.add_argument("b", nargs="?")
    s.add_argument("--out")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("normalize", help="disjoint normal form of a coset expression")
    s.add_argument("input")
    s.add_argument("--out")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("detect", help="fit a point cloud by lattice cosets")
    s.add_argument("--input", required=True, help="CSV (coords[, amp re, im]) or point_cloud JSON")
    s.add_argument("--dim", type=int, default=None, help="coordinates per CSV row (default: all columns)")
    s.add_argument("--max-j", type=int, default=4)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--out")
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("almost-periods", help="scan for epsilon-almost periods of a coefficient")
    s.add_argument("input", help="distribution document; the coefficient of one term is scanned")
    s.add_argument("--term", type=int, default=0)
    s.add_argument("--tol", "--epsilon", type=float, default=0.1, dest="tol")
    s.add_argument("--window", type=float, nargs=2, default=(0.0, 50.0), metavar=("LO", "HI"))
    s.add_argument("--pitch", type=float, default=0.01)
    s.add_argument("--direction", type=float, nargs="+", default=None)
    s.add_argument("--samples", type=int, default=256)
    s.add_argument("--out")
    s.set_defaults(func=cmd_almost_periods)

    s = sub.add_parser("verify-example", help="run a built-in worked example")
    s.add_argument("name", help=", ".join(presets.PRESETS))
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except UnsupportedTerm as e:
        print(f"error: unsupported term: {e}", file=sys.stderr)
        return UNSUPPORTED
    except (CheckFailed, NoFit) as e:
        print(f"check failed: {e}", file=sys.stderr)
        return CHECK_FAILED
    except (FormatError, DimensionMismatch, NumericLatticeError, OSError, json.JSONDecodeError,
            ValueError, QuasicombError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    return OK


if __name__ == "__main__":
    sys.exit(main())
