"""JSON documents and CSV point clouds.

Every file is an envelope ``{"format_version": "1", "kind": ..., "payload":
..., "meta": {...}}`` written with sorted keys. Rationals travel as "p/q"
strings, floats as JSON numbers (shortest round-trip repr) and complex
numbers as ``[re, im]`` pairs, so save -> load -> save is byte-identical.
"""
import csv
import json
import math
from fractions import Fraction

import numpy as np

from . import _linalg as la
from .cosets import Difference, Intersection, Leaf, NormalizedSystem, Union
from .detect import CosetFit, PointCloud
from .distributions import DENSE, CombDistribution, CombTerm, PointSet
from .errors import FormatError
from .lattice import Coset, Lattice, canonicalize, subgroup
from .testfn import Atom, TestFunction, _poly
from .wfunc import WFunction

FORMAT_VERSION = "1"
KINDS = ("lattice", "coset_expression", "distribution", "testfunction", "point_cloud", "fit", "report")


# scalars

def enc_real(x):
    if isinstance(x, Fraction) or (isinstance(x, int) and not isinstance(x, bool)):
        return str(Fraction(x))
    x = float(x)
    return None if math.isnan(x) else x


def dec_real(v):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(f"bad rational {v!r}") from e
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(f"expected a number, got {v!r}")
    return float(v)


def enc_complex(z):
    if isinstance(z, (Fraction, int)) and not isinstance(z, bool):
        return [enc_real(z), "0"]
    z = complex(z)
    return [z.real, z.imag]


def dec_complex(v):
    if not (isinstance(v, list) and len(v) == 2):
        raise FormatError(f"complex numbers are [re, im] pairs, got {v!r}")
    re, im = dec_real(v[0]), dec_real(v[1])
    if isinstance(re, Fraction) and isinstance(im, Fraction) and im == 0:
        return re
    return complex(float(re), float(im))


def _vec(v):
    return [enc_real(x) for x in v]


def _dvec(v, dim=None):
    if not isinstance(v, list):
        raise FormatError(f"expected a list, got {v!r}")
    out = tuple(dec_real(x) for x in v)
    if dim is not None and len(out) != dim:
        raise FormatError(f"expected {dim} entries, got {len(out)}")
    return out


# lattices and cosets

def enc_lattice(L):
    return {"dim": L.dim, "basis": [_vec(r) for r in L.basis]}


def dec_lattice(p):
    dim = int(p["dim"])
    rows = [list(_dvec(r)) for r in p["basis"]]
    if len(rows) != dim:
        raise FormatError("basis must have dim rows")
    rank = len(rows[0]) if rows else 0
    if rank == dim:
        if all(la.is_exact(v) for r in rows for v in r):
            return canonicalize(rows)
        return Lattice(tuple(tuple(float(v) for v in r) for r in rows))
    return subgroup([list(c) for c in zip(*rows)], dim)


def enc_coset(C):
    return {"lattice": enc_lattice(C.lattice), "offset": _vec(C.offset)}


def dec_coset(p):
    L = dec_lattice(p["lattice"])
    return Coset(L, _dvec(p["offset"], L.dim))


def enc_expr(e):
    if isinstance(e, Coset):
        return enc_coset(e)
    if isinstance(e, Leaf):
        return enc_coset(e.coset)
    if isinstance(e, Union):
        return {"op": "union", "args": [enc_expr(a) for a in e.args]}
    if isinstance(e, Intersection):
        return {"op": "intersect", "args": [enc_expr(a) for a in e.args]}
    if isinstance(e, Difference):
        return {"op": "diff", "args": [enc_expr(e.left)] + [enc_expr(a) for a in e.right]}
    if isinstance(e, NormalizedSystem):
        return {
            "op": "normalized",
            "dim": e.dim,
            "refinement": enc_lattice(e.refinement) if e.refinement is not None else None,
            "args": [enc_coset(C) for C in e.full_rank_cosets],
            "residue": [{"coset": enc_coset(C), "multiplicity": m} for C, m in e.residue],
        }
    raise TypeError(f"not a coset expression: {e!r}")


def dec_expr(p):
    if "lattice" in p:
        return Leaf(dec_coset(p))
    op = p.get("op")
    args = p.get("args")
    if not isinstance(args, list):
        raise FormatError("expression node needs an 'args' list")
    if op == "normalized":
        ref = dec_lattice(p["refinement"]) if p.get("refinement") is not None else None
        cosets = tuple(dec_coset(a) for a in args)
        residue = tuple((dec_coset(r["coset"]), int(r["multiplicity"])) for r in p.get("residue", []))
        return NormalizedSystem(int(p["dim"]), ref, cosets, residue, frozenset(C.offset for C in cosets))
    if not args:
        raise FormatError(f"'{op}' needs at least one argument")
    nodes = [dec_expr(a) for a in args]
    if op == "union":
        return Union(tuple(nodes))
    if op == "intersect":
        return Intersection(tuple(nodes))
    if op == "diff":
        return Difference(nodes[0], tuple(nodes[1:]))
    raise FormatError(f"unknown expression op {op!r}")


# distributions

def enc_wfunc(w):
    return [{"a": enc_complex(a), "s": _vec(s)} for s, a in w.terms]


def dec_wfunc(p, dim):
    return WFunction.from_terms([(_dvec(t["s"], dim), dec_complex(t["a"])) for t in p], dim)


def enc_support(S):
    if S is DENSE:
        return {"type": "dense"}
    if isinstance(S, Coset):
        return {"type": "coset", **enc_coset(S)}
    return {"type": "points", "points": [_vec(p) for p in S.points]}


def dec_support(p, dim):
    kind = p.get("type")
    if kind == "dense":
        return DENSE
    if kind == "coset":
        C = dec_coset(p)
        if C.dim != dim:
            raise FormatError("coset dimension differs from document dim")
        return C
    if kind == "points":
        return PointSet(tuple(_dvec(q, dim) for q in p["points"]))
    raise FormatError(f"unknown support type {kind!r}")


def enc_distribution(f):
    return {"dim": f.dim, "terms": [
        {"support": enc_support(t.support), "m": list(t.m), "k": list(t.k), "coeff": enc_wfunc(t.coeff)}
        for t in f.terms]}


def _multi(v, dim):
    if not isinstance(v, list) or len(v) != dim or any(not isinstance(x, int) or x < 0 for x in v):
        raise FormatError(f"bad multi-index {v!r}")
    return tuple(v)


def dec_distribution(p):
    dim = int(p["dim"])
    terms = []
    for t in p["terms"]:
        S = dec_support(t["support"], dim)
        k = _multi(t.get("k", [0] * dim), dim)
        if S is DENSE and any(k):
            raise FormatError("dense terms carry no derivative")
        terms.append(CombTerm(S, _multi(t.get("m", [0] * dim), dim), k, dec_wfunc(t["coeff"], dim)))
    return CombDistribution(dim, tuple(terms))


# test functions

def enc_testfn(phi):
    return {"dim": phi.dim, "atoms": [
        {"a": at.a, "center": list(at.center), "mod": list(at.mod),
         "poly": [{"alpha": list(al), "c": enc_complex(c)} for al, c in at.poly]}
        for at in phi.atoms]}


def dec_testfn(p):
    dim = int(p["dim"])
    atoms = []
    for a in p["atoms"]:
        width = float(a["a"])
        if not width > 0:
            raise FormatError("Gaussian width must be positive")
        center = tuple(float(v) for v in _dvec(a["center"], dim))
        mod = tuple(float(v) for v in _dvec(a.get("mod", [0.0] * dim), dim))
        poly = _poly((_multi(t["alpha"], dim), complex(dec_complex(t["c"]))) for t in a["poly"])
        atoms.append(Atom(poly, width, center, mod))
    if not atoms:
        raise FormatError("a test function needs at least one atom")
    return TestFunction(tuple(atoms))


# point clouds and fits

def enc_cloud(c):
    return {
        "dim": c.dim,
        "points": [[float(v) for v in p] for p in c.points],
        "amplitudes": None if c.amplitudes is None else [enc_complex(a) for a in c.amplitudes],
        "box": [[float(v) for v in c.box[0]], [float(v) for v in c.box[1]]],
    }


def dec_cloud(p):
    dim = int(p["dim"])
    pts = np.array([[float(v) for v in _dvec(q, dim)] for q in p["points"]], float).reshape(-1, dim)
    amps = p.get("amplitudes")
    amps = None if amps is None else [complex(dec_complex(a)) for a in amps]
    box = p.get("box")
    box = None if box is None else (np.array(box[0], float), np.array(box[1], float))
    return PointCloud(pts, amps, box)


def _plist(v):
    return [[float(x) for x in p] for p in v]


def enc_fit(fit):
    summary = []
    for s in fit.amplitude_summary:
        summary.append({"count": s["count"], "mean": enc_complex(s["mean"]),
                        "min_abs": enc_real(s["min_abs"]), "max_abs": enc_real(s["max_abs"])})
    return {"cosets": [enc_coset(C) for C in fit.cosets], "uncovered": _plist(fit.uncovered),
            "overcover": _plist(fit.overcover), "double_covered": _plist(fit.double_covered),
            "amplitude_summary": summary}


def dec_fit(p):
    summary = []
    for s in p.get("amplitude_summary", []):
        summary.append({"count": int(s["count"]), "mean": complex(dec_complex(s["mean"])),
                        "min_abs": math.nan if s["min_abs"] is None else float(s["min_abs"]),
                        "max_abs": math.nan if s["max_abs"] is None else float(s["max_abs"])})
    tup = lambda v: [tuple(float(x) for x in q) for q in v]  # noqa: E731
    return CosetFit([dec_coset(c) for c in p["cosets"]], tup(p["uncovered"]), tup(p["overcover"]),
                    tup(p.get("double_covered", [])), summary)


def plain(x):
    """Reports: turn numpy scalars, Fractions and complex values into JSON."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return enc_complex(x)
    if isinstance(x, np.ndarray):
        return plain(x.tolist())
    v = float(x)
    return None if math.isnan(v) else (str(v) if math.isinf(v) else v)


ENCODERS = {"lattice": enc_lattice, "coset_expression": enc_expr, "distribution": enc_distribution,
            "testfunction": enc_testfn, "point_cloud": enc_cloud, "fit": enc_fit, "report": plain}
DECODERS = {"lattice": dec_lattice, "coset_expression": dec_expr, "distribution": dec_distribution,
            "testfunction": dec_testfn, "point_cloud": dec_cloud, "fit": dec_fit, "report": lambda p: p}


def kind_of(obj):
    if isinstance(obj, Lattice):
        return "lattice"
    if isinstance(obj, (Coset, Leaf, Union, Intersection, Difference, NormalizedSystem)):
        return "coset_expression"
    if isinstance(obj, CombDistribution):
        return "distribution"
    if isinstance(obj, TestFunction):
        return "testfunction"
    if isinstance(obj, PointCloud):
        return "point_cloud"
    if isinstance(obj, CosetFit):
        return "fit"
    if isinstance(obj, dict):
        return "report"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, kind=None, meta=None):
    kind = kind or kind_of(obj)
    if kind not in ENCODERS:
        raise FormatError(f"unknown document kind {kind!r}")
    doc = {"format_version": FORMAT_VERSION, "kind": kind, "payload": ENCODERS[kind](obj),
           "meta": plain(meta or {})}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads_document(text):
    """Parse an envelope; returns (kind, decoded object, meta)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise FormatError("document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")
    kind = doc.get("kind")
    if kind not in DECODERS:
        raise FormatError(f"unknown document kind {kind!r}")
    try:
        obj = DECODERS[kind](doc.get("payload"))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError, IndexError, ZeroDivisionError) as e:
        raise FormatError(f"malformed {kind} payload: {e!r}") from e
    meta = doc.get("meta", {})
    return kind, obj, meta if isinstance(meta, dict) else {}


def loads(text, expect=None):
    kind, obj, _ = loads_document(text)
    if expect is not None and kind not in ((expect,) if isinstance(expect, str) else expect):
        raise FormatError(f"expected a {expect} document, got {kind}")
    return obj


def save(path, obj, kind=None, meta=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj, kind, meta))


def load(path, expect=None):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), expect)


def read_cloud_csv(path, dim=None):
    """One point per line: coordinates, then optionally amplitude re, im.

    Without ``dim`` every column is a coordinate. Blank lines and lines
    starting with '#' are skipped.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.reader(fh), 1):
            row = [c.strip() for c in row if c.strip()]
            if not row or row[0].startswith("#"):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as e:
                raise FormatError(f"line {line_no}: {e}") from e
    if not rows:
        raise FormatError("empty point cloud")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FormatError("rows of differing width")
    if dim is None:
        dim = width
    if width not in (dim, dim + 2):
        raise FormatError(f"rows have {width} columns; expected {dim} or {dim + 2}")
    A = np.array(rows, float)
    amps = A[:, dim] + 1j * A[:, dim + 1] if width == dim + 2 else None
    return PointCloud(A[:, :dim], amps)
