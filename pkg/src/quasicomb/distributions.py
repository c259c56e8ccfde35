"""Comb distributions with locally finite support.

A :class:`CombTerm` on a coset or finite point set ``S`` stands for

    sum_{x in S}  x^m * w(x) * D^k delta_x

with ``w`` a :class:`~quasicomb.wfunc.WFunction`: the coefficient of
``D^k delta_x`` is the number ``x^m w(x)``. A term on :data:`DENSE`
support is instead the smooth density ``y^m w(y) dy`` (k is zero); such
terms arise as Fourier transforms of finite point sets.
"""
import math
from functools import lru_cache
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import _linalg as la
from .errors import DegenerateData, DimensionMismatch
from .lattice import Coset, contains, dual, enumerate_array
from .wfunc import WFunction, _fkey, dot, expi

PRUNE_RTOL = 1e-13


class _Dense:
    """Marker support: Lebesgue measure (terms are densities)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DENSE"

    def __reduce__(self):
        return (_Dense, ())


DENSE = _Dense()


@dataclass(frozen=True)
class PointSet:
    points: tuple

    def __post_init__(self):
        pts = tuple(sorted({tuple(la.to_number(v) for v in p) for p in self.points},
                           key=lambda p: tuple(float(v) for v in p)))
        object.__setattr__(self, "points", pts)

    @property
    def dim(self):
        return len(self.points[0]) if self.points else 0

    def array(self):
        return np.array([[float(v) for v in p] for p in self.points], float)


def _multi(idx, d):
    idx = tuple(int(v) for v in (idx if idx is not None else (0,) * d))
    if len(idx) != d or any(v < 0 for v in idx):
        raise DimensionMismatch(f"bad multi-index {idx} for dimension {d}")
    return idx


@dataclass(frozen=True)
class CombTerm:
    support: object
    m: tuple
    k: tuple
    coeff: WFunction

    @property
    def dim(self):
        return self.coeff.dim

    @property
    def kind(self):
        if self.support is DENSE:
            return "dense"
        return "coset" if isinstance(self.support, Coset) else "points"

    def points_in_ball(self, center, radius):
        """Float array of support points in the closed ball."""
        if isinstance(self.support, Coset):
            P, _ = enumerate_array(self.support, center, radius)
            return P
        if self.support is DENSE:
            raise TypeError("dense terms have no point support")
        P = self.support.array().reshape(-1, self.dim)
        ctr = np.array([float(v) for v in center])
        return P[np.sum((P - ctr) ** 2, axis=1) <= radius * radius * (1 + 1e-9) + 1e-18]

    def values(self, P):
        """The coefficient ``x^m w(x)`` at each row of ``P``."""
        mono = np.prod(P ** np.array(self.m, float), axis=1) if len(P) else np.zeros(0)
        return mono * self.coeff.evaluate(P)


def term(support, coeff=1, m=None, k=None, dim=None):
    """Build a :class:`CombTerm`; ``coeff`` may be a number or a WFunction."""
    if isinstance(support, Coset):
        d = support.dim
    elif support is DENSE:
        d = dim if dim is not None else coeff.dim
    else:
        if not isinstance(support, PointSet):
            support = PointSet(tuple(support))
        d = support.dim or dim
    if not isinstance(coeff, WFunction):
        coeff = WFunction.constant(coeff, d)
    k = _multi(k, d)
    if support is DENSE and any(k):
        raise ValueError("dense terms carry no derivative")
    return CombTerm(support, _multi(m, d), k, coeff)


@dataclass(frozen=True)
class CombDistribution:
    dim: int
    terms: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.dim != self.dim:
                raise DimensionMismatch("term dimension differs from distribution")

    @property
    def K(self):
        return max((sum(t.k) for t in self.terms), default=0)

    @property
    def M(self):
        return max((sum(t.m) for t in self.terms), default=0)

    def __add__(self, other):
        if self.dim != other.dim:
            raise DimensionMismatch("distributions live in different dimensions")
        return CombDistribution(self.dim, self.terms + other.terms).canonical()

    def scale(self, c):
        return CombDistribution(self.dim, tuple(replace(t, coeff=t.coeff.scale(c)) for t in self.terms))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return self.scale(c)

    def is_empty(self):
        return not self.terms

    def canonical(self):
        return canonical(self)

    def isclose(self, other, rtol=1e-12):
        return isclose(self, other, rtol)


def comb(support, coeff=1, m=None, k=None, dim=None):
    """A single-term distribution."""
    t = term(support, coeff, m, k, dim)
    return CombDistribution(t.dim, (t,))


def point_masses(points, weights, k=None):
    """``sum_i weights[i] * D^k delta_{points[i]}``."""
    points = [tuple(p) for p in points]
    d = len(points[0])
    terms = [term(PointSet((p,)), w, k=k) for p, w in zip(points, weights)]
    return CombDistribution(d, tuple(terms)).canonical()


def _support_key(S):
    if S is DENSE:
        return (0,)
    if isinstance(S, PointSet):
        return (1, tuple(_fkey(p) for p in S.points))
    if S.exact:
        return (2, S.lattice.basis, S.offset)
    return (3, tuple(round(float(v), 9) for r in S.lattice.basis for v in r),
            _fkey(S.offset))


def _expand_points(t):
    out = []
    for p in t.support.points:
        mono = 1
        for x, e in zip(p, t.m):
            mono = mono * x ** e
        val = sum((a * _expi_dot(s, p) for s, a in t.coeff.terms), Fraction(0))
        out.append(CombTerm(PointSet((p,)), (0,) * t.dim, t.k,
                            WFunction.constant(mono * val, t.dim)))
    return out


def _expi_dot(s, p):
    return expi(dot(s, p))


def _order_key(t):
    kind = {"dense": 0, "points": 1, "coset": 2}[t.kind]
    if t.kind == "coset":
        sk = (tuple(float(v) for r in t.support.lattice.basis for v in r),
              tuple(float(v) for v in t.support.offset))
    elif t.kind == "points":
        sk = ((), tuple(float(v) for p in t.support.points for v in p))
    else:
        sk = ((), ())
    return (kind, sk, t.m, t.k)


@lru_cache(maxsize=256)
def _dual(L):
    return dual(L)


def _reduce_frequencies(t):
    """Frequencies of a coset coefficient are only defined modulo L*.

    On ``L + tau``, ``exp(2 pi i <s + l*, x>) = exp(2 pi i <l*, tau>) exp(2 pi i <s, x>)``;
    each frequency is replaced by its reduced representative with that phase.
    """
    C = t.support
    Ld = _dual(C.lattice)
    pairs = []
    for s, a in t.coeff.terms:
        r = Coset(Ld, s).offset
        shift = [x - y for x, y in zip(s, r)]
        pairs.append((r, a * expi(dot(shift, C.offset))))
    return replace(t, coeff=WFunction.from_terms(pairs, t.dim))


def canonical(f):
    """Merge like terms, expand point terms per point, drop zero terms.

    Coset-term frequencies are reduced modulo the dual lattice, so equal
    distributions get equal term lists.
    """
    expanded = []
    for t in f.terms:
        if t.kind == "points":
            expanded.extend(_expand_points(t))
        elif t.kind == "coset" and t.support.lattice.full_rank:
            expanded.append(_reduce_frequencies(t))
        else:
            expanded.append(t)
    scale = max((float(t.coeff.norm()) for t in expanded), default=0.0)
    groups = {}
    order = []
    for t in expanded:
        key = (_support_key(t.support), t.m, t.k)
        if key in groups:
            groups[key] = replace(groups[key], coeff=groups[key].coeff + t.coeff)
        else:
            groups[key] = t
            order.append(key)
    tol = PRUNE_RTOL * scale
    out = []
    for key in order:
        t = groups[key]
        c = t.coeff.prune(tol) if tol > 0 else t.coeff
        if c:
            out.append(replace(t, coeff=c))
    out.sort(key=_order_key)
    return CombDistribution(f.dim, tuple(out))


def _support_close(a, b, tol=1e-9):
    if (a is DENSE) or (b is DENSE):
        return a is b
    if isinstance(a, PointSet) or isinstance(b, PointSet):
        if not (isinstance(a, PointSet) and isinstance(b, PointSet)):
            return False
        return len(a.points) == len(b.points) and np.allclose(a.array(), b.array(), atol=tol, rtol=0)
    return a.isclose(b, tol)


def isclose(f, g, rtol=1e-12):
    """Structural equality up to float round-off in coefficients and offsets."""
    if f.dim != g.dim:
        return False
    F, G = canonical(f).terms, canonical(g).terms
    if len(F) != len(G):
        return False
    scale = max([float(t.coeff.norm()) for t in F + G] + [1.0])
    used = set()
    for t in F:
        for j, u in enumerate(G):
            if j in used or t.m != u.m or t.k != u.k:
                continue
            if not _support_close(t.support, u.support):
                continue
            if float((t.coeff - u.coeff).norm()) <= rtol * scale:
                used.add(j)
                break
        else:
            return False
    return True


def component_measure(f, k):
    """The measure ``mu_k`` collecting the ``D^k`` terms, derivative stripped."""
    k = _multi(k, f.dim)
    terms = tuple(replace(t, k=(0,) * f.dim) for t in f.terms if t.k == k)
    return CombDistribution(f.dim, terms)


def components(f):
    return {k: component_measure(f, k) for k in sorted({t.k for t in f.terms})}


def reassemble(parts, dim):
    """``sum_k D^k mu_k`` from a mapping k -> mu_k."""
    terms = []
    for k, mu in parts.items():
        for t in mu.terms:
            terms.append(replace(t, k=_multi(k, dim)))
    return CombDistribution(dim, tuple(terms))


def coefficient_at(f, point, k):
    """Total coefficient of ``D^k delta_point`` in ``f`` (0 off the support)."""
    k = _multi(k, f.dim)
    p = [la.to_number(v) for v in point]
    if len(p) != f.dim:
        raise DimensionMismatch("point has wrong dimension")
    total = 0
    for t in f.terms:
        if t.k != k or t.kind == "dense":
            continue
        if t.kind == "coset":
            inside = contains(t.support, p)
        else:
            inside = any(np.allclose([float(v) for v in q], [float(v) for v in p], atol=1e-9, rtol=0)
                         for q in t.support.points)
        if not inside:
            continue
        mono = 1
        for x, e in zip(p, t.m):
            mono = mono * x ** e
        val = sum((a * _expi_dot(s, p) for s, a in t.coeff.terms), Fraction(0))
        total = total + mono * val
    return total


def _aggregate(f, radius, center=None):
    """Per-point coefficient table: (points array, {k: complex array})."""
    center = center if center is not None else (0,) * f.dim
    rows = {}
    pts = []
    table = {}
    for t in f.terms:
        if t.kind == "dense":
            continue
        P = t.points_in_ball(center, radius)
        vals = t.values(P)
        for p, v in zip(P, vals):
            key = tuple(np.round(p, 9))
            if key not in rows:
                rows[key] = len(pts)
                pts.append(p)
            table.setdefault(t.k, {}).setdefault(rows[key], 0j)
            table[t.k][rows[key]] += v
    n = len(pts)
    P = np.array(pts, float).reshape(n, f.dim)
    out = {}
    for k, d in table.items():
        arr = np.zeros(n, complex)
        for i, v in d.items():
            arr[i] = v
        out[k] = arr
    return P, out


@dataclass
class CoefficientReport:
    radius: float
    n_points: int
    sum_min: float
    sum_max: float
    argmin: tuple
    weighted_min: float = None
    weighted_max: float = None
    zeros: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def ok(self):
        return not self.violations


def check_coefficient_bounds(f, ball_radius, c=None, C=None, h=None, zero_tol=1e-12):
    """Coefficient bound diagnostics over the support in ``B(0, ball_radius)``.

    Reports min/max of ``sum_k |p_k(x)|`` and, when exponents ``h`` (a
    mapping multi-index -> int, default 0) are given, of
    ``max_k |p_k(x)| (1 + |x|)^(-h(k))``. Points where every coefficient
    vanishes are listed in ``zeros``; ``c``/``C`` violations are reported
    for whichever quantity is being tested (the weighted one if ``h``).
    """
    if ball_radius <= 0:
        raise ValueError("radius must be positive")
    P, table = _aggregate(f, ball_radius)
    if len(P) == 0:
        return CoefficientReport(ball_radius, 0, math.nan, math.nan, None)
    absvals = {k: np.abs(v) for k, v in table.items()}
    sums = sum(absvals.values())
    scale = max(float(sums.max()), 1.0)
    i = int(np.argmin(sums))
    rep = CoefficientReport(ball_radius, len(P), float(sums.min()), float(sums.max()),
                            tuple(map(float, P[i])))
    rep.zeros = [tuple(map(float, p)) for p in P[sums <= zero_tol * scale]]
    tested_min, tested_max = rep.sum_min, rep.sum_max
    if h is not None:
        radial = 1 + np.linalg.norm(P, axis=1)
        hk = (h if callable(h) else (lambda k: h.get(k, 0)))
        w = np.max([a * radial ** (-float(hk(k))) for k, a in absvals.items()], axis=0)
        rep.weighted_min, rep.weighted_max = float(w.min()), float(w.max())
        tested_min, tested_max = rep.weighted_min, rep.weighted_max
    if c is not None and tested_min < c:
        rep.violations.append(f"lower bound c={c} violated: min={tested_min:.6g}")
    if C is not None and tested_max > C:
        rep.violations.append(f"upper bound C={C} violated: max={tested_max:.6g}")
    return rep


def growth_exponent(f, radii):
    """Least-squares slope of log S(r) against log r.

    ``S(r) = sum_{|x|<=r} sum_k |p_k(x)|``; the slope estimates ``d + M``.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("need at least three increasing radii")
    P, table = _aggregate(f, radii[-1])
    mags = sum((np.abs(v) for v in table.values()), np.zeros(len(P)))
    norms = np.linalg.norm(P, axis=1) if len(P) else np.zeros(0)
    S = np.array([mags[norms <= r * (1 + 1e-12)].sum() for r in radii])
    pos = S > 0
    if pos.sum() < 2 or np.allclose(S[pos], S[pos][0], rtol=1e-12, atol=0):
        raise DegenerateData("partial sums do not grow over the given radii")
    slope, _ = np.polyfit(np.log(np.array(radii)[pos]), np.log(S[pos]), 1)
    return float(slope)
