"""Full-rank lattices in R^d, their cosets and discreteness diagnostics.

Exact lattices have rational bases stored in lower column Hermite normal
form, so two exact lattices are equal iff their stored bases are equal.
Lattices with float generators (e.g. ``sqrt(2) * Z^2``) are *numeric*:
they support point enumeration and Fourier work, but not the exact set
algebra (:func:`intersect`, :func:`index_in`).
"""
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from . import _linalg as la
from .errors import (
    DimensionMismatch,
    NotASublattice,
    NumericLatticeError,
    RankDeficientIntersection,
    SingularBasis,
    TooFewPoints,
)

SNAP = 1e-12
MAX_ENUMERATION = 20_000_000


@dataclass(frozen=True)
class Lattice:
    """A discrete subgroup ``basis @ Z^rank`` of R^dim.

    ``basis`` is a tuple of rows; the generators are its columns. Build
    instances with :func:`canonicalize` (full rank) or :func:`subgroup`.
    """

    basis: tuple

    @property
    def dim(self):
        return len(self.basis)

    @property
    def rank(self):
        return len(self.basis[0]) if self.basis else 0

    @property
    def exact(self):
        return all(la.is_exact(v) for row in self.basis for v in row)

    @property
    def full_rank(self):
        return self.rank == self.dim

    @property
    def columns(self):
        return [tuple(self.basis[i][j] for i in range(self.dim)) for j in range(self.rank)]

    @cached_property
    def pivots(self):
        """Pivot row of each column of an exact echelon basis."""
        out = []
        for col in self.columns:
            out.append(next(i for i, v in enumerate(col) if v != 0))
        return tuple(out)

    @cached_property
    def det_abs(self):
        if not self.full_rank:
            raise ValueError("det_abs is defined for full-rank lattices only")
        if self.exact:
            return abs(la.det(self.basis))
        return abs(float(np.linalg.det(self.matrix)))

    @cached_property
    def matrix(self):
        """Float basis as a (dim, rank) array."""
        return np.array([[float(v) for v in row] for row in self.basis], dtype=float).reshape(
            self.dim, self.rank
        )

    @cached_property
    def reduced(self):
        """LLL-reduced float basis R and integer U with R = basis @ U."""
        R = np.array(la.lll_reduce(self.matrix.T.tolist()), float).T
        U = np.rint(np.linalg.solve(self.matrix, R)).astype(np.int64)
        return self.matrix @ U, U

    @cached_property
    def covering_diameter(self):
        """Upper bound on the diameter of the fundamental parallelepiped."""
        return float(sum(np.linalg.norm(self.reduced[0], axis=0)))

    def __repr__(self):
        rows = [[str(v) for v in row] for row in self.basis]
        return f"Lattice({rows})"

    @classmethod
    def standard(cls, dim):
        return canonicalize([[int(i == j) for j in range(dim)] for i in range(dim)])

    def scaled(self, factor):
        return canonicalize([[factor * v for v in row] for row in self.basis])


def _as_matrix(raw_basis):
    rows = [[la.to_number(v) for v in row] for row in raw_basis]
    d = len(rows)
    if d == 0 or any(len(r) != len(rows[0]) for r in rows):
        raise DimensionMismatch("basis must be a non-empty rectangular matrix")
    return rows


def canonicalize(raw_basis):
    """Canonical full-rank lattice generated by the columns of ``raw_basis``.

    >>> canonicalize([[1, 1], [-1, 1]])
    Lattice([['1', '0'], ['1', '2']])
    """
    rows = _as_matrix(raw_basis)
    d = len(rows)
    if len(rows[0]) != d:
        raise DimensionMismatch(f"expected a {d}x{d} basis")
    if all(la.is_exact(v) for r in rows for v in r):
        if la.det(rows) == 0:
            raise SingularBasis("basis is singular")
        cols, _ = la.rational_hnf(la.columns(rows), d)
        return Lattice(tuple(tuple(r) for r in la.from_columns(cols, d)))
    m = np.array(rows, dtype=float)
    if abs(np.linalg.det(m)) < 1e-12 * max(1.0, np.abs(m).max()) ** d:
        raise SingularBasis("basis is numerically singular")
    cols = la.lll_reduce(m.T.tolist())
    cols = [_sign_normalize(c) for c in cols]
    cols.sort(key=lambda c: (round(math.hypot(*c), 9), [round(-abs(x), 9) for x in c], c))
    return Lattice(tuple(tuple(r) for r in la.from_columns(cols, d)))


def _sign_normalize(col):
    for x in col:
        if abs(x) > SNAP:
            return [v + 0.0 for v in col] if x > 0 else [-v + 0.0 for v in col]
    return col


def subgroup(generators, dim):
    """Exact subgroup of any rank generated by the given column vectors."""
    gens = [[la.to_number(v) for v in g] for g in generators]
    if any(len(g) != dim for g in gens):
        raise DimensionMismatch("generator length differs from dim")
    if not all(la.is_exact(v) for g in gens for v in g):
        raise NumericLatticeError("subgroup() needs rational generators")
    cols, _ = la.rational_hnf(gens, dim) if gens else ([], [])
    if not cols:
        return Lattice(tuple(() for _ in range(dim)))
    return Lattice(tuple(tuple(r) for r in la.from_columns(cols, dim)))


def _require_exact(*lattices):
    for L in lattices:
        if not L.exact:
            raise NumericLatticeError("exact set algebra needs rational lattices")


def _check_dims(*objs):
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")


def dual(L):
    """The dual lattice ``{y : <l, y> in Z for all l in L}``."""
    if not L.full_rank:
        raise ValueError("dual is defined for full-rank lattices")
    if L.exact:
        return canonicalize(la.transpose(la.inverse(L.basis)))
    return canonicalize(np.linalg.inv(L.matrix).T.tolist())


def _combined(L1, L2, extra=()):
    den = la.common_denominator(
        [v for r in L1.basis for v in r] + [v for r in L2.basis for v in r] + list(extra)
    )
    c1 = [[int(v * den) for v in c] for c in L1.columns]
    c2 = [[-int(v * den) for v in c] for c in L2.columns]
    return den, c1, c2


def intersect_subgroups(L1, L2):
    """Exact intersection of two subgroups of any rank."""
    _check_dims(L1, L2)
    _require_exact(L1, L2)
    den, c1, c2 = _combined(L1, L2)
    n1 = len(c1)
    hnf, pivots, U = la.column_hnf(c1 + c2, L1.dim, track=True)
    gens = []
    for u in U[len(hnf):]:
        x = u[:n1]
        gens.append([sum(Fraction(b) * z for b, z in zip(row, x)) for row in L1.basis])
    return subgroup(gens, L1.dim)


def intersect(L1, L2):
    """``L1 ∩ L2`` as a full-rank lattice; raises when the rank drops."""
    M = intersect_subgroups(L1, L2)
    if M.rank < M.dim:
        raise RankDeficientIntersection(M.rank, M)
    return M


def lattice_sum(L1, L2):
    _check_dims(L1, L2)
    _require_exact(L1, L2)
    return subgroup(L1.columns + L2.columns, L1.dim)


def lattice_contains(L, v):
    """Exact membership of a rational vector in an exact lattice."""
    return la.solve_echelon(L.columns, L.pivots, v) is not None


def index_in(L_sub, L):
    """The index ``[L : L_sub]``."""
    _check_dims(L_sub, L)
    _require_exact(L_sub, L)
    if not all(lattice_contains(L, c) for c in L_sub.columns):
        raise NotASublattice("first lattice is not contained in the second")
    q = L_sub.det_abs / L.det_abs
    assert q.denominator == 1
    return int(q)


def coset_representatives(L, L0):
    """Offsets of the ``[L : L0]`` cosets of ``L0`` making up ``L``."""
    coords = []
    for c in L0.columns:
        z = la.solve_echelon(L.columns, L.pivots, c)
        if z is None:
            raise NotASublattice("L0 is not contained in L")
        coords.append(z)
    hnf, _, _ = la.column_hnf(coords, L.dim)
    diag = [hnf[i][i] for i in range(L.dim)]
    reps = []
    for v in itertools.product(*(range(m) for m in diag)):
        reps.append(tuple(la.matvec(L.basis, v)))
    return reps


@dataclass(frozen=True)
class Coset:
    """``lattice + offset``; the offset is reduced on construction.

    Exact lattices use the echelon box ``0 <= v[pivot_j] < b_jj``; numeric
    lattices use the half-open fundamental parallelepiped.
    """

    lattice: Lattice
    offset: tuple = None

    def __post_init__(self):
        off = self.offset
        if off is None:
            off = (Fraction(0),) * self.lattice.dim
        off = [la.to_number(v) for v in off]
        if len(off) != self.lattice.dim:
            raise DimensionMismatch("offset length differs from lattice dim")
        object.__setattr__(self, "offset", tuple(_reduce(self.lattice, off)))

    @property
    def dim(self):
        return self.lattice.dim

    @property
    def exact(self):
        return self.lattice.exact and all(la.is_exact(v) for v in self.offset)

    @property
    def rank(self):
        return self.lattice.rank

    def __repr__(self):
        return f"Coset({self.lattice!r}, offset={[str(v) for v in self.offset]})"

    def translate(self, v):
        return Coset(self.lattice, [a + b for a, b in zip(self.offset, v)])

    def negate(self):
        return Coset(self.lattice, [-a for a in self.offset])

    def isclose(self, other, tol=1e-9):
        if self.dim != other.dim:
            return False
        if self.lattice.exact and other.lattice.exact:
            if self.lattice != other.lattice:
                return False
        elif not same_lattice(self.lattice, other.lattice, tol):
            return False
        if self.exact and other.exact:
            return self.offset == other.offset
        return _near_lattice(self.lattice, np.subtract(np.array(self.offset, float),
                                                       np.array(other.offset, float)), tol)


def _reduce(L, off):
    if L.exact:
        exact = all(la.is_exact(v) for v in off)
        for col, i in zip(L.columns, L.pivots):
            if exact:
                q = math.floor(off[i] / col[i])
            else:
                t = off[i] / float(col[i])
                q = math.floor(t)
                if t - q > 1 - SNAP:
                    q += 1
            if q:
                off = [a - q * b for a, b in zip(off, col)]
            if not exact and abs(off[i]) < SNAP:
                off[i] = 0.0
        if not exact:
            off = [float(v) + 0.0 for v in off]
        return off
    B = L.matrix
    t = np.linalg.solve(B, np.array(off, float))
    t = t - np.floor(t)
    t[(t > 1 - SNAP) | (t < SNAP)] = 0.0
    return [float(v) + 0.0 for v in B @ t]


def same_lattice(L1, L2, tol=1e-9):
    if L1.dim != L2.dim or L1.rank != L2.rank:
        return False
    if L1.exact and L2.exact:
        return L1 == L2
    a = all(_near_lattice(L2, np.array(c, float), tol) for c in L1.columns)
    b = all(_near_lattice(L1, np.array(c, float), tol) for c in L2.columns)
    return a and b


def _near_lattice(L, v, tol):
    B = L.matrix
    z, *_ = np.linalg.lstsq(B, v, rcond=None)
    return float(np.linalg.norm(B @ np.round(z) - v)) <= tol


def contains(C, p, tol=1e-9):
    """Whether point ``p`` lies in coset ``C``.

    Exact cosets and exact points use rational arithmetic; anything
    involving floats is decided within ``tol``.
    """
    if len(p) != C.dim:
        raise DimensionMismatch("point and coset dimensions differ")
    p = [la.to_number(v) for v in p]
    if C.exact and all(la.is_exact(v) for v in p):
        return lattice_contains(C.lattice, [a - b for a, b in zip(p, C.offset)])
    v = np.array(p, float) - np.array(C.offset, float)
    if C.rank == 0:
        return float(np.linalg.norm(v)) <= tol
    return _near_lattice(C.lattice, v, tol)


def enumerate_array(C, center, radius):
    """Coset points within ``radius`` of ``center`` as (points, coords).

    ``points`` is a float array of shape (n, d); ``coords`` holds the
    integer lattice coordinates. Boundary points are kept with a relative
    slack of 1e-9; :func:`enumerate_in_ball` re-decides them exactly.
    """
    if not C.lattice.full_rank:
        raise ValueError("ball enumeration needs a full-rank coset")
    d = C.dim
    B, U = C.lattice.reduced
    off = np.array(C.offset, float)
    ctr = np.array([float(v) for v in center], float)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    Binv = np.linalg.inv(B)
    z0 = Binv @ (ctr - off)
    ext = radius * np.linalg.norm(Binv, axis=1) + 1e-9
    lo = np.ceil(z0 - ext).astype(np.int64)
    hi = np.floor(z0 + ext).astype(np.int64)
    sizes = np.maximum(hi - lo + 1, 0)
    if np.prod(sizes.astype(float)) > MAX_ENUMERATION:
        raise ValueError("enumeration region too large")
    if np.any(sizes == 0):
        return np.zeros((0, d)), np.zeros((0, d), dtype=np.int64)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    Z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    P = Z @ B.T + off
    d2 = np.sum((P - ctr) ** 2, axis=1)
    keep = d2 <= radius * radius * (1 + 1e-9) + 1e-18
    return P[keep], Z[keep] @ U.T


def enumerate_in_ball(C, center, radius):
    """All points of ``C`` in the closed ball ``B(center, radius)``, sorted."""
    P, Z = enumerate_array(C, center, radius)
    if not (C.exact and all(la.is_exact(la.to_number(v)) for v in center)):
        return sorted(tuple(map(float, p)) for p in P)
    ctr = [la.to_number(v) for v in center]
    r2 = Fraction(radius) ** 2
    out = []
    for z in Z:
        p = tuple(a + sum(b * int(k) for b, k in zip(row, z))
                  for a, row in zip(C.offset, C.lattice.basis))
        if sum((a - b) ** 2 for a, b in zip(p, ctr)) <= r2:
            out.append(p)
    return sorted(out)


def separating_constant(points):
    """Minimum distance between distinct points of a finite set."""
    P = np.unique(np.asarray([[float(v) for v in p] for p in points], float), axis=0)
    if len(P) < 2:
        raise TooFewPoints("need at least two distinct points")
    dist, _ = cKDTree(P).query(P, k=2)
    return float(dist[:, 1].min())


def bounded_density_count(points, pitch=0.25, box=None):
    """Largest number of points in a closed unit ball, over a grid of centers.

    Centers range over ``box`` (default: the bounding box of the points) at
    spacing ``pitch``, so this is the sup restricted to those centers.
    """
    if len(points) == 0:
        return 0
    P = np.asarray([[float(v) for v in p] for p in points], float)
    if box is None:
        lo, hi = P.min(axis=0), P.max(axis=0)
    else:
        lo, hi = (np.asarray(b, float) for b in box)
    axes = [np.arange(a, b + pitch / 2, pitch) for a, b in zip(lo, hi)]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.shape[1])
    counts = cKDTree(P).query_ball_point(centers, r=1.0 + 1e-12, return_length=True)
    return int(np.max(counts))
