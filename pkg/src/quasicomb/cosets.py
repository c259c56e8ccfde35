"""Set algebra over lattice cosets.

Expressions are trees of :class:`Union`, :class:`Intersection` and
:class:`Difference` nodes over :class:`Leaf` cosets. :func:`normalize`
rewrites an expression as a disjoint union of cosets of one common
full-rank sublattice plus a signed residue of lower-rank cosets.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _linalg as la
from .errors import DimensionMismatch, IncommensurableLeaves
from .lattice import (
    Coset,
    contains,
    coset_representatives,
    intersect,
    intersect_subgroups,
)


@dataclass(frozen=True)
class Leaf:
    coset: Coset

    @property
    def dim(self):
        return self.coset.dim


@dataclass(frozen=True)
class Union:
    args: tuple

    @property
    def dim(self):
        return self.args[0].dim


@dataclass(frozen=True)
class Intersection:
    args: tuple

    @property
    def dim(self):
        return self.args[0].dim


@dataclass(frozen=True)
class Difference:
    """``left`` minus the union of ``right``."""

    left: object
    right: tuple

    @property
    def dim(self):
        return self.left.dim


def _node(x):
    return Leaf(x) if isinstance(x, Coset) else x


def union(*args):
    return Union(tuple(_node(a) for a in args))


def intersection(*args):
    return Intersection(tuple(_node(a) for a in args))


def diff(left, *right):
    return Difference(_node(left), tuple(_node(r) for r in right))


def leaves(expr):
    if isinstance(expr, Leaf):
        return [expr.coset]
    if isinstance(expr, Difference):
        out = leaves(expr.left)
        for r in expr.right:
            out += leaves(r)
        return out
    out = []
    for a in expr.args:
        out += leaves(a)
    return out


def membership(expr, p):
    """Evaluate the set expression at ``p`` by direct leaf containment."""
    if len(p) != expr.dim:
        raise DimensionMismatch("point and expression dimensions differ")
    if isinstance(expr, Leaf):
        return contains(expr.coset, p)
    if isinstance(expr, Union):
        return any(membership(a, p) for a in expr.args)
    if isinstance(expr, Intersection):
        return all(membership(a, p) for a in expr.args)
    return membership(expr.left, p) and not any(membership(r, p) for r in expr.right)


def coset_intersection(A, B):
    """``A ∩ B`` for exact cosets of any rank, or None when empty."""
    L = intersect_subgroups(A.lattice, B.lattice)
    rhs = [b - a for a, b in zip(A.offset, B.offset)]
    den = la.common_denominator(
        [v for r in A.lattice.basis for v in r]
        + [v for r in B.lattice.basis for v in r]
        + rhs
    )
    c1 = [[int(v * den) for v in c] for c in A.lattice.columns]
    c2 = [[-int(v * den) for v in c] for c in B.lattice.columns]
    hnf, pivots, U = la.column_hnf(c1 + c2, A.dim, track=True)
    w = la.solve_echelon(hnf, pivots, [int(v * den) for v in rhs])
    if w is None:
        return None
    n1 = len(c1)
    u = [sum(wk * U[k][i] for k, wk in enumerate(w)) for i in range(n1)]
    point = [a + sum(b * z for b, z in zip(row, u)) for a, row in zip(A.offset, A.lattice.basis)]
    return Coset(L, point)


def _product(S, T):
    out = {}
    for A, a in S.items():
        for B, b in T.items():
            if A.lattice == B.lattice:
                # same lattice: cosets are equal or disjoint
                C = A if A.offset == B.offset else None
            else:
                C = coset_intersection(A, B)
            if C is not None:
                out[C] = out.get(C, 0) + a * b
    return out


def _combine(S, T, sign=1):
    out = dict(S)
    for C, c in T.items():
        out[C] = out.get(C, 0) + sign * c
    return out


def _signed(expr):
    if isinstance(expr, Leaf):
        return {expr.coset: 1}
    if isinstance(expr, Intersection):
        acc = _signed(expr.args[0])
        for a in expr.args[1:]:
            acc = _clean(_product(acc, _signed(a)))
        return acc
    if isinstance(expr, Union):
        acc = _signed(expr.args[0])
        for a in expr.args[1:]:
            s = _signed(a)
            acc = _clean(_combine(_combine(acc, s), _product(acc, s), -1))
        return acc
    acc = _signed(expr.left)
    if not expr.right:
        return acc
    rest = _signed(union(*expr.right)) if len(expr.right) > 1 else _signed(expr.right[0])
    return _clean(_combine(acc, _product(acc, rest), -1))


def _clean(S):
    return {C: c for C, c in S.items() if c != 0}


def _sort_key(C):
    return (-C.rank, C.lattice.basis, C.offset)


def _check_exact(expr):
    for C in leaves(expr):
        if not C.exact:
            raise IncommensurableLeaves("coset algebra requires rational leaves")


def comb_coefficients(expr):
    """Signed coset combination whose indicator sum is the expression's indicator.

    Uses 1_{A∪B} = 1_A + 1_B - 1_{A∩B} and 1_{A∖B} = 1_A - 1_{A∩B}.
    """
    _check_exact(expr)
    return sorted(_signed(expr).items(), key=lambda kv: _sort_key(kv[0]))


@dataclass(frozen=True)
class NormalizedSystem:
    """Disjoint full-rank cosets of ``refinement`` plus a signed residue."""

    dim: int
    refinement: object
    full_rank_cosets: tuple
    residue: tuple
    _offsets: frozenset = field(default=frozenset(), repr=False, compare=False)

    def indicator(self, p):
        p = [la.to_number(v) for v in p]
        n = 0
        if self.refinement is not None and Coset(self.refinement, p).offset in self._offsets:
            n = 1
        for C, m in self.residue:
            if contains(C, p):
                n += m
        return n

    def density(self):
        if not self.full_rank_cosets:
            return Fraction(0)
        return Fraction(len(self.full_rank_cosets)) / self.refinement.det_abs

    def as_expression(self):
        return union(*self.full_rank_cosets)


def normalize(expr):
    """Disjoint normal form of a coset expression."""
    combo = comb_coefficients(expr)
    d = expr.dim
    full = [(C, c) for C, c in combo if C.rank == d]
    residue = tuple((C, c) for C, c in combo if C.rank < d)
    if not full:
        return NormalizedSystem(d, None, (), residue)
    L0 = full[0][0].lattice
    for C, _ in full[1:]:
        if C.lattice != L0:
            L0 = intersect(L0, C.lattice)
    counts = _refine_counts(full, L0)
    bad = [v for v in counts.values() if v not in (0, 1)]
    assert not bad, f"refined multiplicities outside {{0,1}}: {bad[:3]}"
    offsets = sorted(k for k, v in counts.items() if v == 1)
    cosets = tuple(Coset(L0, o) for o in offsets)
    return NormalizedSystem(d, L0, cosets, residue, frozenset(C.offset for C in cosets))


def _refine_counts(full, L0):
    """Sum of signs per coset of L0, vectorized over representatives."""
    d = L0.dim
    den = la.common_denominator(
        [v for r in L0.basis for v in r]
        + [v for C, _ in full for r in C.lattice.basis for v in r]
        + [v for C, _ in full for v in C.offset]
    )
    B0 = np.array([[int(v * den) for v in row] for row in L0.basis], dtype=object)
    cols = [B0[:, j] for j in range(d)]
    counts = {}
    for C, c in full:
        reps = coset_representatives(C.lattice, L0)
        V = np.array([[int((a + r) * den) for a, r in zip(C.offset, rep)] for rep in reps],
                     dtype=object).reshape(-1, d)
        for j in range(d):
            q = V[:, j] // cols[j][j]
            V = V - np.outer(q, cols[j])
        for row in map(tuple, V):
            counts[row] = counts.get(row, 0) + c
    return {tuple(Fraction(int(v), den) for v in k): n for k, n in counts.items()}
