"""Shared random generators and brute-force oracles for the test suite."""
import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from quasicomb.lattice import Coset, canonicalize


def det_fraction(rows):
    """Exact determinant by cofactor expansion (d <= 3 in tests)."""
    n = len(rows)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * Fraction(rows[0][j]) * det_fraction(minor)
    return total


def random_int_basis(rng, d, lo=-3, hi=3):
    while True:
        B = [[rng.randint(lo, hi) for _ in range(d)] for _ in range(d)]
        if det_fraction(B) != 0:
            return B


def random_rational_basis(rng, d, dens=(1, 2, 3)):
    """Entries p/q in [-3, 3]."""
    while True:
        B = []
        for _ in range(d):
            row = []
            for _ in range(d):
                q = rng.choice(dens)
                row.append(Fraction(rng.randint(-3 * q, 3 * q), q))
            B.append(row)
        if det_fraction(B) != 0:
            return B


def adjugate_int(B):
    """Integer adjugate and determinant of an integer matrix (float-free for small d)."""
    d = len(B)
    D = int(det_fraction(B))
    adj = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(B) if k != j]
            adj[i][j] = (-1) ** (i + j) * int(det_fraction(minor)) if d > 1 else 1
    return np.array(adj, dtype=np.int64), D


def int_lattice_mask(B, X):
    """Rows of integer array X lying in B Z^d (B integer, columns generate)."""
    adj, D = adjugate_int(B)
    R = X @ adj.T
    return np.all(R % abs(D) == 0, axis=1)


def int_grid(d, half):
    axes = [np.arange(-half, half + 1)] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d).astype(np.int64)


def brute_points(B, off, half):
    """Points of ``B Z^d + off`` in the box [-half, half]^d by direct coefficient search."""
    B = np.array([[float(v) for v in r] for r in B])
    off = np.array([float(v) for v in off])
    d = len(off)
    Binv = np.linalg.inv(B)
    N = int(math.ceil(np.abs(Binv).sum(axis=1).max() * (half + np.abs(off).max()))) + 1
    Z = int_grid(d, N).astype(float)
    P = Z @ B.T + off
    return P[np.all(np.abs(P) <= half + 1e-9, axis=1)]


def point_key(P, den=12):
    return {tuple(r) for r in np.rint(np.asarray(P) * den).astype(np.int64)}


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_coset_expr(rng, d, n_leaves=None, den=1):
    """Random union/intersection/difference tree over integer-basis coset leaves."""
    from quasicomb.cosets import diff, intersection, union

    n = n_leaves or rng.randint(1, 5)
    leaves = []
    for _ in range(n):
        B = random_int_basis(rng, d, -3, 3)
        off = [Fraction(rng.randint(0, 3 * den), den) for _ in range(d)]
        leaves.append(Coset(canonicalize(B), off))
    nodes = list(leaves)
    while len(nodes) > 1:
        rng.shuffle(nodes)
        k = rng.randint(2, min(3, len(nodes)))
        args, nodes = nodes[:k], nodes[k:]
        op = rng.choice([union, intersection, diff, diff])
        nodes.append(op(*args))
    return nodes[0] if not isinstance(nodes[0], Coset) else union(nodes[0])


def synthetic_cloud(rng, half=50, max_J=3, d=2):
    """Union of J <= max_J random integer-lattice cosets, restricted to [-half, half]^d.

    Returns (cosets, points); points are deduplicated on the (1/12) grid
    that contains every offset used here.
    """
    J = rng.randint(1, max_J)
    cosets = []
    for _ in range(J):
        B = random_int_basis(rng, d, -3, 3)
        off = [Fraction(rng.randint(0, 5), rng.choice([1, 2, 3, 4])) for _ in range(d)]
        cosets.append((B, off))
    P = np.vstack([brute_points(B, off, half) for B, off in cosets])
    _, idx = np.unique(np.rint(P * 12).astype(np.int64), axis=0, return_index=True)
    return cosets, P[np.sort(idx)]


def fitted_points(fit, half):
    """Box points of a fit's cosets, enumerated independently of the fitter."""
    parts = [brute_points([list(r) for r in C.lattice.basis], C.offset, half) for C in fit.cosets]
    return np.vstack(parts) if parts else np.zeros((0, 2))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(mod.RESULTS):
            terminalreporter.write_line(mod.RESULTS[n])
