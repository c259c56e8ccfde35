"""Fit a finite point cloud by a finite union of full-rank lattice cosets."""
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from . import _linalg as la
from .errors import NoFit, tick
from .lattice import Coset, canonicalize


def max_threads():
    try:
        return max(1, int(os.environ.get("QUASICOMB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class PointCloud:
    points: np.ndarray
    amplitudes: np.ndarray = None
    box: tuple = None

    def __post_init__(self):
        self.points = np.asarray(self.points, float)
        if self.points.ndim == 1:
            self.points = self.points[:, None]
        if len(self.points) == 0:
            raise ValueError("empty point cloud")
        if self.amplitudes is not None:
            self.amplitudes = np.asarray(self.amplitudes, complex)
            if len(self.amplitudes) != len(self.points):
                raise ValueError("one amplitude per point expected")
        dist, _ = cKDTree(self.points).query(self.points, k=min(2, len(self.points)))
        if len(self.points) > 1 and dist[:, 1].min() <= 1e-9:
            raise ValueError("cloud points must be pairwise distinct (tolerance 1e-9)")
        if self.box is None:
            self.box = (self.points.min(axis=0), self.points.max(axis=0))
        else:
            self.box = tuple(np.asarray(b, float) for b in self.box)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)


@dataclass
class CosetFit:
    cosets: list
    uncovered: list
    overcover: list
    double_covered: list = field(default_factory=list)
    amplitude_summary: list = field(default_factory=list)

    @property
    def J(self):
        return len(self.cosets)

    @property
    def full_coverage(self):
        return not self.uncovered


def _box_points(B, off, lo, hi):
    """Points of ``B Z^d + off`` inside the axis box [lo, hi]."""
    corners = np.array(list(itertools.product(*zip(lo, hi))), float)
    Z = np.linalg.solve(B, (corners - off).T).T
    zlo = np.floor(Z.min(axis=0) - 1e-9).astype(np.int64)
    zhi = np.ceil(Z.max(axis=0) + 1e-9).astype(np.int64)
    if np.prod((zhi - zlo + 1).astype(float)) > 5e7:
        return None
    axes = [np.arange(a, b + 1) for a, b in zip(zlo, zhi)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    P = G @ B.T + off
    inside = np.all((P >= lo) & (P <= hi), axis=1)
    return P[inside]


class _Scorer:
    def __init__(self, cloud, tol):
        self.cloud = cloud
        self.P = cloud.points
        self.tree = cKDTree(self.P)
        self.tol = tol
        self.lo, self.hi = cloud.box
        self.inner_lo = self.lo + tol
        self.inner_hi = self.hi - tol

    def present(self, X):
        d, idx = self.tree.query(X, distance_upper_bound=self.tol)
        return np.isfinite(d), idx

    def interior(self, X):
        return np.all((X > self.inner_lo) & (X < self.inner_hi), axis=1)

    def line_ok(self, p, v):
        X = np.array([p + n * v for n in (-2, -1, 1, 2)])
        X = X[self.interior(X)]
        return bool(self.present(X)[0].all()) if len(X) else False

    def local_ok(self, p, B):
        d = B.shape[1]
        C = np.array(list(itertools.product(range(-2, 3), repeat=d)), float)
        X = p + C @ B.T
        X = X[self.interior(X)]
        return bool(self.present(X)[0].all())

    def score(self, p, B):
        """Matched cloud indices, or None if an interior coset point is missing."""
        X = _box_points(B, p, self.lo - self.tol, self.hi + self.tol)
        if X is None:
            return None
        ok, idx = self.present(X)
        if not ok[self.interior(X)].all():
            return None
        return np.unique(idx[ok])


def _reduce_basis(vectors):
    cols = la.lll_reduce([list(v) for v in vectors])
    out = []
    for c in cols:
        c = np.array(c)
        nz = np.flatnonzero(np.abs(c) > 1e-9)
        if len(nz) and c[nz[0]] < 0:
            c = -c
        out.append(c)
    out.sort(key=lambda c: (round(float(np.linalg.norm(c)), 9), tuple(np.round(c, 9))))
    return np.array(out).T


def _candidate_vectors(scorer, p, trees, k):
    vecs = []
    for tree, pts in trees:
        kk = min(k + 1, len(pts))
        if kk < 2:
            continue
        _, idx = tree.query(p, k=kk)
        for i in np.atleast_1d(idx):
            v = pts[i] - p
            if np.linalg.norm(v) <= scorer.tol:
                continue
            nz = np.flatnonzero(np.abs(v) > 1e-9)
            if v[nz[0]] < 0:
                v = -v
            if any(np.allclose(v, w, atol=scorer.tol) for w in vecs):
                continue
            if scorer.line_ok(p, v):
                vecs.append(v)
    vecs.sort(key=lambda v: (float(np.linalg.norm(v)), tuple(v)))
    return vecs


def _select(vecs, cap, d):
    """The ``cap`` shortest vectors, plus whatever is needed to reach rank d."""
    out = list(vecs[:cap])
    for v in vecs[cap:]:
        if not out or np.linalg.matrix_rank(np.array(out), tol=1e-9) >= d:
            break
        if np.linalg.matrix_rank(np.array(out + [v]), tol=1e-9) > np.linalg.matrix_rank(np.array(out), tol=1e-9):
            out.append(v)
    return out


def _anchors(cloud, uncovered, n):
    ctr = (cloud.box[0] + cloud.box[1]) / 2
    order = uncovered[np.argsort(np.linalg.norm(cloud.points[uncovered] - ctr, axis=1), kind="stable")]
    picks = [order[int(q * (len(order) - 1))] for q in np.linspace(0, 0.5, n)] if n > 1 else [order[0]]
    return list(dict.fromkeys(int(i) for i in picks))


def _rationalize(x, tol=1e-10, max_den=1000):
    f = Fraction(float(x)).limit_denominator(max_den)
    return f if abs(float(f) - x) <= tol * max(1.0, abs(x)) else None


def _to_coset(B, p):
    entries = [_rationalize(v) for v in B.flatten()]
    offs = [_rationalize(v) for v in p]
    if all(e is not None for e in entries) and all(o is not None for o in offs):
        d = B.shape[0]
        rows = [[entries[i * d + j] for j in range(d)] for i in range(d)]
        return Coset(canonicalize(rows), offs)
    return Coset(canonicalize(B.tolist()), [float(v) for v in p])


def fit_cosets(cloud, max_J=4, dist_tol=1e-6, k_neighbors=12, n_anchors=3, max_vectors=8,
               progress=None):
    """Greedy cover of ``cloud`` by lattice cosets lying inside it.

    Each round builds candidate bases from short difference vectors at a
    few uncovered anchor points (vectors must repeat along a line inside
    the cloud), keeps cosets whose interior box points are all cloud
    points, and takes the one covering most uncovered points; ties go to
    the coarser lattice, then to the lexicographically smaller basis.

    ``progress(done, total)`` is called as candidates of a round are
    scored; returning False cancels with :class:`Cancelled`.
    """
    if max_J < 1:
        raise ValueError("max_J must be at least 1")
    scorer = _Scorer(cloud, dist_tol)
    P = cloud.points
    n, d = P.shape
    covered = np.zeros(n, int)
    chosen = []
    full_tree = (scorer.tree, P)
    for step in range(max_J):
        unc = np.flatnonzero(covered == 0)
        if len(unc) == 0:
            break
        sub = (cKDTree(P[unc]), P[unc])
        jobs = []
        seen = set()
        for a in _anchors(cloud, unc, n_anchors):
            p = P[a]
            k = k_neighbors
            while True:
                vecs = _candidate_vectors(scorer, p, [sub, full_tree], k)
                if len(vecs) >= d and np.linalg.matrix_rank(np.array(vecs), tol=1e-9) == d:
                    break
                if k >= min(n, 256):
                    break
                k *= 2
            vecs = _select(vecs, max_vectors, d)
            for combo in itertools.combinations(vecs, d):
                B = np.array(combo).T
                if abs(np.linalg.det(B)) < 1e-9:
                    continue
                B = _reduce_basis(combo)
                key = (tuple(np.round(B, 7).flatten()), a)
                if key in seen:
                    continue
                seen.add(key)
                if scorer.local_ok(p, B):
                    jobs.append((p, B))

        def evaluate(job):
            p, B = job
            idx = scorer.score(p, B)
            return None if idx is None else (job, idx)

        results = []
        if max_threads() > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_threads()) as ex:
                for res in ex.map(evaluate, jobs):
                    results.append(res)
                    tick(progress, len(results), len(jobs))
        else:
            for j in jobs:
                results.append(evaluate(j))
                tick(progress, len(results), len(jobs))
        best = None
        for res in results:
            if res is None:
                continue
            (p, B), idx = res
            gain = int(np.sum(covered[idx] == 0))
            key = (-gain, -abs(np.linalg.det(B)), tuple(np.round(B, 9).flatten()))
            if best is None or key < best[0]:
                best = (key, p, B, idx)
        if best is None or -best[0][0] < 2:
            if step == 0:
                raise NoFit("no candidate coset covers two or more points")
            break
        _, p, B, idx = best
        covered[idx] += 1
        chosen.append(_to_coset(B, p))
    return _finish(cloud, chosen, dist_tol)


def _coset_matrix(C):
    return C.lattice.reduced[0] if C.lattice.exact else C.lattice.matrix


def _finish(cloud, cosets, tol):
    scorer = _Scorer(cloud, tol)
    n = len(cloud)
    count = np.zeros(n, int)
    owners = []
    overcover = []
    for C in cosets:
        off = np.array([float(v) for v in C.offset])
        X = _box_points(_coset_matrix(C), off, scorer.lo - tol, scorer.hi + tol)
        ok, idx = scorer.present(X)
        overcover += [tuple(map(float, x)) for x in X[(~ok) & scorer.interior(X)]]
        hit = np.unique(idx[ok])
        count[hit] += 1
        owners.append(hit)
    P = cloud.points
    summary = []
    if cloud.amplitudes is not None:
        for hit in owners:
            amp = cloud.amplitudes[hit]
            mags = np.abs(amp)
            summary.append({"count": int(len(hit)), "mean": complex(amp.mean()) if len(hit) else 0j,
                            "min_abs": float(mags.min()) if len(hit) else math.nan,
                            "max_abs": float(mags.max()) if len(hit) else math.nan})
    return CosetFit(
        cosets=list(cosets),
        uncovered=[tuple(map(float, p)) for p in P[count == 0]],
        overcover=sorted(overcover),
        double_covered=[tuple(map(float, p)) for p in P[count > 1]],
        amplitude_summary=summary,
    )


def verify_fit(cloud, fit, dist_tol=1e-6):
    """Recompute uncovered/overcover lists from scratch and compare."""
    fresh = _finish(cloud, fit.cosets, dist_tol)
    consistent = (sorted(fresh.uncovered) == sorted(fit.uncovered)
                  and fresh.overcover == sorted(fit.overcover))
    return VerifyReport(fresh.uncovered, fresh.overcover, fresh.double_covered, consistent)


@dataclass
class VerifyReport:
    uncovered: list
    overcover: list
    double_covered: list
    consistent: bool

    @property
    def exact_cover(self):
        return not self.uncovered and not self.overcover
