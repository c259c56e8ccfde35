"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line; the lines are printed as they
happen and again in the terminal summary.
"""
import cmath
import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import qmc

from conftest import (brute_points, fitted_points, point_key, random_coset_expr,
                      random_int_basis, random_rational_basis, synthetic_cloud)
from quasicomb.cosets import membership, normalize
from quasicomb.detect import PointCloud, fit_cosets
from quasicomb.distributions import comb, growth_exponent, isclose
from quasicomb.fourier import fourier
from quasicomb.lattice import Coset, Lattice, canonicalize, dual, index_in, intersect
from quasicomb.numerics import almost_periods, pair, poisson_check
from quasicomb.presets import hermite_probes, sine_comb, sine_spectrum, unbounded_comb
from quasicomb.testfn import fourier_testfn, gaussian
from quasicomb.wfunc import WFunction, w_reciprocal

from test_fourier import random_comb

F = Fraction
RESULTS = {}


@pytest.fixture
def record(capsys):
    def _record(n, title, ok, detail):
        line = f"acceptance {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        RESULTS[n] = line
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return _record


def test_01_poisson(record):
    rng = random.Random(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        d = rng.randint(1, 3)
        L = canonicalize(random_rational_basis(rng, d))
        phi = gaussian(d, a=rng.uniform(0.5, 2.0),
                       center=tuple(rng.uniform(-1, 1) for _ in range(d)))
        worst = max(worst, poisson_check(L, phi, tol=1e-8).residual)
    elapsed = time.perf_counter() - start
    record(1, "Poisson identity", worst < 1e-8 and elapsed < 10,
           f"max residual {worst:.2e} (< 1e-8), {elapsed:.2f}s (< 10s)")


def test_02_unbounded_example(record):
    start = time.perf_counter()
    F_hat = fourier(unbounded_comb())
    structural = isclose(F_hat, comb(Coset(Lattice.standard(2)), 1j / (2 * math.pi), k=(1, 0)))
    # direct sum of x_1 phi^(x) over a box where phi^ is below double precision
    v = np.arange(-12, 13, dtype=float)
    X = np.stack(np.meshgrid(v, v, indexing="ij"), axis=-1).reshape(-1, 2)
    worst = 0.0
    for phi in hermite_probes(2):
        direct = np.sum(X[:, 0] * fourier_testfn(phi).evaluate(X))
        worst = max(worst, abs(pair(F_hat, phi).value - direct))
    elapsed = time.perf_counter() - start
    record(2, "unbounded-coefficient example", structural and worst < 1e-8 and elapsed < 1,
           f"structural {structural}, max residual {worst:.2e} (< 1e-8), {elapsed:.2f}s (< 1s)")


def test_03_sine_example(record):
    F_hat = fourier(sine_comb())
    structural = isclose(F_hat, sine_spectrum())
    worst = 0.0
    for phi in hermite_probes(2):
        lhs = pair(F_hat, phi).value
        rhs = pair(sine_comb(), fourier_testfn(phi)).value
        worst = max(worst, abs(lhs - rhs))
    record(3, "sine example", structural and worst < 1e-8,
           f"structural {structural}, max residual {worst:.2e} (< 1e-8)")


def test_04_parseval(record):
    rng = random.Random(404)
    combs = [random_comb(rng, d=2) for _ in range(20)] + [unbounded_comb(), sine_comb()]
    probes = hermite_probes(2)
    failures, ratio = 0, 0.0
    for f in combs:
        F_hat = fourier(f)
        for phi in probes:
            a = pair(F_hat, phi, tail_tol=1e-10)
            b = pair(f, fourier_testfn(phi), tail_tol=1e-10)
            gap = abs(a.value - b.value)
            ratio = max(ratio, gap / (a.bound + b.bound))
            failures += gap > a.bound + b.bound
    record(4, "Parseval law", failures == 0,
           f"{len(combs)} combs x {len(probes)} probes, {failures} outside summed tail bounds, "
           f"worst gap/bound {ratio:.2e}")


def test_05_normalization(record):
    rng = random.Random(505)
    mismatches = checked = 0
    for i in range(10):
        d = 1 + i % 3
        e = random_coset_expr(rng, d, n_leaves=rng.randint(1, 5))
        sysm = normalize(e)
        # integer leaves with integer offsets: every point of any leaf lies on Z^d
        for p in itertools.product(range(-10, 11), repeat=d):
            checked += 1
            mismatches += sysm.indicator(p) != membership(e, p)
    record(5, "coset-ring normalization", mismatches == 0,
           f"{checked} grid points, {mismatches} mismatches")


def box_set(B, half):
    return point_key(brute_points(B, [0] * len(B), half), den=1)


def test_06_lattice_algebra(record):
    rng = random.Random(606)
    dual_bad = sum(dual(dual(L)) != L for L in
                   (canonicalize(random_rational_basis(rng, rng.randint(1, 3))) for _ in range(100)))
    inter_bad = 0
    for _ in range(50):
        d = rng.randint(1, 3)
        B1, B2 = random_int_basis(rng, d, -3, 3), random_int_basis(rng, d, -3, 3)
        M = intersect(canonicalize(B1), canonicalize(B2))
        inter_bad += box_set([list(r) for r in M.basis], 12) != box_set(B1, 12) & box_set(B2, 12)
    index_bad = 0
    for _ in range(50):
        d = rng.randint(1, 3)
        L = canonicalize(random_rational_basis(rng, d))
        M = intersect(L, canonicalize(random_rational_basis(rng, d)))
        index_bad += index_in(M, L) != M.det_abs / L.det_abs
    ok = dual_bad == inter_bad == index_bad == 0
    record(6, "lattice algebra", ok,
           f"dual∘dual {dual_bad}/100 wrong, intersect {inter_bad}/50 wrong, "
           f"index {index_bad}/50 wrong")


def test_07_reciprocal(record):
    rng = random.Random(707)
    worst = 0.0
    for _ in range(20):
        d = rng.randint(1, 2)
        n = rng.randint(1, 4)
        others = {}
        while len(others) < n:
            s = tuple(F(rng.randint(-6, 6), rng.choice([1, 2, 3])) for _ in range(d))
            if any(s):
                others[s] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        others = list(others.items())
        mass = sum(abs(a) for _, a in others)
        c0 = rng.uniform(1.05, 2.0) * mass * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        f = WFunction.from_terms([((0,) * d, c0)] + others, d)
        g = w_reciprocal(f, tau=1e-8)
        # deterministic quasi-random samples on [-20, 20]^d
        T = qmc.scale(qmc.Halton(d, scramble=False).random(1001)[1:], [-20] * d, [20] * d)
        worst = max(worst, float(np.max(np.abs(f.evaluate(T) * g.evaluate(T) - 1))))
    record(7, "W reciprocal", worst <= 1e-8, f"sup |fg - 1| = {worst:.2e} (<= 1e-8)")


def test_08_detection(record):
    rng = random.Random(808)
    half = 50
    box = (np.full(2, -float(half)), np.full(2, float(half)))
    start = time.perf_counter()
    exact = 0
    for _ in range(25):
        _, P = synthetic_cloud(rng, half=half)
        fit = fit_cosets(PointCloud(P, box=box), max_J=4)
        exact += point_key(fitted_points(fit, half)) == point_key(P)
    elapsed = time.perf_counter() - start
    record(8, "detection round trip", exact == 25 and elapsed < 30,
           f"{exact}/25 exact point-set matches, {elapsed:.2f}s (< 30s)")


def test_09_growth(record):
    radii = [10, 20, 40, 80]
    a = growth_exponent(comb(Coset(Lattice.standard(2))), radii)
    b = growth_exponent(unbounded_comb(), radii)
    record(9, "growth exponents", abs(a - 2) <= 0.1 and abs(b - 3) <= 0.15,
           f"plain comb {a:.4f} (2 ± 0.1), x1-weighted {b:.4f} (3 ± 0.15)")


def test_10_almost_periods(record):
    pitch = 0.01
    rep = almost_periods(WFunction.exponential((1,)), 0.1, (0.0, 50.0), pitch)
    found = np.array(rep.periods_found)
    all_integers = all(np.min(np.abs(found - n)) < 1e-9 for n in range(51))
    sine = almost_periods(sine_comb().terms[0].coeff, 0.5, (0.0, 200.0), pitch, direction=(1.0, 0.0))
    ok = (all_integers and rep.max_gap <= 1 + pitch and bool(sine.periods_found)
          and math.isfinite(sine.max_gap))
    record(10, "almost periods", ok,
           f"e(t): all integers {all_integers}, max gap {rep.max_gap:.3f} (<= {1 + pitch}); "
           f"sine: {len(sine.periods_found)} periods, max gap {sine.max_gap:.3f}")
