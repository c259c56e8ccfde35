import math

import numpy as np
import pytest

from quasicomb.distributions import comb, point_masses
from quasicomb.errors import NonconvergentTail
from quasicomb.lattice import Coset, Lattice, canonicalize
from quasicomb.numerics import almost_periods, pair, poisson_check, smoothed_transform_samples
from quasicomb.presets import sine_comb, unbounded_comb
from quasicomb.testfn import gaussian
from quasicomb.wfunc import WFunction

Z1 = Lattice.standard(1)
THETA = sum(math.exp(-math.pi * n * n) for n in range(-10, 11))


def test_point_mass_pairings():
    phi = gaussian(2, a=0.8, center=(0.3, -0.1), poly={(1, 0): 1.0, (0, 0): 0.5})
    r = pair(point_masses([(0.0, 0.0)], [1]), phi)
    assert r.value == pytest.approx(phi.evaluate([[0.0, 0.0]])[0], abs=1e-15)
    r = pair(point_masses([(0.0, 0.0)], [1], k=(1, 0)), gaussian(2))
    assert abs(r.value) < 1e-15


def test_integer_comb_with_gaussian():
    r = pair(comb(Coset(Z1)), gaussian(1))
    assert r.value.real == pytest.approx(1.0864348112133082, abs=1e-12)
    assert abs(r.value - THETA) <= r.bound + 1e-15
    assert r.bound < 1e-12


def test_tail_tolerance_validated():
    with pytest.raises(ValueError):
        pair(comb(Coset(Z1)), gaussian(1), tail_tol=0)


def test_tail_certificate_is_sound():
    cases = [(comb(Coset(Z1)), gaussian(1, a=0.3, center=(0.4,))),
             (unbounded_comb(), gaussian(2, a=0.5, poly={(2, 0): 1.0})),
             (sine_comb(), gaussian(2, a=0.7, center=(1.0, -0.5), mod=(0.2, 0.0))),
             (comb(Coset(canonicalize([[1, 1], [-1, 1]])), 1, k=(0, 1)), gaussian(2, a=0.4, poly={(0, 1): 1.0}))]
    for f, phi in cases:
        for tol in (1e-4, 1e-8, 1e-12):
            r = pair(f, phi, tail_tol=tol)
            wide = pair(f, phi, tail_tol=1e-15, min_radius=2 * r.radius)
            assert abs(r.value - wide.value) <= r.bound + wide.bound


def test_nonconvergent_tail():
    phi = gaussian(1, a=1e-9)
    with pytest.raises(NonconvergentTail):
        pair(comb(Coset(Z1)), phi, tail_tol=1e-12)


def test_poisson_on_integers():
    rep = poisson_check(Z1, gaussian(1), tol=1e-12)
    assert rep.ok and rep.residual < 1e-12
    assert rep.lhs.real == pytest.approx(THETA, abs=1e-13)


def test_poisson_on_even_integers():
    rep = poisson_check(canonicalize([[2]]), gaussian(1), tol=1e-10)
    lhs = sum(math.exp(-4 * math.pi * n * n) for n in range(-10, 11))
    rhs = 0.5 * sum(math.exp(-math.pi * n * n / 4) for n in range(-30, 31))
    assert abs(lhs - rhs) < 1e-14
    assert rep.lhs.real == pytest.approx(lhs, abs=1e-13)
    assert rep.rhs.real == pytest.approx(rhs, abs=1e-13)
    assert rep.ok


def test_poisson_on_checkerboard():
    L = canonicalize([[1, 1], [-1, 1]])
    phi = gaussian(2, a=1.0, center=(0.1, 0.2))
    rep = poisson_check(L, phi, tol=1e-10)
    direct = sum(math.exp(-math.pi * ((x - 0.1) ** 2 + (y - 0.2) ** 2))
                 for x in range(-8, 9) for y in range(-8, 9) if (x + y) % 2 == 0)
    assert rep.ok
    assert rep.lhs.real == pytest.approx(direct, abs=1e-13)


def test_poisson_on_numeric_lattice():
    s = math.sqrt(2)
    rep = poisson_check(canonicalize([[s, 0.3], [0.0, s]]), gaussian(2, a=0.9), tol=1e-10)
    assert rep.ok


def test_smoothed_samples_on_integers():
    psi = gaussian(1, a=4.0)
    (s,) = smoothed_transform_samples(comb(Coset(Z1)), psi, [0.5])
    assert s.discrepancy < 1e-9
    (s,) = smoothed_transform_samples(comb(Coset(Z1)), psi, [0.0])
    neighbours = 2 * math.exp(-4 * math.pi)
    assert abs(s.direct - 1.0) <= neighbours * 1.01
    assert s.discrepancy < 1e-9


def test_smoothed_samples_on_sine_measure():
    # unit-peak narrow Gaussian: at lattice points only the centre term matters
    a = 9.0
    psi = gaussian(2, a=a)
    ts = [(0.0, 0.0), (1.0, 0.0), (2.0, 3.0), (-4.0, 1.0)]
    samples = smoothed_transform_samples(sine_comb(), psi, ts)
    for s in samples:
        assert s.discrepancy < 1e-9
        exact = math.sin(2 * math.pi * s.t[0] / math.sqrt(5))
        assert abs(s.direct - exact) < 4 * math.exp(-math.pi * a)


def test_smoothed_samples_reject_derivatives():
    with pytest.raises(ValueError):
        smoothed_transform_samples(comb(Coset(Z1), k=(1,)), gaussian(1), [0.0])


def test_almost_periods_of_pure_exponential():
    g = WFunction.exponential((1,))
    rep = almost_periods(g, 0.1, (0.0, 50.0), 0.01)
    found = np.array(rep.periods_found)
    for n in range(51):
        assert np.min(np.abs(found - n)) < 1e-9
    assert rep.max_gap <= 1 + 0.01
    assert rep.sample_count == 256 and rep.grid_pitch == 0.01


def test_almost_periods_two_frequencies():
    g = WFunction.from_terms([((1,), 1.0), ((math.sqrt(2),), 1.0)], 1)
    t = np.linspace(-50, 50, 257)[:, None]
    rep = almost_periods(g, 0.5, (0.0, 200.0), 0.01, samples=t)
    assert rep.periods_found and math.isfinite(rep.max_gap)
    # recheck every reported period on the same samples, directly
    for tau in rep.periods_found:
        assert np.max(np.abs(g.evaluate(t + tau) - g.evaluate(t))) < 0.5
    # and a grid point that is not reported fails the check
    assert 0.5 not in rep.periods_found
    assert np.max(np.abs(g.evaluate(t + 0.5) - g.evaluate(t))) >= 0.5


def test_almost_periods_constant():
    rep = almost_periods(WFunction.constant(3, 1), 0.1, (0.0, 2.0), 0.25)
    assert rep.periods_found == [0.25 * i for i in range(9)]


def test_almost_periods_need_direction_in_2d():
    with pytest.raises(ValueError):
        almost_periods(WFunction.constant(1, 2), 0.1, (0, 1), 0.1)
    rep = almost_periods(sine_comb().terms[0].coeff, 0.5, (0.0, 200.0), 0.01, direction=(1.0, 0.0))
    assert rep.periods_found and math.isfinite(rep.max_gap)


def test_pair_reports_progress_and_cancels():
    from quasicomb.errors import Cancelled
    seen = []
    f = sine_comb() + comb(Coset(Lattice.standard(2)))
    pair(f, gaussian(2), progress=lambda done, total: seen.append((done, total)))
    n = len(f.terms)
    assert seen == [(i, n) for i in range(n + 1)]
    with pytest.raises(Cancelled):
        pair(f, gaussian(2), progress=lambda done, total: done < 1)
