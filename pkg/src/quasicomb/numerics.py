"""Numerical pairings, Poisson checks and almost-period scans."""
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import CombDistribution, comb
from .errors import NonconvergentTail, tick
from .fourier import fourier
from .lattice import Coset, dual
from .testfn import fourier_testfn
from .wfunc import WFunction

EPS = np.finfo(float).eps
MAX_RADIUS = 1e4


@dataclass
class PairResult:
    value: complex
    bound: float
    radius: float = 0.0

    def __iter__(self):
        return iter((self.value, self.bound))


def _ball_volume(d, r):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d


def _tail(R, d, diameter, det, m_deg, w_norm, psi):
    """Bound on sum over coset points with |x| > R of |x^m w(x) D^k phi(x)|.

    Shell j covers R + j < |x| <= R + j + 1. Points in a ball of radius r
    are at most vol(B(r + diameter)) / det (disjoint fundamental cells),
    and the integrand is bounded by its envelope at the inner radius.
    """
    total = 0.0
    for j in range(100_000):
        r = R + j
        env = r ** m_deg * w_norm * psi.envelope(r)
        count = _ball_volume(d, r + 1 + diameter) / det
        t = count * env
        total += t
        if j > 3 and (t == 0.0 or t <= 1e-18 * total):
            return total
    raise NonconvergentTail("tail series did not settle")


def _safe_radius(psi, m_deg):
    D = m_deg + psi.degree
    r = 1.0
    for at in psi.atoms:
        c = float(np.linalg.norm(at.center))
        r = max(r, c + math.sqrt((2 * D + 1) / (math.pi * at.a)) + 1)
    return r


def pair(f, phi, tail_tol=1e-12, min_radius=0.0, progress=None):
    """``<f, phi> = sum_x sum_k (-1)^|k| p_k(x) (D^k phi)(x)``, with error bound.

    Coset sums are truncated to a ball chosen so the certified tail is
    below ``tail_tol`` (per term); the returned bound adds the tails and a
    floating-point round-off estimate. Dense terms are integrated in
    closed form. ``min_radius`` forces a larger truncation ball.
    ``progress(done, total)`` is called after each term; returning False
    cancels.
    """
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    if f.dim != phi.dim:
        raise ValueError("distribution and test function dimensions differ")
    value = 0j
    bound = 0.0
    radius = 0.0
    n_terms = max(len(f.terms), 1)
    for i, t in enumerate(f.terms):
        tick(progress, i, len(f.terms))
        if t.kind == "dense":
            psi = fourier_testfn(phi.times_monomial(t.m))
            freqs = np.array([[-float(v) for v in s] for s in t.coeff.frequencies], float)
            vals = psi.evaluate(freqs)
            contrib = np.array([complex(a) for a in t.coeff.coefficients]) * vals
            value += contrib.sum()
            bound += 16 * EPS * float(np.abs(contrib).sum()) * (1 + len(contrib))
            continue
        psi = phi.derivative(t.k)
        sign = (-1) ** sum(t.k)
        m_deg = sum(t.m)
        if t.kind == "coset":
            L = t.support.lattice
            R = max(_safe_radius(psi, m_deg), float(min_radius))
            w_norm = float(t.coeff.norm())
            args = (t.dim, L.covering_diameter, float(L.det_abs), m_deg, w_norm, psi)
            tail = _tail(R, *args)
            while tail > tail_tol / n_terms:
                R *= 1.25
                if R > MAX_RADIUS:
                    raise NonconvergentTail("no truncation radius reaches the tolerance")
                tail = _tail(R, *args)
            P = t.points_in_ball((0,) * t.dim, R)
            radius = max(radius, R)
        else:
            tail = 0.0
            P = t.support.array().reshape(-1, t.dim)
        contrib = t.values(P) * psi.evaluate(P) * sign
        value += contrib.sum()
        bound += tail + 16 * EPS * float(np.abs(contrib).sum()) * (1 + math.log2(len(P) + 1))
    tick(progress, len(f.terms), len(f.terms))
    return PairResult(complex(value), float(bound), radius)


@dataclass
class PoissonReport:
    ok: bool
    residual: float
    lhs: complex
    rhs: complex
    bound: float


def poisson_check(L, phi, tol=1e-10, tail_tol=1e-13):
    """Compare ``sum_{L} phi`` with ``|det|^-1 sum_{L*} phi^``."""
    lhs = pair(comb(Coset(L)), phi, tail_tol)
    rhs = pair(comb(Coset(dual(L))), fourier_testfn(phi), tail_tol)
    det = float(L.det_abs)
    r_val = rhs.value / det
    residual = abs(lhs.value - r_val)
    return PoissonReport(residual < tol, residual, lhs.value, r_val, lhs.bound + rhs.bound / det)


@dataclass
class SmoothedSample:
    t: tuple
    direct: complex
    spectral: complex
    bound: float

    @property
    def discrepancy(self):
        return abs(self.direct - self.spectral)


def smoothed_transform_samples(mu, psi, t_samples, tail_tol=1e-13):
    """``(psi * mu)(t)`` computed directly and as a trigonometric sum.

    Direct: ``sum_x mu(x) psi(t - x)``. Spectral: ``sum_g mu^(g) psi^(g)
    exp(2 pi i <g, t>)``, i.e. the transformed measure paired with the
    modulated ``psi^``.
    """
    if any(any(t.k) for t in mu.terms):
        raise ValueError("smoothed samples need a measure (no derivative terms)")
    mu_hat = fourier(mu)
    psi_hat = fourier_testfn(psi)
    psi_ref = psi.reflect()
    out = []
    for t in t_samples:
        t = tuple(float(v) for v in np.atleast_1d(t))
        d = pair(mu, psi_ref.translate(t), tail_tol)
        s = pair(mu_hat, psi_hat.modulate(t), tail_tol)
        out.append(SmoothedSample(t, d.value, s.value, d.bound + s.bound))
    return out


@dataclass
class AlmostPeriodReport:
    epsilon: float
    periods_found: list
    max_gap: float
    window: tuple
    grid_pitch: float
    sample_count: int
    direction: tuple = None
    discrepancy: list = field(default_factory=list, repr=False)


def _kronecker(n, d, half_width):
    alphas = [math.sqrt(p) % 1 for p in (2, 3, 5, 7, 11, 13, 17, 19)][:d]
    k = np.arange(1, n + 1)[:, None]
    return (np.mod(k * np.array(alphas), 1.0) - 0.5) * 2 * half_width


def almost_periods(g, epsilon, window, grid_pitch, direction=None, samples=None,
                   n_samples=256, sample_half_width=50.0):
    """Scan ``tau`` over ``window`` for epsilon-almost periods of ``g``.

    A grid value ``tau`` is reported when ``max |g(t + tau u) - g(t)|``
    over the sample points ``t`` is below ``epsilon`` (``u`` is the scan
    direction, required for dim > 1). The max over samples stands in for
    the sup over R^d; both the tau pitch and the sample count are recorded
    in the report.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    d = g.dim
    if direction is None:
        if d != 1:
            raise ValueError("a scan direction is required for dim > 1")
        direction = (1.0,)
    u = np.array(direction, float)
    if samples is None:
        T = _kronecker(n_samples, d, sample_half_width)
    else:
        T = np.asarray(samples, float).reshape(-1, d)
    lo, hi = window
    n = int(math.floor((hi - lo) / grid_pitch + 1e-9)) + 1
    taus = lo + grid_pitch * np.arange(n)
    freqs = np.array([[float(v) for v in s] for s in g.frequencies], float).reshape(-1, d)
    coefs = np.array([complex(a) for a in g.coefficients])
    base = coefs[:, None] * np.exp(2j * np.pi * (freqs @ T.T))  # (terms, samples)
    proj = freqs @ u
    worst = np.empty(n)
    chunk = max(1, 2_000_000 // max(1, len(T) * len(coefs)))
    for i in range(0, n, chunk):
        tt = taus[i:i + chunk]
        phase = np.exp(2j * np.pi * np.outer(tt, proj)) - 1.0  # (chunk, terms)
        diff = phase @ base  # (chunk, samples)
        worst[i:i + chunk] = np.abs(diff).max(axis=1) if len(T) else 0.0
    hits = taus[worst < epsilon]
    periods = [float(v) for v in hits]
    max_gap = float(np.max(np.diff(hits))) if len(hits) > 1 else math.inf
    return AlmostPeriodReport(epsilon, periods, max_gap, (lo, hi), grid_pitch, len(T),
                              tuple(map(float, u)), [float(v) for v in worst[worst < epsilon]])
