"""Symbolic Fourier transform on comb distributions.

Forward kernel ``exp(-2 pi i <x, y>)``. Per coset ``L + tau`` with
``|det L| = det``:

    F(delta_{L+tau})            = det^-1 exp(-2 pi i <tau, y>) delta_{L*}
    F(exp(2 pi i <x, s>) g)     = (F g)(y - s)
    F(x_j g)                    = (i / 2 pi) d/dy_j F(g)
    F(D^k g)                    = (2 pi i y)^k F(g)

The product ``y^k * D^m delta_gamma`` is expanded with the Leibniz rule,
so every output term is again of the form ``gamma^m' w(gamma) D^k' delta``.
"""
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from math import comb as binom

from . import _linalg as la
from .distributions import DENSE, CombDistribution, CombTerm, PointSet, canonical
from .errors import UnsupportedTerm
from .lattice import Coset, dual
from .wfunc import WFunction, dot, expi


def _power(base, n):
    if n == 0:
        return Fraction(1)
    return base ** n


def _ipow(n):
    """``i ** n`` kept exact."""
    return [Fraction(1), 1j, Fraction(-1), -1j][n % 4]


def _two_pi_i_pow(n):
    return _ipow(n) * (2 * math.pi) ** n if n else Fraction(1)


def _i_over_two_pi_pow(n):
    return _ipow(n) * (2 * math.pi) ** (-n) if n else Fraction(1)


def _falling(n, j):
    out = 1
    for t in range(j):
        out *= n - t
    return out


def _leibniz(m, k):
    """Expand ``y^k * D^m delta`` into ``sum c * y^m' * D^i delta``.

    Yields (i, m', c) with integer c.
    """
    for i in product(*(range(v + 1) for v in m)):
        j = tuple(a - b for a, b in zip(m, i))
        if any(a > b for a, b in zip(j, k)):
            continue
        c = (-1) ** sum(j)
        for ml, il, jl, kl in zip(m, i, j, k):
            c *= binom(ml, il) * _falling(kl, jl)
        yield tuple(i), tuple(a - b for a, b in zip(k, j)), c


def _coset_rule(t):
    C = t.support
    L = C.lattice
    Ld = dual(L)
    det = L.det_abs
    inv_det = Fraction(1) / det if la.is_exact(det) else 1.0 / det
    tau = C.offset
    prefactor = _two_pi_i_pow(sum(t.k)) * _i_over_two_pi_pow(sum(t.m))
    freq = tuple(-v for v in tau)
    out = []
    for s, a in t.coeff.terms:
        base = a * expi(dot(tau, s)) * inv_det * prefactor
        support = Coset(Ld, s)
        for i, m_new, c in _leibniz(t.m, t.k):
            w = WFunction.from_terms([(freq, base * c)], t.dim)
            out.append(CombTerm(support, m_new, i, w))
    return out


def _point_rule(t):
    (p,) = t.support.points
    c = t.coeff.constant_term() * _two_pi_i_pow(sum(t.k))
    w = WFunction.from_terms([(tuple(-v for v in p), c)], t.dim)
    return [CombTerm(DENSE, t.k, (0,) * t.dim, w)]


def _dense_rule(t):
    pre = _i_over_two_pi_pow(sum(t.m))
    out = []
    for s, b in t.coeff.terms:
        out.append(CombTerm(PointSet((s,)), (0,) * t.dim, t.m,
                            WFunction.constant(b * pre, t.dim)))
    return out


def fourier(f):
    """Distributional Fourier transform ``<F f, phi> = <f, F phi>``."""
    f = canonical(f)
    out = []
    for t in f.terms:
        if t.kind == "coset":
            if not t.support.lattice.full_rank:
                raise UnsupportedTerm("comb on a rank-deficient coset")
            out.extend(_coset_rule(t))
        elif t.kind == "points":
            out.extend(_point_rule(t))
        elif t.kind == "dense":
            out.extend(_dense_rule(t))
        else:
            raise UnsupportedTerm(f"unknown support {t.support!r}")
    return canonical(CombDistribution(f.dim, tuple(out)))


def reflect(f):
    """The push-forward under ``x -> -x``."""
    out = []
    for t in f.terms:
        sign = (-1) ** (sum(t.m) + sum(t.k))
        w = t.coeff.reflect().scale(sign) if sign < 0 else t.coeff.reflect()
        if t.kind == "coset":
            S = t.support.negate()
        elif t.kind == "points":
            S = PointSet(tuple(tuple(-v for v in p) for p in t.support.points))
        else:
            S = DENSE
        out.append(replace(t, support=S, coeff=w))
    return canonical(CombDistribution(f.dim, tuple(out)))


def inverse_fourier(f):
    """Inverse transform, kernel ``exp(+2 pi i <x, y>)``."""
    return reflect(fourier(f))


@dataclass
class Spectrum:
    """Support of a Fourier transform: cosets, isolated points, or dense."""

    cosets: list = field(default_factory=list)
    points: list = field(default_factory=list)
    dense: bool = False

    def is_empty(self):
        return not (self.cosets or self.points or self.dense)

    def expression(self):
        from .cosets import union
        return union(*self.cosets) if self.cosets else None


def spectrum_support(f):
    """Where ``fourier(f)`` lives, without computing its coefficients."""
    spectrum = Spectrum()
    for t in canonical(f).terms:
        if t.kind == "coset":
            Ld = dual(t.support.lattice)
            for s in t.coeff.frequencies:
                C = Coset(Ld, s)
                if not any(C.isclose(D) for D in spectrum.cosets):
                    spectrum.cosets.append(C)
        elif t.kind == "points":
            spectrum.dense = True
        else:
            for s in t.coeff.frequencies:
                if s not in spectrum.points:
                    spectrum.points.append(s)
    return spectrum
