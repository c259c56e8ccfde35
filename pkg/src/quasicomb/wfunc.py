"""Finite trigonometric sums ``sum_n a_n exp(2 pi i <t, s_n>)``.

Frequencies are tuples of Fractions (exact) or floats. Two frequencies
whose float values agree to 1e-12 are treated as the same frequency; the
exact one wins when both kinds meet. Coefficients may be ints, Fractions
or complex numbers; rational arithmetic is kept exact where possible.
"""
import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _linalg as la
from .errors import DimensionMismatch, NotDominated

FREQ_TOL = 1e-12


def expi(r):
    """``exp(2 pi i r)``, exact for rational r with denominator 1, 2 or 4."""
    if la.is_exact(r):
        r = Fraction(r) % 1
        table = {Fraction(0): Fraction(1), Fraction(1, 2): Fraction(-1),
                 Fraction(1, 4): 1j, Fraction(3, 4): -1j}
        if r in table:
            return table[r]
    return cmath.exp(2j * math.pi * float(r))


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _fkey(s):
    return tuple(round(float(v) / FREQ_TOL) for v in s)


def _is_zero(a):
    return a == 0


@dataclass(frozen=True)
class WFunction:
    """Immutable trigonometric sum; ``terms`` is a sorted tuple of (s, a)."""

    dim: int
    terms: tuple = ()

    @classmethod
    def from_terms(cls, pairs, dim):
        merged = {}
        for s, a in pairs:
            s = tuple(la.to_number(v) for v in s)
            if len(s) != dim:
                raise DimensionMismatch("frequency has wrong dimension")
            key = _fkey(s)
            if key in merged:
                s0, a0 = merged[key]
                if not all(la.is_exact(v) for v in s0) and all(la.is_exact(v) for v in s):
                    s0 = s
                merged[key] = (s0, a0 + a)
            else:
                merged[key] = (s, a)
        terms = [(s, a) for s, a in merged.values() if not _is_zero(a)]
        terms.sort(key=lambda t: (tuple(float(v) for v in t[0]), not all(la.is_exact(v) for v in t[0])))
        return cls(dim, tuple(terms))

    @classmethod
    def constant(cls, a, dim):
        return cls.from_terms([((0,) * dim, a)], dim)

    @classmethod
    def exponential(cls, s, a=1):
        return cls.from_terms([(s, a)], len(s))

    @property
    def frequencies(self):
        return [s for s, _ in self.terms]

    @property
    def coefficients(self):
        return [a for _, a in self.terms]

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def norm(self):
        """The W-norm ``sum |a_n|`` (exact when all coefficients are rational)."""
        return sum((abs(a) for a in self.coefficients), Fraction(0))

    def constant_term(self):
        for s, a in self.terms:
            if _fkey(s) == _fkey((0,) * self.dim):
                return a
        return Fraction(0)

    def __add__(self, other):
        if not isinstance(other, WFunction):
            other = WFunction.constant(other, self.dim)
        _same_dim(self, other)
        return WFunction.from_terms(self.terms + other.terms, self.dim)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return WFunction.from_terms([(s, c * a) for s, a in self.terms], self.dim)

    def __mul__(self, other):
        if not isinstance(other, WFunction):
            return self.scale(other)
        _same_dim(self, other)
        pairs = [(tuple(x + y for x, y in zip(s, t)), a * b)
                 for s, a in self.terms for t, b in other.terms]
        return WFunction.from_terms(pairs, self.dim)

    def __rmul__(self, other):
        return self.scale(other)

    def reflect(self):
        """``t -> f(-t)``."""
        return WFunction.from_terms([(tuple(-v for v in s), a) for s, a in self.terms], self.dim)

    def modulate(self, beta):
        """Multiply by ``exp(2 pi i <t, beta>)``."""
        return self * WFunction.exponential(tuple(beta))

    def __call__(self, t):
        return complex(w_eval(self, t))

    def evaluate(self, T):
        """Vectorized values on an (n, dim) array of points."""
        T = np.asarray(T, float).reshape(-1, self.dim)
        out = np.zeros(len(T), complex)
        if not self.terms:
            return out
        S = np.array([[float(v) for v in s] for s in self.frequencies], float).reshape(-1, self.dim)
        A = np.array([complex(a) for a in self.coefficients])
        chunk = max(1, 2 ** 22 // max(len(T), 1))
        for i in range(0, len(S), chunk):
            out += np.exp(2j * np.pi * (T @ S[i:i + chunk].T)) @ A[i:i + chunk]
        return out

    def isclose(self, other, rtol=1e-12, atol=1e-14):
        if self.dim != other.dim:
            return False
        scale = max(float(self.norm()), float(other.norm()), 1.0)
        diff = (self - other)
        return float(diff.norm()) <= rtol * scale + atol

    def is_rational(self):
        return all(la.is_exact(v) for s in self.frequencies for v in s)

    def prune(self, tol):
        return WFunction(self.dim, tuple((s, a) for s, a in self.terms if abs(a) > tol))


def _same_dim(f, g):
    if f.dim != g.dim:
        raise DimensionMismatch("W functions live in different dimensions")


def w_add(f, g):
    return f + g


def w_scale(f, c):
    return f.scale(c)


def w_mul(f, g):
    return f * g


def w_eval(f, t):
    """``sum_n a_n exp(2 pi i <t, s_n>)`` in floating point."""
    t = [float(v) for v in np.atleast_1d(np.asarray(t, dtype=object)).tolist()]
    if len(t) != f.dim:
        raise DimensionMismatch("evaluation point has wrong dimension")
    total = 0j
    for s, a in f.terms:
        total += complex(a) * cmath.exp(2j * math.pi * sum(x * float(y) for x, y in zip(t, s)))
    return total


def w_reciprocal(f, c=None, tau=1e-8, max_terms=200_000):
    """A truncated W-expansion ``g`` of ``1/f`` by a Neumann series.

    Writes ``f = c + r`` with ``c`` the constant term and requires
    ``||r||_W < |c|``. Then ``1/f = (1/c) sum_n (-r/c)^n``; the sum stops
    once both ``|g - 1/f|`` and ``|f g - 1|`` are certified below ``tau``
    on all of R^d.

    Half of ``tau`` goes to truncating the series, a quarter to dropping
    the smallest coefficients of each power and a quarter to dropping the
    smallest coefficients of the result. Multiplying by ``r/c`` does not
    grow W-norms, so a mass ``E`` dropped from the powers costs at most
    ``E / (|c| (1 - q))`` in ``g`` and ``(1 + q) E / (1 - q)`` in ``f g``;
    a mass ``E`` dropped from ``g`` costs ``E`` and ``||f||_W E``.
    """
    if c is None:
        c = f.constant_term()
    r = f - WFunction.constant(c, f.dim)
    q = float(r.norm()) / abs(complex(c)) if c != 0 else math.inf
    if not q < 1:
        raise NotDominated(
            f"||f - c||_W / |c| = {q:.6g} >= 1; the Neumann series needs strict domination"
        )
    inv_c = Fraction(1) / c if la.is_exact(c) else 1 / complex(c)
    step = r.scale(-inv_c)
    half = tau / 2
    n_steps = 0
    while q > 0 and (q ** (n_steps + 1) / (abs(complex(c)) * (1 - q)) > half
                     or q ** (n_steps + 1) > half):
        n_steps += 1
    mass = tau / 4 * (1 - q) * min(abs(complex(c)), 1 / (1 + q))
    budget = mass / max(n_steps, 1)
    final = tau / 4 / max(1.0, abs(complex(c)) * (1 + q))

    if step.is_rational() and not all(la.is_exact(a) for a in step.coefficients + [inv_c]):
        return _neumann_array(step, complex(inv_c), n_steps, budget, max_terms, final)
    power = WFunction.constant(Fraction(1), f.dim)
    pairs = [((0,) * f.dim, inv_c)]
    for _ in range(n_steps):
        power = _drop_small(power * step, budget)
        pairs.extend((s, a * inv_c) for s, a in power.terms)
        if len(pairs) > max_terms:
            raise NotDominated("series did not reach the tolerance within max_terms")
    return WFunction.from_terms(pairs, f.dim)


def _drop_small(w, budget):
    """Remove the smallest terms of total absolute mass at most ``budget``."""
    sizes = sorted(((abs(complex(a)), i) for i, (_, a) in enumerate(w.terms)))
    dropped, spent = set(), 0.0
    for size, i in sizes:
        if spent + size > budget:
            break
        spent += size
        dropped.add(i)
    if not dropped:
        return w
    return WFunction(w.dim, tuple(t for i, t in enumerate(w.terms) if i not in dropped))


def _merge(S, A):
    S, inv = np.unique(S, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    A = np.bincount(inv, A.real, len(S)) + 1j * np.bincount(inv, A.imag, len(S))
    return S, A


def _prune_arrays(S, A, budget):
    order = np.argsort(np.abs(A), kind="stable")
    spent = np.cumsum(np.abs(A[order]))
    keep = np.ones(len(A), bool)
    keep[order[spent <= budget]] = False
    return S[keep], A[keep]


def _neumann_array(step, inv_c, n_steps, budget, max_terms, final=0.0):
    """Same series with frequencies scaled to integers and merged by numpy."""
    den = la.common_denominator([v for s in step.frequencies for v in s])
    T = np.array([[int(v * den) for v in s] for s in step.frequencies], dtype=np.int64)
    B = np.array([complex(a) for a in step.coefficients])
    S = np.zeros((1, step.dim), dtype=np.int64)
    A = np.ones(1, complex)
    all_S, all_A = [S], [A]
    total = 1
    for _ in range(n_steps):
        S, A = _merge((S[:, None, :] + T[None, :, :]).reshape(-1, step.dim),
                      (A[:, None] * B[None, :]).reshape(-1))
        S, A = _prune_arrays(S, A, budget)
        all_S.append(S)
        all_A.append(A)
        total += len(A)
        if total > max_terms * 10:
            S_acc, A_acc = _merge(np.vstack(all_S), np.concatenate(all_A))
            if len(S_acc) > max_terms:
                raise NotDominated("series did not reach the tolerance within max_terms")
            all_S, all_A, total = [S_acc], [A_acc], len(S_acc)
    S, A = _merge(np.vstack(all_S), np.concatenate(all_A))
    S, A = _prune_arrays(S, A, final / abs(inv_c))
    if len(S) > max_terms:
        raise NotDominated("series did not reach the tolerance within max_terms")
    pairs = [(tuple(Fraction(int(v), den) for v in row), complex(a) * inv_c)
             for row, a in zip(S, A) if a != 0]
    return WFunction.from_terms(pairs, step.dim)
