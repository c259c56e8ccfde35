"""Hermite-Gaussian Schwartz test functions.

An atom is ``p(x - c) * exp(-pi a |x - c|^2) * exp(2 pi i <x, b>)`` with
``p`` a polynomial in ``u = x - c`` stored as ``{multi-index: coefficient}``.
Finite sums of atoms are closed under derivatives, multiplication by
monomials, translation, modulation and the Fourier transform.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


def _poly(pairs):
    out = {}
    for alpha, c in pairs:
        out[alpha] = out.get(alpha, 0) + c
    return tuple(sorted((a, c) for a, c in out.items() if c != 0))


def _poly_mul(p, q):
    return _poly((tuple(x + y for x, y in zip(a, b)), c * e) for a, c in p for b, e in q)


def _poly_deriv(p, j):
    out = []
    for a, c in p:
        if a[j]:
            b = list(a)
            b[j] -= 1
            out.append((tuple(b), c * a[j]))
    return _poly(out)


def _unit(d, j=None):
    return tuple(int(i == j) for i in range(d))


def _poly_eval(p, U):
    out = np.zeros(len(U), complex)
    for a, c in p:
        out += complex(c) * np.prod(U ** np.array(a, float), axis=1)
    return out


def _hermite_1d(n, a):
    """Coefficients of P_n with d^n/dy^n exp(-pi y^2/a) = P_n(y) exp(-pi y^2/a)."""
    P = [1.0]
    for _ in range(n):
        dP = [i * P[i] for i in range(1, len(P))] + [0.0, 0.0]
        shifted = [0.0] + [-(2 * math.pi / a) * v for v in P]
        P = [x + y for x, y in zip(dP + [0.0] * (len(shifted) - len(dP)), shifted)]
        while len(P) > 1 and P[-1] == 0:
            P.pop()
    return P


@dataclass(frozen=True)
class Atom:
    poly: tuple
    a: float
    center: tuple
    mod: tuple

    @property
    def dim(self):
        return len(self.center)

    @property
    def degree(self):
        return max((sum(al) for al, _ in self.poly), default=0)

    def evaluate(self, X):
        X = np.asarray(X, float).reshape(-1, self.dim)
        U = X - np.array(self.center)
        g = np.exp(-math.pi * self.a * np.sum(U * U, axis=1))
        return _poly_eval(self.poly, U) * g * np.exp(2j * math.pi * (X @ np.array(self.mod)))

    def derivative(self, j):
        d = self.dim
        e = _unit(d, j)
        p = _poly(list(_poly_deriv(self.poly, j))
                  + [(tuple(x + y for x, y in zip(al, e)), -2 * math.pi * self.a * c) for al, c in self.poly]
                  + [(al, 2j * math.pi * self.mod[j] * c) for al, c in self.poly])
        return Atom(p, self.a, self.center, self.mod)

    def times_coordinate(self, j):
        e = _unit(self.dim, j)
        p = _poly([(tuple(x + y for x, y in zip(al, e)), c) for al, c in self.poly]
                  + [(al, self.center[j] * c) for al, c in self.poly])
        return Atom(p, self.a, self.center, self.mod)

    def fourier(self):
        d = self.dim
        norm = self.a ** (-d / 2)
        q = []
        cache = {}
        for al, c in self.poly:
            factor = [((0,) * d, c * norm * (1j / (2 * math.pi)) ** sum(al))]
            for j, n in enumerate(al):
                if n not in cache:
                    cache[n] = _hermite_1d(n, self.a)
                factor = _poly_mul(factor, [(tuple(i if l == j else 0 for l in range(d)), v)
                                            for i, v in enumerate(cache[n]) if v != 0])
            q.extend(factor)
        phase = np.exp(2j * math.pi * float(np.dot(self.center, self.mod)))
        q = _poly((al, c * phase) for al, c in q)
        return Atom(q, 1.0 / self.a, tuple(self.mod), tuple(-v for v in self.center))

    def reflect(self):
        p = _poly((al, c * (-1) ** sum(al)) for al, c in self.poly)
        return Atom(p, self.a, tuple(-v for v in self.center), tuple(-v for v in self.mod))

    def translate(self, t):
        phase = np.exp(-2j * math.pi * float(np.dot(self.mod, t)))
        p = _poly((al, c * phase) for al, c in self.poly)
        return Atom(p, self.a, tuple(x + y for x, y in zip(self.center, t)), self.mod)

    def modulate(self, beta):
        return Atom(self.poly, self.a, self.center, tuple(x + y for x, y in zip(self.mod, beta)))

    def envelope(self, r):
        """Upper bound of |atom(x)| over |x| >= r (valid for r >= |center|)."""
        cn = float(np.linalg.norm(self.center))
        s = r + cn
        amp = sum(abs(c) * s ** sum(al) for al, c in self.poly)
        return amp * math.exp(-math.pi * self.a * max(r - cn, 0.0) ** 2)


@dataclass(frozen=True)
class TestFunction:
    """A finite sum of :class:`Atom`."""

    __test__ = False  # not a pytest class

    atoms: tuple

    @property
    def dim(self):
        return self.atoms[0].dim

    def __call__(self, X):
        return self.evaluate(X)

    def evaluate(self, X):
        X = np.asarray(X, float).reshape(-1, self.dim)
        out = np.zeros(len(X), complex)
        for at in self.atoms:
            out += at.evaluate(X)
        return out

    def __add__(self, other):
        return TestFunction(self.atoms + other.atoms)

    def scale(self, c):
        return TestFunction(tuple(Atom(_poly((al, c * v) for al, v in at.poly), at.a, at.center, at.mod)
                                  for at in self.atoms))

    def derivative(self, k):
        """``D^k`` for a multi-index ``k``."""
        if len(k) != self.dim:
            raise DimensionMismatch("multi-index length differs from dim")
        atoms = self.atoms
        for j, n in enumerate(k):
            for _ in range(n):
                atoms = tuple(at.derivative(j) for at in atoms)
        return TestFunction(atoms)

    def times_monomial(self, m):
        atoms = self.atoms
        for j, n in enumerate(m):
            for _ in range(n):
                atoms = tuple(at.times_coordinate(j) for at in atoms)
        return TestFunction(atoms)

    def reflect(self):
        return TestFunction(tuple(at.reflect() for at in self.atoms))

    def translate(self, t):
        return TestFunction(tuple(at.translate(tuple(map(float, t))) for at in self.atoms))

    def modulate(self, beta):
        return TestFunction(tuple(at.modulate(tuple(map(float, beta))) for at in self.atoms))

    def envelope(self, r):
        return sum(at.envelope(r) for at in self.atoms)

    @property
    def min_width(self):
        return min(at.a for at in self.atoms)

    @property
    def max_center(self):
        return max(float(np.linalg.norm(at.center)) for at in self.atoms)

    @property
    def degree(self):
        return max(at.degree for at in self.atoms)


def atom(poly=None, a=1.0, center=None, mod=None, dim=None):
    """Convenience constructor; ``poly`` maps multi-index -> coefficient."""
    if dim is None:
        dim = len(center) if center is not None else (len(mod) if mod is not None else
                                                       len(next(iter(poly))) if poly else 1)
    poly = poly if poly is not None else {(0,) * dim: 1.0}
    center = tuple(float(v) for v in (center if center is not None else (0.0,) * dim))
    mod = tuple(float(v) for v in (mod if mod is not None else (0.0,) * dim))
    if a <= 0:
        raise ValueError("Gaussian width must be positive")
    if any(len(al) != dim for al in poly) or len(center) != dim or len(mod) != dim:
        raise DimensionMismatch("atom components disagree on dimension")
    return Atom(_poly((tuple(al), c) for al, c in poly.items()), float(a), center, mod)


def gaussian(dim=1, a=1.0, center=None, mod=None, poly=None):
    return TestFunction((atom(poly, a, center, mod, dim),))


def fourier_testfn(phi):
    """Closed-form ``phi^(y) = int phi(x) exp(-2 pi i <x, y>) dx``."""
    return TestFunction(tuple(at.fourier() for at in phi.atoms))


def inverse_fourier_testfn(phi):
    """``int phi(x) exp(+2 pi i <x, y>) dx``."""
    return fourier_testfn(phi).reflect()
