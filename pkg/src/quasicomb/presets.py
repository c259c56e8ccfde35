"""Small worked examples, runnable from the CLI as ``verify-example NAME``.

Each preset returns a report dict with both sides, the residual and the
tolerance; ``ok`` is true iff the residual is within tolerance.
"""
import itertools
import math
from fractions import Fraction

from .cosets import diff, membership, normalize
from .distributions import comb, isclose
from .fourier import fourier
from .lattice import Coset, Lattice
from .numerics import pair, poisson_check
from .testfn import gaussian, fourier_testfn
from .wfunc import WFunction

SINE_ALPHA = (1 / math.sqrt(5), 0.0)


def unbounded_comb():
    """``sum_{x in Z^2} x_1 delta_x``."""
    return comb(Coset(Lattice.standard(2)), m=(1, 0))


def sine_comb(alpha=SINE_ALPHA):
    """``sum_{x in Z^2} sin(2 pi <x, alpha>) delta_x``."""
    neg = tuple(-v for v in alpha)
    w = WFunction.from_terms([(alpha, -0.5j), (neg, 0.5j)], 2)
    return comb(Coset(Lattice.standard(2)), w)


def sine_spectrum(alpha=SINE_ALPHA):
    """``(1/2i) (delta_{Z^2 + alpha} - delta_{Z^2 - alpha})``."""
    Z2 = Lattice.standard(2)
    neg = tuple(-v for v in alpha)
    return comb(Coset(Z2, alpha), -0.5j) + comb(Coset(Z2, neg), 0.5j)


def hermite_probes(dim=2):
    """A fixed family of Gaussian-Hermite test functions."""
    e = [tuple(int(i == j) for i in range(dim)) for j in range(dim)]
    zero = (0,) * dim
    c1 = tuple(0.3 * (-1) ** i for i in range(dim))
    c2 = tuple(0.1 * (i + 1) for i in range(dim))
    return [
        gaussian(dim, a=1.0),
        gaussian(dim, a=0.7, center=c1, poly={e[0]: 1.0}),
        gaussian(dim, a=1.3, center=c2, poly={zero: 1.0, e[-1]: 0.5j}),
        gaussian(dim, a=0.9, mod=c2, poly={tuple(2 * v for v in e[0]): 1.0}),
        gaussian(dim, a=1.1, center=c1, mod=c1, poly={zero: 0.5, e[0]: -1.0}),
    ]


def _report(name, lhs, rhs, tol, **extra):
    residual = max(abs(a - b) for a, b in zip(lhs, rhs)) if lhs else 0.0
    return {"name": name, "ok": bool(residual < tol and extra.get("structural", True)),
            "lhs": list(lhs), "rhs": list(rhs), "residual": residual, "tolerance": tol, **extra}


def poisson_gaussian(tol=1e-10):
    r = poisson_check(Lattice.standard(2), gaussian(2, a=1.0, center=(0.25, -0.1)), tol=tol)
    return _report("poisson-gaussian", [r.lhs], [r.rhs], tol, bound=r.bound)


def _pairing_check(f, f_hat, tol):
    lhs, rhs = [], []
    for phi in hermite_probes(f.dim):
        lhs.append(pair(f_hat, phi).value)
        rhs.append(pair(f, fourier_testfn(phi)).value)
    return lhs, rhs


def ex_unbounded(tol=1e-8):
    f = unbounded_comb()
    F = fourier(f)
    expected = comb(Coset(Lattice.standard(2)), 1j / (2 * math.pi), k=(1, 0))
    lhs, rhs = _pairing_check(f, F, tol)
    return _report("ex-unbounded", lhs, rhs, tol, structural=isclose(F, expected))


def ex_sine(tol=1e-8):
    f = sine_comb()
    F = fourier(f)
    lhs, rhs = _pairing_check(f, F, tol)
    return _report("ex-sine", lhs, rhs, tol, structural=isclose(F, sine_spectrum()))


def coset_split(half_width=10):
    """``Z^2 minus 2Z^2`` as three disjoint cosets of ``2Z^2``."""
    Z2 = Lattice.standard(2)
    expr = diff(Coset(Z2), Coset(Z2.scaled(2)))
    sysm = normalize(expr)
    lhs, rhs = [], []
    for p in itertools.product(range(-half_width, half_width + 1), repeat=2):
        lhs.append(sysm.indicator(p))
        rhs.append(int(membership(expr, p)))
    structural = len(sysm.full_rank_cosets) == 3 and sysm.density() == Fraction(3, 4)
    mismatches = sum(a != b for a, b in zip(lhs, rhs))
    return {"name": "coset-split", "ok": mismatches == 0 and structural, "lhs": [sum(lhs)],
            "rhs": [sum(rhs)], "residual": mismatches, "tolerance": 0, "structural": structural,
            "n_cosets": len(sysm.full_rank_cosets), "density": sysm.density()}


PRESETS = {
    "poisson-gaussian": poisson_gaussian,
    "ex-unbounded": ex_unbounded,
    "ex-sine": ex_sine,
    "coset-split": coset_split,
}


def run(name):
    if name not in PRESETS:
        raise KeyError(name)
    return PRESETS[name]()
