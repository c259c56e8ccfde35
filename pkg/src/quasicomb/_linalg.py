"""Exact integer and rational matrix helpers.

Matrices are lists of rows. Lattice generators are always the *columns*.
"""
from fractions import Fraction
from math import lcm


def is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def to_number(x):
    """Coerce ints and "p/q" strings to Fraction, leave floats alone."""
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    return float(x)


def columns(rows):
    if not rows:
        return []
    return [list(col) for col in zip(*rows)]


def from_columns(cols, dim):
    return [[col[i] for col in cols] for i in range(dim)]


def xgcd(a, b):
    """Return (g, x, y) with x*a + y*b == g == gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def common_denominator(values):
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    return den


def column_hnf(cols, dim, track=False):
    """Lower column echelon Hermite form of integer generators.

    Returns ``(basis_cols, pivot_rows, transform)`` where ``basis_cols``
    are the nonzero columns. ``transform`` (if tracked) is the unimodular
    column operation matrix U, as a list of columns, so that the columns
    of ``A @ U`` are ``basis_cols`` followed by zero columns.
    """
    cols = [list(c) for c in cols]
    n = len(cols)
    U = [[int(i == j) for i in range(n)] for j in range(n)] if track else None
    r = 0
    pivots = []
    for i in range(dim):
        if r >= n:
            break
        for j in range(r + 1, n):
            b = cols[j][i]
            if b == 0:
                continue
            a = cols[r][i]
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            cr, cj = cols[r], cols[j]
            cols[r] = [x * p + y * q for p, q in zip(cr, cj)]
            cols[j] = [-bg * p + ag * q for p, q in zip(cr, cj)]
            if track:
                ur, uj = U[r], U[j]
                U[r] = [x * p + y * q for p, q in zip(ur, uj)]
                U[j] = [-bg * p + ag * q for p, q in zip(ur, uj)]
        piv = cols[r][i]
        if piv == 0:
            continue
        if piv < 0:
            cols[r] = [-v for v in cols[r]]
            if track:
                U[r] = [-v for v in U[r]]
            piv = -piv
        for k in range(r):
            q = cols[k][i] // piv
            if q:
                cols[k] = [p - q * s for p, s in zip(cols[k], cols[r])]
                if track:
                    U[k] = [p - q * s for p, s in zip(U[k], U[r])]
        pivots.append(i)
        r += 1
    return cols[:r], pivots, U


def rational_hnf(cols, dim):
    """Hermite form for rational generators (scale, reduce, unscale)."""
    den = common_denominator(v for c in cols for v in c)
    icols = [[int(v * den) for v in c] for c in cols]
    basis, pivots, _ = column_hnf(icols, dim)
    return [[Fraction(v, den) for v in c] for c in basis], pivots


def det(rows):
    """Exact determinant by fraction-free elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        piv = m[c][c]
        result *= piv
        for r in range(c + 1, n):
            f = m[r][c] / piv
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return sign * result


def inverse(rows):
    """Exact inverse by Gauss-Jordan; raises ZeroDivisionError if singular."""
    n = len(rows)
    m = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [v / piv for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return [row[n:] for row in m]


def matvec(rows, v):
    return [sum(a * b for a, b in zip(r, v)) for r in rows]


def transpose(rows):
    return [list(c) for c in zip(*rows)]


def solve_echelon(basis_cols, pivots, v):
    """Integer coordinates z with sum z_j * basis_j == v, or None.

    ``basis_cols`` must be in the lower echelon form produced by
    :func:`column_hnf`/:func:`rational_hnf`.
    """
    v = list(v)
    z = []
    for col, i in zip(basis_cols, pivots):
        q = Fraction(v[i]) / col[i]
        if q.denominator != 1:
            return None
        q = int(q)
        z.append(q)
        if q:
            v = [a - q * b for a, b in zip(v, col)]
    if any(a != 0 for a in v):
        return None
    return z


def lll_reduce(cols, delta=0.75):
    """Textbook LLL on float column vectors (small dimensions only)."""
    import numpy as np

    b = [np.asarray(c, dtype=float) for c in cols]
    n = len(b)

    def gso(b):
        bstar, mu = [], np.zeros((n, n))
        for i in range(n):
            v = b[i].copy()
            for j in range(i):
                mu[i, j] = b[i] @ bstar[j] / (bstar[j] @ bstar[j])
                v -= mu[i, j] * bstar[j]
            bstar.append(v)
        return bstar, mu

    bstar, mu = gso(b)
    k = 1
    guard = 0
    while k < n and guard < 10000:
        guard += 1
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[k] = b[k] - q * b[j]
                bstar, mu = gso(b)
        if bstar[k] @ bstar[k] >= (delta - mu[k, k - 1] ** 2) * (bstar[k - 1] @ bstar[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu = gso(b)
            k = max(k - 1, 1)
    return [list(map(float, v)) for v in b]
