class QuasicombError(Exception):
    """Base class for library errors."""


class SingularBasis(QuasicombError, ValueError):
    pass


class DimensionMismatch(QuasicombError, ValueError):
    pass


class NotASublattice(QuasicombError, ValueError):
    pass


class NumericLatticeError(QuasicombError, TypeError):
    """Exact set algebra was requested on a float (numeric-mode) lattice."""


class RankDeficientIntersection(QuasicombError):
    """The intersection subgroup has rank below the ambient dimension.

    ``rank`` and ``subgroup`` (a rank-deficient :class:`Lattice`) carry
    the actual intersection so callers can branch on it.
    """

    def __init__(self, rank, subgroup):
        super().__init__(f"intersection has rank {rank} < {subgroup.dim}")
        self.rank = rank
        self.subgroup = subgroup


class TooFewPoints(QuasicombError, ValueError):
    pass


class IncommensurableLeaves(QuasicombError, ValueError):
    pass


class NotDominated(QuasicombError, ValueError):
    pass


class DegenerateData(QuasicombError, ValueError):
    pass


class UnsupportedTerm(QuasicombError, TypeError):
    pass


class NonconvergentTail(QuasicombError, ArithmeticError):
    pass


class NoFit(QuasicombError):
    pass


class FormatError(QuasicombError, ValueError):
    pass


class Cancelled(QuasicombError):
    pass


def tick(progress, done, total):
    """Call ``progress(done, total)``; a return value of False cancels."""
    if progress is not None and progress(done, total) is False:
        raise Cancelled(f"cancelled at {done}/{total}")


__all__ = [n for n, v in list(globals().items()) if isinstance(v, type) and issubclass(v, Exception)]
