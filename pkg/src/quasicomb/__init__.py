"""Lattice combs, coset-ring algebra and their Fourier transforms."""
from .cosets import (Difference, Intersection, Leaf, NormalizedSystem, Union, comb_coefficients,
                     diff, intersection, leaves, membership, normalize, union)
from .detect import CosetFit, PointCloud, VerifyReport, fit_cosets, verify_fit
from .distributions import (DENSE, CombDistribution, CombTerm, PointSet, canonical,
                            check_coefficient_bounds, coefficient_at, comb, component_measure,
                            components, growth_exponent, point_masses, reassemble, term)
from .errors import *  # noqa: F401,F403
from .fourier import Spectrum, fourier, inverse_fourier, reflect, spectrum_support
from .lattice import (Coset, Lattice, bounded_density_count, canonicalize, contains, dual,
                      enumerate_in_ball, index_in, intersect, separating_constant, subgroup)
from .numerics import almost_periods, pair, poisson_check, smoothed_transform_samples
from .testfn import TestFunction, atom, fourier_testfn, gaussian, inverse_fourier_testfn
from .wfunc import WFunction, w_add, w_eval, w_mul, w_reciprocal, w_scale

__version__ = "0.1.0"
