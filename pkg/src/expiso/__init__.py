"""Isoperimetry of the product exponential measure on the positive orthant."""
from .analytic import (
    AnalyticProfile, TrapezoidSpec, ball_boundary, median_radius, normalizing_constant, phi, phi_inv,
    poisson_cdf, poisson_median, psi, psi_inv,
)
from .extremal import ExtremalSpec, Kind, extremal_for_measure, extremal_growth, isoperimetric_profile
from .grid import GridSet, GridSpec, MeasureEstimate, boundary_estimate, dilate, from_ball_union, measure, simplex
from .kernels import BACKEND
from .profile import DiagonalProfile, profile_of, symmetrize
from .verify import ReductionWitness, VerificationReport

__version__ = "0.1.0"
