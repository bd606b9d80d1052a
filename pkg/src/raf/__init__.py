"""Random analytic functions with curvature-dependent covariance, their zeros,
and the root sets and value sets of random sign / quaternary power series."""

__version__ = "0.1.0"

from .kernel import (
    Curvature,
    DomainError,
    coefficient,
    covariance,
    mobius,
    radius_of_convergence,
    truncation_degree,
)
from .sampler import Ensemble, TruncatedSeries, sample_raf, task_rng
from .zerofinder import BoundaryZero, NonConvergence, ZeroSet, aberth_roots, localize_zeros, winding_count
from .pointprocess import EmpiricalSample, TestFunction, ks_distance, linear_statistic, run_experiment
from .littlewood import Alphabet, RootAtlas, enumerate_roots, hole_radius
from .fractal import BoxDimension, ValueSet, box_dimension, iterate_value_set
