"""Weighted Hardy constants and L_{p,q}-cohomology of warped cylinders and surfaces of revolution."""

from .core import (
    DEFAULT_TOL,
    DomainError,
    Exponents,
    ExtendedValue,
    Interval,
    Orientation,
    OutOfScope,
    Status,
    Tag,
    Tolerances,
    TolFailure,
    Verdict,
    WarpedHardyError,
    make_exponents,
)
from .cylinder import CylinderSpec, classify_cylinder
from .hardy import HardyProblem, HardyResult, Regime, divergence_witness, extremal_ratio, hardy_constant, profile
from .interval_cohom import classify_interval
from .quad import improper_integral
from .surface import Direction, SurfaceSpec, chi_surface, classify_surface, surface_volume
from .symfun import SymFun, parse_symfun

__version__ = "0.1.0"
