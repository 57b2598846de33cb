"""Bound states of electrons above liquid helium: image potential plus a contact barrier.

Analytic spectrum, Whittaker-function eigenfunctions, transmission through
the barrier, a finite-difference oracle and a quantum-defect fitter.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    ConfigError,
    ConvergenceError,
    DatasetError,
    DomainError,
    HeliumQDError,
    LimitError,
    PoleError,
)
from .model import CODATA_2018, HELIUM_EPSILON, MaterialScales, PhysicalConstants, derive_scales  # noqa: E402
from .spectrum import BoundState, DefectParams, level, spectrum_table  # noqa: E402

__all__ = [
    "AccuracyError",
    "BoundState",
    "CODATA_2018",
    "ConfigError",
    "ConvergenceError",
    "DatasetError",
    "DefectParams",
    "DomainError",
    "HELIUM_EPSILON",
    "HeliumQDError",
    "LimitError",
    "MaterialScales",
    "PhysicalConstants",
    "PoleError",
    "derive_scales",
    "level",
    "spectrum_table",
]
