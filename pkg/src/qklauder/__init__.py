"""Time-dependent q-deformed Klauder coherent states for H = hbar omega A^+ A."""

from .coherent import CoherentState, energy_expectation, evolve, mean_occupation, norm_check, overlap
from .errors import (
    ConsistencyError,
    DegenerateDeformationError,
    DivergenceError,
    IncompatibleStatesError,
    InsufficientTruncationError,
    NonConvergenceError,
    QKlauderError,
    SeriesError,
)
from .kernels import BACKEND
from .qkernel import Deformation, SeriesValue, Truncation, f_q, jackson_derivative, q_exponential
from .revival import RevivalTimes, ScanResult, autocorrelation_scan, revival_times
from .scales import PhysicalScales

__version__ = "0.1.0"
