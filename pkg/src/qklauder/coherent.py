"""Klauder coherent states of the q-deformed oscillator ``H = hbar omega A^+ A``.

    |J, gamma>_q = E_q(J)^{-1/2} sum_n J^{n/2} exp(-i gamma [n]_q) / sqrt([n]_q!) |n>_q

Time evolution only shifts the angle: ``gamma -> gamma + omega t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import IncompatibleStatesError
from .kernels import reduce_phase
from .qkernel import (
    Deformation,
    Truncation,
    q_exponential,
    q_exponential_derivative,
    q_integer,
    q_integers,
    series_terms,
)
from .scales import PhysicalScales

__all__ = [
    "CoherentState",
    "level",
    "probabilities",
    "coefficient",
    "coefficients",
    "norm_check",
    "evolve",
    "overlap",
    "mean_occupation",
    "energy_expectation",
]


@dataclass(frozen=True)
class CoherentState:
    J: float
    gamma: float
    d: Deformation
    t: Truncation = Truncation()

    def __post_init__(self):
        object.__setattr__(self, "J", float(self.J))
        object.__setattr__(self, "gamma", float(self.gamma))
        # validates J against the convergence guard
        series_terms(self.J, self.d, self.t)

    @property
    def norm_sq(self) -> float:
        """``N^2(J) = E_q(J)``."""
        return q_exponential(self.J, self.d, self.t).value.real


def level(s: CoherentState) -> int:
    """Number of Fock components retained by the state's own tail bound."""
    return series_terms(s.J, s.d, s.t)[0].size


def _terms(s: CoherentState, size: int | None) -> np.ndarray:
    terms, _ = series_terms(s.J, s.d, s.t)
    if size is None or size <= terms.size:
        return terms if size is None else terms[:size]
    qi = q_integers(size, s.d)
    out = np.empty(size)
    out[0] = 1.0
    with np.errstate(under="ignore"):
        np.cumprod(s.J / qi[1:], out=out[1:])
    return out


def probabilities(s: CoherentState, size: int | None = None) -> np.ndarray:
    """``|c_n|^2 = J^n / ([n]_q! E_q(J))``; independent of gamma."""
    return _terms(s, size) / s.norm_sq


def coefficients(s: CoherentState, size: int | None = None) -> np.ndarray:
    """Coefficient vector ``c_0 .. c_{size-1}`` (default: the state's own level)."""
    p = probabilities(s, size)
    phase = reduce_phase(s.gamma * q_integers(p.size, s.d))
    return np.sqrt(p) * np.exp(-1j * phase)


def coefficient(s: CoherentState, n: int) -> complex:
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if s.J == 0.0:
        return complex(1.0 if n == 0 else 0.0)
    log_fact = math.fsum(math.log(q_integer(k, s.d)) for k in range(1, n + 1))
    modulus = math.exp(0.5 * (n * math.log(s.J) - log_fact - math.log(s.norm_sq)))
    phase = float(reduce_phase(s.gamma * q_integer(n, s.d)))
    return modulus * complex(math.cos(phase), -math.sin(phase))


def norm_check(s: CoherentState) -> float:
    """``sum |c_n|^2`` over the retained components."""
    return math.fsum(np.abs(coefficients(s)) ** 2)


def evolve(s: CoherentState, delta_t: float, omega: float) -> CoherentState:
    return replace(s, gamma=s.gamma + omega * delta_t)


def overlap(a: CoherentState, b: CoherentState) -> complex:
    """``<a|b>`` in the standard inner product, summed to the larger of the two levels."""
    if a.d != b.d:
        raise IncompatibleStatesError(f"states use different deformations: q={a.d.q} vs q={b.d.q}")
    size = max(level(a), level(b))
    return complex(np.vdot(coefficients(a, size), coefficients(b, size)))


def mean_occupation(J: float, d: Deformation, t: Truncation = Truncation()) -> float:
    """Wave-packet centre ``n_bar = J E_q'(J) / E_q(J)``."""
    if J == 0.0:
        return 0.0
    return J * q_exponential_derivative(J, d, t).value.real / q_exponential(J, d, t).value.real


def energy_expectation(s: CoherentState, scales: PhysicalScales) -> float:
    """``<H> = hbar omega sum |c_n|^2 [n]_q`` (equals ``hbar omega J``)."""
    p = probabilities(s)
    return scales.hbar * scales.omega * math.fsum(p * q_integers(p.size, s.d))
