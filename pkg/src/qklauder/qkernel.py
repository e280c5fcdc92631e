"""q-arithmetic and certified evaluation of the q-exponential family.

Conventions: ``[n]_q = (1 - q^{2n}) / (1 - q^2)``, ``[n]_q! = [1]_q ... [n]_q``,

    E_q(J)        = sum_n J^n / [n]_q!
    F_q(J, gamma) = sum_n J^n exp(i gamma q^{2n}) / [n]_q!

For ``q < 1`` both series have radius of convergence ``1 / (1 - q^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import kernels
from .errors import DegenerateDeformationError, DivergenceError, NonConvergenceError

__all__ = [
    "RADIUS_MARGIN",
    "Deformation",
    "Truncation",
    "SeriesValue",
    "q_integer",
    "q_integers",
    "q_factorial",
    "series_terms",
    "q_exponential",
    "q_exponential_derivative",
    "f_q",
    "f_q_many",
    "jackson_derivative",
]

#: Arguments must satisfy ``J < (1 - RADIUS_MARGIN) * radius``.
RADIUS_MARGIN = 0.01


@dataclass(frozen=True)
class Deformation:
    """Deformation parameter ``0 < q <= 1`` and the constants derived from it."""

    q: float
    q_sq: float = field(init=False)
    one_minus_q_sq: float = field(init=False)
    radius: float = field(init=False)

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q <= 1.0) or math.isnan(q):
            raise ValueError(f"deformation parameter must satisfy 0 < q <= 1, got {self.q!r}")
        q_sq = q * q
        one_minus = 1.0 - q_sq
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "q_sq", q_sq)
        object.__setattr__(self, "one_minus_q_sq", one_minus)
        object.__setattr__(self, "radius", math.inf if one_minus == 0.0 else 1.0 / one_minus)

    @classmethod
    def from_tau(cls, tau: float) -> "Deformation":
        """``q = exp(-tau)``, the parameterisation used for near-classical runs."""
        if not tau >= 0.0:
            raise ValueError(f"tau must be >= 0, got {tau!r}")
        return cls(math.exp(-tau))

    @property
    def classical(self) -> bool:
        return self.one_minus_q_sq == 0.0

    @property
    def j_limit(self) -> float:
        """Largest admissible action (exclusive)."""
        return (1.0 - RADIUS_MARGIN) * self.radius


@dataclass(frozen=True)
class Truncation:
    """Series evaluation policy: absolute tail tolerance and hard term cap."""

    tol: float = 1e-14
    n_max: int = 512

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol!r}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be a positive integer, got {self.n_max!r}")
        object.__setattr__(self, "n_max", int(self.n_max))


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    terms_used: int
    tail_bound: float

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        if self.value.imag != 0.0:
            raise TypeError("series value is complex; take .value explicitly")
        return float(self.value.real)


def q_integer(n: int, d: Deformation) -> float:
    """``[n]_q``; exactly ``n`` for ``q = 1``."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if d.classical:
        return float(n)
    return -math.expm1(n * math.log(d.q_sq)) / d.one_minus_q_sq


def q_integers(count: int, d: Deformation) -> np.ndarray:
    """Array ``[0]_q, [1]_q, ..., [count-1]_q``."""
    n = np.arange(count, dtype=np.float64)
    if d.classical:
        return n
    return -np.expm1(n * math.log(d.q_sq)) / d.one_minus_q_sq


def q_factorial(n: int, d: Deformation) -> float:
    """``[n]_q!``. Raises :class:`OverflowError` past the float64 range."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    out = 1.0
    for k in range(1, n + 1):
        out *= q_integer(k, d)
        if math.isinf(out):
            raise OverflowError(f"[{n}]_q! exceeds the float64 range (q={d.q})")
    return out


def _check_argument(J: float, d: Deformation) -> None:
    if not J >= 0.0:
        raise ValueError(f"J must be nonnegative, got {J!r}")
    if J >= d.j_limit:
        raise DivergenceError(
            f"J={J} is outside the guarded convergence domain for q={d.q}: "
            f"radius 1/(1-q^2)={d.radius:.6g}, require J < {d.j_limit:.6g}"
        )


def _truncate(terms: np.ndarray, ratios: np.ndarray, tol: float, what: str, J: float, d: Deformation):
    """First index N whose geometric tail bound ``|t_N| r_N / (1 - r_N)`` is within ``tol``.

    ``ratios[n] = t_{n+1} / t_n`` must be nonincreasing.
    """
    below = ratios < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        bounds = np.where(below, terms * ratios / np.where(below, 1.0 - ratios, 1.0), np.inf)
    hits = np.flatnonzero(bounds <= tol)
    if hits.size == 0:
        raise NonConvergenceError(
            f"{what}: tail bound did not reach tol={tol:g} within {terms.size} terms "
            f"(J={J}, q={d.q}, radius={d.radius:.6g})"
        )
    n = int(hits[0])
    return n, float(bounds[n])


@lru_cache(maxsize=512)
def _terms_cached(J: float, d: Deformation, t: Truncation):
    _check_argument(J, d)
    qi = q_integers(t.n_max + 2, d)
    ratios = J / qi[1:]
    terms = np.empty(t.n_max + 1)
    terms[0] = 1.0
    with np.errstate(over="ignore"):
        np.cumprod(ratios[:-1], out=terms[1:])
    if not np.all(np.isfinite(terms)):
        raise OverflowError(f"q-series terms overflow float64 (J={J}, q={d.q})")
    n, tail = _truncate(terms, ratios, t.tol, "E_q", J, d)
    kept = terms[: n + 1].copy()
    kept.flags.writeable = False
    return kept, tail


def series_terms(J: float, d: Deformation, t: Truncation = Truncation()):
    """Terms ``J^n/[n]_q!`` for ``n = 0..N`` and the certified tail bound beyond ``N``.

    The returned array is read-only and shared between callers.
    """
    return _terms_cached(float(J), d, t)


def q_exponential(J: float, d: Deformation, t: Truncation = Truncation()) -> SeriesValue:
    """``E_q(J)`` with a certified truncation bound."""
    terms, tail = series_terms(J, d, t)
    return SeriesValue(complex(math.fsum(terms)), terms.size, tail)


def q_exponential_derivative(J: float, d: Deformation, t: Truncation = Truncation()) -> SeriesValue:
    """``E_q'(J) = sum_{n>=1} n J^{n-1} / [n]_q!``, summed termwise."""
    J = float(J)
    _check_argument(J, d)
    qi = q_integers(t.n_max + 3, d)
    m = np.arange(t.n_max + 1, dtype=np.float64)
    # v_m = (m+1) J^m / [m+1]_q!
    ratios = (m + 2.0) / (m + 1.0) * J / qi[2:]
    terms = np.empty(t.n_max + 1)
    terms[0] = 1.0
    with np.errstate(over="ignore"):
        np.cumprod(ratios[:-1], out=terms[1:])
    if not np.all(np.isfinite(terms)):
        raise OverflowError(f"derivative series overflows float64 (J={J}, q={d.q})")
    n, tail = _truncate(terms, ratios, t.tol, "E_q'", J, d)
    return SeriesValue(complex(math.fsum(terms[: n + 1])), n + 1, tail)


def _phase_freqs(size: int, d: Deformation) -> np.ndarray:
    return d.q_sq ** np.arange(size, dtype=np.float64)


def f_q(J: float, gamma: float, d: Deformation, t: Truncation = Truncation()) -> SeriesValue:
    """``F_q(J, gamma)``. The term moduli equal those of ``E_q``, so the tail bound carries over."""
    terms, tail = series_terms(J, d, t)
    value = kernels.phase_sum(terms, _phase_freqs(terms.size, d), [float(gamma)])[0]
    return SeriesValue(complex(value), terms.size, tail)


def f_q_many(J: float, gammas, d: Deformation, t: Truncation = Truncation()) -> np.ndarray:
    """Vectorised ``F_q(J, gamma)`` over a 1-d array of angles."""
    terms, _ = series_terms(J, d, t)
    return kernels.phase_sum(terms, _phase_freqs(terms.size, d), gammas)


def jackson_derivative(
    f: Callable[[float], complex],
    J: float,
    d: Deformation,
    limit: bool = False,
    step: float | None = None,
) -> complex:
    """Jackson q-difference quotient ``[f(J) - f(q^2 J)] / [J (1 - q^2)]``.

    At ``q = 1`` or ``J = 0`` the quotient degenerates; pass ``limit=True`` to
    get the ordinary derivative there instead (second-order finite difference,
    one-sided at ``J = 0``).
    """
    if not d.classical and J != 0.0:
        return (f(J) - f(d.q_sq * J)) / (J * d.one_minus_q_sq)
    if not limit:
        if d.classical:
            raise DegenerateDeformationError(
                "Jackson derivative is undefined at q = 1; pass limit=True for d/dJ"
            )
        raise DegenerateDeformationError(
            "Jackson derivative is undefined at J = 0; pass limit=True for d/dJ"
        )
    h = step if step is not None else np.cbrt(np.finfo(float).eps) * max(1.0, abs(J))
    if J == 0.0:
        return (-3.0 * f(J) + 4.0 * f(J + h) - f(J + 2.0 * h)) / (2.0 * h)
    return (f(J + h) - f(J - h)) / (2.0 * h)
