"""Revival-time hierarchy and autocorrelation scans.

With ``E_n = hbar omega [n]_q`` the n-derivatives are
``d^k E_n / dn^k = hbar omega 2^k q^{2n} ln^k(q) / (q^2 - 1)``; evaluated at the
wave-packet centre ``n_bar`` they set

    T_cl = 2 pi hbar / |E'|,   T_rev = 4 pi hbar / |E''|,   T_suprev = 12 pi hbar / |E'''|.

The autocorrelation is ``A(t) = <J, gamma0 | J, gamma0 + omega t>``; scans report
``Re A``, ``Im A`` and ``|A|^2``.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .coherent import mean_occupation
from .errors import DegenerateDeformationError
from .qkernel import Deformation, Truncation, q_exponential, q_integers, series_terms
from .scales import PhysicalScales

__all__ = [
    "RevivalTimes",
    "ScanResult",
    "energy_derivative",
    "revival_times",
    "autocorrelation",
    "autocorrelation_scan",
    "find_peaks",
    "format_number",
    "scan_from_rows",
]


@dataclass(frozen=True)
class RevivalTimes:
    t_cl: float
    t_rev: float
    t_suprev: float
    n_bar: float


@dataclass(frozen=True)
class ScanResult:
    """Uniform time grid ``t`` and one value column per entry of ``columns``."""

    t: np.ndarray
    values: np.ndarray
    columns: tuple[str, ...]

    def __post_init__(self):
        if self.values.shape != (self.t.size, len(self.columns)):
            raise ValueError("values must have shape (len(t), len(columns))")

    def __len__(self) -> int:
        return self.t.size

    @property
    def header(self) -> tuple[str, ...]:
        return ("t",) + self.columns

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.t
        try:
            return self.values[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"unknown column {name!r}; available: {', '.join(self.header)}") from None

    def rows(self) -> Iterator[tuple[float, ...]]:
        for i in range(self.t.size):
            yield (float(self.t[i]),) + tuple(float(v) for v in self.values[i])

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(self.header) + "\n")
        for row in self.rows():
            out.write(",".join(format_number(v) for v in row) + "\n")
        return out.getvalue()


def format_number(x: float, digits: int = 17) -> str:
    """Locale-free ``%.{digits}g``; negative zero prints as ``0``."""
    return "%.*g" % (digits, x + 0.0)


def energy_derivative(k: int, n_bar: float, d: Deformation, scales: PhysicalScales) -> float:
    """``d^k E_n / dn^k`` at ``n = n_bar``.

    At ``q = 1`` the spectrum is linear: ``hbar omega`` for ``k = 1``, zero otherwise.
    """
    if k < 1:
        raise ValueError(f"derivative order must be >= 1, got {k}")
    hw = scales.hbar * scales.omega
    if d.classical:
        return hw if k == 1 else 0.0
    log_q = math.log(d.q)
    return hw * 2.0**k * d.q_sq**n_bar * log_q**k / (d.q_sq - 1.0)


def revival_times(
    J: float, d: Deformation, scales: PhysicalScales, t: Truncation = Truncation()
) -> RevivalTimes:
    if d.classical:
        raise DegenerateDeformationError("no revival structure at q = 1: the spectrum is linear")
    n_bar = mean_occupation(J, d, t)
    hbar = scales.hbar
    return RevivalTimes(
        t_cl=2.0 * math.pi * hbar / abs(energy_derivative(1, n_bar, d, scales)),
        t_rev=4.0 * math.pi * hbar / abs(energy_derivative(2, n_bar, d, scales)),
        t_suprev=12.0 * math.pi * hbar / abs(energy_derivative(3, n_bar, d, scales)),
        n_bar=n_bar,
    )


def _chunks(n: int, workers: int) -> list[tuple[int, int]]:
    # split on kernels.CHUNK boundaries so every point sees the same arithmetic
    blocks = [(i, min(i + kernels.CHUNK, n)) for i in range(0, n, kernels.CHUNK)]
    per = max(1, math.ceil(len(blocks) / workers))
    return [(blocks[i][0], blocks[min(i + per, len(blocks)) - 1][1]) for i in range(0, len(blocks), per)]


def autocorrelation(
    J: float, gammas, d: Deformation, t: Truncation = Truncation(), workers: int = 1
) -> np.ndarray:
    """``<J, 0 | J, gamma>`` for each angle, as ``sum_n |c_n|^2 exp(-i gamma [n]_q)``.

    This is ``exp(-i gamma / (1 - q^2)) F_q(J, gamma / (1 - q^2)) / E_q(J)`` with the
    common phase taken out, which keeps the summed phases small.
    """
    terms, _ = series_terms(J, d, t)
    weights = terms / q_exponential(J, d, t).value.real
    freqs = -q_integers(terms.size, d)
    g = np.ascontiguousarray(gammas, dtype=np.float64)
    if workers <= 1 or g.size <= kernels.CHUNK:
        return kernels.phase_sum(weights, freqs, g)
    out = np.empty(g.size, dtype=np.complex128)
    spans = _chunks(g.size, workers)

    def run(span):
        lo, hi = span
        out[lo:hi] = kernels.phase_sum(weights, freqs, g[lo:hi])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, spans))
    return out


def autocorrelation_scan(
    J: float,
    d: Deformation,
    scales: PhysicalScales,
    t: Truncation,
    t_min: float,
    t_max: float,
    steps: int,
    workers: int = 1,
) -> ScanResult:
    """Columns ``re, im, abs2`` of ``A(t)`` on ``steps`` uniform points of ``[t_min, t_max]``."""
    if not t_min < t_max:
        raise ValueError(f"need t_min < t_max, got [{t_min}, {t_max}]")
    if steps < 2:
        raise ValueError(f"need at least 2 steps, got {steps}")
    times = np.linspace(t_min, t_max, steps)
    a = autocorrelation(J, scales.omega * times, d, t, workers=workers)
    values = np.column_stack([a.real, a.imag, a.real**2 + a.imag**2])
    return ScanResult(times, values, ("re", "im", "abs2"))


def find_peaks(scan: ScanResult, column: str, threshold: float) -> list[tuple[float, float]]:
    """Strict interior local maxima of ``column`` exceeding ``threshold``."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    v = scan.column(column)
    if v.size < 3:
        return []
    mid = v[1:-1]
    idx = np.flatnonzero((mid > v[:-2]) & (mid > v[2:]) & (mid > threshold)) + 1
    return [(float(scan.t[i]), float(v[i])) for i in idx]


def scan_from_rows(header: Sequence[str], rows: Sequence[Sequence[float]]) -> ScanResult:
    """Rebuild a :class:`ScanResult` from CSV-like rows (first column is time)."""
    if not rows:
        raise ValueError("no data rows")
    data = np.asarray(rows, dtype=np.float64)
    return ScanResult(data[:, 0].copy(), data[:, 1:].copy(), tuple(header[1:]))
