"""Dense truncated-Fock-space oracle for expectation values.

Used to check every closed form in :mod:`qklauder.observables` by direct
``<psi| M |psi>`` sums with explicit ladder-operator matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coherent import CoherentState, coefficients, probabilities
from .errors import InsufficientTruncationError
from .qkernel import Deformation, q_integers

__all__ = [
    "TAIL_THRESHOLD",
    "TruncatedOperator",
    "annihilation_matrix",
    "creation_matrix",
    "word_matrix",
    "auto_dimension",
    "oracle_expectation",
]

TAIL_THRESHOLD = 1e-18

_ANNIHILATE = {"A", "a"}
_CREATE = {"A+", "Ad", "Adag", "A†", "a+", "ad", "adag"}


@dataclass(frozen=True)
class TruncatedOperator:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "TruncatedOperator":
        return TruncatedOperator(self.entries.conj().T)

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return TruncatedOperator(self.entries @ other.entries)


def annihilation_matrix(N: int, d: Deformation) -> TruncatedOperator:
    """``<n-1| A |n> = sqrt([n]_q)`` on the first superdiagonal."""
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    band = np.sqrt(q_integers(N, d)[1:])
    return TruncatedOperator(np.diag(band, k=1).astype(np.complex128))


def creation_matrix(N: int, d: Deformation) -> TruncatedOperator:
    return annihilation_matrix(N, d).dagger()


def _parse(word: Sequence[str]) -> list[bool]:
    out = []
    for sym in word:
        if sym in _ANNIHILATE:
            out.append(False)
        elif sym in _CREATE:
            out.append(True)
        else:
            raise ValueError(f"unknown operator symbol {sym!r}; use 'A' or 'A+'")
    return out


def word_matrix(word: Sequence[str], N: int, d: Deformation) -> TruncatedOperator:
    """Matrix product of the word, leftmost symbol first."""
    a = annihilation_matrix(N, d)
    ad = a.dagger()
    m = TruncatedOperator(np.eye(N, dtype=np.complex128))
    for create in _parse(word):
        m = m @ (ad if create else a)
    return m


def _tail_mass(s: CoherentState, N: int, w: int) -> float:
    p = probabilities(s, max(N, s.t.n_max) + w + 1)
    return float(p[max(N - w, 0) :].sum())


def auto_dimension(s: CoherentState, w: int) -> int:
    """Smallest ``N`` with ``sum_{n >= N-w} |c_n|^2 < TAIL_THRESHOLD``, capped by ``n_max``."""
    cap = s.t.n_max + w + 1
    p = probabilities(s, cap)
    tail = np.cumsum(p[::-1])[::-1]
    for N in range(max(2, w), cap + 1):
        start = N - w
        mass = tail[start] if start < cap else 0.0
        if mass < TAIL_THRESHOLD:
            return N
    raise InsufficientTruncationError(
        f"coefficient tail stays above {TAIL_THRESHOLD:g} up to N={cap} (J={s.J}, q={s.d.q})"
    )


def oracle_expectation(s: CoherentState, word: Sequence[str], N: int | None = None) -> complex:
    """``c^H M c`` with ``M`` the product of ladder matrices spelled by ``word``."""
    w = len(_parse(word))
    if N is None:
        N = auto_dimension(s, w)
    elif _tail_mass(s, N, w) >= TAIL_THRESHOLD:
        raise InsufficientTruncationError(
            f"N={N} leaves more than {TAIL_THRESHOLD:g} of the state beyond index {N - w}"
        )
    c = coefficients(s, N)
    m = word_matrix(word, N, s.d)
    return complex(np.vdot(c, m.entries @ c))
