"""Hot inner loops: weighted phase sums over a truncated q-series.

Every scan in the package reduces to

    S(g_k) = sum_n w_n * exp(i * g_k * f_n)

for a fixed set of weights ``w_n`` (the q-series terms), frequencies ``f_n``
(``q**(2n)`` or ``[n]_q``) and a long vector of angles ``g_k``. Two
implementations are provided and must agree to rounding:

* a numba ``@njit`` loop (default when numba is importable), and
* a chunked pure-numpy path.

Set ``QKLAUDER_NO_NUMBA=1`` in the environment to force the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "HAVE_NUMBA",
    "CHUNK",
    "reduce_phase",
    "phase_sum",
    "phase_sum_numpy",
    "phase_sum_numba",
]

# 2*pi split into 28-bit pieces: k * TWO_PI_1 and k * TWO_PI_2 are exact for |k| < 2**25.
TWO_PI_1 = 6.283185303211212
TWO_PI_2 = 3.968374295837407e-09
TWO_PI_3 = 2.2884754904439327e-17
INV_TWO_PI = 0.15915494309189535

# Row block for the numpy path. Fixed so that results never depend on how a
# scan is split between workers.
CHUNK = 2048


def _env_disabled() -> bool:
    flag = os.environ.get("QKLAUDER_NO_NUMBA", "")
    return flag.strip().lower() not in ("", "0", "false", "no")


try:
    if _env_disabled():
        raise ImportError("numba disabled by QKLAUDER_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def reduce_phase(x):
    """Reduce angles to [-pi, pi] with a three-term Cody-Waite split of 2*pi.

    Accepts scalars or arrays; works elementwise.
    """
    k = np.rint(x * INV_TWO_PI)
    return ((x - k * TWO_PI_1) - k * TWO_PI_2) - k * TWO_PI_3


def phase_sum_numpy(weights, freqs, gammas):
    """Numpy reference path. Returns a complex array shaped like ``gammas``."""
    w = np.ascontiguousarray(weights, dtype=np.float64)
    f = np.ascontiguousarray(freqs, dtype=np.float64)
    g = np.ascontiguousarray(gammas, dtype=np.float64)
    out = np.empty(g.shape[0], dtype=np.complex128)
    for start in range(0, g.shape[0], CHUNK):
        stop = min(start + CHUNK, g.shape[0])
        ph = reduce_phase(np.multiply.outer(g[start:stop], f))
        out[start:stop].real = np.cos(ph) @ w
        out[start:stop].imag = np.sin(ph) @ w
    return out


if HAVE_NUMBA:
    import math

    @njit(cache=True, nogil=True)
    def _reduce_scalar(x):
        k = math.floor(x * INV_TWO_PI + 0.5)
        return ((x - k * TWO_PI_1) - k * TWO_PI_2) - k * TWO_PI_3

    @njit(cache=True, nogil=True)
    def _phase_sum_kernel(w, f, g, out):
        n_terms = w.shape[0]
        for k in range(g.shape[0]):
            gk = g[k]
            re = 0.0
            im = 0.0
            for n in range(n_terms):
                ph = _reduce_scalar(gk * f[n])
                re += w[n] * math.cos(ph)
                im += w[n] * math.sin(ph)
            out[k] = complex(re, im)

    def phase_sum_numba(weights, freqs, gammas):
        """Compiled path; same contract as :func:`phase_sum_numpy`."""
        w = np.ascontiguousarray(weights, dtype=np.float64)
        f = np.ascontiguousarray(freqs, dtype=np.float64)
        g = np.ascontiguousarray(gammas, dtype=np.float64)
        out = np.empty(g.shape[0], dtype=np.complex128)
        _phase_sum_kernel(w, f, g, out)
        return out

else:

    def phase_sum_numba(weights, freqs, gammas):
        raise RuntimeError("numba backend unavailable")


def phase_sum(weights, freqs, gammas):
    """``sum_n w_n exp(i g f_n)`` for each ``g`` in ``gammas`` (1-d)."""
    g = np.atleast_1d(np.asarray(gammas, dtype=np.float64))
    if g.ndim != 1:
        raise ValueError("gammas must be one-dimensional")
    if HAVE_NUMBA:
        return phase_sum_numba(weights, freqs, g)
    return phase_sum_numpy(weights, freqs, g)
