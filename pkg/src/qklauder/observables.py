"""Closed-form expectation values on ``|J, gamma>_q``.

Every expectation reduces to ``F_q`` at shifted arguments:

    <A>      = sqrt(J) F_q(J, -gamma) / E_q(J)
    <A+ A+>  = J F_q(J, gamma (1 + q^2)) / E_q(J)
    <A+ A+ A> = J^{3/2} F_q(J, q^2 gamma) / E_q(J)
    ...

Quadratures are ``X = alpha (A+ + A)`` and ``P = i beta (A+ - A)``, taken as
Hermitian with the standard inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .coherent import CoherentState
from .errors import ConsistencyError
from .qkernel import f_q, f_q_many, q_exponential
from .scales import PhysicalScales, QuadratureCoeffs, quadrature_coeffs

__all__ = [
    "IMAG_TOL",
    "CONSISTENCY_TOL",
    "EHRENFEST_STEP",
    "Bilinears",
    "Trilinears",
    "GFunctions",
    "UncertaintyReport",
    "EhrenfestResidual",
    "expect_a",
    "expect_a_dagger",
    "expect_bilinears",
    "expect_trilinears",
    "expect_x",
    "expect_p",
    "expect_x2",
    "expect_p2",
    "g_functions",
    "uncertainty_bound",
    "lhs_closed_form",
    "uncertainty",
    "commutator_expectation",
    "commutator_xh",
    "commutator_ph",
    "ehrenfest_residual",
    "uncertainty_scan",
]

IMAG_TOL = 1e-12
CONSISTENCY_TOL = 1e-10
EHRENFEST_STEP = 1e-4


class Bilinears(NamedTuple):
    ad_ad: complex
    a_a: complex
    ad_a: complex
    a_ad: complex


class Trilinears(NamedTuple):
    ad_ad_a: complex
    ad_a_ad: complex
    ad_a_a: complex
    a_ad_a: complex


class GFunctions(NamedTuple):
    gc: float
    gs: float
    gq: float


@dataclass(frozen=True)
class UncertaintyReport:
    dx: float
    dp: float
    product: float
    bound: float
    ratio: float
    gc: float
    gs: float
    gq: float


class EhrenfestResidual(NamedTuple):
    residual_closed: float
    residual_fd: float
    scale: float


def _F(s: CoherentState, gamma: float) -> complex:
    return f_q(s.J, gamma, s.d, s.t).value


def _E(s: CoherentState) -> float:
    return q_exponential(s.J, s.d, s.t).value.real


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > IMAG_TOL * max(abs(z.real), 1.0):
        raise ConsistencyError(f"{what} should be real, got imaginary part {z.imag:.3e}")
    return z.real


def expect_a(s: CoherentState) -> complex:
    return math.sqrt(s.J) * _F(s, -s.gamma) / _E(s)


def expect_a_dagger(s: CoherentState) -> complex:
    return math.sqrt(s.J) * _F(s, s.gamma) / _E(s)


def expect_bilinears(s: CoherentState) -> Bilinears:
    """``<A+A+>, <AA>, <A+A>, <AA+>``."""
    E = _E(s)
    g2 = s.gamma * (1.0 + s.d.q_sq)
    return Bilinears(
        ad_ad=s.J * _F(s, g2) / E,
        a_a=s.J * _F(s, -g2) / E,
        ad_a=complex(s.J),
        a_ad=complex(1.0 + s.d.q_sq * s.J),
    )


def expect_trilinears(s: CoherentState) -> Trilinears:
    """``<A+A+A>, <A+AA+>, <A+AA>, <AA+A>``."""
    E = _E(s)
    rj = math.sqrt(s.J)
    j32 = s.J * rj
    q2 = s.d.q_sq
    f_p = _F(s, s.gamma)
    f_m = _F(s, -s.gamma)
    f_qp = _F(s, q2 * s.gamma)
    f_qm = _F(s, -q2 * s.gamma)
    return Trilinears(
        ad_ad_a=j32 * f_qp / E,
        ad_a_ad=(rj * f_p + q2 * j32 * f_qp) / E,
        ad_a_a=j32 * f_qm / E,
        a_ad_a=(rj * f_m + q2 * j32 * f_qm) / E,
    )


def _coeffs(s: CoherentState, scales: PhysicalScales) -> QuadratureCoeffs:
    return quadrature_coeffs(s.d, scales)


def expect_x(s: CoherentState, scales: PhysicalScales) -> float:
    c = _coeffs(s, scales)
    z = c.alpha * math.sqrt(s.J) * (_F(s, s.gamma) + _F(s, -s.gamma)) / _E(s)
    return _real(z, "<X>")


def expect_p(s: CoherentState, scales: PhysicalScales) -> float:
    c = _coeffs(s, scales)
    z = 1j * c.beta * math.sqrt(s.J) * (_F(s, s.gamma) - _F(s, -s.gamma)) / _E(s)
    return _real(z, "<P>") + 0.0


def _shifted_pair(s: CoherentState) -> complex:
    g2 = s.gamma * (1.0 + s.d.q_sq)
    return s.J * (_F(s, g2) + _F(s, -g2)) / _E(s)


def expect_x2(s: CoherentState, scales: PhysicalScales) -> float:
    c = _coeffs(s, scales)
    z = c.alpha**2 * (_shifted_pair(s) + 1.0 + s.J + s.d.q_sq * s.J)
    return _real(z, "<X^2>")


def expect_p2(s: CoherentState, scales: PhysicalScales) -> float:
    c = _coeffs(s, scales)
    z = -(c.beta**2) * (_shifted_pair(s) - 1.0 - s.J - s.d.q_sq * s.J)
    return _real(z, "<P^2>")


def g_functions(s: CoherentState) -> GFunctions:
    """Cosine/sine amplitudes of ``F_q``; ``gs`` is real (no factor ``i``).

    ``gc = 2 sqrt(J) Re F_q(J, gamma) / E_q``, ``gs = 2 sqrt(J) Im F_q(J, gamma) / E_q``,
    ``gq = sqrt(J) gc(gamma (1 + q^2))``.
    """
    E = _E(s)
    two_rj = 2.0 * math.sqrt(s.J)
    f1 = _F(s, s.gamma)
    f2 = _F(s, s.gamma * (1.0 + s.d.q_sq))
    return GFunctions(
        gc=two_rj * f1.real / E,
        gs=two_rj * f1.imag / E,
        gq=math.sqrt(s.J) * two_rj * f2.real / E,
    )


def uncertainty_bound(s: CoherentState, scales: PhysicalScales) -> float:
    """``(hbar/4)(1 + q^2)[1 + (q^2 - 1) J]``; gamma independent."""
    q2 = s.d.q_sq
    return 0.25 * scales.hbar * (1.0 + q2) * (1.0 + (q2 - 1.0) * s.J)


def lhs_closed_form(s: CoherentState, scales: PhysicalScales, g: GFunctions | None = None) -> float:
    """``alpha^2 beta^2 [1+(1+q^2)J + gq - gc^2][1+(1+q^2)J - gq - gs^2]``."""
    g = g_functions(s) if g is None else g
    c = _coeffs(s, scales)
    base = 1.0 + (1.0 + s.d.q_sq) * s.J
    return c.alpha**2 * c.beta**2 * (base + g.gq - g.gc**2) * (base - g.gq - g.gs**2)


def uncertainty(s: CoherentState, scales: PhysicalScales) -> UncertaintyReport:
    """``dX dP`` from variances, checked against the closed-form product.

    Raises :class:`ConsistencyError` if the two routes disagree by more than
    ``CONSISTENCY_TOL`` relative.
    """
    x = expect_x(s, scales)
    p = expect_p(s, scales)
    dx2 = expect_x2(s, scales) - x * x
    dp2 = expect_p2(s, scales) - p * p
    g = g_functions(s)
    closed = lhs_closed_form(s, scales, g)
    variance_product = dx2 * dp2
    if abs(closed - variance_product) > CONSISTENCY_TOL * max(abs(variance_product), abs(closed)):
        raise ConsistencyError(
            "closed-form/variance consistency: dX^2 dP^2 = "
            f"{variance_product:.16e} but closed form gives {closed:.16e} "
            f"(J={s.J}, q={s.d.q}, gamma={s.gamma})"
        )
    dx = math.sqrt(max(dx2, 0.0))
    dp = math.sqrt(max(dp2, 0.0))
    bound = uncertainty_bound(s, scales)
    product = dx * dp
    return UncertaintyReport(
        dx=dx, dp=dp, product=product, bound=bound, ratio=product / bound, gc=g.gc, gs=g.gs, gq=g.gq
    )


def commutator_expectation(s: CoherentState, scales: PhysicalScales) -> float:
    """``|<[X, P]>| / 2`` assembled from ``<X^2>`` and ``<P^2>``."""
    q2 = s.d.q_sq
    mw = scales.mass * scales.omega
    inner = scales.hbar + (q2 - 1.0) / (q2 + 1.0) * (mw * expect_x2(s, scales) + expect_p2(s, scales) / mw)
    return 0.5 * abs(inner)


def commutator_xh(s: CoherentState, scales: PhysicalScales) -> complex:
    """``<[X, H]>`` from the trilinear expectations."""
    t = expect_trilinears(s)
    c = _coeffs(s, scales)
    hw = scales.hbar * scales.omega
    return hw * c.alpha * ((t.ad_ad_a - t.ad_a_ad) + (t.a_ad_a - t.ad_a_a))


def commutator_ph(s: CoherentState, scales: PhysicalScales) -> complex:
    """``<[P, H]>`` from the trilinear expectations."""
    t = expect_trilinears(s)
    c = _coeffs(s, scales)
    hw = scales.hbar * scales.omega
    return 1j * hw * c.beta * ((t.ad_ad_a - t.ad_a_ad) - (t.a_ad_a - t.ad_a_a))


def _time_derivative_closed(s: CoherentState, scales: PhysicalScales, which: str) -> complex:
    """``i hbar d<O>/dt`` from d/dgamma F_q(J, gamma) = i F_q(q^2 J, gamma)."""
    c = _coeffs(s, scales)
    d, t = s.d, s.t
    qj = d.q_sq * s.J
    f_p = f_q(qj, s.gamma, d, t).value
    f_m = f_q(qj, -s.gamma, d, t).value
    pref = scales.hbar * scales.omega * math.sqrt(s.J) / _E(s)
    if which == "X":
        return -pref * c.alpha * (f_p - f_m)
    return -1j * pref * c.beta * (f_p + f_m)


def _e2(s: CoherentState, scales: PhysicalScales, which: str) -> complex:
    """Sum over ``s = +-gamma`` of ``sgn(s) [F_q(J, s) + J (q^2 - 1) F_q(J, q^2 s)]``."""
    c = _coeffs(s, scales)
    q2 = s.d.q_sq
    pref = scales.hbar * scales.omega * math.sqrt(s.J) / _E(s)
    branch = {}
    for sign in (1.0, -1.0):
        g = sign * s.gamma
        branch[sign] = _F(s, g) + s.J * (q2 - 1.0) * _F(s, q2 * g)
    if which == "X":
        return -pref * c.alpha * (branch[1.0] - branch[-1.0])
    return -1j * pref * c.beta * (branch[1.0] + branch[-1.0])


def ehrenfest_residual(
    s: CoherentState,
    scales: PhysicalScales,
    which: str = "X",
    h: float | None = None,
) -> EhrenfestResidual:
    """Residuals of ``i hbar d<O>/dt = <[O, H]>`` for ``O`` in {X, P}.

    ``residual_closed`` compares the differentiated closed form with the
    commutator sum; ``residual_fd`` compares a central difference of ``<O>``
    (time step ``h``) with the same commutator. ``scale`` is the natural
    magnitude ``2 hbar omega c sqrt(J)`` against which both are judged.
    """
    if which not in ("X", "P"):
        raise ValueError(f"which must be 'X' or 'P', got {which!r}")
    h = EHRENFEST_STEP / scales.omega if h is None else h
    if not h > 0.0:
        raise ValueError("step h must be positive")
    e1 = _time_derivative_closed(s, scales, which)
    e2 = _e2(s, scales, which)
    comm = commutator_xh(s, scales) if which == "X" else commutator_ph(s, scales)
    if abs(comm - e2) > CONSISTENCY_TOL * max(abs(e2), abs(comm), 1e-300) + 1e-15:
        raise ConsistencyError(f"<[{which},H]> from trilinears disagrees with the commutator sum")
    expect = expect_x if which == "X" else expect_p
    dg = scales.omega * h
    up = CoherentState(s.J, s.gamma + dg, s.d, s.t)
    down = CoherentState(s.J, s.gamma - dg, s.d, s.t)
    fd = 1j * scales.hbar * (expect(up, scales) - expect(down, scales)) / (2.0 * h)
    c = _coeffs(s, scales)
    coef = c.alpha if which == "X" else c.beta
    scale = 2.0 * scales.hbar * scales.omega * coef * math.sqrt(s.J)
    return EhrenfestResidual(abs(e1 - e2), abs(fd - e2), scale)


def uncertainty_scan(s: CoherentState, scales: PhysicalScales, times) -> dict[str, np.ndarray]:
    """Vectorised uncertainty along ``gamma(t) = s.gamma + omega t``.

    Returns arrays keyed ``t, gamma, dX, dP, product, bound, ratio``.
    """
    times = np.asarray(times, dtype=np.float64)
    gammas = s.gamma + scales.omega * times
    c = _coeffs(s, scales)
    E = _E(s)
    rj = math.sqrt(s.J)
    f1 = f_q_many(s.J, gammas, s.d, s.t)
    f2 = f_q_many(s.J, gammas * (1.0 + s.d.q_sq), s.d, s.t)
    gc = 2.0 * rj * f1.real / E
    gs = 2.0 * rj * f1.imag / E
    gq = 2.0 * s.J * f2.real / E
    base = 1.0 + (1.0 + s.d.q_sq) * s.J
    dx2 = c.alpha**2 * (base + gq - gc**2)
    dp2 = c.beta**2 * (base - gq - gs**2)
    dx = np.sqrt(np.maximum(dx2, 0.0))
    dp = np.sqrt(np.maximum(dp2, 0.0))
    bound = np.full_like(times, uncertainty_bound(s, scales))
    product = dx * dp
    return {
        "t": times,
        "gamma": gammas,
        "dX": dx,
        "dP": dp,
        "product": product,
        "bound": bound,
        "ratio": product / bound,
    }
