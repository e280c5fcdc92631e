"""Runtime invariant suite behind ``qklauder verify``.

Each check returns a :class:`CheckResult`; a check that raises is reported as
failed with the exception text, never propagated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import coherent, fockoracle, observables, qkernel, revival
from .coherent import CoherentState
from .errors import ConsistencyError
from .qkernel import Deformation, Truncation
from .scales import PhysicalScales

__all__ = [
    "STANDARD_Q",
    "STANDARD_J",
    "ORACLE_WORDS",
    "CheckResult",
    "standard_grid",
    "closed_form_expectations",
    "run_checks",
]

STANDARD_Q = (0.5, 0.8, 0.95, math.exp(-0.005))
STANDARD_J = (0.1, 1.0, 6.0)
EPS = np.finfo(float).eps

ORACLE_WORDS = {
    "<A>": ("A",),
    "<A+>": ("A+",),
    "<A+A+>": ("A+", "A+"),
    "<AA>": ("A", "A"),
    "<A+A>": ("A+", "A"),
    "<AA+>": ("A", "A+"),
    "<A+A+A>": ("A+", "A+", "A"),
    "<A+AA+>": ("A+", "A", "A+"),
    "<A+AA>": ("A+", "A", "A"),
    "<AA+A>": ("A", "A+", "A"),
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def standard_grid(
    qs: Iterable[float] = STANDARD_Q,
    Js: Iterable[float] = STANDARD_J,
    edge: bool = False,
) -> list[tuple[Deformation, float]]:
    """(deformation, J) pairs inside the guarded convergence domain.

    ``edge=True`` adds ``J = 0.45 * radius`` for each ``q < 1``.
    """
    out = []
    for q in qs:
        d = Deformation(q)
        js = list(Js)
        if edge and not d.classical:
            js.append(0.45 * d.radius)
        out.extend((d, J) for J in js if J < d.j_limit)
    return out


def closed_form_expectations(s: CoherentState) -> dict[str, complex]:
    b = observables.expect_bilinears(s)
    t = observables.expect_trilinears(s)
    return {
        "<A>": observables.expect_a(s),
        "<A+>": observables.expect_a_dagger(s),
        "<A+A+>": b.ad_ad,
        "<AA>": b.a_a,
        "<A+A>": b.ad_a,
        "<AA+>": b.a_ad,
        "<A+A+A>": t.ad_ad_a,
        "<A+AA+>": t.ad_a_ad,
        "<A+AA>": t.ad_a_a,
        "<AA+A>": t.a_ad_a,
    }


def _rel(a: complex, b: complex, floor: float = 0.0) -> float:
    scale = max(abs(a), abs(b), floor)
    return 0.0 if scale == 0.0 else abs(a - b) / scale


class _Failure(Exception):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise _Failure(msg)


def _check_q_integers(grid, t):
    for d, _ in grid:
        qi = qkernel.q_integers(200, d)
        nxt = 1.0 + d.q_sq * qi[:-1]
        _require(np.allclose(qi[1:], nxt, rtol=8 * EPS, atol=0), f"recursion fails at q={d.q}")
        if not d.classical:
            _require(bool(np.all(np.diff(qi) >= 0)), f"[n]_q not increasing at q={d.q}")
            gap = d.q_sq ** np.arange(qi.size) / d.one_minus_q_sq
            _require(np.allclose(d.radius - qi, gap, rtol=0, atol=8 * EPS * d.radius), f"[n]_q does not approach radius at q={d.q}")


def _check_tail_soundness(grid, t):
    for d, J in grid:
        sv = qkernel.q_exponential(J, d, t)
        qi = qkernel.q_integers(4 * t.n_max + 1, d)
        terms = np.concatenate(([1.0], np.cumprod(J / qi[1:])))
        full = math.fsum(terms)
        slack = 64 * sv.terms_used * EPS * abs(sv.value)
        _require(abs(full - sv.value.real) <= sv.tail_bound + slack, f"tail bound violated at q={d.q}, J={J}")


def _check_id1(grid, t):
    h = 1e-4
    for d, J in grid:
        E = qkernel.q_exponential(J, d, t).value.real
        for g in (0.3, 1.7, 5.0):
            fd = (qkernel.f_q(J, g + h, d, t).value - qkernel.f_q(J, g - h, d, t).value) / (2 * h)
            rhs = 1j * qkernel.f_q(d.q_sq * J, g, d, t).value
            tol = h * h * E / 6 + 16 * EPS * E / h
            _require(abs(fd - rhs) <= tol, f"ID1 off by {abs(fd - rhs):.3e} at q={d.q}, J={J}, gamma={g}")


def _check_id2(grid, t):
    for d, J in grid:
        if d.classical:
            continue
        E = qkernel.q_exponential(J, d, t).value.real
        tol = 64 * EPS * E / (J * d.one_minus_q_sq)
        for g in (0.0, 0.9, 3.1):
            lhs = qkernel.jackson_derivative(lambda x: qkernel.f_q(x, g, d, t).value, J, d)
            rhs = qkernel.f_q(J, d.q_sq * g, d, t).value
            _require(abs(lhs - rhs) <= tol, f"ID2 off by {abs(lhs - rhs):.3e} at q={d.q}, J={J}, gamma={g}")


def _check_dq_exp(grid, t):
    for d, J in grid:
        if d.classical:
            continue
        E = qkernel.q_exponential(J, d, t).value.real
        dq = qkernel.jackson_derivative(lambda x: qkernel.q_exponential(x, d, t).value, J, d)
        tol = 64 * EPS * E / (J * d.one_minus_q_sq)
        _require(abs(dq - E) <= tol, f"D_q E_q != E_q at q={d.q}, J={J}")


def _check_norm_energy(grid, t, scales):
    for d, J in grid:
        for g in (0.0, 2.5):
            s = CoherentState(J, g, d, t)
            _require(abs(coherent.norm_check(s) - 1.0) <= 1e-12, f"norm at q={d.q}, J={J}")
            e = coherent.energy_expectation(s, scales) / (scales.hbar * scales.omega)
            _require(abs(e - J) <= 1e-10 * max(J, 1.0), f"<H> != hbar omega J at q={d.q}, J={J}")


def _check_temporal_stability(grid, t, scales):
    for d, J in grid[:: max(1, len(grid) // 4)]:
        s = CoherentState(J, 0.4, d, t)
        dt = 1.3
        e = coherent.evolve(s, dt, scales.omega)
        n = coherent.level(s)
        expected = coherent.coefficients(s) * np.exp(-1j * scales.omega * dt * qkernel.q_integers(n, d))
        _require(np.allclose(coherent.coefficients(e), expected, rtol=1e-12, atol=1e-15), f"evolution at q={d.q}")
        ab = coherent.overlap(s, e)
        ba = coherent.overlap(e, s)
        _require(abs(ab - ba.conjugate()) <= 1e-14, "overlap not conjugate-symmetric")


def _check_oracle(grid, t):
    for d, J in grid:
        for g in (0.0, 0.7, 2.0):
            s = CoherentState(J, g, d, t)
            closed = closed_form_expectations(s)
            for label, word in ORACLE_WORDS.items():
                o = fockoracle.oracle_expectation(s, word)
                err = _rel(closed[label], o, floor=1e-300)
                _require(err <= 1e-10, f"{label} differs from oracle by {err:.2e} at q={d.q}, J={J}, gamma={g}")


def _gammas():
    return np.linspace(0.0, 4 * math.pi, 64)


def _check_consistency(grid, t, scales):
    for d, J in grid:
        for g in _gammas():
            try:
                observables.uncertainty(CoherentState(J, g, d, t), scales)
            except ConsistencyError as exc:
                raise _Failure(str(exc)) from None


def _check_saturation(grid, t, scales):
    for d, J in grid:
        r = observables.uncertainty(CoherentState(J, 0.0, d, t), scales).ratio
        _require(abs(r - 1.0) <= 1e-9, f"ratio {r!r} at gamma=0, q={d.q}, J={J}")


def _check_inequality(grid, t, scales):
    for d, J in grid:
        for g in _gammas():
            r = observables.uncertainty(CoherentState(J, g, d, t), scales).ratio
            _require(r >= 1.0 - 1e-9, f"ratio {r!r} < 1 at q={d.q}, J={J}, gamma={g}")


def _check_commutator(grid, t, scales):
    for d, J in grid:
        vals = [observables.commutator_expectation(CoherentState(J, g, d, t), scales) for g in (0.0, 1.0, 4.0)]
        bound = observables.uncertainty_bound(CoherentState(J, 0.0, d, t), scales)
        _require(max(vals) - min(vals) <= 1e-12 * max(bound, 1.0), f"commutator varies with gamma at q={d.q}, J={J}")
        _require(abs(vals[0] - bound) <= 1e-10 * bound, f"commutator != closed bound at q={d.q}, J={J}")


def _check_g_bounds(grid, t):
    for d, J in grid:
        for g in _gammas():
            gf = observables.g_functions(CoherentState(J, g, d, t))
            _require(abs(gf.gq) <= 2 * J + 1e-12, f"|gq| > 2J at q={d.q}, J={J}")
            _require(gf.gc**2 + gf.gs**2 <= 4 * J + 1e-12, f"gc^2+gs^2 > 4J at q={d.q}, J={J}")


def _check_ehrenfest(grid, t, scales):
    for d, J in grid:
        if J == 0.0:
            continue
        for g in (0.0, 0.7, 2.3):
            s = CoherentState(J, g, d, t)
            for which in ("X", "P"):
                r = observables.ehrenfest_residual(s, scales, which)
                _require(r.residual_closed <= 1e-10 * r.scale, f"E1 != E2 for {which} at q={d.q}, J={J}")
    d, J = grid[-1]
    s = CoherentState(J, 0.9, d, t)
    h = 1e-2 / scales.omega
    r1 = observables.ehrenfest_residual(s, scales, "X", h).residual_fd
    r2 = observables.ehrenfest_residual(s, scales, "X", h / 2).residual_fd
    order = math.log2(r1 / r2)
    _require(abs(order - 2.0) <= 0.2, f"finite-difference order {order:.3f}")


def _check_revival(grid, t, scales):
    for d, J in grid:
        if d.classical:
            continue
        rt = revival.revival_times(J, d, scales, t)
        lq = abs(math.log(d.q))
        _require(abs(rt.t_rev / rt.t_cl - 1 / lq) <= 1e-12 / lq, f"T_rev/T_cl at q={d.q}")
        _require(abs(rt.t_suprev / rt.t_rev - 1.5 / lq) <= 1e-12 / lq, f"T_suprev/T_rev at q={d.q}")


def _check_autocorr(grid, t):
    gammas = np.array([0.0, 0.37, 2.0, 11.0])
    for d, J in grid:
        a = revival.autocorrelation(J, gammas, d, t)
        _require(bool(np.all(np.abs(a) ** 2 <= 1 + 1e-10)), f"|A|^2 > 1 at q={d.q}")
        if d.classical:
            continue
        E = qkernel.q_exponential(J, d, t).value.real
        ref = np.abs(qkernel.f_q_many(J, gammas / d.one_minus_q_sq, d, t)) / E
        _require(np.allclose(np.abs(a), ref, rtol=0, atol=1e-10), f"modulus identity at q={d.q}, J={J}")


def _check_classical(t, scales):
    d = Deformation(1.0)
    for J in (0.1, 1.0, 6.0):
        for g in np.linspace(0.0, 2 * math.pi, 9):
            r = observables.uncertainty(CoherentState(J, g, d, t), scales)
            _require(abs(r.ratio - 1.0) <= 1e-10, f"q=1 ratio {r.ratio!r} at J={J}")
        gam = np.linspace(0.0, 4 * math.pi, 17)
        a2 = np.abs(revival.autocorrelation(J, gam, d, t)) ** 2
        _require(np.allclose(a2, np.exp(2 * J * (np.cos(gam) - 1)), rtol=0, atol=1e-10), f"q=1 |A|^2 at J={J}")


def run_checks(
    t: Truncation = Truncation(),
    scales: PhysicalScales = PhysicalScales(),
    extra: Iterable[tuple[Deformation, float]] = (),
) -> list[CheckResult]:
    grid = standard_grid()
    grid += [p for p in extra if p not in grid and p[1] < p[0].j_limit]
    edge = standard_grid(qs=STANDARD_Q, Js=(), edge=True)
    checks: list[tuple[str, Callable[[], None]]] = [
        ("q-integer recursion/monotonicity", lambda: _check_q_integers(grid, t)),
        ("tail-bound soundness", lambda: _check_tail_soundness(grid + edge, t)),
        ("identity ID1 (d/dgamma)", lambda: _check_id1(grid, t)),
        ("identity ID2 (Jackson)", lambda: _check_id2(grid, t)),
        ("D_q E_q = E_q", lambda: _check_dq_exp(grid, t)),
        ("normalisation / action-angle", lambda: _check_norm_energy(grid, t, scales)),
        ("temporal stability / overlap symmetry", lambda: _check_temporal_stability(grid, t, scales)),
        ("oracle equivalence", lambda: _check_oracle(grid, t)),
        ("closed-form/variance consistency", lambda: _check_consistency(grid + edge, t, scales)),
        ("saturation at gamma=0", lambda: _check_saturation(grid + edge, t, scales)),
        ("uncertainty inequality", lambda: _check_inequality(grid + edge, t, scales)),
        ("commutator gamma-constancy", lambda: _check_commutator(grid, t, scales)),
        ("g-function bounds", lambda: _check_g_bounds(grid, t)),
        ("Ehrenfest theorem", lambda: _check_ehrenfest(grid, t, scales)),
        ("revival ratio identities", lambda: _check_revival(grid, t, scales)),
        ("autocorrelation modulus identity", lambda: _check_autocorr(grid, t)),
        ("classical limit q=1", lambda: _check_classical(t, scales)),
    ]
    results = []
    for name, fn in checks:
        try:
            fn()
        except _Failure as exc:
            results.append(CheckResult(name, False, str(exc)))
        except Exception as exc:  # noqa: BLE001 - every failure is reported, not raised
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
        else:
            results.append(CheckResult(name, True))
    return results
