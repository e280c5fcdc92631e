"""Time the numpy and numba phase-sum kernels on autocorrelation-sized inputs.

    python3 benchmarks/bench_kernels.py --points 10000 100000 --repeat 5

Weights and frequencies come from the reference state (q = exp(-0.005), J = 6),
so the term count matches what a real revival scan uses.  The numba timing
excludes compilation (one warm-up call first).
"""

import argparse
import statistics
import time

import numpy as np

from qklauder import kernels
from qklauder.qkernel import Deformation, q_exponential, q_integers, series_terms


def fig1_inputs(J=6.0, tau=0.005):
    d = Deformation.from_tau(tau)
    terms, _ = series_terms(J, d)
    weights = terms / q_exponential(J, d).value.real
    return weights, -q_integers(terms.size, d)


def best_time(fn, repeat):
    samples = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return min(samples), statistics.median(samples)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, nargs="+", default=[2_000, 20_000, 200_000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--t-max", type=float, default=4.2e5, help="largest angle in the scan")
    args = ap.parse_args(argv)

    w, f = fig1_inputs()
    print(f"terms per point: {w.size}; active backend: {kernels.BACKEND}")
    if kernels.HAVE_NUMBA:
        kernels.phase_sum_numba(w, f, np.zeros(4))
    else:
        print("numba unavailable or disabled (QKLAUDER_NO_NUMBA); timing numpy only")

    print(f"{'points':>9}  {'numpy min [s]':>14}  {'numba min [s]':>14}  {'speed-up':>8}  {'max |diff|':>10}")
    for n in args.points:
        g = np.linspace(0.0, args.t_max, n)
        t_np, _ = best_time(lambda: kernels.phase_sum_numpy(w, f, g), args.repeat)
        if kernels.HAVE_NUMBA:
            t_nb, _ = best_time(lambda: kernels.phase_sum_numba(w, f, g), args.repeat)
            diff = np.max(np.abs(kernels.phase_sum_numpy(w, f, g) - kernels.phase_sum_numba(w, f, g)))
            print(f"{n:>9}  {t_np:>14.4f}  {t_nb:>14.4f}  {t_np / t_nb:>8.2f}  {diff:>10.2e}")
        else:
            print(f"{n:>9}  {t_np:>14.4f}  {'-':>14}  {'-':>8}  {'-':>10}")


if __name__ == "__main__":
    main()
