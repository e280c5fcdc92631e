"""Regenerate the long-time autocorrelation panels at the reference parameters (q = exp(-0.005), J = 6).

Writes three CSV/SVG pairs into ``--outdir``:

* ``classical``   |A(t)|^2 on [0, 3 T_cl]
* ``revival``     |A(t)|^2 on [0, 1.05 T_rev]
* ``superrevival`` |A(t)|^2 on [0, 1.05 T_suprev]

The superrevival panel needs a few hundred thousand points to resolve the
classical oscillation, which takes seconds with numba and a few minutes on
the numpy path. Use ``--workers`` to spread it over threads.

    python3 scripts/superrevival_panels.py --outdir panels --workers 4
"""

import argparse
import os

import numpy as np

from qklauder.qkernel import Deformation, Truncation
from qklauder.revival import autocorrelation_scan, find_peaks, revival_times
from qklauder.scales import PhysicalScales
from qklauder.svgplot import line_plot_svg


def envelope(t, y, bins):
    """Per-bin maximum, so a long panel stays a small SVG and keeps its peaks."""
    if t.size <= 2 * bins:
        return t, y
    edges = np.linspace(0, t.size, bins + 1).astype(int)
    idx = np.array([lo + int(np.argmax(y[lo:hi])) for lo, hi in zip(edges[:-1], edges[1:])])
    return t[idx], y[idx]


def main(argv=None):
    ap = argparse.ArgumentParser(description="autocorrelation panels at revival and superrevival scale")
    ap.add_argument("--tau", type=float, default=0.005)
    ap.add_argument("--J", type=float, default=6.0)
    ap.add_argument("--outdir", default="panels")
    ap.add_argument("--points-per-period", type=float, default=8.0,
                    help="samples per classical period on the long panels")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--svg-bins", type=int, default=4000, help="envelope bins for the SVG (CSV keeps every point)")
    args = ap.parse_args(argv)

    os.makedirs(args.outdir, exist_ok=True)
    d = Deformation.from_tau(args.tau)
    sc = PhysicalScales()
    rt = revival_times(args.J, d, sc)
    print(f"n_bar={rt.n_bar:.6f} T_cl={rt.t_cl:.6f} T_rev={rt.t_rev:.4f} T_suprev={rt.t_suprev:.1f}")

    panels = [
        ("classical", 3 * rt.t_cl, 3001),
        ("revival", 1.05 * rt.t_rev, None),
        ("superrevival", 1.05 * rt.t_suprev, None),
    ]
    for name, t_max, steps in panels:
        if steps is None:
            steps = int(args.points_per_period * t_max / rt.t_cl) + 1
        scan = autocorrelation_scan(args.J, d, sc, Truncation(), 0.0, t_max, steps, workers=args.workers)
        base = os.path.join(args.outdir, name)
        with open(base + ".csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(scan.to_csv())
        title = f"q=exp(-{args.tau:g}), J={args.J:g}"
        with open(base + ".svg", "w", encoding="utf-8", newline="\n") as fh:
            tx, ty = envelope(scan.t, scan.column("abs2"), args.svg_bins)
            fh.write(line_plot_svg(tx, ty, "t", "|A(t)|^2 (bin maxima)" if tx.size < scan.t.size else "|A(t)|^2", title))
        top = sorted(find_peaks(scan, "abs2", 0.5), key=lambda p: -p[1])[:3]
        print(f"{name}: {steps} points, strongest interior peaks {[(round(t, 2), round(v, 3)) for t, v in top]}")


if __name__ == "__main__":
    main()
