"""Command-line front end.

    qklauder verify
    qklauder uncertainty --tau 0.005 --J 6 --t-max 20 --steps 401 --out unc.csv
    qklauder autocorr --t-max 20 --steps 2001 --out ac.csv --svg ac.svg
    qklauder revival-times
    qklauder expect --gamma 1.0
    qklauder plot ac.csv --columns t,abs2 --svg ac.svg

Exit codes: 0 success, 1 invariant failure, 2 invalid configuration,
3 numerical (divergence / non-convergence) error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass

from . import coherent, observables, revival, verify
from .coherent import CoherentState
from .errors import ConsistencyError, DegenerateDeformationError, SeriesError
from .qkernel import Deformation, Truncation
from .revival import format_number
from .scales import PhysicalScales
from .svgplot import line_plot_svg

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

DEFAULT_TAU = 0.005


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    d: Deformation
    J: float
    scales: PhysicalScales
    trunc: Truncation
    t_min: float
    t_max: float
    steps: int
    gamma: float
    out: str | None
    svg: str | None
    workers: int


def _positive(name, value):
    if not (value > 0.0 and math.isfinite(value)):
        raise ConfigError(f"--{name} must be positive and finite, got {value}")


def build_config(args: argparse.Namespace) -> RunConfig:
    """Validate everything before any computation."""
    if args.q is not None and args.tau is not None:
        raise ConfigError("give either --q or --tau, not both")
    if args.q is not None:
        if not (0.0 < args.q <= 1.0):
            raise ConfigError(f"--q must satisfy 0 < q <= 1, got {args.q}")
        d = Deformation(args.q)
    else:
        tau = DEFAULT_TAU if args.tau is None else args.tau
        if not (tau >= 0.0 and math.isfinite(tau)):
            raise ConfigError(f"--tau must be >= 0, got {tau}")
        d = Deformation.from_tau(tau)
    if not (args.J >= 0.0 and math.isfinite(args.J)):
        raise ConfigError(f"--J must be >= 0, got {args.J}")
    for name in ("hbar", "mass", "omega", "tol"):
        _positive(name, getattr(args, name))
    if args.n_max < 1:
        raise ConfigError(f"--n-max must be >= 1, got {args.n_max}")
    if args.steps < 2:
        raise ConfigError(f"--steps must be >= 2, got {args.steps}")
    if not (math.isfinite(args.t_min) and math.isfinite(args.t_max) and args.t_min < args.t_max):
        raise ConfigError(f"need finite --t-min < --t-max, got [{args.t_min}, {args.t_max}]")
    if not math.isfinite(args.gamma):
        raise ConfigError("--gamma must be finite")
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    for path in (args.out, args.svg):
        if path:
            parent = os.path.dirname(os.path.abspath(path))
            if not os.path.isdir(parent):
                raise ConfigError(f"output directory does not exist: {parent}")
    return RunConfig(
        d=d,
        J=float(args.J),
        scales=PhysicalScales(args.hbar, args.mass, args.omega),
        trunc=Truncation(args.tol, args.n_max),
        t_min=args.t_min,
        t_max=args.t_max,
        steps=args.steps,
        gamma=args.gamma,
        out=args.out,
        svg=args.svg,
        workers=args.workers,
    )


def _emit(text: str, path: str | None, stdout) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def cmd_verify(cfg: RunConfig, stdout) -> int:
    results = verify.run_checks(cfg.trunc, cfg.scales, extra=[(cfg.d, cfg.J)])
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        line = f"{r.name:<{width}}  {status}"
        if r.detail:
            line += f"  {r.detail}"
        lines.append(line)
    failed = [r.name for r in results if not r.ok]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        lines.append("violated: " + "; ".join(failed))
    _emit("\n".join(lines) + "\n", cfg.out, stdout)
    return EXIT_INVARIANT if failed else EXIT_OK


def _times(cfg: RunConfig):
    import numpy as np

    return np.linspace(cfg.t_min, cfg.t_max, cfg.steps)


def cmd_uncertainty(cfg: RunConfig, stdout) -> int:
    s = CoherentState(cfg.J, cfg.gamma, cfg.d, cfg.trunc)
    cols = observables.uncertainty_scan(s, cfg.scales, _times(cfg))
    names = ["t", "gamma", "dX", "dP", "product", "bound", "ratio"]
    lines = [",".join(names)]
    for i in range(cols["t"].size):
        lines.append(",".join(format_number(float(cols[k][i])) for k in names))
    text = "\n".join(lines) + "\n"
    svg = None
    if cfg.svg:
        svg = line_plot_svg(cols["t"], cols["ratio"], "t", "dX dP / bound", f"q={cfg.d.q:.6g}, J={cfg.J:g}")
    _emit(text, cfg.out, stdout)
    if svg is not None:
        _emit(svg, cfg.svg, stdout)
    return EXIT_OK


def cmd_autocorr(cfg: RunConfig, stdout) -> int:
    scan = revival.autocorrelation_scan(
        cfg.J, cfg.d, cfg.scales, cfg.trunc, cfg.t_min, cfg.t_max, cfg.steps, workers=cfg.workers
    )
    text = scan.to_csv()
    svg = None
    if cfg.svg:
        svg = line_plot_svg(scan.t, scan.column("abs2"), "t", "|A(t)|^2", f"q={cfg.d.q:.6g}, J={cfg.J:g}")
    _emit(text, cfg.out, stdout)
    if svg is not None:
        _emit(svg, cfg.svg, stdout)
    return EXIT_OK


def cmd_revival_times(cfg: RunConfig, stdout) -> int:
    rt = revival.revival_times(cfg.J, cfg.d, cfg.scales, cfg.trunc)
    pairs = [("n_bar", rt.n_bar), ("T_cl", rt.t_cl), ("T_rev", rt.t_rev), ("T_suprev", rt.t_suprev)]
    _emit("".join(f"{k} = {format_number(v, 10)}\n" for k, v in pairs), cfg.out, stdout)
    return EXIT_OK


def _fmt_complex(z: complex) -> str:
    return f"{format_number(z.real)} {'-' if z.imag < 0 else '+'} {format_number(abs(z.imag))}i"


def cmd_expect(cfg: RunConfig, stdout) -> int:
    s = CoherentState(cfg.J, cfg.gamma, cfg.d, cfg.trunc)
    sc = cfg.scales
    items: list[tuple[str, str]] = []
    for label, z in verify.closed_form_expectations(s).items():
        items.append((label, _fmt_complex(complex(z))))
    rep = observables.uncertainty(s, sc)
    real_items = [
        ("<X>", observables.expect_x(s, sc)),
        ("<P>", observables.expect_p(s, sc)),
        ("<X^2>", observables.expect_x2(s, sc)),
        ("<P^2>", observables.expect_p2(s, sc)),
        ("<H>", coherent.energy_expectation(s, sc)),
        ("n_bar", coherent.mean_occupation(s.J, s.d, s.t)),
        ("dX", rep.dx),
        ("dP", rep.dp),
        ("dX*dP", rep.product),
        ("bound", rep.bound),
        ("ratio", rep.ratio),
        ("G_c", rep.gc),
        ("G_s", rep.gs),
        ("G_q", rep.gq),
    ]
    items += [(k, format_number(v)) for k, v in real_items]
    width = max(len(k) for k, _ in items)
    _emit("".join(f"{k:<{width}} = {v}\n" for k, v in items), cfg.out, stdout)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, stdout) -> int:
    out = args.svg or args.out
    if not out:
        raise ConfigError("plot needs an output path (--svg)")
    parent = os.path.dirname(os.path.abspath(out))
    if not os.path.isdir(parent):
        raise ConfigError(f"output directory does not exist: {parent}")
    try:
        with open(args.csv, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {args.csv}: {exc}") from None
    if not rows:
        raise ConfigError(f"{args.csv} is empty")
    header, body = rows[0], [r for r in rows[1:] if r]
    if not body:
        raise ConfigError(f"{args.csv} has no data rows")
    names = [c.strip() for c in args.columns.split(",")] if args.columns else [header[0], header[-1]]
    if len(names) != 2:
        raise ConfigError("--columns takes exactly two names: x,y")
    for n in names:
        if n not in header:
            raise ConfigError(f"column {n!r} not in CSV header {header}")
    ix, iy = header.index(names[0]), header.index(names[1])
    try:
        xs = [float(r[ix]) for r in body]
        ys = [float(r[iy]) for r in body]
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"malformed CSV row: {exc}") from None
    if len(xs) < 2:
        raise ConfigError("need at least two data rows to draw a line")
    svg = line_plot_svg(xs, ys, names[0], names[1], os.path.basename(args.csv))
    _emit(svg, out, stdout)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "uncertainty": cmd_uncertainty,
    "autocorr": cmd_autocorr,
    "revival-times": cmd_revival_times,
    "expect": cmd_expect,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    grp = common.add_mutually_exclusive_group()
    grp.add_argument("--q", type=float, help="deformation parameter, 0 < q <= 1")
    grp.add_argument("--tau", type=float, help=f"q = exp(-tau) (default tau={DEFAULT_TAU})")
    common.add_argument("--J", type=float, default=6.0, help="action variable (default 6)")
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--mass", type=float, default=1.0)
    common.add_argument("--omega", type=float, default=1.0)
    common.add_argument("--tol", type=float, default=1e-14, help="absolute series tail tolerance")
    common.add_argument("--n-max", type=int, default=512, help="hard cap on series terms")
    common.add_argument("--t-min", type=float, default=0.0)
    common.add_argument("--t-max", type=float, default=20.0)
    common.add_argument("--steps", type=int, default=2001)
    common.add_argument("--gamma", type=float, default=0.0, help="initial angle")
    common.add_argument("--workers", type=int, default=1, help="threads for scans")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--svg", help="also write an SVG line plot")

    parser = _Parser(prog="qklauder", description="q-deformed Klauder coherent states")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "verify": "run the invariant suite",
        "uncertainty": "CSV scan of dX, dP and the generalized bound",
        "autocorr": "CSV scan of the autocorrelation A(t)",
        "revival-times": "n_bar and the classical / revival / superrevival times",
        "expect": "print all closed-form expectation values",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    p = sub.add_parser("plot", help="SVG line plot from a CSV file")
    p.add_argument("csv")
    p.add_argument("--columns", help="x,y column names (default: first,last)")
    p.add_argument("--svg", help="output SVG path")
    p.add_argument("--out", help="alias for --svg")
    return parser


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            return cmd_plot(args, stdout)
        cfg = build_config(args)
        if args.command != "verify":
            # surfaces divergence before any output is produced
            CoherentState(cfg.J, cfg.gamma, cfg.d, cfg.trunc)
        return COMMANDS[args.command](cfg, stdout)
    except ConfigError as exc:
        print(f"qklauder: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SeriesError, OverflowError) as exc:
        print(f"qklauder: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DegenerateDeformationError as exc:
        print(f"qklauder: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"qklauder: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
