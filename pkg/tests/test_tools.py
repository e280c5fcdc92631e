import importlib.util
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load(rel):
    spec = importlib.util.spec_from_file_location(pathlib.Path(rel).stem, ROOT / rel)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_benchmark_runs(capsys):
    load("benchmarks/bench_kernels.py").main(["--points", "100", "300", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "terms per point: 39" in out
    assert len([l for l in out.splitlines() if l.strip().startswith(("100", "300"))]) == 2


def test_panel_script_small_run(tmp_path, capsys):
    load("scripts/superrevival_panels.py").main(
        ["--outdir", str(tmp_path), "--points-per-period", "0.05", "--svg-bins", "100"]
    )
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [f"{n}.{e}" for n in ("classical", "revival", "superrevival") for e in ("csv", "svg")]
    assert (tmp_path / "classical.csv").read_text().startswith("t,re,im,abs2\n")


def test_envelope_keeps_bin_maxima():
    env = load("scripts/superrevival_panels.py").envelope
    t = np.arange(1000.0)
    y = np.sin(t) ** 2
    y[517] = 5.0
    tx, ty = env(t, y, 50)
    assert tx.size == 50
    assert 517.0 in tx and ty.max() == 5.0
    same_t, _ = env(t[:80], y[:80], 50)
    assert same_t.size == 80
