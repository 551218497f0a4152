import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from isingplots import FigureSpec, PlotError, fit_log_log, render
from isingplots.cli import main

TIMINGS_HEADER = ("sweep_point,rep,workers,replicas,L,iters,swap_interval,"
                  "seed,init_s,exec_s,total_s,swaps_attempted,"
                  "swaps_accepted,status")


def write_timings(path, rows):
    lines = [TIMINGS_HEADER]
    for r in rows:
        lines.append(
            f"{r['point']},{r.get('rep', 0)},{r['workers']},{r['replicas']},"
            f"32,50000,{r.get('interval', 0)},1,0.01,{r['total'] - 0.01},"
            f"{r['total']},0,0,{r.get('status', 'ok')}")
    (path / "timings.csv").write_text("\n".join(lines) + "\n")


def write_observables(path, temps, n_iter=40):
    rng = np.random.default_rng(0)
    lines = ["replica,temperature,iteration,energy,magnetization"]
    for r, t in enumerate(temps):
        target = 1.0 if t < 2.27 else 0.05
        for i in range(n_iter):
            m = target + float(rng.normal(0, 0.01))
            lines.append(f"{r},{t},{i},-100.0,{m}")
    (path / "observables.csv").write_text("\n".join(lines) + "\n")


def write_convergence(path, points):
    lines = ["L,iterations"] + [f"{l},{i}" for l, i in points]
    (path / "convergence.csv").write_text("\n".join(lines) + "\n")


@pytest.fixture
def results(tmp_path):
    write_observables(tmp_path, [1.0, 1.5, 2.0, 2.5, 3.0, 3.5])
    write_convergence(tmp_path, [(L, L * L) for L in (8, 12, 16, 24, 32)])
    rows = []
    for workers, scale in [(1, 1.0), (2, 0.55), (4, 0.3)]:
        for replicas in (32, 64, 128):
            for interval in (0, 100, 1000):
                for rep in (0, 1):
                    rows.append(dict(point=f"W={workers}", rep=rep,
                                     workers=workers, replicas=replicas,
                                     interval=interval,
                                     total=scale * replicas / 32 + 0.01 * rep))
    write_timings(tmp_path, rows)
    return tmp_path


@pytest.mark.parametrize("kind", ["magnetization_curve",
                                  "convergence_scaling", "speedup",
                                  "total_time", "swap_overhead"])
def test_every_kind_renders_from_fixtures(results, kind):
    out = results / f"{kind}.png"
    result = render(FigureSpec(kind=kind, input_dir=results, output=out))
    assert result.path == out
    assert out.stat().st_size > 1000


def test_scaling_figure_annotates_quadratic_exponent(results):
    result = render(FigureSpec(kind="convergence_scaling", input_dir=results,
                               output=results / "scaling.png"))
    assert abs(result.extras["exponent"] - 2.0) <= 0.01
    assert result.extras["annotation"] == "exponent ≈ 2.00"


def test_title_and_label_overrides(results):
    out = results / "labelled.png"
    result = render(FigureSpec(kind="total_time", input_dir=results,
                               output=out, title="custom title",
                               xlabel="R", ylabel="seconds"))
    assert result.path.exists()


def test_fit_log_log_exact():
    slope, intercept = fit_log_log([8, 16, 32], [64, 256, 1024])
    assert slope == pytest.approx(2.0, abs=1e-9)
    assert np.exp(intercept) == pytest.approx(1.0, rel=1e-9)


def test_rendering_is_deterministic(results):
    a = results / "a.png"
    b = results / "b.png"
    render(FigureSpec(kind="magnetization_curve", input_dir=results, output=a))
    render(FigureSpec(kind="magnetization_curve", input_dir=results, output=b))
    assert a.read_bytes() == b.read_bytes()


def test_missing_column_named(tmp_path):
    (tmp_path / "convergence.csv").write_text("L,steps\n8,64\n")
    with pytest.raises(PlotError, match="iterations"):
        render(FigureSpec(kind="convergence_scaling", input_dir=tmp_path,
                          output=tmp_path / "x.png"))


def test_empty_but_valid_timings_rejected(tmp_path):
    (tmp_path / "timings.csv").write_text(TIMINGS_HEADER + "\n")
    with pytest.raises(PlotError, match="no data rows"):
        render(FigureSpec(kind="total_time", input_dir=tmp_path,
                          output=tmp_path / "x.png"))


def test_failed_rows_do_not_count_as_data(tmp_path):
    write_timings(tmp_path, [dict(point="W=1", workers=1, replicas=32,
                                  total=1.0, status="error: boom")])
    with pytest.raises(PlotError, match="no data rows"):
        render(FigureSpec(kind="speedup", input_dir=tmp_path,
                          output=tmp_path / "x.png"))


def test_missing_input_file(tmp_path):
    with pytest.raises(PlotError, match="not found"):
        render(FigureSpec(kind="speedup", input_dir=tmp_path,
                          output=tmp_path / "x.png"))


def test_speedup_requires_baseline(tmp_path):
    write_timings(tmp_path, [dict(point="W=2", workers=2, replicas=32,
                                  total=1.0)])
    with pytest.raises(PlotError, match="baseline"):
        render(FigureSpec(kind="speedup", input_dir=tmp_path,
                          output=tmp_path / "x.png"))


class TestCli:
    def test_happy_path(self, results, capsys):
        out = results / "fig.png"
        assert main(["speedup", "--in", str(results),
                     "--out", str(out)]) == 0
        assert out.exists()
        assert str(out) in capsys.readouterr().out

    def test_default_output_location(self, results):
        assert main(["total_time", "--in", str(results)]) == 0
        assert (results / "total_time.png").exists()

    def test_error_exit_nonzero(self, tmp_path, capsys):
        assert main(["speedup", "--in", str(tmp_path)]) == 1
        assert "not found" in capsys.readouterr().err

    def test_console_entry_point(self, results):
        proc = subprocess.run(
            [sys.executable, "-m", "isingplots.cli", "magnetization_curve",
             "--in", str(results)],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stderr
        assert Path(proc.stdout.strip()).exists()
