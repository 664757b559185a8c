import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import figlib

RENDER = Path(__file__).resolve().parents[1] / "render"

HEADER = ("t,delta,std_max,xbar_norm,f_gap,dist_opt,sum_alpha_delta")


def write_csv(path, n_agents=0, rows=40):
    cols = HEADER.split(",")
    if n_agents:
        cols += [f"x_{i}_1" for i in range(1, n_agents + 1)]
    rng = np.random.default_rng(0)
    lines = [",".join(cols)]
    for k in range(rows):
        t = 1 + 100 * k
        vals = [str(t)] + [repr(float(v))
                           for v in rng.uniform(0.01, 1.0, len(cols) - 1)]
        lines.append(",".join(vals))
    path.write_text("\n".join(lines) + "\n")
    return path


# spec parsing -----------------------------------------------------------

def test_parse_minimal_spec(tmp_path):
    spec = figlib.parse_spec_text(
        "layout=1x2\nout=o.png\n"
        "panel1.csv=a.csv\npanel1.columns=std_max\n"
        "panel2.csv=b.csv\npanel2.columns=dist_opt\npanel2.logy=true\n")
    assert (spec.rows, spec.cols) == (1, 2)
    assert len(spec.panels) == 2
    assert spec.panels[1].logy


def test_parse_empty_spec_is_error():
    with pytest.raises(figlib.SpecError, match="no panels"):
        figlib.parse_spec_text("layout=2x2\nout=o.png\n")


def test_parse_layout_errors():
    with pytest.raises(figlib.SpecError, match="layout"):
        figlib.parse_spec_text("out=o.png\npanel1.csv=a.csv\n")
    with pytest.raises(figlib.SpecError, match="RxC"):
        figlib.parse_spec_text("layout=wide\nout=o.png\npanel1.csv=a.csv\n")
    with pytest.raises(figlib.SpecError, match="panel1.csv"):
        figlib.parse_spec_text("layout=1x1\nout=o.png\npanel1.title=x\n")
    with pytest.raises(figlib.SpecError, match="line 1"):
        figlib.parse_spec_text("not a pair\n")


# CSV reading ------------------------------------------------------------

def test_read_result_csv(tmp_path):
    p = write_csv(tmp_path / "r.csv", n_agents=3, rows=5)
    data = figlib.read_result_csv(p)
    assert data["t"].tolist() == [1, 101, 201, 301, 401]
    assert set(data) >= {"delta", "std_max", "x_1_1", "x_3_1"}


def test_read_csv_skips_abort_comment(tmp_path):
    p = write_csv(tmp_path / "r.csv", rows=3)
    with open(p, "a") as fh:
        fh.write("# aborted at t=300\n")
    data = figlib.read_result_csv(p)
    assert len(data["t"]) == 3


# rendering --------------------------------------------------------------

def test_render_diagnostics_panel(tmp_path):
    csv = write_csv(tmp_path / "r.csv")
    spec = figlib.parse_spec_text(
        f"layout=1x2\nout={tmp_path / 'fig'}\n"
        f"panel1.csv={csv}\npanel1.columns=std_max\npanel1.title=std\n"
        f"panel2.csv={csv}\npanel2.columns=dist_opt\npanel2.logy=true\n")
    written = figlib.render(spec)
    assert [p.suffix for p in written] == [".png", ".svg"]
    for p in written:
        assert p.stat().st_size > 0


def test_render_trajectories_panel(tmp_path):
    csv = write_csv(tmp_path / "r.csv", n_agents=6)
    spec = figlib.parse_spec_text(
        f"layout=1x1\nout={tmp_path / 'fig'}\n"
        f"panel1.csv={csv}\npanel1.columns=trajectories\n")
    for p in figlib.render(spec):
        assert p.stat().st_size > 0


def test_render_missing_column_names_file(tmp_path):
    csv = write_csv(tmp_path / "r.csv")  # no state columns
    spec = figlib.parse_spec_text(
        f"layout=1x1\nout={tmp_path / 'fig'}\n"
        f"panel1.csv={csv}\npanel1.columns=trajectories\n")
    with pytest.raises(figlib.SpecError, match=r"x_\*_\*.*r\.csv"):
        figlib.render(spec)
    spec = figlib.parse_spec_text(
        f"layout=1x1\nout={tmp_path / 'fig'}\n"
        f"panel1.csv={csv}\npanel1.columns=no_such\n")
    with pytest.raises(figlib.SpecError, match=r"'no_such'.*r\.csv"):
        figlib.render(spec)


def test_render_missing_file(tmp_path):
    spec = figlib.parse_spec_text(
        f"layout=1x1\nout={tmp_path / 'fig'}\n"
        f"panel1.csv={tmp_path / 'absent.csv'}\npanel1.columns=delta\n")
    with pytest.raises(OSError):
        figlib.render(spec)


def test_rerender_identical(tmp_path):
    csv = write_csv(tmp_path / "r.csv", n_agents=2)
    spec = figlib.parse_spec_text(
        f"layout=1x1\nout={tmp_path / 'fig'}\n"
        f"panel1.csv={csv}\npanel1.columns=trajectories\n")
    first = {p.suffix: p.read_bytes() for p in figlib.render(spec)}
    second = {p.suffix: p.read_bytes() for p in figlib.render(spec)}
    assert first == second


# command-line entry point -----------------------------------------------

def run_render(specfile):
    return subprocess.run([sys.executable, str(RENDER), "--spec",
                           str(specfile)], capture_output=True, text=True)


def test_cli_render_ok(tmp_path):
    csv = write_csv(tmp_path / "r.csv")
    specfile = tmp_path / "fig.spec"
    specfile.write_text(f"layout=1x1\nout={tmp_path / 'fig'}\n"
                        f"panel1.csv={csv}\npanel1.columns=delta,std_max\n")
    proc = run_render(specfile)
    assert proc.returncode == 0, proc.stderr
    assert "fig.png" in proc.stdout and "fig.svg" in proc.stdout


def test_cli_render_error(tmp_path):
    specfile = tmp_path / "fig.spec"
    specfile.write_text("layout=1x1\nout=o.png\n")
    proc = run_render(specfile)
    assert proc.returncode == 1
    assert "no panels" in proc.stderr


# end-to-end from the simulator's bundled configs ------------------------

def nco_cmd():
    exe = shutil.which("nco")
    return [exe] if exe else [sys.executable, "-m", "nco.cli"]


@pytest.fixture(scope="module")
def bundled_csvs(tmp_path_factory):
    """Result CSVs produced through the simulator CLI (external interface)."""
    out = tmp_path_factory.mktemp("csvs")
    for name in ("fig2_topleft", "fig2_topright", "fig2_bottomleft",
                 "fig2_bottomright", "fig4"):
        dest = out / f"{name}.csv"
        proc = subprocess.run(nco_cmd() + ["run", "--config", name, "--out",
                                           str(dest), "--quiet"],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    return out


def test_trajectory_grid_from_bundled_runs(bundled_csvs, tmp_path):
    titles = ["two time-scale (0.6, 0.77)", "two time-scale (0.2, 0.3)",
              "one time-scale nu=0.77", "one time-scale nu=0.3"]
    names = ["fig2_topleft", "fig2_topright", "fig2_bottomleft",
             "fig2_bottomright"]
    lines = [f"layout=2x2", f"out={tmp_path / 'trajectories'}"]
    for i, (name, title) in enumerate(zip(names, titles), start=1):
        lines += [f"panel{i}.csv={bundled_csvs / name}.csv",
                  f"panel{i}.title={title}",
                  f"panel{i}.columns=trajectories"]
    specfile = tmp_path / "grid.spec"
    specfile.write_text("\n".join(lines) + "\n")
    proc = run_render(specfile)
    assert proc.returncode == 0, proc.stderr
    sizes = {}
    for ext in (".png", ".svg"):
        p = (tmp_path / "trajectories").with_suffix(ext)
        assert p.stat().st_size > 0
        sizes[ext] = p.read_bytes()
    # re-render identically
    assert run_render(specfile).returncode == 0
    for ext in (".png", ".svg"):
        assert (tmp_path / "trajectories").with_suffix(ext).read_bytes() \
            == sizes[ext]


def test_std_and_distance_pair_from_bundled_run(bundled_csvs, tmp_path):
    csv = bundled_csvs / "fig4.csv"
    specfile = tmp_path / "pair.spec"
    specfile.write_text(
        f"layout=1x2\nout={tmp_path / 'pair'}\n"
        f"panel1.csv={csv}\npanel1.title=per-coordinate std\n"
        f"panel1.columns=std_max\npanel1.logy=true\n"
        f"panel2.csv={csv}\npanel2.title=distance to optimizer set\n"
        f"panel2.columns=dist_opt\n")
    assert run_render(specfile).returncode == 0
    first = {ext: (tmp_path / "pair").with_suffix(ext).read_bytes()
             for ext in (".png", ".svg")}
    assert all(len(b) > 0 for b in first.values())
    assert run_render(specfile).returncode == 0
    for ext, blob in first.items():
        assert (tmp_path / "pair").with_suffix(ext).read_bytes() == blob
