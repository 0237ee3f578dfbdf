"""End-to-end CLI behavior: output formats, exit codes, determinism."""

import subprocess
import sys
from fractions import Fraction

import pytest

from hyperlim import (
    UniformHypergraph,
    complete_hypergraph,
    serialize_hypergraph,
    serialize_hypergraphon,
)
from hyperlim.cli import ExperimentConfig, main

from conftest import build_fixture_w, build_half_w

EDGE_HG = "HG 2 2 1\n0 1\n"
TRIANGLE_HG = "HG 2 3 3\n0 1\n0 2\n1 2\n"


@pytest.fixture
def files(tmp_path):
    """Small file zoo shared by most commands."""
    paths = {}

    def add(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        paths[name] = str(p)

    add("edge.hg", EDGE_HG)
    add("triangle.hg", TRIANGLE_HG)
    add("w3.hgon", serialize_hypergraphon(build_fixture_w()))
    add("half.hgon", serialize_hypergraphon(build_half_w()))
    add("zero.hgon", "HGON 3 2 ind 0\n")
    paths["tmp"] = tmp_path
    return paths


def run_main(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- single commands -----------------------------------------------------------


def test_hom_frozen_output(files, capsys):
    code, out, _ = run_main(["hom", files["edge.hg"], files["triangle.hg"]], capsys)
    assert code == 0
    assert out == "hom=6 t=2/3\n"


def test_density_exact_output(files, capsys):
    # each pair coordinate is an independent fair coin, so the triangle
    # density is exactly 2**-3
    code, out, _ = run_main(["density", files["triangle.hg"], files["half.hgon"]], capsys)
    assert code == 0
    assert out == "0.125\n"


def test_density_mc_reports_error_bars(files, capsys):
    code, out, err = run_main(
        ["density", files["triangle.hg"], files["half.hgon"],
         "--mode", "mc", "--samples", "2000", "--seed", "3"],
        capsys,
    )
    assert code == 0
    estimate = float(out)
    assert err.startswith("se=") and "samples=2000" in err
    se = float(err.split()[0].removeprefix("se="))
    assert se > 0
    assert abs(estimate - 0.125) <= 4 * se


def test_density_budget_exit_code(files, capsys):
    code, _, err = run_main(
        ["density", files["triangle.hg"], files["half.hgon"], "--budget", "2"], capsys
    )
    assert code == 3
    assert err.startswith("error:")


@pytest.mark.parametrize(
    "bad",
    [
        "HG 2\n0 1\n",          # malformed header
        "HG 2 3 1\n0 0\n",      # repeated vertex
        "HG 9 3 0\n",           # unsupported arity
    ],
)
def test_parse_errors_exit_2(files, capsys, bad, tmp_path):
    p = tmp_path / "bad.hg"
    p.write_text(bad, encoding="utf-8")
    code, _, err = run_main(["hom", str(p), files["triangle.hg"]], capsys)
    assert code == 2
    assert err.startswith("error:")


def test_missing_file_exits_2(files, capsys):
    code, _, err = run_main(["hom", files["edge.hg"], str(files["tmp"] / "nope.hg")], capsys)
    assert code == 2
    assert err.startswith("error:")


def test_arity_mismatch_exits_2(files, capsys):
    code, _, err = run_main(["density", files["edge.hg"], files["w3.hgon"]], capsys)
    assert code == 2
    assert "arity" in err


def test_sample_round_trips_through_files(files, capsys, tmp_path):
    from hyperlim import parse_hypergraph, parse_latents

    out_hg = tmp_path / "s.hg"
    out_lat = tmp_path / "s.lat"
    argv = ["sample", files["w3.hgon"], "--n", "7", "--seed", "1",
            "--out", str(out_hg), "--latents", str(out_lat)]
    assert main(argv) == 0
    capsys.readouterr()
    hg = parse_hypergraph(out_hg.read_text())
    assert hg.k == 3 and hg.n_vertices == 7
    sample = parse_latents(out_lat.read_text())
    assert sample.hypergraph == hg
    assert sample.seed == 1

    first = out_hg.read_bytes()
    assert main(argv) == 0
    capsys.readouterr()
    assert out_hg.read_bytes() == first


def test_sample_of_the_zero_indicator_is_empty(files, capsys):
    code, out, _ = run_main(["sample", files["zero.hgon"], "--n", "8"], capsys)
    assert code == 0
    assert out == "HG 3 8 0\n"


def test_cells_csv_golden(files, capsys, tmp_path):
    hp = tmp_path / "p.hp"
    hp.write_text(
        "HP 2 3 1\nLEVEL 1\n0 0\n1 0\n2 0\nLEVEL 2\n0 1 0\n0 2 0\n1 2 0\n",
        encoding="utf-8",
    )
    code, out, _ = run_main(["cells", files["triangle.hg"], str(hp)], capsys)
    assert code == 0
    assert out == "profile,size,edges,density\n0:0:0,3,3,1\n"


def test_regularity_csv_complete_host(files, capsys, tmp_path):
    host = tmp_path / "k8.hg"
    host.write_text(serialize_hypergraph(complete_hypergraph(2, 8)), encoding="utf-8")
    code, out, _ = run_main(
        ["regularity", str(host), "--M", "10", "--eps", "0.2", "--seed", "5"], capsys
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,r,eps,cylinders,seed,tested,admitted,max_deviation,witness"
    fields = lines[1].split(",")
    assert fields[:5] == ["8", "2", "0.20000000000000001", "10", "5"]
    assert fields[5] == "10"
    assert fields[7] == "0" and fields[8] == "0"


def test_regularity_rejects_bad_grid(files, capsys, tmp_path):
    host = tmp_path / "k5.hg"
    host.write_text(serialize_hypergraph(complete_hypergraph(2, 5)), encoding="utf-8")
    code, _, err = run_main(["regularity", str(host), "--grid", "0.5,nope"], capsys)
    assert code == 2
    assert "grid" in err


def test_removal_csv_and_success_exit(files, capsys, tmp_path):
    bipartite = [(a, b) for a in (0, 1, 2) for b in (3, 4, 5)]
    host_text = serialize_hypergraph(UniformHypergraph(2, 6, sorted(bipartite + [(0, 1)])))
    host = tmp_path / "planted.hg"
    host.write_text(host_text, encoding="utf-8")
    code, out, _ = run_main(["removal", files["triangle.hg"], str(host)], capsys)
    assert code == 0
    assert out == (
        "instance,edges,images,method,removed,fraction,residual,verified\n"
        "planted,10,3,exact,1,1/15,0,1\n"
    )


def test_removal_truncation_exits_4(files, capsys, tmp_path):
    host = tmp_path / "k6.hg"
    host.write_text(serialize_hypergraph(complete_hypergraph(2, 6)), encoding="utf-8")
    code, out, _ = run_main(
        ["removal", files["triangle.hg"], str(host), "--cap", "1", "--id", "x"], capsys
    )
    assert code == 4
    row = out.splitlines()[1].split(",")
    assert row[0] == "x"
    assert row[-1] == "0"


# -- experiments ----------------------------------------------------------------


def test_convergence_csv_structure(files, capsys):
    code, out, _ = run_main(
        ["experiment", "convergence", files["half.hgon"], files["edge.hg"],
         "--ns", "4,6", "--reps", "2", "--seed", "0"],
        capsys,
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "K,n,rep,t_H,t_W,abs_diff"
    assert len(lines) == 1 + 2 * 3  # per n: two data rows and a mean row
    for n, start in ((4, 1), (6, 4)):
        diffs = []
        for line in lines[start : start + 2]:
            kid, n_str, rep, t_h, t_w, diff = line.split(",")
            assert kid == "edge" and n_str == str(n)
            assert abs(abs(float(Fraction(t_h)) - float(t_w)) - float(diff)) < 1e-16
            diffs.append(float(diff))
        mean_row = lines[start + 2].split(",")
        assert mean_row[2] == "mean" and mean_row[3] == "" and mean_row[4] == ""
        assert float(mean_row[5]) == pytest.approx(sum(diffs) / 2, abs=1e-16)


def test_convergence_deduplicates_pattern_stems(files, capsys, tmp_path):
    sub = tmp_path / "other"
    sub.mkdir()
    dup = sub / "edge.hg"
    dup.write_text(EDGE_HG, encoding="utf-8")
    code, out, _ = run_main(
        ["experiment", "convergence", files["half.hgon"], files["edge.hg"], str(dup),
         "--ns", "4", "--reps", "1"],
        capsys,
    )
    assert code == 0
    kids = [line.split(",")[0] for line in out.splitlines()[1:]]
    assert kids == ["edge", "edge", "edge.1", "edge.1"]


def test_experiment_regularity_csv_structure(files, capsys):
    code, out, _ = run_main(
        ["experiment", "regularity", files["w3.hgon"], "--n", "10", "--M", "4"],
        capsys,
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "kind,level,class,value,detail"
    kinds = [line.split(",")[0] for line in lines[1:]]
    assert kinds == ["equitability"] * 3 + ["regularity"] * 4 + ["cell_error"]
    for line in lines[4:8]:
        detail = line.split(",")[4]
        assert detail.startswith("tested=4;admitted=")


def test_rerun_is_byte_identical(files, tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    for out in (out1, out2):
        assert main(
            ["experiment", "regularity", files["w3.hgon"], "--n", "10",
             "--M", "4", "--seed", "9", "--out", str(out)]
        ) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()


def test_experiment_config_validation():
    ok = ExperimentConfig(kind="convergence", w_path="w", ns=(4,))
    assert ok.reps == 1
    with pytest.raises(ValueError, match="kind"):
        ExperimentConfig(kind="bogus", w_path="w")
    with pytest.raises(ValueError, match="positive"):
        ExperimentConfig(kind="convergence", w_path="w", ns=(0,))
    with pytest.raises(ValueError, match="positive"):
        ExperimentConfig(kind="convergence", w_path="w", reps=0)
    with pytest.raises(ValueError, match="epsilon"):
        ExperimentConfig(kind="regularity", w_path="w", epsilon=0.0)
    with pytest.raises(ValueError, match="resolution"):
        ExperimentConfig(kind="regularity", w_path="w", resolution=0)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="convergence", w_path="w", seed=-1)


# -- thread plumbing --------------------------------------------------------------


def test_invalid_thread_env_exits_2(files, capsys, monkeypatch):
    monkeypatch.setenv("HYPERLIM_THREADS", "many")
    code, _, err = run_main(["hom", files["edge.hg"], files["triangle.hg"]], capsys)
    assert code == 2
    assert "HYPERLIM_THREADS" in err


def test_thread_count_does_not_change_bytes(files):
    argv = [sys.executable, "-m", "hyperlim", "density",
            files["triangle.hg"], files["half.hgon"],
            "--mode", "mc", "--samples", "3000", "--seed", "7"]
    outs = []
    for threads in ("1", "2"):
        proc = subprocess.run(
            argv, capture_output=True, env={"HYPERLIM_THREADS": threads, "PATH": "/usr/bin:/bin"}
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
