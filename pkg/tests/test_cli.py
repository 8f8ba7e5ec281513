import json
import shutil
import subprocess

import numpy as np
import pytest

from specgraph import experiments
from specgraph.cli import main
from specgraph.models import Graph, read_labels
from specgraph.spectral import NonConvergenceError


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def star_tsv(leaves=9):
    ii = np.zeros(leaves, dtype=np.int64)
    jj = np.arange(1, leaves + 1, dtype=np.int64)
    return Graph(leaves + 1, ii, jj, np.ones(leaves)).format_tsv()


def two_cliques_tsv(half=4, bridge=False):
    n = 2 * half
    ii, jj = [], []
    for base in (0, half):
        for u in range(half):
            for v in range(u + 1, half):
                ii.append(base + u)
                jj.append(base + v)
    if bridge:
        ii.append(half - 1)
        jj.append(half)
    return Graph(n, ii, jj, np.ones(len(ii))).format_tsv()


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def test_gen_complete_graph(capsys):
    code, out, _ = run(capsys, "gen", "--model", "er", "--p", "1", "--n", "4")
    assert code == 0
    g = Graph.parse_tsv(out)
    assert g.n == 4 and g.m == 6
    assert np.all(g.w == 1.0)


def test_gen_invalid_probability(capsys):
    code, _, err = run(capsys, "gen", "--model", "er", "--p", "1.5", "--n", "4")
    assert code == 2
    assert "error:" in err


def test_gen_missing_n(capsys):
    code, _, err = run(capsys, "gen", "--model", "er", "--p", "0.5")
    assert code == 2


def test_gen_pp_deterministic(capsys):
    args = ("gen", "--model", "pp", "--a", "6", "--b", "1", "--n", "80",
            "--seed", "7")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    _, out3, _ = run(capsys, "gen", "--model", "pp", "--a", "6", "--b", "1",
                     "--n", "80", "--seed", "8")
    assert out3 != out1


def test_gen_writes_labels_file(tmp_path, capsys):
    out = tmp_path / "g.tsv"
    code, _, _ = run(capsys, "gen", "--model", "pp", "--a", "4", "--b", "1",
                     "--n", "10", "--seed", "1", "--out", str(out))
    assert code == 0
    labels = read_labels(str(out) + ".labels")
    assert list(labels) == [1] * 5 + [2] * 5
    assert Graph.parse_tsv(out.read_text()).n == 10


def test_gen_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("SPECGRAPH_SEED", "7")
    _, out_env, _ = run(capsys, "gen", "--model", "pp", "--a", "6", "--b", "1",
                        "--n", "80")
    monkeypatch.delenv("SPECGRAPH_SEED")
    _, out_flag, _ = run(capsys, "gen", "--model", "pp", "--a", "6", "--b", "1",
                         "--n", "80", "--seed", "7")
    assert out_env == out_flag
    monkeypatch.setenv("SPECGRAPH_SEED", "not-a-number")
    code, _, err = run(capsys, "gen", "--model", "er", "--p", "0.5", "--n", "9")
    assert code == 2 and "SPECGRAPH_SEED" in err


# ---------------------------------------------------------------------------
# reg
# ---------------------------------------------------------------------------

def test_reg_cap_noop_identity(tmp_path, capsys):
    src = tmp_path / "g.tsv"
    src.write_text(star_tsv())
    code, out, err = run(capsys, "reg", "--in", str(src), "--mode", "cap",
                         "--d-hat", "100")
    assert code == 0
    assert out == star_tsv()  # untouched graph round-trips byte-identically
    report = json.loads(err)
    assert report["touched"] == [] and report["passes"] == 0


def test_reg_remove_star(tmp_path, capsys):
    src = tmp_path / "g.tsv"
    src.write_text(star_tsv())
    dst = tmp_path / "out.tsv"
    code, out, _ = run(capsys, "reg", "--in", str(src), "--mode", "remove",
                       "--threshold", "5", "--out", str(dst))
    assert code == 0
    report = json.loads(out)  # with --out, the report takes stdout
    assert report["removed"] == 1 and report["edges_out"] == 0
    g = Graph.parse_tsv(dst.read_text())
    assert g.n == 10 and g.m == 0


def test_reg_tau_reports_and_passes_graph_through(tmp_path, capsys):
    src = tmp_path / "g.tsv"
    src.write_text(star_tsv())
    code, out, err = run(capsys, "reg", "--in", str(src), "--mode", "tau",
                         "--rho", "0.5")
    assert code == 0
    assert out == star_tsv()
    report = json.loads(err)
    assert report["tau"] == pytest.approx(0.5 * 18 / 10)  # rho x mean degree
    assert report["rho"] == 0.5


def test_reg_missing_file(capsys):
    code, _, err = run(capsys, "reg", "--in", "/nonexistent/g.tsv",
                       "--mode", "cap", "--d-hat", "3")
    assert code == 2


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------

def test_detect_two_cliques(tmp_path, capsys):
    src = tmp_path / "g.tsv"
    src.write_text(two_cliques_tsv())
    code, out, _ = run(capsys, "detect", "--in", str(src), "--seed", "0")
    assert code == 0
    report = json.loads(out)
    labels = report["labels"]
    assert sorted(set(labels)) == [1, 2]
    assert len(set(labels[:4])) == 1 and len(set(labels[4:])) == 1
    assert labels[0] != labels[4]
    assert report["tau"] > 0


def test_detect_truth_scoring_and_labels_out(tmp_path, capsys):
    src = tmp_path / "g.tsv"
    src.write_text(two_cliques_tsv())
    truth = tmp_path / "t.labels"
    truth.write_text("\n".join(["2"] * 4 + ["1"] * 4) + "\n")
    labels_out = tmp_path / "pred.labels"
    code, out, _ = run(capsys, "detect", "--in", str(src), "--seed", "0",
                       "--truth", str(truth), "--labels-out", str(labels_out))
    assert code == 0
    report = json.loads(out)
    assert report["misclassification"] == 0.0  # permutation-invariant score
    assert "labels" not in report
    assert len(read_labels(labels_out)) == 8


def test_detect_unknown_method(tmp_path, capsys):
    src = tmp_path / "g.tsv"
    src.write_text(two_cliques_tsv())
    code, _, err = run(capsys, "detect", "--in", str(src), "--method", "oracle")
    assert code == 2 and "unknown method" in err


def test_detect_adjacency_method(tmp_path, capsys):
    # a bridge keeps the top adjacency eigenvalue simple, so v2 is well defined
    src = tmp_path / "g.tsv"
    src.write_text(two_cliques_tsv(bridge=True))
    code, out, _ = run(capsys, "detect", "--in", str(src), "--seed", "3",
                       "--method", "adjacency-second-largest")
    assert code == 0
    labels = json.loads(out)["labels"]
    assert labels[:4] != labels[4:] and len(set(labels[:4])) == 1


# ---------------------------------------------------------------------------
# sweep / phase / fig-eigvec
# ---------------------------------------------------------------------------

def test_sweep_flags_and_thread_invariance(capsys):
    base = ("sweep", "--n-grid", "100", "--d-grid", "3", "--R", "3",
            "--seed", "11")
    _, serial, _ = run(capsys, *base, "--threads", "1")
    _, pooled, _ = run(capsys, *base, "--threads", "4")
    assert serial == pooled
    lines = serial.splitlines()
    assert lines[0] == ",".join(experiments.CSV_COLUMNS)
    assert any("deviation_norm" in line for line in lines[1:])


def test_sweep_config_file(tmp_path, capsys):
    cfg = {"model": "er", "n_grid": [100], "d_grid": [3.0], "R": 3, "seed": 11}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    _, from_file, _ = run(capsys, "sweep", "--config", str(path))
    _, from_flags, _ = run(capsys, "sweep", "--n-grid", "100", "--d-grid", "3",
                           "--R", "3", "--seed", "11")
    assert from_file == from_flags


def test_sweep_bad_grid(capsys):
    code, _, err = run(capsys, "sweep", "--n-grid", "100", "--d-grid", "")
    assert code == 2


def test_phase_csv(capsys):
    code, out, _ = run(capsys, "phase", "--d", "4", "--snr", "0,50", "--n",
                       "120", "--R", "2", "--seed", "1", "--method",
                       "reg-laplacian", "--threads", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(experiments.CSV_COLUMNS)
    body = [line.split(",") for line in lines[1:]]
    stats = {row[8] for row in body}
    assert stats == {"accuracy", "infeasible"}  # snr=50 needs b < 0


def test_fig_eigvec_shape(capsys):
    code, out, err = run(capsys, "fig-eigvec", "--seed", "7")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 51
    assert lines[0] == "lap_v1,lap_v2,lap_v3,reglap_v1,reglap_v2,reglap_v3"
    assert all(len(line.split(",")) == 6 for line in lines[1:])
    report = json.loads(err)
    assert {"tau", "misclassification_unregularized",
            "misclassification_regularized"} <= set(report)


def test_nonconvergence_exit_code(capsys, monkeypatch):
    def explode(**kwargs):
        raise NonConvergenceError("stalled", best_estimate=1.0)

    monkeypatch.setattr(experiments, "eigenvector_study", explode)
    code, _, err = run(capsys, "fig-eigvec", "--seed", "0")
    assert code == 3 and "did not converge" in err


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def test_bounds_bai_yin(capsys):
    code, out, _ = run(capsys, "bounds", "--bound", "bai-yin", "--d", "25")
    assert code == 0
    assert out.strip() == "10"


def test_bounds_thm54_defaults_r(capsys):
    code, out, _ = run(capsys, "bounds", "--bound", "thm54", "--tau", "4",
                       "--d", "4")
    assert code == 0
    assert float(out) == pytest.approx(2.0 ** 2.5 / 2.0, abs=1e-12)


def test_bounds_missing_parameter(capsys):
    code, _, err = run(capsys, "bounds", "--bound", "bai-yin")
    assert code == 2 and "--d" in err


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_console_script_installed():
    exe = shutil.which("specgraph")
    assert exe is not None
    proc = subprocess.run([exe, "bounds", "--bound", "bai-yin", "--d", "25"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "10"
