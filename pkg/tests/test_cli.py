import numpy as np

from ote.cli import main
from ote.dataset import load_csv


def test_simulate_writes_loadable_csv(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    code = main(["simulate", "--scenario", "2", "--k", "3", "--n", "25",
                 "--seed", "4", "--out", str(out)])
    assert code == 0
    assert "25 rows x 12 features" in capsys.readouterr().out
    data = load_csv(out, label_column="y", positive_label="1")
    assert (data.n, data.d) == (25, 12)


def test_bench_end_to_end(tmp_path, capsys):
    out = tmp_path / "res.csv"
    code = main([
        "bench", "--scenario", "1", "--n", "60", "--methods", "ote_oob,full_forest",
        "--reps", "2", "--trees", "6", "--m-fraction", "0.5", "--seed", "5",
        "--out", str(out),
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert out.exists()
    assert (tmp_path / "res_metrics.png").exists()
    assert "ote_oob" in captured.out
    assert "full_forest" in captured.out
    header = out.read_text().splitlines()[0]
    assert header == "method,repetition,misclassification,brier,sensitivity,kappa,selected_tree_count"


def test_bench_no_figures(tmp_path):
    out = tmp_path / "res.csv"
    code = main([
        "bench", "--scenario", "1", "--n", "60", "--methods", "full_forest",
        "--reps", "1", "--trees", "4", "--out", str(out), "--no-figures",
    ])
    assert code == 0
    assert not (tmp_path / "res_metrics.png").exists()


def test_bench_rerun_identical_bytes(tmp_path):
    args = [
        "bench", "--scenario", "1", "--n", "60", "--methods", "ote_sub",
        "--reps", "2", "--trees", "6", "--seed", "9", "--no-figures",
    ]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "scenario = 1\n"
        "n = 60\n"
        "methods = full_forest\n"
        "reps = 1\n"
        "trees = 4  # small forest\n"
        "figures = false\n"
    )
    out = tmp_path / "res.csv"
    code = main(["bench", "--config", str(cfg), "--reps", "2", "--out", str(out)])
    assert code == 0
    body = out.read_text().splitlines()[1:]
    assert len(body) == 2  # flag overrode the file's reps=1


def test_csv_source_through_cli(tmp_path):
    sim = tmp_path / "sim.csv"
    assert main(["simulate", "--scenario", "1", "--n", "80", "--out", str(sim)]) == 0
    out = tmp_path / "res.csv"
    code = main([
        "bench", "--csv", str(sim), "--positive-label", "1", "--methods", "ote",
        "--reps", "1", "--trees", "6", "--out", str(out), "--no-figures",
    ])
    assert code == 0
    assert out.exists()


def test_error_exit_is_one_line(tmp_path, capsys):
    code = main(["bench", "--reps", "1", "--out", str(tmp_path / "x.csv")])
    captured = capsys.readouterr()
    assert code == 1
    err_lines = [l for l in captured.err.splitlines() if l]
    assert len(err_lines) == 1
    assert err_lines[0].startswith("error: no data source")


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    code = main(["bench", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "unknown key" in capsys.readouterr().err


def test_sweep_m_outputs(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main([
        "sweep-m", "--scenario", "1", "--n", "60", "--methods", "ote_oob",
        "--reps", "1", "--trees", "6", "--m-fractions", "0.25,0.5",
        "--out", str(out),
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert out.exists()
    assert (tmp_path / "sweep_sweep.png").exists()
    assert "M fraction = 0.25" in captured.out
    lines = out.read_text().splitlines()
    assert len(lines) == 3
