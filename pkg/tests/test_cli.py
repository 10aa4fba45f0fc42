from exnrule.cli import main


def test_run_and_plot(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--datasets", "S1,S4", "--methods", "knn", "exnrule", "--reps", "2",
               "--B", "10", "--k", "3,5", "--out", str(out)])
    assert rc == 0
    assert "wrote" in capsys.readouterr().out
    for name in ("results.csv", "summary.csv", "boxplot_brier.tsv", "boxplot_brier.svg"):
        assert (out / name).exists()
    rc = main(["plot", "--metric", "kappa", "--in", str(out / "results.csv"), "--out", str(tmp_path / "plots")])
    assert rc == 0 and (tmp_path / "plots" / "boxplot_kappa.svg").exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("datasets = S2\nmethods = knn\nreps = 5\n")
    assert main(["run", "--config", str(cfg), "--reps", "1", "--out", str(tmp_path / "o")]) == 0
    rows = [ln for ln in (tmp_path / "o" / "results.csv").read_text().splitlines() if not ln.startswith("#")]
    assert len(rows) == 2


def test_tune_and_scale_flags(tmp_path):
    assert main(["run", "--datasets", "S3", "--methods", "wknn", "--reps", "1", "--tune", "--scale",
                 "--out", str(tmp_path)]) == 0
    row = (tmp_path / "results.csv").read_text().splitlines()[-1].split(",")
    assert row[2] == "0" and 1 <= int(row[-1]) <= 10


def test_scenario_command(tmp_path):
    assert main(["scenario", "--id", "S6", "--seed", "3", "--out", str(tmp_path / "s6.csv")]) == 0
    assert len((tmp_path / "s6.csv").read_text().splitlines()) == 101


def test_error_exit_codes(tmp_path, capsys):
    assert main(["scenario", "--id", "S9", "--out", str(tmp_path / "x.csv")]) == 2
    assert "UnknownScenarioError" in capsys.readouterr().err
    assert main(["run", "--methods", "svm", "--out", str(tmp_path)]) == 2
    assert main(["run", "--datasets", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2
    assert main(["plot", "--metric", "accuracy", "--in", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 1
