import json

import pytest

from heliasdo import fileio
from heliasdo.cli import EXIT_CONFIG, EXIT_FAILED_CHECK, EXIT_IO, main


def test_verify_gains(capsys, tmp_path):
    assert main(["verify-gains", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "117.5" in out and "[elev]" in out and "[pitch]" in out
    assert (tmp_path / "gains.txt").exists()


def test_verify_gains_reports_violation(tmp_path, capsys):
    cfg = tmp_path / "weak.cfg"
    cfg.write_text("pitch.asdo.k4 = 3\n")
    assert main(["verify-gains", "--scenario", str(cfg)]) == EXIT_FAILED_CHECK
    out = capsys.readouterr().out
    assert "VIOLATED" in out and "117.5" in out


def test_weak_gains_rejected_before_simulation(tmp_path):
    assert main(["case1", "--set", "elev.asdo.k4=3", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_case1_writes_run(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["case1", "--observer", "asosmo", "--disturbance", "sinusoid",
               "--duration", "1", "--out", str(out)])
    assert rc == 0
    for name in ("series.csv", "metrics.txt", "manifest.cfg", "plots/inputs.dat"):
        assert (out / name).exists()
    assert len((out / "series.csv").read_text().splitlines()) == 1002
    sc = fileio.read_scenario(out / "manifest.cfg")
    assert sc.elev.observer_mode == "asosmo" and sc.duration == 1.0
    assert "transient" in json.loads((out / "metrics.txt").read_text())


def test_manifest_reproduces_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["case2", "--duration", "0.5", "--set", "elev.ctrl.mu=0.2", "--out", str(a)]) == 0
    assert main(["simulate", "--scenario", str(a / "manifest.cfg"), "--out", str(b)]) == 0
    assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()


def test_metrics_command(tmp_path, capsys):
    main(["case1", "--duration", "0.5", "--out", str(tmp_path / "r")])
    capsys.readouterr()
    assert main(["metrics", "--series", str(tmp_path / "r" / "series.csv"), "--transient", "0.1"]) == 0
    assert "tv_Vf" in json.loads(capsys.readouterr().out)


def test_errors(tmp_path, capsys):
    assert main(["simulate", "--scenario", str(tmp_path / "missing.cfg")]) == EXIT_IO
    assert main(["case2", "--set", "elev.asdo.k9=1", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["case2", "--set", "novalue", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["metrics", "--series", str(tmp_path / "nope.csv")]) == EXIT_IO
    with pytest.raises(SystemExit):
        main(["case1", "--observer", "kalman"])


def test_compare_observers(tmp_path, capsys):
    rc = main(["compare-observers", "--duration", "1", "--transient", "0.5",
               "--jobs", "1", "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "metrics.txt").read_text())
    assert {"asdo", "asosmo", "asdo_smoother_inputs"} <= set(summary)
    assert (tmp_path / "plots" / "compare_Vf.dat").exists()
