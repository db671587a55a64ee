import json

import numpy as np
import pandas as pd
import pytest

from conclusive_qst import experiments as ex
from conclusive_qst.cli import main


def read(path):
    return pd.read_csv(path, comment="#")


def test_bad_config_exits_nonzero(tmp_path, capsys):
    assert main(["fig2", "--n", "1,2", "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--delta", "1.0", "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err
    assert not list(tmp_path.iterdir())


def test_fig2(tmp_path):
    assert main(["fig2", "--n-range", "2:24", "--out", str(tmp_path)]) == 0
    df = read(tmp_path / "fig2.csv")
    assert list(df.columns) == ["N", "tau", "eta"]
    assert len(df) == 23
    assert np.allclose(df.eta[df.N <= 3], 1.0, atol=1e-6)
    assert (df.eta > 0.5).all()
    man = json.loads((tmp_path / "fig2_manifest.json").read_text())
    assert man["config"]["n"] == list(range(2, 25))
    assert set(man) >= {"command", "config", "seeds", "versions", "wall_clock_s", "outputs"}


def test_fig3(tmp_path):
    assert main(["fig3", "--out", str(tmp_path)]) == 0
    df = read(tmp_path / "fig3.csv")
    assert sorted(df.N.unique()) == [5, 10, 20, 30]
    for N, g in df.groupby("N"):
        assert len(g) == 40
        assert (np.diff(g.eta_cum) >= 0).all()
        assert g.eta_cum.iloc[-1] > 0.99
    g10 = df[df.N == 10]
    j = int(g10.step[g10.eta_cum >= 0.99].iloc[0])
    assert 13 <= j <= 17


def test_example5(tmp_path, capsys):
    assert main(["example5", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "memories" in out and "ns" in out
    s = read(tmp_path / "example5_summary.csv").iloc[0]
    assert 13 <= s.memories <= 17
    assert 0.30 <= s.t_j_ns <= 0.45
    assert 0.020 <= s.T_bar_ns <= 0.045
    steps = read(tmp_path / "example5.csv")
    assert len(steps) == s.memories
    assert steps.t_ns.iloc[-1] == pytest.approx(s.t_j_ns)


def test_example5_natural_units(tmp_path):
    config = ex.RunConfig("example5", j_units_kelvin=None, out=str(tmp_path)).validate()
    tables, summary = ex.cmd_example5(config)
    assert "t_j_ns" not in summary and summary["time_unit"] == "natural"


def test_sweep_zero_disorder_is_uniform(tmp_path):
    assert main(["sweep", "--delta", "0", "--seeds", "3", "--out", str(tmp_path)]) == 0
    df = read(tmp_path / "sweep.csv")
    uniform = ex.cmd_example5(ex.RunConfig("example5", j_units_kelvin=None).validate())[1]
    assert (df.memories == uniform["memories"]).all()
    assert np.allclose(df.T_bar, uniform["T_bar"], rtol=1e-12)
    assert (df.fidelity_min > 1 - 1e-9).all()


def test_sweep_deterministic_and_worker_independent(tmp_path):
    args = ["sweep", "--n", "8", "--delta", "0.2", "--seeds", "4", "--seed", "7", "--j-units-kelvin", "20"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert main(args + ["--workers", "2", "--out", str(tmp_path / "c")]) == 0
    for name in ("sweep.csv", "sweep_summary.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes() == (tmp_path / "c" / name).read_bytes()
    summ = read(tmp_path / "a" / "sweep_summary.csv")
    assert list(summ.stat) == ["mean", "std"]


def test_sweep_seed_changes_output(tmp_path):
    base = ["sweep", "--n", "8", "--delta", "0.2", "--seeds", "3"]
    main(base + ["--seed", "1", "--out", str(tmp_path / "a")])
    main(base + ["--seed", "2", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "sweep.csv").read_bytes() != (tmp_path / "b" / "sweep.csv").read_bytes()


def test_csv_embeds_config(tmp_path):
    main(["fig2", "--n", "4,5", "--grid", "500", "--out", str(tmp_path)])
    first = (tmp_path / "fig2.csv").read_text().splitlines()[0]
    assert first.startswith("# config=")
    cfg = json.loads(first[len("# config="):])
    assert cfg["grid"] == 500 and cfg["n"] == [4, 5]


def test_output_dir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(ex.OUT_ENV, str(tmp_path / "env"))
    assert main(["fig2", "--n", "3"]) == 0
    assert (tmp_path / "env" / "fig2.csv").exists()


def test_no_cooling_flag(tmp_path):
    assert main(["example5", "--no-cooling", "--out", str(tmp_path)]) == 0
    man = json.loads((tmp_path / "example5_manifest.json").read_text())
    assert man["config"]["cooling"] == "none"


def test_verify_passes(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("[PASS]") >= 8
    df = read(tmp_path / "verify.csv")
    assert df.passed.all()


def test_result_table_validation():
    with pytest.raises(ValueError):
        ex.ResultTable("x", {"N": [1, 2], "eta": [0.1]})
    with pytest.raises(ValueError):
        ex.ResultTable("x", {"eta": [1.5]})
    with pytest.raises(ValueError):
        ex.ResultTable("x", {"bogus": [1]})
