import json

import numpy as np
import pytest

from bethe_transport.cli import main


@pytest.fixture
def tree_config(tmp_path):
    cfg = tmp_path / "tree.toml"
    cfg.write_text("N = 2\nbranching = [2, 2]\ngamma0 = 0.4\ngammaN = 0.4\n")
    return cfg


def test_verify_passes(tree_config, tmp_path):
    out = tmp_path / "out"
    code = main(["verify", "--config", str(tree_config), "--out", str(out)])
    assert code == 0
    report = json.loads((out / "verify_report.json").read_text())
    assert all(c["passed"] for c in report["checks"].values())
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "verify"
    assert manifest["version"]


def test_verify_nonuniform_tree(tmp_path):
    cfg = tmp_path / "tree.json"
    cfg.write_text('{"branching": [3, 2, 4], "gamma0": 0.2, "gammaN": 0.7}')
    out = tmp_path / "out"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0


def test_config_error_exit_code(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"branching": [2, 0], "gamma0": 1.0, "gammaN": 1.0}')
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    missing = tmp_path / "nope.toml"
    assert main(["verify", "--config", str(missing), "--out", str(tmp_path / "o2")]) == 2


def test_spectrum_and_determinism(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("N = 3\ngamma_min = 0.5\ngamma_max = 1.5\ngamma_step = 0.05\n")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["spectrum", "--config", str(cfg), "--out", str(out1), "--no-plot"]) == 0
    assert main(["spectrum", "--config", str(cfg), "--out", str(out2), "--no-plot"]) == 0
    assert (out1 / "spectrum.csv").read_bytes() == (out2 / "spectrum.csv").read_bytes()
    header = (out1 / "spectrum.csv").read_text().splitlines()[0]
    assert header == "gamma_tilde,branch_id,re_E,im_E,tracking_reliable"


def test_chain_and_current_tables(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("N = 2\ngamma_min = 0.2\ngamma_max = 2.0\ngamma_step = 0.2\n")
    out = tmp_path / "out"
    assert main(["chain", "--config", str(cfg), "--out", str(out), "--no-plot"]) == 0
    lines = (out / "chain_roots.csv").read_text().splitlines()
    assert lines[0] == "gamma_tilde,k_re,k_im,E_re,E_im,phase"
    # N+1 states per gamma point
    assert len(lines) - 1 == 10 * 3
    assert main(["current", "--config", str(cfg), "--out", str(out), "--no-plot"]) == 0
    assert (out / "currents.csv").exists()
    assert (out / "current_profile.csv").exists()


def test_scatter_cli(tmp_path):
    out = tmp_path / "out"
    code = main(
        ["scatter", "--gamma", "1.0", "--e-min", "-1.5", "--e-max", "1.5",
         "--points", "21", "--out", str(out), "--no-plot"]
    )
    assert code == 0
    lines = (out / "scatter.csv").read_text().splitlines()
    assert lines[0] == "E,gamma,T,T_closed_form"
    mid = lines[1 + 10].split(",")
    assert float(mid[0]) == 0.0
    assert float(mid[2]) == pytest.approx(4.0, abs=1e-12)


def test_random_ensemble_cli(tmp_path):
    out = tmp_path / "out"
    code = main(
        ["random-ensemble", "--N", "9", "--delta", "0.05", "--samples", "3",
         "--seed", "11", "--out", str(out), "--no-plot"]
    )
    assert code == 0
    agg = (out / "aggregate.csv").read_text().splitlines()
    assert agg[0].startswith("delta,mean_gamma_ep")
    assert len(agg) == 2
    samples = (out / "samples_delta0.05.csv").read_text().splitlines()
    assert len(samples) == 4


def test_figure_smoke(tmp_path):
    out = tmp_path / "figs"
    assert main(["figure", "fig5", "--out", str(out)]) == 0
    assert (out / "fig5.csv").exists()
    assert (out / "fig5_N3.svg").exists()
    assert (out / "fig5_legend.txt").exists()


def test_figure_currents_smoke(tmp_path):
    out = tmp_path / "figs"
    assert main(["figure", "fig9", "--out", str(out), "--no-plot"]) == 0
    text = (out / "fig9_N1.csv").read_text().splitlines()
    assert text[0] == "gamma_tilde,state_id,phase,J_av"


def test_unknown_figure_rejected(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["figure", "fig99", "--out", str(tmp_path)])
    assert err.value.code == 2
