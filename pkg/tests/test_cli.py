import json
import subprocess
import sys

import pytest

from hybridcm.harness.cli import main


def test_eval_produces_row_per_grid_point(tmp_path, capsys):
    out = str(tmp_path / "q.csv")
    rc = main(["eval", "--system", "qam", "--mod", "16",
               "--ebn0", "2.0:0.5:3.0", "--min-block-errors", "5",
               "--max-blocks", "60", "--seed", "7", "--out", out, "--quiet"])
    assert rc == 0
    lines = open(out).read().strip().splitlines()
    assert len(lines) == 1 + 3  # header + one row per grid point
    assert (tmp_path / "q.csv.run.json").exists()
    record = json.loads(open(str(tmp_path / "q.csv.run.json")).read())
    assert record["seeds"]["master"] == 7


def test_unknown_flag_prints_usage_and_exits_1(capsys):
    rc = main(["eval", "--bogus"])
    assert rc == 1
    err = capsys.readouterr().err
    assert "usage" in err.lower()


def test_missing_subcommand_exits_1():
    assert main([]) == 1


def test_bad_grid_is_contract_violation(tmp_path):
    rc = main(["eval", "--system", "qam", "--mod", "16", "--ebn0", "3-4",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 1


def test_missing_config_file_is_io_error(tmp_path):
    rc = main(["train", "--config", str(tmp_path / "none.json"),
               "--out", str(tmp_path / "m.json")])
    assert rc == 2


def test_ldpc_selftest_passes(capsys):
    assert main(["ldpc-selftest"]) == 0
    out = capsys.readouterr().out
    assert "zero syndrome" in out


def test_constellation_and_plot_round_trip(tmp_path):
    csv_path = str(tmp_path / "c.csv")
    assert main(["constellation", "--system", "qam", "--mod", "64",
                 "--out", csv_path]) == 0
    assert len(open(csv_path).read().strip().splitlines()) == 65
    svg_path = str(tmp_path / "c.svg")
    assert main(["plot", "--in", csv_path, "--out", svg_path]) == 0
    assert open(svg_path).read().startswith("<svg")


def test_gmi_command_prints_estimate(capsys):
    rc = main(["gmi", "--system", "qam", "--mod", "16", "--snr-db", "7.0",
               "--symbols", "20000", "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "bits/symbol" in out


def test_gmi_requires_mod_for_qam():
    assert main(["gmi", "--system", "qam", "--snr-db", "7.0"]) == 1


def test_uncoded_command(tmp_path):
    out = str(tmp_path / "u.csv")
    rc = main(["uncoded", "--mod", "16", "--ebn0", "8.0:1.0:9.0",
               "--symbols", "5000", "--out", out])
    assert rc == 0
    assert len(open(out).read().strip().splitlines()) == 3


def test_train_smoke_and_eval_dnn(tmp_path):
    cfg = dict(M=4, enc_hidden=[8], dec1_hidden=[8], dec2_hidden=[8],
               train_snr_db=4.0, batch1=32, batch2=64, samples_per_epoch=320,
               weight_decay1=0.01, max_epochs1=2, max_epochs2=2,
               patience=10, val_reps=32, seed=5)
    cfg_path = str(tmp_path / "cfg.json")
    open(cfg_path, "w").write(json.dumps(cfg))
    ckpt_path = str(tmp_path / "m4.json")
    assert main(["train", "--config", cfg_path, "--out", ckpt_path,
                 "--quiet"]) == 0
    csv_path = str(tmp_path / "dnn.csv")
    rc = main(["eval", "--system", "dnn", "--checkpoint", ckpt_path,
               "--mod", "4", "--ebn0", "2.0:1.0:2.0", "--min-block-errors", "5",
               "--max-blocks", "40", "--seed", "3", "--out", csv_path,
               "--quiet"])
    assert rc == 0
    assert len(open(csv_path).read().strip().splitlines()) == 2


def test_checkpoint_m_mismatch_is_contract_violation(tmp_path):
    cfg = dict(M=4, enc_hidden=[8], dec1_hidden=[8], dec2_hidden=[8],
               train_snr_db=4.0, batch1=32, batch2=64, samples_per_epoch=320,
               weight_decay1=0.01, max_epochs1=1, max_epochs2=1,
               patience=10, val_reps=32, seed=5)
    cfg_path = str(tmp_path / "cfg.json")
    open(cfg_path, "w").write(json.dumps(cfg))
    ckpt_path = str(tmp_path / "m4.json")
    assert main(["train", "--config", cfg_path, "--out", ckpt_path,
                 "--quiet"]) == 0
    rc = main(["eval", "--system", "dnn", "--checkpoint", ckpt_path,
               "--mod", "16", "--ebn0", "3.0:1.0:3.0",
               "--out", str(tmp_path / "x.csv"), "--quiet"])
    assert rc == 1


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hybridcm", "ldpc-selftest"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
