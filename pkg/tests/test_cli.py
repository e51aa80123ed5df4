"""Tests for the command-line entry point."""

import json

import pytest

from thzsim.config import get_settings
from thzsim.main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main


def test_validate_prints_resolved_echo(write_config, capsys):
    assert main(["validate", "--config", str(write_config())]) == EXIT_OK
    echo = json.loads(capsys.readouterr().out)
    assert echo["format"] == "resolved-v1"
    assert echo["G_t"] == pytest.approx(10**5.5)


def test_simulate_writes_csv_and_manifest(write_config, tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "simulate",
        "--config", str(write_config()),
        "--experiment", "custom",
        "--seed", "0xFFFF",
        "--trials", "1500",
        "--out", str(out),
        "--threshold-mode", "shannon",
    ])

    assert code == EXIT_OK
    assert (out / "custom.csv").exists()
    manifest = json.loads((out / "custom.manifest.json").read_text(encoding="utf-8"))
    assert manifest["seed"] == 0xFFFF
    assert manifest["n_trials"] == 1500
    assert manifest["config"]["threshold_mode"] == "shannon"
    assert str(out / "custom.csv") in capsys.readouterr().out


def test_output_dir_from_environment(write_config, tmp_path, monkeypatch):
    monkeypatch.setenv("THZSIM_OUTPUT_DIR", str(tmp_path / "env_out"))
    get_settings.cache_clear()

    code = main(["simulate", "--config", str(write_config()), "--experiment", "custom", "--trials", "1000"])

    assert code == EXIT_OK
    assert (tmp_path / "env_out" / "custom.csv").exists()


def test_invalid_config_exits_2(write_config, tmp_path, capsys):
    code = main(["simulate", "--config", str(write_config(K=7)), "--experiment", "custom", "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
    assert "/K" in capsys.readouterr().err


def test_missing_config_exits_2(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG


def test_unwritable_output_exits_3(write_config, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    code = main(["simulate", "--config", str(write_config()), "--experiment", "custom", "--out", str(blocker)])
    assert code == EXIT_RUNTIME


def test_unknown_experiment_rejected(write_config):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", str(write_config()), "--experiment", "fig9"])
    assert exc.value.code == 2


def test_seed_must_fit_64_bits(write_config):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", str(write_config()), "--experiment", "custom", "--seed", str(2**64)])
    assert exc.value.code == 2
