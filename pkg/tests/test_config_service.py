"""Tests for config loading, resolution and the canonical echo."""

import json

import pytest

from thzsim.errors import ConfigError
from thzsim.services.config_service import canonical_echo, parse_config_dict, validate_config


def _pointers(exc: ConfigError):
    return [pointer for pointer, _ in exc.issues]


def test_gain_strings_resolve_to_linear(write_config):
    config = validate_config(write_config())
    assert config.G_t == pytest.approx(316_227.766, rel=1e-9)
    assert config.G_r == pytest.approx(10**5.5, rel=1e-12)


def test_defaults_appear_in_echo(write_config):
    echo = json.loads(canonical_echo(validate_config(write_config())))
    assert echo["Omega"] == 1.0
    assert echo["N_o"] == 1.0
    assert echo["format"] == "resolved-v1"
    assert echo["W"] == pytest.approx(20.005e9)


def test_scalar_power_fills_every_carrier(write_config):
    config = validate_config(write_config(P_db="20 dB", P_adj_db=5))
    assert config.P == pytest.approx((100.0,) * 10)
    assert config.P_adj == pytest.approx(10**0.5)


def test_power_list_must_match_carriers(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(P_db=[20, 20, 20]))
    assert _pointers(exc.value) == ["/P_db"]


def test_odd_carrier_count_names_k(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(K=7))
    assert "/K" in _pointers(exc.value)


def test_unknown_key_rejected(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(sigma_s=0.03))
    assert "/sigma_s" in _pointers(exc.value)


def test_nested_errors_carry_full_pointer(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(absorption={"kind": "constant", "kappa": 0.1}))
    assert any(p.startswith("/absorption") for p in _pointers(exc.value))


def test_wrong_gain_unit_rejected(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(G_t_dbi="55 dB"))
    assert _pointers(exc.value) == ["/G_t_dbi"]


def test_inconsistent_total_bandwidth_points_at_document_key(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(W_hz=20e9))
    assert "inconsistent" in str(exc.value)


def test_negative_jitter_points_at_document_key(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(sigma_s_m=-0.01))
    assert _pointers(exc.value) == ["/sigma_s_m"]


def test_echo_round_trips(write_config, tmp_path):
    config = validate_config(write_config(P_adj_db=5, shared_fading=True))
    echo_path = tmp_path / "resolved.json"
    echo_path.write_text(canonical_echo(config), encoding="utf-8")

    again = validate_config(echo_path)

    assert again == config
    assert canonical_echo(again) == canonical_echo(config)


def test_echo_is_sorted_json(write_config):
    echo = canonical_echo(validate_config(write_config()))
    keys = list(json.loads(echo))
    assert keys == sorted(keys)
    assert echo.endswith("\n")


def test_table_path_resolves_relative_to_config(write_config, tmp_path):
    (tmp_path / "kappa.csv").write_text(
        "frequency_hz,kappa_per_m\n300e9,0.002\n370e9,0.009\n", encoding="utf-8"
    )
    config = validate_config(write_config(absorption={"kind": "table", "path": "kappa.csv"}))
    assert config.kappa_source.kind == "table"
    assert config.kappa_source.path is None
    assert config.kappa_source.rows == ((300e9, 0.002), (370e9, 0.009))


def test_missing_table_reported_as_config_error(write_config):
    with pytest.raises(ConfigError) as exc:
        validate_config(write_config(absorption={"kind": "table", "path": "nowhere.csv"}))
    assert _pointers(exc.value) == ["/absorption/path"]


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        validate_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid JSON"):
        validate_config(bad)


def test_non_object_document_rejected():
    with pytest.raises(ConfigError):
        parse_config_dict([1, 2, 3])


def test_bundled_baseline_config(repo_root):
    config = validate_config(repo_root / "configs" / "baseline.json")
    assert config.K == 10
    assert config.f_c == 335e9
    assert config.kappa_source.kind == "table"
    assert config.P_adj == pytest.approx(10**0.5)
