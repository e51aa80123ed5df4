"""Shared fixtures for the thzsim test suite."""

import json
from pathlib import Path
from typing import Any, Callable, Dict

import numpy as np
import pytest

from thzsim.config import get_settings
from thzsim.models.carrier_grid import CarrierGrid
from thzsim.models.system_config import SystemConfig
from thzsim.services.grid_service import build_grid
from thzsim.services.phase_noise import ici_service

# Figure setup: 10 carriers of 2 GHz, 5 MHz total guard, 335 GHz, 55 dBi, m = 4
BASELINE: Dict[str, Any] = {
    "K": 10,
    "W": 10 * (2.0e9 + 0.5e6),
    "W_sb": 2.0e9,
    "W_gb": 0.5e6,
    "f_c": 335.0e9,
    "d": 10.0,
    "G_t": 10**5.5,
    "G_r": 10**5.5,
    "P": (100.0,) * 10,
    "N_o": 1.0,
    "kappa_source": {"kind": "constant", "kappa_per_m": 0.002},
    "m": 4.0,
    "sigma_s": 0.03,
    "a": 0.05,
    "w_d": 0.1,
    "beta": 1.5e9,
    "ici_model": "total_leakage",
    "r": 1.0,
    "n_trials": 20_000,
    "seed": 1234,
}

BASELINE_DOCUMENT: Dict[str, Any] = {
    "K": 10,
    "f_c_hz": 335e9,
    "W_sb_hz": 2e9,
    "W_gb_hz": 0.5e6,
    "d_m": 10,
    "G_t_dbi": "55 dBi",
    "G_r_dbi": 55,
    "P_db": 20,
    "absorption": {"kind": "constant", "kappa_per_m": 0.002},
    "m": 4,
    "sigma_s_m": 0.03,
    "a_m": 0.05,
    "w_d_m": 0.1,
    "beta_hz": 1.5e9,
    "r": 1,
    "n_trials": 2000,
    "seed": 7,
}


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Fresh settings and ICI cache per test; no automatic OP escalation."""
    monkeypatch.setenv("THZSIM_ESCALATION_TRIALS", "0")
    get_settings.cache_clear()
    ici_service.clear()
    yield
    get_settings.cache_clear()
    ici_service.clear()


@pytest.fixture
def make_config() -> Callable[..., SystemConfig]:
    """Build a baseline SystemConfig with some fields replaced."""

    def factory(**changes: Any) -> SystemConfig:
        data = dict(BASELINE)
        data.update(changes)
        if "K" in changes and "P" not in changes:
            data["P"] = (100.0,) * changes["K"]
        if "W" not in changes:
            data["W"] = data["K"] * (data["W_sb"] + data["W_gb"])
        return SystemConfig.model_validate(data)

    return factory


@pytest.fixture
def baseline_config(make_config) -> SystemConfig:
    return make_config()


@pytest.fixture
def grid(baseline_config) -> CarrierGrid:
    return build_grid(baseline_config)


@pytest.fixture
def repo_root() -> Path:
    return Path(__file__).resolve().parents[1]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240517)


@pytest.fixture
def write_config(tmp_path) -> Callable[..., Path]:
    """Write a config document (baseline plus changes) and return its path."""

    def writer(name: str = "config.json", **changes: Any) -> Path:
        doc = dict(BASELINE_DOCUMENT)
        doc.update(changes)
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path

    return writer
