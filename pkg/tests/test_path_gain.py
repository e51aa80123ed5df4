"""Tests for Friis and absorption path gain."""

import math

import pytest

from thzsim.models.system_config import AbsorptionProvider
from thzsim.services.path_gain import (
    C_LIGHT,
    absorption_amplitude,
    deterministic_gain,
    friis_amplitude,
    grid_path_gains,
    kappa_at,
    load_kappa_table,
)

TABLE = AbsorptionProvider(kind="table", rows=((300e9, 0.002), (340e9, 0.006), (370e9, 0.010)))


def test_friis_matches_db_link_budget():
    f, d = 335e9, 10.0
    fspl_db = 20 * math.log10(4 * math.pi * f * d / C_LIGHT)
    expected = 10 ** ((55 + 55 - fspl_db) / 10)

    gain = friis_amplitude(f, d, 10**5.5, 10**5.5) ** 2

    assert gain == pytest.approx(expected, rel=1e-9)


def test_friis_falls_with_distance_and_frequency():
    g = 10**5.5
    assert friis_amplitude(335e9, 20.0, g, g) == pytest.approx(friis_amplitude(335e9, 10.0, g, g) / 2)
    assert friis_amplitude(340e9, 10.0, g, g) < friis_amplitude(330e9, 10.0, g, g)


@pytest.mark.parametrize("args", [(0, 10, 1, 1), (335e9, 0, 1, 1), (335e9, 10, -1, 1)])
def test_friis_rejects_non_positive_inputs(args):
    with pytest.raises(ValueError):
        friis_amplitude(*args)


def test_constant_absorption():
    provider = AbsorptionProvider(kind="constant", kappa_per_m=0.002)
    assert absorption_amplitude(provider, 335e9, 10.0) == pytest.approx(math.exp(-0.01))
    zero = AbsorptionProvider(kind="constant", kappa_per_m=0.0)
    assert absorption_amplitude(zero, 335e9, 10.0) == 1.0


def test_table_interpolates_linearly():
    assert kappa_at(TABLE, 320e9) == pytest.approx(0.004)
    assert kappa_at(TABLE, 300e9) == pytest.approx(0.002)
    assert kappa_at(TABLE, 370e9) == pytest.approx(0.010)


def test_table_never_extrapolates():
    with pytest.raises(ValueError, match="outside absorption table"):
        kappa_at(TABLE, 299e9)
    with pytest.raises(ValueError):
        kappa_at(TABLE, 371e9)


def test_table_validation():
    with pytest.raises(ValueError, match="strictly increasing"):
        AbsorptionProvider(kind="table", rows=((300e9, 0.002), (300e9, 0.003)))
    with pytest.raises(ValueError, match="negative"):
        AbsorptionProvider(kind="table", rows=((300e9, 0.002), (310e9, -0.1)))


def test_deterministic_gain_combines_factors(baseline_config):
    gain = deterministic_gain(baseline_config, 335e9)
    assert gain.h_l == pytest.approx(gain.h_fl * gain.h_al)
    assert 0 < gain.h_al <= 1


def test_grid_path_gains_decrease_with_frequency(baseline_config, grid):
    gains = grid_path_gains(baseline_config, grid)
    assert gains.shape == (10,)
    assert all(a > b for a, b in zip(gains, gains[1:]))


def test_load_kappa_table_accepts_crlf(tmp_path):
    path = tmp_path / "kappa.csv"
    path.write_bytes(b"frequency_hz,kappa_per_m\r\n300e9,0.002\r\n370e9,0.01\r\n")
    assert load_kappa_table(path) == ((300e9, 0.002), (370e9, 0.01))


def test_load_kappa_table_requires_header(tmp_path):
    path = tmp_path / "kappa.csv"
    path.write_text("300e9,0.002\n370e9,0.01\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        load_kappa_table(path)


def test_load_kappa_table_rejects_negative(tmp_path):
    path = tmp_path / "kappa.csv"
    path.write_text("frequency_hz,kappa_per_m\n300e9,-0.002\n", encoding="utf-8")
    with pytest.raises(ValueError, match="negative"):
        load_kappa_table(path)


def test_bundled_table_covers_figure_band(repo_root):
    rows = load_kappa_table(repo_root / "thzsim" / "data" / "kappa_300_370ghz.csv")
    provider = AbsorptionProvider(kind="table", rows=rows)
    assert kappa_at(provider, 325e9) > kappa_at(provider, 335e9)
