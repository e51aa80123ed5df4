"""
Deterministic path gain: Friis propagation and molecular absorption.

Amplitude convention throughout; received power scales as h_l².
"""

import csv
import logging
import math
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from thzsim.models.carrier_grid import CarrierGrid
from thzsim.models.channel import DeterministicGain
from thzsim.models.system_config import AbsorptionProvider, SystemConfig

logger = logging.getLogger(__name__)

C_LIGHT = 299_792_458.0  # m/s

KAPPA_CSV_HEADER = ("frequency_hz", "kappa_per_m")


def friis_amplitude(f: float, d: float, G_t: float, G_r: float) -> float:
    """
    Friis amplitude gain sqrt(G_t·G_r)·c / (4π·f·d).

    Raises:
        ValueError: If any input is not positive.
    """
    if f <= 0 or d <= 0 or G_t <= 0 or G_r <= 0:
        raise ValueError("frequency, distance and gains must be positive")
    return math.sqrt(G_t * G_r) * C_LIGHT / (4.0 * math.pi * f * d)


def kappa_at(provider: AbsorptionProvider, f: float) -> float:
    """
    Absorption coefficient at frequency f.

    Tables are linearly interpolated and never extrapolated.

    Raises:
        ValueError: If f lies outside the table range.
    """
    if provider.kind == "constant":
        return float(provider.kappa_per_m)
    freqs, kappas = zip(*provider.rows)
    if not freqs[0] <= f <= freqs[-1]:
        raise ValueError(
            f"frequency {f:.6g} Hz outside absorption table range "
            f"[{freqs[0]:.6g}, {freqs[-1]:.6g}] Hz"
        )
    return float(np.interp(f, freqs, kappas))


def absorption_amplitude(provider: AbsorptionProvider, f: float, d: float) -> float:
    """
    Beer-Lambert amplitude gain exp(−κ(f)·d/2).

    Raises:
        ValueError: If d is not positive or f is outside the table range.
    """
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    return math.exp(-kappa_at(provider, f) * d / 2.0)


def deterministic_gain(config: SystemConfig, f: float) -> DeterministicGain:
    """h_fl and h_al at one carrier frequency."""
    return DeterministicGain(
        h_fl=friis_amplitude(f, config.d, config.G_t, config.G_r),
        h_al=absorption_amplitude(config.kappa_source, f, config.d),
    )


def grid_path_gains(config: SystemConfig, grid: CarrierGrid) -> np.ndarray:
    """h_l per carrier in grid order."""
    return np.array([deterministic_gain(config, f).h_l for f in grid.centers])


def load_kappa_table(path: Union[str, Path]) -> Tuple[Tuple[float, float], ...]:
    """
    Read a two-column ``frequency_hz,kappa_per_m`` CSV.

    A header row is required. LF and CRLF line endings are accepted.

    Raises:
        ValueError: On a missing/incorrect header, malformed rows, or
            negative κ.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != KAPPA_CSV_HEADER:
            raise ValueError(
                f"{path}: header must be '{','.join(KAPPA_CSV_HEADER)}', got {header}"
            )
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{line_no}: expected 2 columns, got {len(row)}")
            try:
                freq, kappa = float(row[0]), float(row[1])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: non-numeric value in {row}") from None
            if kappa < 0:
                raise ValueError(f"{path}:{line_no}: negative kappa {kappa}")
            rows.append((freq, kappa))

    logger.info(f"Loaded absorption table {path} ({len(rows)} rows)")
    return tuple(rows)
