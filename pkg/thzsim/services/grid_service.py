"""
Carrier grid construction, neighbour lookup and the rate-to-threshold map.
"""

import logging
from typing import Literal, Optional, Tuple

from thzsim.models.carrier_grid import CarrierGrid
from thzsim.models.system_config import SystemConfig

logger = logging.getLogger(__name__)


def build_grid(config: SystemConfig) -> CarrierGrid:
    """
    Place K carriers symmetrically around f_c with no carrier at f_c.

    Carrier k sits at f_c + sign(k)·(|k| − 1/2)·W_ch.

    Args:
        config: Resolved system configuration.

    Returns:
        The carrier grid.

    Raises:
        ValueError: If K is odd or below 2, or a bandwidth is not positive.
    """
    K = config.K
    if K < 2 or K % 2:
        raise ValueError(f"K must be even and >= 2, got {K}")
    if config.W_sb <= 0 or config.W_gb <= 0:
        raise ValueError("signal and guard bandwidths must be positive")

    half = K // 2
    w_ch = config.W_ch
    indices = tuple(list(range(-half, 0)) + list(range(1, half + 1)))
    centers = tuple(
        config.f_c + (1 if k > 0 else -1) * (abs(k) - 0.5) * w_ch for k in indices
    )
    band_lo = tuple(f - config.W_sb / 2 for f in centers)
    band_hi = tuple(f + config.W_sb / 2 for f in centers)

    return CarrierGrid(
        indices=indices,
        centers=centers,
        band_lo=band_lo,
        band_hi=band_hi,
        f_c=config.f_c,
        W_sb=config.W_sb,
        W_gb=config.W_gb,
    )


def neighbor_indicator(grid: CarrierGrid, j: int) -> int:
    """θ_j: 1 if carrier j exists in the grid, else 0."""
    return int(j != 0 and abs(j) <= grid.K // 2)


def adjacent_indices(grid: CarrierGrid, k: int) -> Tuple[Optional[int], Optional[int]]:
    """
    Frequency neighbours of carrier k.

    Index 0 does not exist, so carriers -1 and 1 neighbour each other
    across f_c. Edge carriers get ``None`` on their open side.
    """
    pos = grid.position(k)
    lower = grid.indices[pos - 1] if pos > 0 else None
    upper = grid.indices[pos + 1] if pos < grid.K - 1 else None
    return lower, upper


def threshold_from_rate(r: float, mode: Literal["paper", "shannon"] = "paper") -> float:
    """
    Map spectral efficiency r to the linear SINR threshold γ_th.

    Args:
        r: Spectral efficiency, bits/s/Hz.
        mode: ``paper`` gives 2^(r−1); ``shannon`` gives 2^r − 1.

    Raises:
        ValueError: If r is not positive or mode is unknown.
    """
    if r <= 0:
        raise ValueError(f"spectral efficiency must be positive, got {r}")
    if mode == "paper":
        return 2.0 ** (r - 1.0)
    if mode == "shannon":
        return 2.0**r - 1.0
    raise ValueError(f"unknown threshold mode: {mode}")
