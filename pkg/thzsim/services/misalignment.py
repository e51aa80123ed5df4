"""
Pointing-error (misalignment fading) coefficient h_p.

Gaussian beam on a circular aperture with Rayleigh-distributed radial
offset of jitter σ_s. Collected fraction h_p = A0·exp(−2 r²/w_eq²), whose
density is γ²/A0^{γ²}·x^{γ²−1} on (0, A0] with γ = w_eq / (2σ_s).
"""

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import erf

from thzsim.models.channel import BeamGeometry

logger = logging.getLogger(__name__)


def derive_beam(a: float, w_d: float, sigma_s: float) -> BeamGeometry:
    """
    Derive pointing-error parameters.

    Args:
        a: Receive-aperture radius, m.
        w_d: Beam footprint radius at the receiver, m.
        sigma_s: Jitter standard deviation, m.

    Returns:
        BeamGeometry with v, A0, w_eq and γ.

    Raises:
        ValueError: If a or w_d is not positive or sigma_s is negative.
    """
    if a <= 0 or w_d <= 0:
        raise ValueError("aperture radius and beam footprint must be positive")
    if sigma_s < 0:
        raise ValueError(f"jitter must be non-negative, got {sigma_s}")

    v = math.sqrt(math.pi) * a / (math.sqrt(2.0) * w_d)
    erf_v = float(erf(v))
    A0 = erf_v**2
    w_eq = w_d * math.sqrt(math.sqrt(math.pi) * erf_v / (2.0 * v * math.exp(-v * v)))
    gamma_ratio = w_eq / (2.0 * sigma_s) if sigma_s > 0 else math.inf

    return BeamGeometry(
        a=a, w_d=w_d, sigma_s=sigma_s, v=v, A0=A0, w_eq=w_eq, gamma_ratio=gamma_ratio
    )


def pdf_hp(x: Union[float, np.ndarray], geom: BeamGeometry) -> Union[float, np.ndarray]:
    """
    Density of h_p.

    Raises:
        ValueError: If x is negative or the geometry has no jitter.
    """
    if not geom.sigma_s > 0:
        raise ValueError("pdf_hp needs sigma_s > 0 (h_p is deterministic otherwise)")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("pdf_hp is undefined for negative x")

    g2 = geom.gamma2
    inside = (x_arr > 0) & (x_arr <= geom.A0)
    safe = np.where(inside, x_arr, geom.A0)
    density = np.where(inside, g2 / geom.A0**g2 * safe ** (g2 - 1.0), 0.0)
    return float(density) if np.ndim(x) == 0 else density


def cdf_hp(x: Union[float, np.ndarray], geom: BeamGeometry) -> Union[float, np.ndarray]:
    """CDF of h_p: (x/A0)^{γ²} on [0, A0], a step at A0 when σ_s = 0."""
    x_arr = np.clip(np.asarray(x, dtype=float), 0.0, None)
    if geom.sigma_s > 0:
        out = np.clip(x_arr / geom.A0, 0.0, 1.0) ** geom.gamma2
    else:
        out = (x_arr >= geom.A0).astype(float)
    return float(out) if np.ndim(x) == 0 else out


def mean_hp(geom: BeamGeometry) -> float:
    """E[h_p] = γ²·A0 / (γ² + 1)."""
    if geom.sigma_s == 0:
        return geom.A0
    g2 = geom.gamma2
    return g2 * geom.A0 / (g2 + 1.0)


def second_moment_hp(geom: BeamGeometry) -> float:
    """E[h_p²] = γ²·A0² / (γ² + 2)."""
    if geom.sigma_s == 0:
        return geom.A0**2
    g2 = geom.gamma2
    return g2 * geom.A0**2 / (g2 + 2.0)


def hp_from_uniform(u: np.ndarray, geom: BeamGeometry) -> np.ndarray:
    """
    Map uniforms on (0, 1] to h_p through the Rayleigh radial offset.

    The map is monotone in σ_s for fixed u, so sweeps that share u keep
    common random numbers.
    """
    r2 = -2.0 * geom.sigma_s**2 * np.log(u)
    return geom.A0 * np.exp(-2.0 * r2 / geom.w_eq**2)


def sample_hp(
    geom: BeamGeometry,
    rng: np.random.Generator,
    size: Optional[Union[int, Tuple[int, ...]]] = None,
) -> Union[float, np.ndarray]:
    """
    Draw h_p from the physical model.

    Args:
        geom: Beam geometry.
        rng: Random stream owned by the caller.
        size: Output shape; a scalar is returned when None.
    """
    u = 1.0 - rng.random(size)
    h_p = hp_from_uniform(np.asarray(u), geom)
    return float(h_p) if size is None else h_p
