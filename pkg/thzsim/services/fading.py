"""Nakagami-m small-scale fading amplitude |h_f|."""

from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import gammainc, gammaln

from thzsim.models.channel import NakagamiParams


def sample_nakagami(
    params: NakagamiParams,
    rng: np.random.Generator,
    size: Optional[Union[int, Tuple[int, ...]]] = None,
) -> Union[float, np.ndarray]:
    """
    Draw |h_f| = sqrt(G) with G ~ Gamma(shape m, mean Omega).

    Args:
        params: Shape and spread.
        rng: Random stream owned by the caller.
        size: Output shape; a scalar is returned when None.
    """
    g = rng.standard_gamma(params.m, size)
    return np.sqrt(g * (params.Omega / params.m))


def amplitude_from_standard_gamma(g: np.ndarray, params: NakagamiParams) -> np.ndarray:
    """Scale unit-scale Gamma(m) variates to Nakagami amplitudes."""
    return np.sqrt(g * (params.Omega / params.m))


def pdf_nakagami(x: Union[float, np.ndarray], params: NakagamiParams) -> Union[float, np.ndarray]:
    """
    2 m^m x^{2m−1} exp(−m x²/Omega) / (Γ(m) Omega^m).

    Raises:
        ValueError: If x is negative.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("pdf_nakagami is undefined for negative x")
    m, omega = params.m, params.Omega
    with np.errstate(divide="ignore"):
        # x^0 at the origin when m = 1/2
        power_term = np.where(
            x_arr > 0,
            (2.0 * m - 1.0) * np.log(np.where(x_arr > 0, x_arr, 1.0)),
            0.0 if m == 0.5 else -np.inf,
        )
        log_pdf = (
            np.log(2.0)
            + m * np.log(m)
            + power_term
            - m * x_arr**2 / omega
            - gammaln(m)
            - m * np.log(omega)
        )
    density = np.exp(log_pdf)
    return float(density) if np.ndim(x) == 0 else density


def cdf_nakagami(x: Union[float, np.ndarray], params: NakagamiParams) -> Union[float, np.ndarray]:
    """Amplitude CDF via the regularized lower incomplete Gamma function."""
    x_arr = np.clip(np.asarray(x, dtype=float), 0.0, None)
    out = gammainc(params.m, params.m * x_arr**2 / params.Omega)
    return float(out) if np.ndim(x) == 0 else out
