"""
LO phase noise and the inter-carrier interference it causes.

The receiver LO phase is a Wiener process sampled at the total bandwidth
W with increment variance 4πβ/W, giving a Lorentzian line of half-width β.
ICI coefficients come from an analytic Lorentzian-leakage integral, or from
a time-domain oracle that rotates a synthesized carrier by a simulated
phase trace and measures where its power lands.
"""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np
from cachetools import LRUCache
from scipy import integrate, signal

from thzsim.config import get_settings
from thzsim.errors import SimulationError
from thzsim.models.carrier_grid import CarrierGrid
from thzsim.models.channel import (
    ChannelRealization,
    IciCoefficients,
    LeakageMeasurement,
    PhaseNoiseParams,
)
from thzsim.models.system_config import SystemConfig
from thzsim.services.grid_service import adjacent_indices, build_grid, neighbor_indicator
from thzsim.services.random_streams import realization_stream

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-8
MIN_ORACLE_SAMPLES = 2**14

# β/W_ch range over which the analytic and empirical models are known to agree
VALIDATED_BETA_RANGE = (0.01, 0.5)


def phase_noise_params(config: SystemConfig) -> PhaseNoiseParams:
    return PhaseNoiseParams(beta=config.beta, W=config.W)


def wiener_trace(
    n: int,
    params: PhaseNoiseParams,
    rng: np.random.Generator,
    n_traces: Optional[int] = None,
) -> np.ndarray:
    """
    Sample a Wiener phase trace φ(0..n−1), φ(n) = φ(n−1) + ε(n), φ(0) = 0.

    Args:
        n: Samples per trace.
        params: Phase-noise parameters.
        rng: Random stream owned by the caller.
        n_traces: When given, return an (n_traces, n) array of independent traces.

    Raises:
        ValueError: If n < 1.
    """
    if n < 1:
        raise ValueError(f"trace length must be >= 1, got {n}")
    shape = (n - 1,) if n_traces is None else (n_traces, n - 1)
    increments = rng.normal(0.0, math.sqrt(params.sigma_eps2), size=shape)
    phase = np.zeros((n,) if n_traces is None else (n_traces, n))
    np.cumsum(increments, axis=-1, out=phase[..., 1:])
    return phase


def lorentzian_psd(f, beta: float):
    """
    Lorentzian line shape (β/π)/(β² + f²), unit area, half-width β.

    Raises:
        ValueError: If beta is not positive.
    """
    if beta <= 0:
        raise ValueError(f"Lorentzian needs beta > 0, got {beta}")
    f_arr = np.asarray(f, dtype=float)
    out = (beta / math.pi) / (beta * beta + f_arr * f_arr)
    return float(out) if np.ndim(f) == 0 else out


def _spread_spectrum(x: float, b: float) -> float:
    """
    Flat unit-power band of unit width convolved with a Lorentzian of
    half-width b; frequency x in units of the band width.
    """
    return (math.atan((x + 0.5) / b) - math.atan((x - 0.5) / b)) / math.pi


def _integrate_band(lo: float, hi: float, b: float) -> float:
    """Power of the spread spectrum falling in [lo, hi] (band-width units)."""
    points = [p for p in (0.5, -0.5) if lo < p < hi]
    points += [lo + b * c for c in (1.0, 10.0, 100.0) if lo + b * c < hi]
    value, abserr, info, *message = integrate.quad(
        _spread_spectrum,
        lo,
        hi,
        args=(b,),
        points=sorted(points) or None,
        epsabs=QUAD_TOLERANCE / 100,
        epsrel=1e-10,
        limit=400,
        full_output=1,
    )
    if abserr > QUAD_TOLERANCE:
        raise SimulationError(
            f"ICI quadrature did not converge (abserr={abserr:.3g}, b={b:.3g})"
            + (f": {message[0]}" if message else "")
        )
    return value


def ici_coeff_analytic(beta: float, grid: CarrierGrid, offset: int = 1) -> float:
    """
    Fraction of a carrier's power leaking into the signal band of the
    carrier ``offset`` positions away, under Lorentzian spreading.

    Args:
        beta: LO 3-dB half-width, Hz.
        grid: Carrier grid.
        offset: Carrier distance in grid positions.

    Returns:
        A in [0, 1]; exactly 0 when beta is 0.

    Raises:
        SimulationError: If adaptive quadrature does not converge.
    """
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    if offset < 1:
        raise ValueError(f"offset must be >= 1, got {offset}")
    if beta == 0:
        return 0.0
    delta = offset * grid.W_ch / grid.W_sb
    b = beta / grid.W_sb
    value = _integrate_band(delta - 0.5, delta + 0.5, b)
    return min(max(value, 0.0), 1.0)


def ici_total_leakage_analytic(beta: float, grid: CarrierGrid) -> float:
    """Fraction of a carrier's power spread outside its own signal band."""
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    if beta == 0:
        return 0.0
    in_band = _integrate_band(-0.5, 0.5, beta / grid.W_sb)
    return min(max(1.0 - in_band, 0.0), 1.0)


def _band_mask(freqs: np.ndarray, grid: CarrierGrid, pos: int) -> np.ndarray:
    lo = grid.band_lo[pos] - grid.f_c
    hi = grid.band_hi[pos] - grid.f_c
    return (freqs >= lo) & (freqs < hi)


def _oracle_realization(
    index: int,
    params: PhaseNoiseParams,
    source_mask: np.ndarray,
    n_samples: int,
    fs: float,
    seed: int,
) -> np.ndarray:
    """Hann-windowed periodogram of one phase-rotated source realization."""
    rng = realization_stream(seed, index)
    spectrum = np.zeros(n_samples, dtype=complex)
    n_bins = int(source_mask.sum())
    spectrum[source_mask] = np.exp(2j * math.pi * rng.random(n_bins))
    x = np.fft.ifft(spectrum)
    x /= math.sqrt(np.mean(np.abs(x) ** 2))

    phi = wiener_trace(n_samples, params, rng)
    y = x * np.exp(1j * phi)
    _, pxx = signal.periodogram(
        y,
        fs=fs,
        window="hann",
        detrend=False,
        return_onesided=False,
        scaling="density",
    )
    return pxx


def measure_leakage(
    beta: float,
    grid: CarrierGrid,
    n_samples: int,
    n_avg: int,
    seed: int,
    workers: int = 1,
) -> LeakageMeasurement:
    """
    Time-domain ICI oracle.

    Synthesizes a unit-power flat-spectrum signal filling the band of
    carrier 1, applies exp(jφ(n)) at sample rate W = K·W_ch, averages
    Hann-windowed periodograms over ``n_avg`` independently seeded
    realizations and reports the power fractions landing in the
    neighbouring bands.

    Raises:
        ValueError: If n_samples is not a power of two >= 2**14.
        SimulationError: If the bin width exceeds W_gb / 4.
    """
    if n_samples < MIN_ORACLE_SAMPLES or n_samples & (n_samples - 1):
        raise ValueError(f"n_samples must be a power of two >= {MIN_ORACLE_SAMPLES}")
    if n_avg < 1:
        raise ValueError(f"n_avg must be >= 1, got {n_avg}")

    fs = grid.K * grid.W_ch
    bin_width = fs / n_samples
    if bin_width > grid.W_gb / 4:
        raise SimulationError(
            f"spectral resolution {bin_width:.4g} Hz coarser than W_gb/4 = "
            f"{grid.W_gb / 4:.4g} Hz; need n_samples >= {4 * fs / grid.W_gb:.0f}"
        )

    params = PhaseNoiseParams(beta=beta, W=fs)
    freqs = np.fft.fftfreq(n_samples, d=1.0 / fs)
    source_pos = grid.position(1)
    source_mask = _band_mask(freqs, grid, source_pos)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        spectra = list(
            pool.map(
                lambda i: _oracle_realization(i, params, source_mask, n_samples, fs, seed),
                range(n_avg),
            )
        )
    # Fixed-order reduction keeps the result independent of worker count
    pxx = np.sum(np.stack(spectra), axis=0)
    total = pxx.sum()

    def fraction_at(offset: int) -> float:
        positions = [p for p in (source_pos - offset, source_pos + offset) if 0 <= p < grid.K]
        if not positions:
            return 0.0
        return float(np.mean([pxx[_band_mask(freqs, grid, p)].sum() / total for p in positions]))

    own = pxx[source_mask].sum() / total
    measurement = LeakageMeasurement(
        beta=beta,
        adjacent=fraction_at(1),
        second_neighbor=fraction_at(2),
        out_of_band=float(max(0.0, 1.0 - own)),
        n_samples=n_samples,
        n_avg=n_avg,
    )
    logger.debug(f"Leakage oracle beta={beta:.4g} Hz: {measurement}")
    return measurement


def ici_coeff_empirical(
    beta: float,
    grid: CarrierGrid,
    n_samples: int,
    n_avg: int,
    seed: int,
    workers: int = 1,
) -> float:
    """
    Adjacent-band leakage measured by the time-domain oracle.

    ``seed`` keys one independent substream per realization.
    """
    return measure_leakage(beta, grid, n_samples, n_avg, seed, workers).adjacent


def _neighbor_power(config: SystemConfig, grid: CarrierGrid, j: int) -> float:
    if config.P_adj is not None:
        return config.P_adj
    return config.P[grid.position(j)]


def conditional_ici_variance(
    real: ChannelRealization,
    k: int,
    A: IciCoefficients,
    config: SystemConfig,
    grid: Optional[CarrierGrid] = None,
) -> float:
    """
    ICI variance on carrier k given one channel realization:
    θ_{k−1}A_{k−1}|h_{k−1}|²P_{k−1} + θ_{k+1}A_{k+1}|h_{k+1}|²P_{k+1}.
    """
    grid = grid or build_grid(config)
    total = 0.0
    for j in adjacent_indices(grid, k):
        if j is None or not neighbor_indicator(grid, j):
            continue
        total += A.get(j, k) * real.h2_of(j) * _neighbor_power(config, grid, j)
    return total


class IciService:
    """
    Resolves the ICI coefficients a configuration asks for.

    Coefficients are cached per (model, β, grid) because sweeps revisit
    the same β for every power level, distance and jitter value.
    """

    def __init__(self):
        self._cache: LRUCache = LRUCache(maxsize=get_settings().ici_cache_size)
        self._lock = threading.Lock()

    def _leakage_value(self, model: str, beta: float, grid: CarrierGrid, seed: int) -> float:
        if model == "adjacent":
            return ici_coeff_analytic(beta, grid)
        if model == "total_leakage":
            return ici_total_leakage_analytic(beta, grid)
        if model == "empirical":
            ratio = beta / grid.W_ch
            if beta > 0 and not VALIDATED_BETA_RANGE[0] <= ratio <= VALIDATED_BETA_RANGE[1]:
                logger.warning(
                    f"Empirical ICI at beta/W_ch={ratio:.3g} is outside the validated "
                    f"range {VALIDATED_BETA_RANGE}; reporting the oracle value as is"
                )
            if beta == 0:
                return 0.0
            settings = get_settings()
            return ici_coeff_empirical(
                beta,
                grid,
                settings.empirical_samples,
                settings.empirical_averages,
                seed,
                settings.worker_count,
            )
        raise ValueError(f"unknown ICI model: {model}")

    def coefficient(self, config: SystemConfig, grid: CarrierGrid) -> float:
        """Adjacent-pair coefficient for a uniform grid."""
        if config.ici_override is not None:
            return config.ici_override
        key: Tuple = (config.ici_model, config.beta, grid.K, grid.W_sb, grid.W_gb)
        if config.ici_model == "empirical":
            key += (config.seed,)

        with self._lock:
            if key in self._cache:
                logger.debug(f"ICI cache hit: {key}")
                return self._cache[key]

        value = self._leakage_value(config.ici_model, config.beta, grid, config.seed)

        with self._lock:
            self._cache[key] = value
        logger.info(f"ICI coefficient ({config.ici_model}, beta={config.beta:.4g} Hz) = {value:.6g}")
        return value

    def coefficients(self, config: SystemConfig, grid: CarrierGrid) -> IciCoefficients:
        return IciCoefficients.uniform(grid, self.coefficient(config, grid))

    def clear(self) -> None:
        """Drop every cached coefficient and resize to the current settings."""
        with self._lock:
            self._cache = LRUCache(maxsize=get_settings().ici_cache_size)
        logger.info("Cleared ICI coefficient cache")


# Global service instance
ici_service = IciService()
