"""
Monte Carlo engine: channel draws, instantaneous SINR, average SINR and
outage probability estimates, and a quadrature oracle for the
phase-noise-free outage probability.

Trials are split into fixed-size blocks; block b always draws from the
substream keyed by (seed, b), so results do not depend on the worker
count. Every sweep point of an experiment reuses the same standard
variates (common random numbers): only the deterministic maps from those
variates to h_p, |h_f| and ρ change with the parameters.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from thzsim.config import get_settings
from thzsim.errors import SimulationError
from thzsim.models.carrier_grid import CarrierGrid
from thzsim.models.channel import (
    BeamGeometry,
    ChannelRealization,
    IciCoefficients,
    MetricEstimate,
    NakagamiParams,
)
from thzsim.models.system_config import SystemConfig
from thzsim.services.fading import amplitude_from_standard_gamma, cdf_nakagami
from thzsim.services.grid_service import build_grid, threshold_from_rate
from thzsim.services.misalignment import derive_beam, hp_from_uniform
from thzsim.services.path_gain import grid_path_gains
from thzsim.services.phase_noise import conditional_ici_variance, ici_service
from thzsim.services.random_streams import block_stream, partition

logger = logging.getLogger(__name__)

Z_95 = 1.959963984540054
MIN_AVERAGE_TRIALS = 1_000
MIN_EXPECTED_FAILURES = 100
WILSON_FAILURE_LIMIT = 1_000
ESCALATION_THRESHOLD = 1e-3
QUAD_TOLERANCE = 1e-6


@dataclass(frozen=True)
class StandardVariates:
    """
    Parameter-free random inputs of a block of trials.

    Attributes:
        u_radial: Uniforms on (0, 1] driving the Rayleigh radial offset,
            shape (n, 1) when misalignment is shared across carriers else (n, K).
        g_fading: Unit-scale Gamma(m) variates, shape (n, K), or (n, 1) when shared.
    """

    u_radial: np.ndarray
    g_fading: np.ndarray


@dataclass(frozen=True)
class ChannelBatch:
    """Channel coefficients of a block of trials, broadcastable to (n, K)."""

    h_l: np.ndarray
    h_p: np.ndarray
    h_f_mag: np.ndarray

    @property
    def h2(self) -> np.ndarray:
        return (self.h_l * self.h_p * self.h_f_mag) ** 2


@dataclass(frozen=True)
class SinrSamples:
    """ρ samples, one row per trial, one column per carrier in grid order."""

    rho: np.ndarray
    indices: Tuple[int, ...]
    seed: int

    @property
    def n(self) -> int:
        return self.rho.shape[0]

    def column(self, k: int) -> np.ndarray:
        return self.rho[:, self.indices.index(k)]


def draw_variates(config: SystemConfig, n: int, rng: np.random.Generator) -> StandardVariates:
    """Draw the standard variates of ``n`` trials; the draw order is fixed."""
    radial_cols = 1 if config.shared_misalignment else config.K
    fading_cols = 1 if config.shared_fading else config.K
    u_radial = 1.0 - rng.random((n, radial_cols))
    g_fading = rng.standard_gamma(config.m, (n, fading_cols))
    return StandardVariates(u_radial=u_radial, g_fading=g_fading)


def compose_channel(
    config: SystemConfig,
    variates: StandardVariates,
    h_l: np.ndarray,
    geom: BeamGeometry,
) -> ChannelBatch:
    """Map standard variates to h_p and |h_f| for the given parameters."""
    nakagami = NakagamiParams(m=config.m, Omega=config.Omega)
    return ChannelBatch(
        h_l=h_l,
        h_p=hp_from_uniform(variates.u_radial, geom),
        h_f_mag=amplitude_from_standard_gamma(variates.g_fading, nakagami),
    )


def neighbor_powers(config: SystemConfig) -> np.ndarray:
    """Power each carrier radiates as seen by its neighbours' ICI terms."""
    if config.P_adj is not None:
        return np.full(config.K, config.P_adj)
    return np.asarray(config.P, dtype=float)


def sinr_from_h2(
    h2: np.ndarray,
    config: SystemConfig,
    grid: CarrierGrid,
    A: IciCoefficients,
) -> np.ndarray:
    """
    ρ = |h_k|²P_k / (σ_ψ² + N_o) for a block of trials.

    Args:
        h2: Composite power gains, shape (n, K) in grid order.
        config: Resolved configuration.
        grid: Carrier grid.
        A: ICI coefficients.
    """
    from_lower, from_upper = A.victim_arrays(grid)
    p_nb = neighbor_powers(config)
    interference = np.zeros_like(h2)
    interference[:, 1:] += from_lower[1:] * h2[:, :-1] * p_nb[:-1]
    interference[:, :-1] += from_upper[:-1] * h2[:, 1:] * p_nb[1:]
    return h2 * np.asarray(config.P) / (interference + config.N_o)


def draw_realization(
    config: SystemConfig,
    grid: CarrierGrid,
    rng: np.random.Generator,
) -> ChannelRealization:
    """
    One channel draw: a shared h_p (unless configured per carrier),
    independent per-carrier |h_f|, deterministic h_l per carrier frequency.
    """
    variates = draw_variates(config, 1, rng)
    batch = compose_channel(
        config, variates, grid_path_gains(config, grid), derive_beam(config.a, config.w_d, config.sigma_s)
    )
    K = grid.K
    return ChannelRealization(
        indices=grid.indices,
        h_l=tuple(float(v) for v in np.broadcast_to(batch.h_l, (K,))),
        h_p=tuple(float(v) for v in np.broadcast_to(batch.h_p[0], (K,))),
        h_f_mag=tuple(float(v) for v in np.broadcast_to(batch.h_f_mag[0], (K,))),
    )


def instantaneous_sinr(
    real: ChannelRealization,
    k: int,
    A: IciCoefficients,
    config: SystemConfig,
    grid: Optional[CarrierGrid] = None,
) -> float:
    """ρ on carrier k for one realization."""
    grid = grid or build_grid(config)
    sigma_psi2 = conditional_ici_variance(real, k, A, config, grid)
    return real.h2_of(k) * config.P[grid.position(k)] / (sigma_psi2 + config.N_o)


def simulate_sinr(
    config: SystemConfig,
    grid: Optional[CarrierGrid] = None,
    A: Optional[IciCoefficients] = None,
    workers: Optional[int] = None,
) -> SinrSamples:
    """
    Draw ``config.n_trials`` ρ samples on every carrier.

    Args:
        config: Resolved configuration.
        grid: Carrier grid; built from config when omitted.
        A: ICI coefficients; resolved through the ICI service when omitted.
        workers: Worker threads; defaults to the process settings.
    """
    settings = get_settings()
    grid = grid or build_grid(config)
    A = A if A is not None else ici_service.coefficients(config, grid)
    h_l = grid_path_gains(config, grid)
    geom = derive_beam(config.a, config.w_d, config.sigma_s)
    n_workers = workers or settings.worker_count

    def run_block(block: Tuple[int, int]) -> np.ndarray:
        index, length = block
        variates = draw_variates(config, length, block_stream(config.seed, index))
        return sinr_from_h2(compose_channel(config, variates, h_l, geom).h2, config, grid, A)

    blocks = list(partition(config.n_trials, settings.block_size))
    with ThreadPoolExecutor(max_workers=max(1, n_workers)) as pool:
        parts = list(pool.map(run_block, blocks))

    return SinrSamples(rho=np.concatenate(parts), indices=grid.indices, seed=config.seed)


def mean_estimate(values: np.ndarray, seed: int) -> MetricEstimate:
    """Sample mean with a 95% normal-approximation interval."""
    n = values.size
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    half = Z_95 * std / math.sqrt(n)
    return MetricEstimate(
        value=mean, n=n, half_width=half, seed=seed, lower=mean - half, upper=mean + half
    )


def proportion_estimate(failures: int, n: int, seed: int) -> MetricEstimate:
    """
    Outage fraction with a 95% interval: Wilson score below 1000 failures,
    normal approximation otherwise. Bounds are clipped to [0, 1].
    """
    p = failures / n
    if failures < WILSON_FAILURE_LIMIT:
        z2 = Z_95**2
        denom = 1.0 + z2 / n
        center = (p + z2 / (2 * n)) / denom
        spread = Z_95 * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
        lower, upper = center - spread, center + spread
        half = spread
    else:
        half = Z_95 * math.sqrt(p * (1 - p) / n)
        lower, upper = p - half, p + half

    warning = None
    if failures < MIN_EXPECTED_FAILURES:
        warning = f"only {failures} outage events in {n} trials; relative precision is low"
    return MetricEstimate(
        value=p,
        n=n,
        half_width=half,
        seed=seed,
        lower=max(0.0, lower),
        upper=min(1.0, upper),
        warning=warning,
    )


def average_sinr(samples: SinrSamples) -> Dict[int, MetricEstimate]:
    """Per-carrier mean of linear ρ."""
    return {k: mean_estimate(samples.column(k), samples.seed) for k in samples.indices}


def mean_of_db(samples: SinrSamples) -> Dict[int, float]:
    """Per-carrier mean of 10·log10(ρ), reported alongside the linear mean."""
    with np.errstate(divide="ignore"):
        return {k: float(np.mean(10.0 * np.log10(samples.column(k)))) for k in samples.indices}


def outage(samples: SinrSamples, gamma_th: float) -> Dict[int, MetricEstimate]:
    """Per-carrier fraction of trials with ρ < γ_th."""
    if gamma_th <= 0:
        raise ValueError(f"gamma_th must be positive, got {gamma_th}")
    return {
        k: proportion_estimate(int(np.count_nonzero(samples.column(k) < gamma_th)), samples.n, samples.seed)
        for k in samples.indices
    }


def outage_curve(samples: SinrSamples, thresholds: Sequence[float], k: int) -> List[MetricEstimate]:
    """OP of carrier k over a threshold grid, all from the same ρ samples."""
    rho = np.sort(samples.column(k))
    counts = np.searchsorted(rho, np.asarray(thresholds, dtype=float), side="left")
    return [proportion_estimate(int(c), samples.n, samples.seed) for c in counts]


def escalation_target(config: SystemConfig, estimates: Iterable[MetricEstimate]) -> Optional[int]:
    """
    Trial count to re-run at when the smallest OP estimate is below 1e-3,
    or None when the run already has enough trials.
    """
    target = get_settings().escalation_trials
    if config.n_trials >= target or min(e.value for e in estimates) >= ESCALATION_THRESHOLD:
        return None
    logger.info(f"OP below {ESCALATION_THRESHOLD:g} at {config.n_trials} trials; escalating to {target}")
    return target


def run_average_sinr(config: SystemConfig, workers: Optional[int] = None) -> Dict[int, MetricEstimate]:
    """
    Monte Carlo average SINR per carrier.

    Raises:
        ValueError: If fewer than 1000 trials are configured.
    """
    if config.n_trials < MIN_AVERAGE_TRIALS:
        raise ValueError(f"average SINR needs n_trials >= {MIN_AVERAGE_TRIALS}")
    return average_sinr(simulate_sinr(config, workers=workers))


def run_outage(
    config: SystemConfig,
    gamma_th: Optional[float] = None,
    workers: Optional[int] = None,
    escalate: bool = True,
    samples: Optional[SinrSamples] = None,
) -> Dict[int, MetricEstimate]:
    """
    Monte Carlo outage probability per carrier.

    When any carrier's estimate falls below 1e-3 the run is repeated with
    the escalation trial count from settings.

    Args:
        config: Resolved configuration.
        gamma_th: Linear threshold; derived from ``config.r`` when omitted.
        workers: Worker threads.
        escalate: Allow the automatic re-run with more trials.
        samples: Already drawn ρ samples for this configuration.
    """
    if gamma_th is None:
        gamma_th = threshold_from_rate(config.r, config.threshold_mode)
    if samples is None:
        samples = simulate_sinr(config, workers=workers)
    estimates = outage(samples, gamma_th)

    target = escalation_target(config, estimates.values()) if escalate else None
    if target is not None:
        estimates = outage(simulate_sinr(config.with_updates(n_trials=target), workers=workers), gamma_th)
    return estimates


def semi_analytic_op_no_phn(config: SystemConfig, gamma_th: Optional[float] = None) -> Dict[int, float]:
    """
    Phase-noise-free OP per carrier by 1-D quadrature.

    With β = 0, ρ = (h_l h_p |h_f|)² P/N_o, so OP = Pr[h_p|h_f| < t] with
    t = sqrt(γ_th N_o / P)/h_l. Substituting the h_p CDF u = (x/A0)^{γ²}
    gives OP = ∫₀¹ F_|h_f|(t / (A0 u^{1/γ²})) du.

    Raises:
        ValueError: If the configuration has phase noise or forced ICI.
        SimulationError: If quadrature does not reach 1e-6.
    """
    if config.beta != 0:
        raise ValueError("semi-analytic OP requires beta = 0")
    if config.ici_override:
        raise ValueError("semi-analytic OP requires no forced ICI")
    if gamma_th is None:
        gamma_th = threshold_from_rate(config.r, config.threshold_mode)

    grid = build_grid(config)
    h_l = grid_path_gains(config, grid)
    geom = derive_beam(config.a, config.w_d, config.sigma_s)
    nakagami = NakagamiParams(m=config.m, Omega=config.Omega)

    result: Dict[int, float] = {}
    for pos, k in enumerate(grid.indices):
        t = math.sqrt(gamma_th * config.N_o / config.P[pos]) / h_l[pos]
        if config.sigma_s == 0:
            result[k] = float(cdf_nakagami(t / geom.A0, nakagami))
            continue

        inv_g2 = 1.0 / geom.gamma2

        def integrand(u: float) -> float:
            return float(cdf_nakagami(t / (geom.A0 * u**inv_g2), nakagami))

        value, abserr = integrate.quad(integrand, 0.0, 1.0, epsabs=QUAD_TOLERANCE / 10, limit=200)
        if abserr > QUAD_TOLERANCE:
            raise SimulationError(f"OP quadrature did not converge on carrier {k} (abserr={abserr:.3g})")
        result[k] = min(max(value, 0.0), 1.0)
    return result
