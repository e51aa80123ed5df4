"""Channel, impairment and estimate models."""

import math
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from thzsim.models.carrier_grid import CarrierGrid


class DeterministicGain(BaseModel):
    """Deterministic path-gain amplitude h_l = h_fl · h_al."""

    model_config = ConfigDict(frozen=True)

    h_fl: float = Field(gt=0)
    h_al: float = Field(gt=0, le=1)

    @property
    def h_l(self) -> float:
        return self.h_fl * self.h_al


class BeamGeometry(BaseModel):
    """
    Pointing-error parameters derived from aperture, footprint and jitter.

    Attributes:
        a: Receive-aperture radius, m.
        w_d: Beam footprint radius at the receiver, m.
        sigma_s: Radial jitter standard deviation, m.
        v: sqrt(pi)·a / (sqrt(2)·w_d).
        A0: Collected power fraction at zero offset.
        w_eq: Equivalent beamwidth, m.
        gamma_ratio: w_eq / (2·sigma_s); inf when sigma_s is 0.
    """

    model_config = ConfigDict(frozen=True)

    a: float
    w_d: float
    sigma_s: float
    v: float
    A0: float
    w_eq: float
    gamma_ratio: float

    @property
    def gamma2(self) -> float:
        return self.gamma_ratio**2


class NakagamiParams(BaseModel):
    """Nakagami-m shape and spread."""

    model_config = ConfigDict(frozen=True)

    m: float = Field(ge=0.5)
    Omega: float = Field(default=1.0, gt=0)


class PhaseNoiseParams(BaseModel):
    """Free-running LO phase-noise parameters; ``W`` is the sample rate."""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(ge=0)
    W: float = Field(gt=0)

    @property
    def sigma_eps2(self) -> float:
        """Per-sample Wiener increment variance, rad²."""
        return 4.0 * math.pi * self.beta / self.W


class IciCoefficients(BaseModel):
    """
    Leaked power fractions per ordered (source, victim) carrier pair.
    Missing pairs leak nothing.
    """

    model_config = ConfigDict(frozen=True)

    pairs: Dict[Tuple[int, int], float]

    @model_validator(mode="after")
    def _check_range(self) -> "IciCoefficients":
        for pair, value in self.pairs.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"ICI coefficient {value} for {pair} outside [0, 1]")
        return self

    @classmethod
    def uniform(cls, grid: CarrierGrid, value: float) -> "IciCoefficients":
        """Same coefficient for every adjacent pair, both directions."""
        pairs: Dict[Tuple[int, int], float] = {}
        for lower, upper in zip(grid.indices, grid.indices[1:]):
            pairs[(lower, upper)] = value
            pairs[(upper, lower)] = value
        return cls(pairs=pairs)

    def get(self, source: int, victim: int) -> float:
        return self.pairs.get((source, victim), 0.0)

    def victim_arrays(self, grid: CarrierGrid) -> Tuple[np.ndarray, np.ndarray]:
        """
        Per-victim coefficients in grid order.

        Returns:
            (from_lower, from_upper): leakage into each carrier from its
            lower and upper frequency neighbour; 0 where none exists.
        """
        idx = grid.indices
        from_lower = np.zeros(len(idx))
        from_upper = np.zeros(len(idx))
        for pos, k in enumerate(idx):
            if pos > 0:
                from_lower[pos] = self.get(idx[pos - 1], k)
            if pos < len(idx) - 1:
                from_upper[pos] = self.get(idx[pos + 1], k)
        return from_lower, from_upper


class LeakageMeasurement(BaseModel):
    """Power fractions measured by the time-domain ICI oracle."""

    model_config = ConfigDict(frozen=True)

    beta: float
    adjacent: float
    second_neighbor: float
    out_of_band: float
    n_samples: int
    n_avg: int


class ChannelRealization(BaseModel):
    """One Monte Carlo draw of the channel, per carrier in grid order."""

    model_config = ConfigDict(frozen=True)

    indices: Tuple[int, ...]
    h_l: Tuple[float, ...]
    h_p: Tuple[float, ...]
    h_f_mag: Tuple[float, ...]

    @property
    def h2(self) -> Tuple[float, ...]:
        """Composite power gain |h_k|²."""
        return tuple(
            (l * p * f) ** 2 for l, p, f in zip(self.h_l, self.h_p, self.h_f_mag)
        )

    def h2_of(self, k: int) -> float:
        pos = self.indices.index(k)
        return (self.h_l[pos] * self.h_p[pos] * self.h_f_mag[pos]) ** 2


class MetricEstimate(BaseModel):
    """
    Monte Carlo estimate with a 95% confidence interval.

    ``lower``/``upper`` are the reported interval bounds, clipped to
    [0, 1] for probabilities.
    """

    model_config = ConfigDict(frozen=True)

    value: float
    n: int
    half_width: float = Field(ge=0)
    seed: int
    lower: float
    upper: float
    warning: Optional[str] = None
