"""Pydantic models for thzsim."""

from thzsim.models.carrier_grid import CarrierGrid
from thzsim.models.channel import (
    BeamGeometry,
    ChannelRealization,
    DeterministicGain,
    IciCoefficients,
    LeakageMeasurement,
    MetricEstimate,
    NakagamiParams,
    PhaseNoiseParams,
)
from thzsim.models.preset import ExperimentPreset, SweepAxis
from thzsim.models.system_config import AbsorptionProvider, ConfigDocument, SystemConfig

__all__ = [
    "AbsorptionProvider",
    "ConfigDocument",
    "SystemConfig",
    "CarrierGrid",
    "DeterministicGain",
    "BeamGeometry",
    "NakagamiParams",
    "PhaseNoiseParams",
    "IciCoefficients",
    "LeakageMeasurement",
    "ChannelRealization",
    "MetricEstimate",
    "ExperimentPreset",
    "SweepAxis",
]
