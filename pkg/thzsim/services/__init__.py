"""Service modules for thzsim."""

from thzsim.services.config_service import validate_config
from thzsim.services.experiment_service import PRESETS, get_preset, run_preset
from thzsim.services.phase_noise import IciService, ici_service

__all__ = [
    "validate_config",
    "PRESETS",
    "get_preset",
    "run_preset",
    "IciService",
    "ici_service",
]
