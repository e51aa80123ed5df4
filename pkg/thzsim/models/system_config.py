"""
Experiment configuration models.

``ConfigDocument`` is the JSON document a user writes: units live in key
names and gains/powers are in dB. ``SystemConfig`` is the resolved,
frozen, linear-unit parameterization every service consumes.
"""

import re
from typing import Annotated, Any, List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    field_validator,
    model_validator,
)

RESOLVED_FORMAT = "resolved-v1"

# Relative tolerance for W = K·(W_sb + W_gb)
BANDWIDTH_RTOL = 1e-9

_DB_PATTERN = re.compile(
    r"^\s*(?P<value>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(?P<unit>dBi|dB)?\s*$"
)


def _db_parser(unit: str):
    """Build a validator accepting ``55``, ``"55"`` or ``"55 dBi"``."""

    def parse(value: Any) -> Any:
        if not isinstance(value, str):
            return value
        match = _DB_PATTERN.match(value)
        if not match:
            raise ValueError(f"expected a number optionally suffixed with '{unit}'")
        if match.group("unit") not in (None, unit):
            raise ValueError(f"unit must be '{unit}', got '{match.group('unit')}'")
        return float(match.group("value"))

    return parse


GainDbi = Annotated[float, BeforeValidator(_db_parser("dBi"))]
PowerDb = Annotated[float, BeforeValidator(_db_parser("dB"))]

IciModel = Literal["adjacent", "empirical", "total_leakage"]
ThresholdMode = Literal["paper", "shannon"]


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio in dB to linear units."""
    return 10.0 ** (value_db / 10.0)


class AbsorptionProvider(BaseModel):
    """
    Molecular absorption coefficient source.

    Either a constant κ or a table of (frequency Hz, κ 1/m) rows with
    strictly increasing frequencies. In the config document a table may be
    referenced by ``path`` (CSV); resolution inlines the rows.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant", "table"]
    kappa_per_m: Optional[NonNegativeFloat] = None
    rows: Optional[Tuple[Tuple[float, float], ...]] = None
    path: Optional[str] = None

    @model_validator(mode="after")
    def _check_source(self) -> "AbsorptionProvider":
        if self.kind == "constant":
            if self.kappa_per_m is None:
                raise ValueError("constant absorption requires kappa_per_m")
            if self.rows is not None or self.path is not None:
                raise ValueError("constant absorption takes no rows or path")
            return self

        if self.kappa_per_m is not None:
            raise ValueError("table absorption takes no kappa_per_m")
        if self.rows is None:
            if self.path is None:
                raise ValueError("table absorption requires rows or path")
            return self
        if len(self.rows) < 2:
            raise ValueError("absorption table needs at least 2 rows")
        freqs = [f for f, _ in self.rows]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("absorption table frequencies must be strictly increasing")
        if any(kappa < 0 for _, kappa in self.rows):
            raise ValueError("absorption table contains negative kappa")
        return self

    @property
    def is_resolved(self) -> bool:
        """A table provider is usable only once its rows are loaded."""
        return self.kind == "constant" or self.rows is not None


class SystemConfig(BaseModel):
    """
    Resolved experiment parameterization, all quantities linear.

    Powers are normalized to the noise power reference; ``N_o`` defaults
    to 1.0. Instances are immutable and safe to share across workers.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    format: Literal["resolved-v1"] = RESOLVED_FORMAT

    # Carrier grid
    K: int
    W: PositiveFloat
    W_sb: PositiveFloat
    W_gb: PositiveFloat
    f_c: PositiveFloat

    # Link geometry and budget
    d: PositiveFloat
    G_t: PositiveFloat
    G_r: PositiveFloat
    P: Tuple[PositiveFloat, ...]
    P_adj: Optional[NonNegativeFloat] = None
    N_o: PositiveFloat = 1.0
    kappa_source: AbsorptionProvider

    # Fading and misalignment
    m: float = Field(ge=0.5)
    Omega: PositiveFloat = 1.0
    sigma_s: NonNegativeFloat
    a: PositiveFloat
    w_d: PositiveFloat
    shared_misalignment: bool = True
    shared_fading: bool = False

    # Phase noise
    beta: NonNegativeFloat
    ici_model: IciModel = "adjacent"
    ici_override: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    # Outage and Monte Carlo
    r: PositiveFloat
    threshold_mode: ThresholdMode = "paper"
    n_trials: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    report_carrier: int = 1

    @model_validator(mode="after")
    def _check_invariants(self) -> "SystemConfig":
        if self.K < 2 or self.K % 2:
            raise ValueError(f"K must be even and >= 2, got {self.K}")
        expected_w = self.K * (self.W_sb + self.W_gb)
        if abs(self.W - expected_w) > BANDWIDTH_RTOL * expected_w:
            raise ValueError(
                f"W={self.W} inconsistent with K*(W_sb+W_gb)={expected_w}"
            )
        if len(self.P) != self.K:
            raise ValueError(f"P must have exactly K={self.K} entries, got {len(self.P)}")
        if not self.kappa_source.is_resolved:
            raise ValueError("kappa_source table rows are not loaded")
        if self.report_carrier == 0 or abs(self.report_carrier) > self.K // 2:
            raise ValueError(f"report_carrier {self.report_carrier} is not a carrier index")
        return self

    @property
    def W_ch(self) -> float:
        """Per-carrier bandwidth, signal plus guard."""
        return self.W_sb + self.W_gb

    def with_updates(self, **changes: Any) -> "SystemConfig":
        """Return a re-validated copy with some fields replaced."""
        data = self.model_dump()
        data.update(changes)
        return SystemConfig.model_validate(data)


class ConfigDocument(BaseModel):
    """
    User-facing JSON document. Units are carried in key names; gains are
    in dBi and powers in dB over the noise power.
    """

    model_config = ConfigDict(extra="forbid")

    K: int
    f_c_hz: PositiveFloat
    W_sb_hz: PositiveFloat
    W_gb_hz: PositiveFloat
    W_hz: Optional[PositiveFloat] = None

    d_m: PositiveFloat
    G_t_dbi: GainDbi
    G_r_dbi: GainDbi
    P_db: Union[PowerDb, List[PowerDb]]
    P_adj_db: Optional[PowerDb] = None
    N_o_db: PowerDb = 0.0
    absorption: AbsorptionProvider = AbsorptionProvider(kind="constant", kappa_per_m=0.0)

    m: float
    Omega: float = 1.0
    sigma_s_m: float
    a_m: float
    w_d_m: float
    shared_misalignment: bool = True
    shared_fading: bool = False

    beta_hz: float
    ici_model: IciModel = "adjacent"
    ici_override: Optional[float] = None

    r: float
    threshold_mode: ThresholdMode = "paper"
    n_trials: int = 100_000
    seed: int
    report_carrier: int = 1

    @field_validator("K")
    @classmethod
    def _check_k(cls, value: int) -> int:
        if value < 2 or value % 2:
            raise ValueError(f"K must be even and >= 2, got {value}")
        return value


# Resolved field → document key, for error pointers
DOCUMENT_KEYS = {
    "K": "K",
    "W": "W_hz",
    "W_sb": "W_sb_hz",
    "W_gb": "W_gb_hz",
    "f_c": "f_c_hz",
    "d": "d_m",
    "G_t": "G_t_dbi",
    "G_r": "G_r_dbi",
    "P": "P_db",
    "P_adj": "P_adj_db",
    "N_o": "N_o_db",
    "kappa_source": "absorption",
    "m": "m",
    "Omega": "Omega",
    "sigma_s": "sigma_s_m",
    "a": "a_m",
    "w_d": "w_d_m",
    "beta": "beta_hz",
    "r": "r",
    "n_trials": "n_trials",
    "seed": "seed",
}
