"""Experiment preset models."""

from typing import Any, Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

PresetName = Literal["fig1", "fig2", "fig3", "fig4", "custom"]
Metric = Literal["average_sinr", "outage", "both"]


class SweepAxis(BaseModel):
    """
    One swept parameter.

    Attributes:
        field: ``SystemConfig`` field being swept, or ``gamma_th`` for
            the outage threshold (evaluated on shared ρ samples).
        column: CSV column the value is written to.
        values: Sweep values in config units (linear or SI).
        column_values: Values as written to the CSV, when they differ
            from ``values`` (dB columns).
    """

    model_config = ConfigDict(frozen=True)

    field: str
    column: str
    values: Tuple[float, ...] = Field(min_length=1)
    column_values: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_monotone(self) -> "SweepAxis":
        steps = [b - a for a, b in zip(self.values, self.values[1:])]
        if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
            raise ValueError(f"sweep values for {self.field} must be strictly monotone")
        if self.column_values is not None and len(self.column_values) != len(self.values):
            raise ValueError(f"column_values for {self.field} must match values")
        return self

    def written(self, i: int) -> float:
        return self.column_values[i] if self.column_values is not None else self.values[i]


class ExperimentPreset(BaseModel):
    """
    A named experiment: which parameters are swept, which are pinned,
    and what is written out.

    Attributes:
        name: Preset name.
        metric: Quantity estimated at every sweep point.
        axes: Swept parameters, outermost first. Rows are emitted in
            nested-loop order.
        per_carrier: Emit one row per carrier (x-axis f_k) instead of
            one row for ``report_carrier``.
        locked: Constants a figure fixes; applied unless the run keeps
            the config's own values.
        assumptions: Values a figure leaves unstated; recorded in the
            manifest and applied the same way as ``locked``.
        columns: CSV header.
        output_name: CSV file name inside the output directory.
    """

    model_config = ConfigDict(frozen=True)

    name: PresetName
    metric: Metric
    axes: Tuple[SweepAxis, ...] = ()
    per_carrier: bool = True
    locked: Dict[str, Any] = Field(default_factory=dict)
    assumptions: Dict[str, Any] = Field(default_factory=dict)
    columns: Tuple[str, ...]
    output_name: str

    @property
    def n_points(self) -> int:
        n = 1
        for axis in self.axes:
            n *= len(axis.values)
        return n
