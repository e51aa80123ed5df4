"""
Experiment presets and the sweep runner.

Each preset pins the constants its figure states, fills in the values it
leaves out, sweeps one or more parameters with common random numbers and
writes a CSV plus a JSON run manifest.
"""

import csv
import hashlib
import io
import itertools
import json
import logging
import math
import os
import platform
import tempfile
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

import thzsim
from thzsim.config import get_settings
from thzsim.models.preset import ExperimentPreset, SweepAxis
from thzsim.models.system_config import SystemConfig, db_to_linear
from thzsim.services.config_service import config_to_dict
from thzsim.services.grid_service import build_grid, threshold_from_rate
from thzsim.services.mc_engine import (
    SinrSamples,
    average_sinr,
    escalation_target,
    mean_of_db,
    outage_curve,
    run_outage,
    simulate_sinr,
)

logger = logging.getLogger(__name__)

GAMMA_TH_FIELD = "gamma_th"
GRID_FIELDS = ("K", "W_sb", "W_gb")

# Stated in the system description for every figure
FIGURE_CONSTANTS: Dict[str, Any] = {
    "K": 10,
    "W_sb": 2.0e9,
    "W_gb": 0.5e6,
    "f_c": 335.0e9,
    "G_t": db_to_linear(55.0),
    "G_r": db_to_linear(55.0),
    "m": 4.0,
}

# Not stated anywhere; chosen so SINR sits in a readable range
FIGURE_ASSUMPTIONS: Dict[str, Any] = {
    "a": 0.05,
    "w_d": 0.1,
    "kappa_source": {"kind": "constant", "kappa_per_m": 0.002},
    "P": (db_to_linear(20.0),) * 10,
    "N_o": 1.0,
    "r": 1.0,
    "ici_model": "total_leakage",
    "ici_override": None,
}

BETA_GRID_HZ = (0.015e9, 0.15e9, 1.5e9, 3.0e9)
P_ADJ_GRID_DB = (5.0, 15.0, 25.0)
SIGMA_S_GRID_M = (0.01, 0.03, 0.05)
DISTANCE_GRID_M = (1.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 20.0, 25.0, 30.0)
GAMMA_TH_GRID_DB = tuple(float(x) for x in np.round(np.arange(-30.0, 30.1, 2.5), 10))


def _beta_axis() -> SweepAxis:
    return SweepAxis(field="beta", column="beta_hz", values=BETA_GRID_HZ)


def _p_adj_axis() -> SweepAxis:
    return SweepAxis(
        field="P_adj",
        column="p_adj_db",
        values=tuple(db_to_linear(p) for p in P_ADJ_GRID_DB),
        column_values=P_ADJ_GRID_DB,
    )


def _sigma_axis() -> SweepAxis:
    return SweepAxis(field="sigma_s", column="sigma_s_m", values=SIGMA_S_GRID_M)


PRESETS: Dict[str, ExperimentPreset] = {
    "fig1": ExperimentPreset(
        name="fig1",
        metric="average_sinr",
        axes=(_beta_axis(), _p_adj_axis()),
        locked={**FIGURE_CONSTANTS, "d": 10.0},
        assumptions={**FIGURE_ASSUMPTIONS, "sigma_s": 0.03},
        columns=("f_k_hz", "beta_hz", "p_adj_db", "mean_sinr_db", "ci_db", "mean_of_db"),
        output_name="fig1.csv",
    ),
    "fig2": ExperimentPreset(
        name="fig2",
        metric="outage",
        axes=(_beta_axis(), _p_adj_axis()),
        locked=dict(FIGURE_CONSTANTS),
        assumptions={**FIGURE_ASSUMPTIONS, "sigma_s": 0.03, "d": 10.0},
        columns=("f_k_hz", "beta_hz", "p_adj_db", "op", "ci", "n_trials"),
        output_name="fig2.csv",
    ),
    "fig3": ExperimentPreset(
        name="fig3",
        metric="average_sinr",
        axes=(_sigma_axis(), SweepAxis(field="d", column="d_m", values=DISTANCE_GRID_M)),
        per_carrier=False,
        locked={**FIGURE_CONSTANTS, "beta": 1.5e9, "P_adj": db_to_linear(5.0)},
        assumptions=dict(FIGURE_ASSUMPTIONS),
        columns=("d_m", "sigma_s_m", "mean_sinr_db", "ci_db", "mean_of_db"),
        output_name="fig3.csv",
    ),
    "fig4": ExperimentPreset(
        name="fig4",
        metric="outage",
        axes=(
            _sigma_axis(),
            SweepAxis(
                field=GAMMA_TH_FIELD,
                column="gamma_th_db",
                values=tuple(db_to_linear(g) for g in GAMMA_TH_GRID_DB),
                column_values=GAMMA_TH_GRID_DB,
            ),
        ),
        per_carrier=False,
        locked={**FIGURE_CONSTANTS, "beta": 1.5e9, "P_adj": db_to_linear(5.0), "d": 10.0},
        assumptions=dict(FIGURE_ASSUMPTIONS),
        columns=("gamma_th_db", "sigma_s_m", "op", "ci", "n_trials"),
        output_name="fig4.csv",
    ),
    "custom": ExperimentPreset(
        name="custom",
        metric="both",
        columns=("f_k_hz", "mean_sinr_db", "ci_db", "mean_of_db", "op", "ci", "n_trials"),
        output_name="custom.csv",
    ),
}


@dataclass(frozen=True)
class RunResult:
    """Artifacts of one preset run."""

    csv_path: Path
    manifest_path: Path
    n_rows: int
    sha256: str
    wall_time_s: float


def get_preset(name: str) -> ExperimentPreset:
    """
    Look up a preset by name.

    Raises:
        ValueError: If the name is unknown.
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown experiment '{name}', expected one of {sorted(PRESETS)}") from None


def _updated(config: SystemConfig, changes: Dict[str, Any]) -> SystemConfig:
    if not changes:
        return config
    changes = dict(changes)
    if any(f in changes for f in GRID_FIELDS):
        K = changes.get("K", config.K)
        changes["W"] = K * (changes.get("W_sb", config.W_sb) + changes.get("W_gb", config.W_gb))
    return config.with_updates(**changes)


def preset_config(
    preset: ExperimentPreset,
    config: SystemConfig,
    config_overrides: Optional[Dict[str, Any]] = None,
    keep_config_constants: bool = False,
) -> SystemConfig:
    """
    Base configuration of a preset run, before any sweep value is applied.

    Args:
        preset: The experiment.
        config: Resolved configuration from the user's file.
        config_overrides: Field values that always win (CLI seed, trials,
            threshold mode).
        keep_config_constants: Keep the config's values for the preset's
            locked constants and assumptions.
    """
    pinned = {**preset.assumptions, **preset.locked}
    if keep_config_constants and pinned:
        logger.warning(
            f"{preset.name}: keeping config values instead of the preset's fixed parameters "
            f"({', '.join(sorted(pinned))}); output will not match the figure setup"
        )
        base = config
    else:
        differing = sorted(k for k, v in preset.locked.items() if getattr(config, k) != v)
        if differing:
            logger.info(f"{preset.name}: preset fixes {', '.join(differing)} over the config values")
        base = _updated(config, pinned)
    return _updated(base, config_overrides or {})


def _format(value: float) -> str:
    return f"{value:.12g}"


def _sinr_fields(samples: SinrSamples, carriers: Sequence[int]) -> Dict[int, Dict[str, float]]:
    estimates = average_sinr(samples)
    of_db = mean_of_db(samples)
    out = {}
    for k in carriers:
        est = estimates[k]
        out[k] = {
            "mean_sinr_db": 10.0 * math.log10(est.value),
            "ci_db": 10.0 * math.log10(1.0 + est.half_width / est.value),
            "mean_of_db": of_db[k],
        }
    return out


def _sweep_rows(
    preset: ExperimentPreset,
    base: SystemConfig,
    workers: Optional[int],
) -> List[Dict[str, float]]:
    config_axes = [a for a in preset.axes if a.field != GAMMA_TH_FIELD]
    threshold_axis = next((a for a in preset.axes if a.field == GAMMA_TH_FIELD), None)
    gamma_th = threshold_from_rate(base.r, base.threshold_mode)

    grid = build_grid(base)
    carriers = grid.indices if preset.per_carrier else (base.report_carrier,)
    points = list(itertools.product(*(range(len(a.values)) for a in config_axes)))

    rows: List[Dict[str, float]] = []
    for n_done, point in enumerate(points, start=1):
        changes = {axis.field: axis.values[i] for axis, i in zip(config_axes, point)}
        labels = {axis.column: axis.written(i) for axis, i in zip(config_axes, point)}
        config = _updated(base, changes)
        samples = simulate_sinr(config, grid=grid, workers=workers)

        if threshold_axis is not None:
            curves = {k: outage_curve(samples, threshold_axis.values, k) for k in carriers}
            target = escalation_target(config, itertools.chain.from_iterable(curves.values()))
            if target is not None:
                samples = simulate_sinr(config.with_updates(n_trials=target), grid=grid, workers=workers)
                curves = {k: outage_curve(samples, threshold_axis.values, k) for k in carriers}
            for k in carriers:
                for i, est in enumerate(curves[k]):
                    rows.append({
                        **labels,
                        "f_k_hz": grid.center(k),
                        threshold_axis.column: threshold_axis.written(i),
                        "op": est.value,
                        "ci": est.half_width,
                        "n_trials": est.n,
                    })
        else:
            record = {k: {"f_k_hz": grid.center(k), **labels} for k in carriers}
            if preset.metric in ("average_sinr", "both"):
                for k, fields in _sinr_fields(samples, carriers).items():
                    record[k].update(fields)
            if preset.metric in ("outage", "both"):
                estimates = run_outage(config, gamma_th, workers=workers, samples=samples)
                for k in carriers:
                    record[k].update({
                        "op": estimates[k].value,
                        "ci": estimates[k].half_width,
                        "n_trials": estimates[k].n,
                    })
                    if estimates[k].warning:
                        logger.warning(f"{preset.name} carrier {k}: {estimates[k].warning}")
            rows.extend(record[k] for k in carriers)

        point_desc = ", ".join(f"{c}={_format(v)}" for c, v in labels.items()) or "configured point"
        logger.info(f"{preset.name} [{n_done}/{len(points)}] {point_desc} done")
    return rows


def render_csv(columns: Sequence[str], rows: Sequence[Dict[str, float]]) -> str:
    """RFC-4180 CSV with a header row and LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row[c]) for c in columns])
    return buffer.getvalue()


def write_atomic(path: Path, text: str) -> None:
    """Write through a temp file in the same directory, then rename."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _versions() -> Dict[str, str]:
    versions = {"thzsim": thzsim.__version__, "python": platform.python_version()}
    for package in ("numpy", "scipy", "pydantic", "pydantic-settings", "cachetools"):
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


def run_preset(
    preset: ExperimentPreset,
    config: SystemConfig,
    out_dir: Union[str, Path],
    config_overrides: Optional[Dict[str, Any]] = None,
    keep_config_constants: bool = False,
    workers: Optional[int] = None,
) -> RunResult:
    """
    Run an experiment and write its CSV and manifest.

    Args:
        preset: The experiment.
        config: Resolved configuration.
        out_dir: Output directory; created if missing.
        config_overrides: Field values applied last (seed, n_trials, ...).
        keep_config_constants: Keep the config's values for the preset's
            fixed parameters, with a warning.
        workers: Worker threads; defaults to settings.

    Returns:
        Paths and digest of the written artifacts.

    Raises:
        OSError: If the output directory cannot be written.
    """
    settings = get_settings()
    started = time.perf_counter()
    started_at = datetime.now(timezone.utc)

    base = preset_config(preset, config, config_overrides, keep_config_constants)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    logger.info(
        f"Running {preset.name}: {preset.n_points} sweep point(s), "
        f"{base.n_trials} trials each, seed {base.seed}"
    )

    rows = _sweep_rows(preset, base, workers)
    text = render_csv(preset.columns, rows)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    csv_path = out / preset.output_name
    write_atomic(csv_path, text)

    wall_time = time.perf_counter() - started
    manifest = {
        "experiment": preset.name,
        "started_at": started_at.isoformat(),
        "wall_time_s": round(wall_time, 3),
        "seed": base.seed,
        "n_trials": base.n_trials,
        "block_size": settings.block_size,
        "workers": workers or settings.worker_count,
        "gamma_th": threshold_from_rate(base.r, base.threshold_mode),
        "kept_config_constants": keep_config_constants,
        "config": config_to_dict(base),
        "locked": {} if keep_config_constants else _jsonable(preset.locked),
        "assumptions": {} if keep_config_constants else _jsonable(preset.assumptions),
        "sweep": [
            {"field": a.field, "column": a.column, "values": list(a.column_values or a.values)}
            for a in preset.axes
        ],
        "versions": _versions(),
        "csv": {"file": csv_path.name, "rows": len(rows), "sha256": digest},
    }
    manifest_path = out / f"{csv_path.stem}.manifest.json"
    write_atomic(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    logger.info(f"Wrote {csv_path} ({len(rows)} rows) in {wall_time:.1f}s")
    return RunResult(
        csv_path=csv_path,
        manifest_path=manifest_path,
        n_rows=len(rows),
        sha256=digest,
        wall_time_s=wall_time,
    )


def _jsonable(values: Dict[str, Any]) -> Dict[str, Any]:
    return json.loads(json.dumps(values))
