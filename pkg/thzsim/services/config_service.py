"""
Experiment configuration loading.

Reads the JSON document, resolves units (dB → linear, scalar P → per
carrier list, κ table paths → inline rows) and returns the frozen
``SystemConfig``. A resolved echo (``format: "resolved-v1"``) is accepted
as input too and validates back to an equal configuration.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from thzsim.errors import ConfigError
from thzsim.models.system_config import (
    DOCUMENT_KEYS,
    RESOLVED_FORMAT,
    AbsorptionProvider,
    ConfigDocument,
    SystemConfig,
    db_to_linear,
)
from thzsim.services.path_gain import load_kappa_table

logger = logging.getLogger(__name__)


def _pointer(loc: Tuple[Any, ...], key_map: Optional[Dict[str, str]] = None) -> str:
    """Turn a pydantic error location into a JSON pointer."""
    parts = [str(p) for p in loc]
    if parts and key_map:
        parts[0] = key_map.get(parts[0], parts[0])
    return "".join(f"/{p}" for p in parts)


def _issues(exc: ValidationError, key_map: Optional[Dict[str, str]] = None) -> List[Tuple[str, str]]:
    issues = []
    for err in exc.errors():
        message = err["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, "):]
        issues.append((_pointer(err["loc"], key_map), message))
    return issues


def _resolve_absorption(provider: AbsorptionProvider, base_dir: Path) -> AbsorptionProvider:
    if provider.kind == "constant" or provider.rows is not None:
        return provider.model_copy(update={"path": None})

    path = Path(provider.path)
    if not path.is_absolute():
        path = base_dir / path
    try:
        rows = load_kappa_table(path)
    except (OSError, ValueError) as e:
        raise ConfigError([("/absorption/path", str(e))]) from e
    return AbsorptionProvider(kind="table", rows=rows)


def resolve_document(doc: ConfigDocument, base_dir: Union[str, Path] = ".") -> SystemConfig:
    """
    Convert a validated document into the linear-unit configuration.

    Args:
        doc: Parsed config document.
        base_dir: Directory relative κ table paths are resolved against.

    Raises:
        ConfigError: If the resolved parameters violate a cross-field rule.
    """
    if isinstance(doc.P_db, list):
        if len(doc.P_db) != doc.K:
            raise ConfigError([("/P_db", f"expected {doc.K} entries, got {len(doc.P_db)}")])
        p_db = doc.P_db
    else:
        p_db = [doc.P_db] * doc.K

    data = {
        "K": doc.K,
        "W": doc.W_hz if doc.W_hz is not None else doc.K * (doc.W_sb_hz + doc.W_gb_hz),
        "W_sb": doc.W_sb_hz,
        "W_gb": doc.W_gb_hz,
        "f_c": doc.f_c_hz,
        "d": doc.d_m,
        "G_t": db_to_linear(doc.G_t_dbi),
        "G_r": db_to_linear(doc.G_r_dbi),
        "P": [db_to_linear(p) for p in p_db],
        "P_adj": db_to_linear(doc.P_adj_db) if doc.P_adj_db is not None else None,
        "N_o": db_to_linear(doc.N_o_db),
        "kappa_source": _resolve_absorption(doc.absorption, Path(base_dir)),
        "m": doc.m,
        "Omega": doc.Omega,
        "sigma_s": doc.sigma_s_m,
        "a": doc.a_m,
        "w_d": doc.w_d_m,
        "shared_misalignment": doc.shared_misalignment,
        "shared_fading": doc.shared_fading,
        "beta": doc.beta_hz,
        "ici_model": doc.ici_model,
        "ici_override": doc.ici_override,
        "r": doc.r,
        "threshold_mode": doc.threshold_mode,
        "n_trials": doc.n_trials,
        "seed": doc.seed,
        "report_carrier": doc.report_carrier,
    }
    try:
        return SystemConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_issues(e, DOCUMENT_KEYS)) from e


def parse_config_dict(data: Any, base_dir: Union[str, Path] = ".") -> SystemConfig:
    """
    Validate a decoded JSON object in document or resolved form.

    Raises:
        ConfigError: With one (JSON pointer, message) issue per problem.
    """
    if not isinstance(data, dict):
        raise ConfigError([("", "configuration must be a JSON object")])

    if data.get("format") == RESOLVED_FORMAT:
        try:
            return SystemConfig.model_validate(data)
        except ValidationError as e:
            raise ConfigError(_issues(e)) from e

    try:
        doc = ConfigDocument.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_issues(e)) from e
    return resolve_document(doc, base_dir)


def validate_config(path: Union[str, Path]) -> SystemConfig:
    """
    Load and resolve a JSON config file.

    Args:
        path: Config file path. Relative κ table paths inside it resolve
            against the file's directory.

    Returns:
        The resolved configuration.

    Raises:
        ConfigError: If the file is missing, not JSON, or fails validation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([("", f"cannot read {path}: {e.strerror or e}")]) from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")]) from e

    config = parse_config_dict(data, path.parent)
    logger.info(f"Resolved config {path} (K={config.K}, seed={config.seed}, n_trials={config.n_trials})")
    return config


def config_to_dict(config: SystemConfig) -> Dict[str, Any]:
    """Resolved configuration as plain JSON types."""
    return config.model_dump(mode="json")


def canonical_echo(config: SystemConfig) -> str:
    """Resolved configuration as sorted, indented JSON."""
    return json.dumps(config_to_dict(config), sort_keys=True, indent=2) + "\n"
