# src/config.py
import os, copy
from typing import Dict, Any, Optional

import yaml


class ConfigError(ValueError):
    """Raised when a config file exists but cannot be used."""


DEFAULTS: Dict[str, Any] = {
    "version": "analysis@builtin",
    "ingest": {"self_loops": "reject"},
    "null_models": {"replicates": 1000, "swaps_per_edge": 10, "ddof": 0, "n_jobs": 1},
    "motifs": {"z_threshold": 2.0},
    "persistence": {"sigma": 2.0, "log_base": 2},
    "roles": {"cap": 10000, "tie_eps": 1e-12},
    "curvature": {"forman_bin_width": 1, "ollivier_bin_width": 0.1},
    "embedding": {
        "dim": 300,
        "bins": 32,
        "stop_words": ["and", "of", "the", "or", "in", "to", "a", "an", "for", "with", "by", "on"],
    },
    "degree_stats": {"threshold": 90, "frac": 0.5, "method": "pearson", "bin_width": 1},
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for k, v in (override or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def resolve_config_path(path: Optional[str] = None) -> Optional[str]:
    # explicit path > $METNET_CONFIG > repo analysis.yaml
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        return path
    for candidate in (os.getenv("METNET_CONFIG"), "analysis.yaml"):
        if candidate and os.path.exists(candidate):
            return candidate
    return None


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load analysis defaults, merged over the built-in DEFAULTS.

    With no file found the DEFAULTS are returned. A missing explicit path,
    or a file that is not a YAML mapping, raises ConfigError.
    """
    cfg_path = resolve_config_path(path)
    if cfg_path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        with open(cfg_path, "r", encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{cfg_path}: invalid YAML: {e}") from e
    if not isinstance(loaded, dict):
        raise ConfigError(f"{cfg_path}: top level must be a mapping")
    cfg = _merge(DEFAULTS, loaded)
    cfg["_source"] = cfg_path
    return cfg


def n_jobs_from(cfg: Dict[str, Any]) -> int:
    env = os.getenv("METNET_N_JOBS")
    if env:
        return int(env)
    return int(cfg.get("null_models", {}).get("n_jobs", 1))
