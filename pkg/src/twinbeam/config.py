"""Human-readable key-value (INI) configuration for simulator, pipeline and
experiment specs; the same format serves run manifests, so a manifest alone
regenerates a run."""

from __future__ import annotations

import configparser
import dataclasses
import os
from pathlib import Path

from .errors import ConfigError
from .pipeline import PipelineConfig
from .sim import SimConfig

ENV_OUTPUT_DIR = "TWINBEAM_OUTPUT_DIR"
ENV_WORKERS = "TWINBEAM_WORKERS"


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_floats(text):
    return tuple(float(p) for p in text.replace(",", " ").split())


def _parse_ints(text):
    return tuple(int(p) for p in text.replace(",", " ").split())


def _parse_rescale(text):
    t = text.strip()
    if t in ("auto", "auto-probe", "off"):
        return t
    try:
        return float(t)
    except ValueError:
        raise ConfigError(f"rescale mode must be auto, auto-probe, off or a number; got {text!r}") from None


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


_SIM_PARSERS = {
    "gain": float,
    "seed_photons": float,
    "probe_center": _parse_floats,
    "probe_fwhm": float,
    "conjugate_center": _parse_floats,
    "coherence_sigma": float,
    "qe": float,
    "extra_loss": float,
    "background_rate": float,
    "background_fwhm_factor": float,
    "background_uniform": _parse_bool,
    "background_excess": float,
    "tech_noise_amplitude": float,
    "tech_noise_tau_us": float,
    "seed_drift": float,
    "em_excess_noise": _parse_bool,
    "transient_kappa": float,
    "transient_excess": float,
    "pulse_timing_us": _parse_floats,
    "frame_shape": _parse_ints,
    "analysis_size": int,
    "sampling": str.strip,
    "rng_seed": int,
}

_PIPELINE_PARSERS = {
    "coarse_crop": int,
    "analysis_crop": int,
    "registration_search_radius": int,
    "rescale_mode": _parse_rescale,
    "rotation_center": _parse_floats,
}


def _dataclass_to_section(obj, skip_none=True):
    out = {}
    for f in dataclasses.fields(obj):
        v = getattr(obj, f.name)
        if v is None and skip_none:
            continue
        out[f.name] = _fmt(v)
    return out


def _section_to_kwargs(section, parsers, context):
    kwargs = {}
    for key, raw in section.items():
        if key not in parsers:
            raise ConfigError(f"unknown {context} option {key!r}")
        try:
            kwargs[key] = parsers[key](raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{context} option {key!r}: {exc}") from None
    return kwargs


def sim_to_section(cfg: SimConfig):
    return _dataclass_to_section(cfg)


def sim_from_section(section) -> SimConfig:
    return SimConfig(**_section_to_kwargs(section, _SIM_PARSERS, "sim"))


def pipeline_to_section(cfg: PipelineConfig):
    return _dataclass_to_section(cfg)


def pipeline_from_section(section) -> PipelineConfig:
    return PipelineConfig(**_section_to_kwargs(section, _PIPELINE_PARSERS, "pipeline"))


def read_config(path):
    cp = configparser.ConfigParser()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    cp.read(path, encoding="utf-8")
    return cp


def apply_env_overrides(kwargs):
    """Environment variables override output_dir and worker count."""
    out = dict(kwargs)
    if os.environ.get(ENV_OUTPUT_DIR):
        out["output_dir"] = os.environ[ENV_OUTPUT_DIR]
    if os.environ.get(ENV_WORKERS):
        try:
            out["workers"] = int(os.environ[ENV_WORKERS])
        except ValueError:
            raise ConfigError(f"{ENV_WORKERS} must be an integer") from None
    return out


__all__ = [
    "ENV_OUTPUT_DIR",
    "ENV_WORKERS",
    "apply_env_overrides",
    "pipeline_from_section",
    "pipeline_to_section",
    "read_config",
    "sim_from_section",
    "sim_to_section",
]
