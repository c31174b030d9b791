"""Declarative run configuration: TOML loading, presets, dotted overrides.

A run is described by one TOML file with sections [lattice], [circuit],
[cavity], [minimizer], [sweep], [disorder], [fit] and [run].  Every key has a
default taken from the measured device, so an empty file is a valid
configuration; the bundled "device" preset spells all of them out.  Values
are overridable from the command line as ``--set section.key=value`` with
TOML literal syntax on the right-hand side.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .cavity import CavityParams
from .groundstate import MinimizerConfig
from .lattice import ArrayGeometry, CircuitParams, build_geometry


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of everything a CLI subcommand needs."""

    lattice_L: int = 30
    lattice_W: int = 3
    circuit: CircuitParams = field(default_factory=CircuitParams)
    cavity: CavityParams = field(default_factory=CavityParams)
    minimizer: MinimizerConfig = field(default_factory=MinimizerConfig)
    flux: float = 0.5
    flux_min: float = 0.0
    flux_max: float = 1.0
    flux_steps: int = 601
    freq_min: float = 10.102
    freq_max: float = 10.152
    freq_steps: int = 2001
    sigma_rel: float = 0.05
    realizations: int = 10
    fit_trace: str = "builtin"
    output_dir: str = "vortexlab-out"
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.lattice_L < 1 or self.lattice_W < 1:
            raise ValueError("lattice.L and lattice.W must be at least 1")
        if self.flux_steps < 1 or self.freq_steps < 1:
            raise ValueError("sweep.flux_steps and sweep.freq_steps must be >= 1")
        if self.flux_max < self.flux_min:
            raise ValueError("sweep.flux_max must not be below sweep.flux_min")
        if self.freq_max < self.freq_min:
            raise ValueError("sweep.freq_max must not be below sweep.freq_min")
        if self.realizations < 1:
            raise ValueError("disorder.realizations must be >= 1")
        if self.sigma_rel < 0:
            raise ValueError("disorder.sigma_rel must be non-negative")
        if self.workers < 1:
            raise ValueError("run.workers must be >= 1")
        if self.seed < 0:
            raise ValueError("run.seed must be a non-negative integer")

    def geometry(self) -> ArrayGeometry:
        return build_geometry(self.lattice_L, self.lattice_W)

    def flux_grid(self) -> np.ndarray:
        return np.linspace(self.flux_min, self.flux_max, self.flux_steps)

    def freq_grid(self) -> np.ndarray:
        return np.linspace(self.freq_min, self.freq_max, self.freq_steps)


# TOML schema: section -> key -> (RunConfig/sub-config field, converter)
_CIRCUIT_KEYS = {
    "EJ_GHz": "EJ_GHz",
    "CJ_fF": "CJ_fF",
    "Cdiag_fF": "Cdiag_fF",
    "Cg_fF": "Cg_fF",
    "CS_fF": "CS_fF",
    "G_over_G0": "G_over_G0",
    "Cdiag_both": "Cdiag_both",
}
_CAVITY_KEYS = {
    "omega_c_GHz": "omega_c_GHz",
    "kappa_ext_MHz": "kappa_ext_MHz",
    "kappa_int_MHz": "kappa_int_MHz",
    "g_MHz": "g_MHz",
}
_MINIMIZER_KEYS = {
    "restarts": "restarts",
    "t_initial_ej": "t_initial_ej",
    "t_final_ej": "t_final_ej",
    "steps": "steps",
    "proposal_width": "proposal_width",
    "adaptive": "adaptive",
    "polish_tol_ej": "polish_tol_ej",
    "degeneracy_window_ej": "degeneracy_window_ej",
    "strategy": "strategy",
}
_SWEEP_KEYS = {
    "flux": "flux",
    "flux_min": "flux_min",
    "flux_max": "flux_max",
    "flux_steps": "flux_steps",
    "freq_min": "freq_min",
    "freq_max": "freq_max",
    "freq_steps": "freq_steps",
}
_SCHEMA = {
    "lattice": {"L": "lattice_L", "W": "lattice_W"},
    "circuit": _CIRCUIT_KEYS,
    "cavity": _CAVITY_KEYS,
    "minimizer": _MINIMIZER_KEYS,
    "sweep": _SWEEP_KEYS,
    "disorder": {"sigma_rel": "sigma_rel", "realizations": "realizations"},
    "fit": {"trace": "fit_trace"},
    "run": {"output_dir": "output_dir", "seed": "seed", "workers": "workers"},
}

_INT_FIELDS = {
    "lattice_L",
    "lattice_W",
    "flux_steps",
    "freq_steps",
    "realizations",
    "seed",
    "workers",
    "restarts",
    "steps",
}
_BOOL_FIELDS = {"Cdiag_both", "adaptive"}
_STR_FIELDS = {"strategy", "output_dir", "fit_trace"}


def _convert(section: str, key: str, target: str, value):
    where = f"{section}.{key}"
    if target in _BOOL_FIELDS:
        if not isinstance(value, bool):
            raise ValueError(f"{where} must be a boolean, got {value!r}")
        return value
    if target in _STR_FIELDS:
        if not isinstance(value, str):
            raise ValueError(f"{where} must be a string, got {value!r}")
        return value
    if target in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{where} must be an integer, got {value!r}")
        return value
    if target == "EJ_GHz" and isinstance(value, list):
        return np.asarray(value, dtype=float)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{where} must be a number, got {value!r}")
    return float(value)


def _flatten(data: dict) -> dict:
    """Validate raw TOML data against the schema, naming any bad key."""
    flat = {}
    for section, entries in data.items():
        if section not in _SCHEMA:
            raise ValueError(f"unknown config section [{section}]")
        if not isinstance(entries, dict):
            raise ValueError(f"config section [{section}] must be a table")
        for key, value in entries.items():
            target = _SCHEMA[section].get(key)
            if target is None:
                raise ValueError(f"unknown config key {section}.{key}")
            flat[target] = _convert(section, key, target, value)
    return flat


def _build(flat: dict) -> RunConfig:
    def pick(keys):
        return {k: flat.pop(k) for k in list(flat) if k in keys}

    circuit = CircuitParams(**pick(set(_CIRCUIT_KEYS.values())))
    cavity = CavityParams(**pick(set(_CAVITY_KEYS.values())))
    mini_kwargs = pick(set(_MINIMIZER_KEYS.values()))
    seed = flat.get("seed", 0)
    workers = flat.get("workers", 1)
    minimizer = MinimizerConfig(seed=seed, workers=workers, **mini_kwargs)
    return RunConfig(circuit=circuit, cavity=cavity, minimizer=minimizer, **flat)


def preset_path(name: str) -> Path:
    """Filesystem path of a bundled preset ('device') or data file."""
    root = resources.files("vortexlab") / "presets"
    path = root / name
    if not path.is_file():
        path = root / f"{name}.toml"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled preset named {name!r}")
    return Path(str(path))


def load_config(source: str | Path | None = None) -> RunConfig:
    """Load a RunConfig from a TOML path or bundled preset name.

    ``None`` loads the device preset.  A bare name with no path separator and
    no .toml suffix is looked up among the bundled presets.
    """
    if source is None:
        source = preset_path("device")
    source = Path(source)
    if not source.suffix and not source.exists():
        source = preset_path(source.name)
    with open(source, "rb") as fh:
        data = tomllib.load(fh)
    return _build(_flatten(data))


def parse_override(text: str) -> tuple[str, str, object]:
    """Parse one --set argument of the form section.key=value."""
    head, sep, raw = text.partition("=")
    if not sep:
        raise ValueError(f"override {text!r} is not of the form section.key=value")
    section, dot, key = head.strip().partition(".")
    if not dot or not section or not key:
        raise ValueError(f"override target {head!r} is not of the form section.key")
    raw = raw.strip()
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw  # bare strings may omit the quotes
    return section, key, value


def apply_overrides(config: RunConfig, overrides) -> RunConfig:
    """Apply section.key=value strings on top of an existing RunConfig."""
    if not overrides:
        return config
    data: dict[str, dict] = {}
    for text in overrides:
        section, key, value = parse_override(text)
        data.setdefault(section, {})[key] = value
    flat = _flatten(data)

    updates = {}
    sub = {"circuit": config.circuit, "cavity": config.cavity, "minimizer": config.minimizer}
    for name, keys in (
        ("circuit", set(_CIRCUIT_KEYS.values())),
        ("cavity", set(_CAVITY_KEYS.values())),
        ("minimizer", set(_MINIMIZER_KEYS.values())),
    ):
        changes = {k: flat.pop(k) for k in list(flat) if k in keys}
        if changes:
            updates[name] = replace(sub[name], **changes)
    cfg = replace(config, **updates, **flat)
    # run.seed / run.workers steer the minimizer too
    if cfg.minimizer.seed != cfg.seed or cfg.minimizer.workers != cfg.workers:
        cfg = replace(
            cfg, minimizer=replace(cfg.minimizer, seed=cfg.seed, workers=cfg.workers)
        )
    return cfg


# Execution context: where results land and how many threads compute them.
# Neither changes a single computed number, so both stay out of the canonical
# form — reruns differing only in these produce byte-identical artifacts.
_EXECUTION_KEYS = {("run", "workers"), ("run", "output_dir")}


def to_dict(config: RunConfig) -> dict:
    """Canonical nested-dict form (JSON-compatible) of a RunConfig."""
    out: dict[str, dict] = {}
    for section, mapping in _SCHEMA.items():
        entries = {}
        for key, target in mapping.items():
            if (section, key) in _EXECUTION_KEYS:
                continue
            for holder in (config, config.circuit, config.cavity, config.minimizer):
                if hasattr(holder, target):
                    value = getattr(holder, target)
                    break
            if isinstance(value, np.ndarray):
                value = value.tolist()
            entries[key] = value
        out[section] = entries
    return out


def config_digest(config: RunConfig) -> str:
    """SHA-256 of the canonical JSON serialization (manifest provenance)."""
    blob = json.dumps(to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
