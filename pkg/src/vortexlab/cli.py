"""Command-line front end: run orchestration and artifact persistence.

Grammar:

    vortexlab <subcommand> [--config <path-or-preset>] [--set section.key=value]...
              [--out <dir>] [--seed <u64>] [--workers <n>]

Subcommands: ground-state, sweep, spectrum, reflect, map, disorder, fit,
validate.  Grids go to CSV, structured results to JSON, and every run that
writes artifacts also writes a manifest.json recording the full configuration,
its SHA-256, the seed and library versions.  Reruns with the same
configuration and seed are byte-identical except for the manifest timestamp.
Errors print a machine-readable JSON report to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import platform
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .cavity import (
    CavityParams,
    FitError,
    ReflectionTrace,
    fit_resonance,
    reflection_map,
    reflection_trace,
)
from .config import (
    RunConfig,
    apply_overrides,
    config_digest,
    load_config,
    preset_path,
    to_dict,
)
from .disorder import generate_ensemble, susceptibility_std
from .groundstate import minimize, sweep_ground_states
from .lattice import build_gauge
from .spinwave import spectrum_vs_flux

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_PARTIAL = 4


def _fmt(x) -> str:
    """Shortest round-trip decimal form for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(out: Path, subcommand: str, cfg: RunConfig) -> None:
    _write_json(
        out / "manifest.json",
        {
            "schema_version": 1,
            "subcommand": subcommand,
            "config": to_dict(cfg),
            "config_sha256": config_digest(cfg),
            "seed": cfg.seed,
            "versions": {
                "vortexlab": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": __import__("scipy").__version__,
                "numba": __import__("numba").__version__,
            },
            "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        },
    )


def _state_record(res) -> dict:
    return {
        "frustration": res.frustration,
        "energy_GHz": res.energy,
        "gradient_max": res.gradient_max,
        "converged": res.converged,
        "degenerate_count": res.degenerate_count,
        "total_winding": int(res.vortices.total_winding),
        "jump": res.jump,
        "winding": res.vortices.winding.tolist(),
    }


def _cmd_validate(cfg: RunConfig, out: Path) -> int:
    geom = cfg.geometry()
    json.dump(
        {
            "status": "ok",
            "islands": geom.n_islands,
            "junctions": geom.n_junctions,
            "plaquettes": geom.n_plaquettes,
            "config_sha256": config_digest(cfg),
        },
        sys.stdout,
        indent=2,
        sort_keys=True,
    )
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_ground_state(cfg: RunConfig, out: Path) -> int:
    geom = cfg.geometry()
    gauge = build_gauge(geom, cfg.flux)
    res = minimize(geom, gauge, cfg.circuit, cfg.minimizer)
    record = _state_record(res)
    record["schema_version"] = 1
    record["phi"] = res.phi.tolist()
    _write_json(out / "ground_state.json", record)
    _write_csv(
        out / "vortex_map.csv",
        ["plaquette_x", "plaquette_y", "circulation", "winding"],
        res.vortices.to_rows(),
    )
    _manifest(out, "ground-state", cfg)
    return EXIT_OK if res.converged else EXIT_PARTIAL


def _sweep(cfg: RunConfig, out: Path):
    geom = cfg.geometry()
    results = sweep_ground_states(geom, cfg.circuit, cfg.flux_grid(), cfg.minimizer)
    _write_csv(
        out / "sweep.csv",
        ["flux", "energy", "total_winding", "jump", "degenerate_count", "converged"],
        [
            (
                r.frustration,
                r.energy,
                int(r.vortices.total_winding),
                r.jump,
                r.degenerate_count,
                r.converged,
            )
            for r in results
        ],
    )
    _write_json(
        out / "states.json",
        {"schema_version": 1, "states": [_state_record(r) for r in results]},
    )
    return geom, results


def _partial_status(out: Path, results) -> int:
    bad = [r.frustration for r in results if not r.converged]
    if bad:
        _write_json(
            out / "status.json",
            {"schema_version": 1, "non_converged_flux": bad},
        )
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig, out: Path) -> int:
    _, results = _sweep(cfg, out)
    _manifest(out, "sweep", cfg)
    return _partial_status(out, results)


def _cmd_spectrum(cfg: RunConfig, out: Path) -> int:
    geom, results = _sweep(cfg, out)
    spectra = spectrum_vs_flux(results, geom, cfg.circuit)
    rows = []
    for r, ms in zip(results, spectra):
        for k, nu in enumerate(ms.frequencies_ghz):
            rows.append((r.frustration, k, float(np.real(nu))))
    _write_csv(out / "spectrum.csv", ["flux", "mode_index", "frequency_GHz"], rows)
    _manifest(out, "spectrum", cfg)
    return _partial_status(out, results)


def _reflection_header(cfg: RunConfig, subcommand: str) -> dict:
    return {
        "schema_version": 1,
        "subcommand": subcommand,
        "code_version": __version__,
        "config": to_dict(cfg),
        "config_sha256": config_digest(cfg),
    }


def _cmd_reflect(cfg: RunConfig, out: Path) -> int:
    geom = cfg.geometry()
    gauge = build_gauge(geom, cfg.flux)
    res = minimize(geom, gauge, cfg.circuit, cfg.minimizer)
    trace = reflection_trace(geom, cfg.circuit, cfg.cavity, res, cfg.freq_grid())
    _write_csv(
        out / "reflect.csv",
        ["flux", "freq_GHz", "S11_re", "S11_im", "S11_abs"],
        [
            (cfg.flux, nu, v.real, v.imag, abs(v))
            for nu, v in zip(trace.nu_ghz, trace.s11)
        ],
    )
    _write_json(out / "reflect.json", _reflection_header(cfg, "reflect"))
    _manifest(out, "reflect", cfg)
    return EXIT_OK if res.converged else EXIT_PARTIAL


def _cmd_map(cfg: RunConfig, out: Path) -> int:
    geom, results = _sweep(cfg, out)
    freq = cfg.freq_grid()
    grid = reflection_map(results, geom, cfg.circuit, cfg.cavity, freq)
    rows = []
    for r, line in zip(results, grid):
        for nu, v in zip(freq, line):
            rows.append((r.frustration, nu, v.real, v.imag, abs(v)))
    _write_csv(
        out / "map.csv", ["flux", "freq_GHz", "S11_re", "S11_im", "S11_abs"], rows
    )
    _write_json(out / "map.json", _reflection_header(cfg, "map"))
    _manifest(out, "map", cfg)
    return _partial_status(out, results)


def _cmd_disorder(cfg: RunConfig, out: Path) -> int:
    geom = cfg.geometry()
    ensemble = generate_ensemble(
        geom, cfg.circuit, seed=cfg.seed, sigma_rel=cfg.sigma_rel, n=cfg.realizations
    )
    stats = susceptibility_std(
        ensemble, geom, cfg.circuit, cfg.cavity, cfg.flux_grid(), cfg.minimizer
    )
    _write_csv(
        out / "disorder_std.csv",
        ["flux", "std_chi_MHz", "n_converged"],
        zip(stats.flux, stats.std_chi_mhz, stats.n_converged),
    )
    for k in range(ensemble.realizations):
        _write_csv(
            out / f"realization_{k:02d}.csv",
            ["flux", "chi_re_MHz", "chi_im_MHz"],
            [
                (f, c.real, c.imag)
                for f, c in zip(stats.flux, stats.chi_mhz[k])
            ],
        )
    _write_json(
        out / "disorder.json",
        {
            "schema_version": 1,
            "sigma_rel": cfg.sigma_rel,
            "realizations": cfg.realizations,
            "seed": cfg.seed,
            "probe_GHz": cfg.cavity.omega_c_GHz,
            "config_sha256": config_digest(cfg),
        },
    )
    _manifest(out, "disorder", cfg)
    if np.any(stats.n_converged < 2):
        _write_json(
            out / "status.json",
            {
                "schema_version": 1,
                "undersampled_flux": stats.flux[stats.n_converged < 2].tolist(),
            },
        )
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_fit(cfg: RunConfig, out: Path) -> int:
    source = (
        preset_path("synthetic_trace.csv")
        if cfg.fit_trace == "builtin"
        else Path(cfg.fit_trace)
    )
    with open(source, newline="") as fh:
        reader = csv.DictReader(fh)
        nu, re, im = [], [], []
        for row in reader:
            nu.append(float(row["freq_GHz"]))
            re.append(float(row["S11_re"]))
            im.append(float(row["S11_im"]))
    trace = ReflectionTrace(
        nu_ghz=np.asarray(nu), s11=np.asarray(re) + 1j * np.asarray(im)
    )
    fit = fit_resonance(trace)
    _write_json(
        out / "fit.json",
        {
            "schema_version": 1,
            "source": str(source),
            "omega_c_GHz": fit.omega_c_GHz,
            "kappa_ext_MHz": fit.kappa_ext_MHz,
            "kappa_int_MHz": fit.kappa_int_MHz,
            "residual": fit.residual,
        },
    )
    _manifest(out, "fit", cfg)
    return EXIT_OK


_COMMANDS = {
    "ground-state": _cmd_ground_state,
    "sweep": _cmd_sweep,
    "spectrum": _cmd_spectrum,
    "reflect": _cmd_reflect,
    "map": _cmd_map,
    "disorder": _cmd_disorder,
    "fit": _cmd_fit,
    "validate": _cmd_validate,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vortexlab",
        description="Vortex configurations, plasma modes and cavity reflection "
        "of a frustrated quasi-1D Josephson junction array.",
    )
    p.add_argument("subcommand", choices=sorted(_COMMANDS))
    p.add_argument(
        "--config",
        default=None,
        help="TOML config path or bundled preset name (default: device preset)",
    )
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="section.key=value",
        help="override one config value (repeatable)",
    )
    p.add_argument("--out", default=None, help="output directory (overrides run.output_dir)")
    p.add_argument("--seed", type=int, default=None, help="overrides run.seed")
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker threads (overrides run.workers; env VORTEXLAB_WORKERS)",
    )
    return p


def _error(kind: str, exc: Exception, code: int) -> int:
    json.dump(
        {"error": kind, "type": type(exc).__name__, "message": str(exc)},
        sys.stderr,
        sort_keys=True,
    )
    sys.stderr.write("\n")
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, args.overrides)
        workers = args.workers
        if workers is None and os.environ.get("VORTEXLAB_WORKERS"):
            workers = int(os.environ["VORTEXLAB_WORKERS"])
        extra = []
        if args.out is not None:
            extra.append(("output_dir", args.out))
        if args.seed is not None:
            extra.append(("seed", args.seed))
        if workers is not None:
            extra.append(("workers", workers))
        if extra:
            cfg = replace(cfg, **dict(extra))
            cfg = replace(
                cfg, minimizer=replace(cfg.minimizer, seed=cfg.seed, workers=cfg.workers)
            )
    except (ValueError, OSError, KeyError) as exc:
        return _error("config", exc, EXIT_CONFIG)

    out = Path(cfg.output_dir)
    try:
        if args.subcommand != "validate":
            out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.subcommand](cfg, out)
    except (FitError, ValueError, ArithmeticError, OSError) as exc:
        return _error("runtime", exc, EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())
