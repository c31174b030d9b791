"""Seeded Josephson-energy disorder ensembles and their flux-sweep statistics.

Fabrication spread is modelled as independent Gaussian disorder on each
junction energy, EJ_j ~ N(EJ_nominal_j, sigma_rel * EJ_nominal_j), truncated
to positive values by resampling.  Every realization is re-minimized
independently at every flux point (no warm starts, no shared vortex seed
path), so the reported spread includes reorganizations of the vortex lattice
and not just perturbative mode shifts.

The headline statistic is the per-flux sample standard deviation of the
complex pad susceptibility at the cavity frequency, reported as
sqrt(var(Re) + var(Im)).  On commensurate plateaus the vortex lattice is
locked and the spread stays small; between them it grows by an order of
magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cavity import CavityParams, susceptibility
from .energy import hessian
from .groundstate import MinimizerConfig, minimize
from .lattice import (
    ArrayGeometry,
    CircuitParams,
    build_gauge,
    capacitance_matrix,
)
from .spinwave import conductance_matrix


@dataclass(frozen=True)
class DisorderEnsemble:
    """A reproducible set of per-junction EJ tables (GHz)."""

    seed: int
    sigma_rel: float
    realizations: int
    ej_tables: np.ndarray  # (realizations, n_junctions)


def _draw_positive(rng: np.random.Generator, nominal: np.ndarray, sigma_rel: float):
    """One Gaussian EJ table, resampling any non-positive draws.

    Resampling (rather than clamping) keeps the distribution shape; at the
    few-percent disorder of interest it essentially never triggers, but it
    must stay deterministic when it does.
    """
    table = rng.normal(nominal, sigma_rel * nominal)
    while True:
        bad = table <= 0
        if not np.any(bad):
            return table
        table[bad] = rng.normal(nominal[bad], sigma_rel * nominal[bad])


def generate_ensemble(
    geometry: ArrayGeometry,
    params: CircuitParams,
    seed: int = 0,
    sigma_rel: float = 0.05,
    n: int = 10,
) -> DisorderEnsemble:
    """Draw ``n`` independent disorder realizations of the junction energies.

    Realization k depends only on (seed, k), so ensembles are reproducible
    and extensible regardless of how the work is later distributed.
    """
    if sigma_rel < 0:
        raise ValueError("sigma_rel must be non-negative")
    if n < 1:
        raise ValueError("need at least one realization")
    nominal = params.ej_per_junction(geometry)
    tables = np.empty((n, geometry.n_junctions))
    for k in range(n):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(k,)))
        )
        tables[k] = _draw_positive(rng, nominal, sigma_rel)
    return DisorderEnsemble(
        seed=seed, sigma_rel=sigma_rel, realizations=n, ej_tables=tables
    )


@dataclass(frozen=True)
class SusceptibilityStd:
    """Per-flux disorder statistics of chi(omega_c).

    ``chi_mhz[k, i]`` is realization k at flux point i (NaN where the
    minimizer failed to converge); ``std_chi_mhz`` is the sample standard
    deviation sqrt(var(Re) + var(Im)) over the converged realizations, NaN
    where fewer than two converged.
    """

    flux: np.ndarray
    std_chi_mhz: np.ndarray
    n_converged: np.ndarray
    chi_mhz: np.ndarray


def susceptibility_std(
    ensemble: DisorderEnsemble,
    geometry: ArrayGeometry,
    params: CircuitParams,
    cavity: CavityParams,
    flux_grid,
    config: MinimizerConfig = MinimizerConfig(),
) -> SusceptibilityStd:
    """Sample std of the pad susceptibility at omega_c across the ensemble."""
    flux_grid = np.asarray(flux_grid, dtype=float)
    n, npts = ensemble.realizations, flux_grid.size
    chi = np.full((n, npts), np.nan + 0j, dtype=complex)
    seen: dict[bytes, int] = {}
    for k in range(n):
        # duplicate tables (e.g. sigma_rel = 0) reuse the first realization's
        # row bitwise, so identical inputs spread only by np.var rounding
        key = ensemble.ej_tables[k].tobytes()
        if key in seen:
            chi[k] = chi[seen[key]]
            continue
        seen[key] = k
        pk = params.with_ej(ensemble.ej_tables[k])
        cap = capacitance_matrix(geometry, pk)
        gmat = None if pk.G_over_G0 == 0 else conductance_matrix(geometry, pk)
        for i, f in enumerate(flux_grid):
            gauge = build_gauge(geometry, f)
            res = minimize(geometry, gauge, pk, config, stream=(k, i))
            if not res.converged:
                continue
            h = hessian(geometry, gauge, pk, res.phi)
            chi[k, i] = susceptibility(h, cap, gmat, cavity, cavity.omega_c_GHz)

    ok = np.isfinite(chi.real)
    n_conv = ok.sum(axis=0)
    std = np.full(npts, np.nan)
    for i in range(npts):
        if n_conv[i] >= 2:
            vals = chi[ok[:, i], i]
            std[i] = np.sqrt(np.var(vals.real, ddof=1) + np.var(vals.imag, ddof=1))
    return SusceptibilityStd(
        flux=flux_grid, std_chi_mhz=std, n_converged=n_conv, chi_mhz=chi
    )


def reflection_difference_map(member_map, clean_map) -> np.ndarray:
    """Elementwise |S11| difference between a disordered and the clean map."""
    member = np.asarray(member_map)
    clean = np.asarray(clean_map)
    if member.shape != clean.shape:
        raise ValueError(
            f"map shapes differ: {member.shape} vs {clean.shape}"
        )
    if np.iscomplexobj(member):
        member = np.abs(member)
    if np.iscomplexobj(clean):
        clean = np.abs(clean)
    return member - clean
