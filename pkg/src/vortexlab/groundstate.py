"""Classical ground-state search for the frustrated array.

Strategy ("anneal", the default): per restart, single-site Metropolis
annealing with a geometric temperature schedule followed by a gradient
polish (L-BFGS plus damped Newton iterations on the analytic Hessian); the
lowest-energy restart wins.  The alternative "random" strategy skips the
annealing and polishes random initial configurations directly; it serves as
an independent cross-check of the search.

Flux sweeps additionally warm-start each point from the previous point's
winner and keep whichever of {continuation, fresh restarts} is lower; a
point is flagged as a configuration jump when the continuation loses by
more than the degeneracy window (the ground state reorganised).

Determinism: every restart draws from an independent child of
``np.random.SeedSequence(seed, spawn_key=stream + (restart,))``, so results
are byte-identical for any worker count and monotone in the restart budget
(a larger budget reruns the same restarts plus extra ones).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
import scipy.optimize

from ._anneal import build_incidence, metropolis_anneal
from .energy import (
    VortexMap,
    canonicalize,
    gradient,
    hessian,
    potential,
    vortex_map,
    wrap_angle,
)
from .lattice import (
    TWO_PI,
    ArrayGeometry,
    CircuitParams,
    GaugeField,
    build_gauge,
    capacitance_matrix,
)

_ADAPT_INTERVAL = 500
_TARGET_ACCEPTANCE = 0.4


@dataclass(frozen=True)
class MinimizerConfig:
    """Knobs of the ground-state search.

    Temperatures and tolerances are quoted in units of the nominal Josephson
    energy so the search behaves identically across parameter scales.
    """

    restarts: int = 32
    t_initial_ej: float = 2.0
    t_final_ej: float = 1e-3
    steps: int = 200_000
    proposal_width: float = 1.0  # initial width (radians); adapted during the run
    adaptive: bool = True
    polish_tol_ej: float = 1e-9
    degeneracy_window_ej: float = 1e-6
    strategy: str = "anneal"  # "anneal" or "random"
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.strategy not in ("anneal", "random"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.steps < _ADAPT_INTERVAL:
            raise ValueError("annealing schedule too short")


@dataclass(frozen=True)
class GroundStateResult:
    phi: np.ndarray
    energy: float  # GHz
    gradient_max: float  # GHz per radian
    converged: bool
    degenerate_count: int
    frustration: float
    vortices: VortexMap
    jump: bool = False  # set by sweeps when the continuation lost


def _polish(geometry, gauge, params, phi0, tol):
    """Gradient polish to a stationary point: L-BFGS then damped Newton."""
    fun = lambda p: potential(geometry, gauge, params, p)
    jac = lambda p: gradient(geometry, gauge, params, p)
    res = scipy.optimize.minimize(
        fun,
        phi0,
        jac=jac,
        method="L-BFGS-B",
        options={"maxiter": 500, "ftol": 1e-15, "gtol": tol * 1e-2},
    )
    phi = res.x
    e = fun(phi)
    g = jac(phi)
    lam = 0.0
    scale = max(1.0, float(np.max(np.abs(np.diag(hessian(geometry, gauge, params, phi))))))
    for _ in range(60):
        if np.max(np.abs(g)) <= tol:
            break
        h = hessian(geometry, gauge, params, phi)
        try:
            step = np.linalg.solve(h + lam * np.eye(h.shape[0]), -g)
        except np.linalg.LinAlgError:
            lam = max(10.0 * lam, 1e-8 * scale)
            continue
        e_new = fun(phi + step)
        if e_new <= e + 1e-12 * max(1.0, abs(e)):
            phi = phi + step
            e, g = e_new, jac(phi)
            lam *= 0.1
        else:
            lam = max(10.0 * lam, 1e-8 * scale)
    return canonicalize(phi), e, float(np.max(np.abs(g)))


def _run_restart(geometry, gauge, params, config, incidence, temperatures, seed_seq):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    n = geometry.n_islands
    phi = rng.uniform(-np.pi, np.pi, n)
    if config.strategy == "anneal":
        phi_ext = np.append(phi, 0.0)
        steps = config.steps
        sites = rng.integers(0, n, size=steps)
        normals = rng.standard_normal(steps)
        uniforms = rng.random(steps)
        metropolis_anneal(
            phi_ext,
            *incidence,
            sites,
            normals,
            uniforms,
            temperatures,
            config.proposal_width,
            config.adaptive,
            _TARGET_ACCEPTANCE,
            _ADAPT_INTERVAL,
        )
        phi = phi_ext[:n]
    tol = config.polish_tol_ej * params.ej_nominal()
    return _polish(geometry, gauge, params, phi, tol)


def _cluster_minima(candidates, best_energy, window):
    """Group candidates within the energy window into distinct configurations.

    Returns a list of index lists, one per distinct minimum, in the order the
    minima were first encountered.
    """
    clusters: list[list[int]] = []
    reps: list[np.ndarray] = []
    for i, (phi, e, _) in enumerate(candidates):
        if e - best_energy > window:
            continue
        for k, r in enumerate(reps):
            if np.max(np.abs(wrap_angle(phi - r))) < 1e-3:
                clusters[k].append(i)
                break
        else:
            reps.append(phi)
            clusters.append([i])
    return clusters


def _lex_less(a, b, rel_tol=1e-6):
    """Lexicographic a < b with a scale-aware tolerance per entry.

    Entries closer than the tolerance are treated as equal, so solver noise
    cannot flip the comparison between genuinely distinct spectra.
    """
    tol = rel_tol * max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-30)
    for x, y in zip(a, b):
        if abs(x - y) > tol:
            return x < y
    return False


def _symmetry_images(geometry, gauge, phi):
    """Orbit of ``phi`` under the exact symmetries of the uniform-EJ potential.

    The column mirror and the rail exchange, each composed with global phase
    negation and the phase shifts that restore the Landau gauge,

        Sx: phi'(x, y) = -phi(L-x, y) - 2 pi f L y      (pad row y = W)
        Sy: phi'(x, y) = phi_pad - phi(x, W-y)          (pad' = phi_pad)

    leave every cos(gamma_j) unchanged, so images of a minimum are minima at
    exactly the same energy.  The capacitance network breaks both symmetries
    (the pad and ground rails differ, and the plaquette diagonal capacitor
    singles out one diagonal), which is precisely why degenerate partners
    carry distinct harmonic spectra and a canonical pick is needed.
    """
    L, W = geometry.L, geometry.W
    f = gauge.frustration

    def sx(p):
        out = np.empty_like(p)
        out[0] = -p[0] - TWO_PI * f * L * W
        for y in range(1, W):
            row = slice(1 + (y - 1) * (L + 1), 1 + y * (L + 1))
            out[row] = -p[row][::-1] - TWO_PI * f * L * y
        return out

    def sy(p):
        out = np.empty_like(p)
        out[0] = p[0]
        for y in range(1, W):
            row = slice(1 + (y - 1) * (L + 1), 1 + y * (L + 1))
            flip = slice(1 + (W - y - 1) * (L + 1), 1 + (W - y) * (L + 1))
            out[row] = p[0] - p[flip]
        return out

    return [phi, sx(phi), sy(phi), sx(sy(phi))]


def _canonical_state(seeds, geometry, gauge, params, tol, window):
    """Deterministic representative among exactly degenerate minima.

    ``seeds`` are (phi, energy, gradient_max) triples inside the degeneracy
    window.  Each is expanded into its full symmetry orbit (uniform EJ only;
    disorder breaks the lattice symmetry), every image re-polished, and the
    candidate with the lexicographically smallest (curvature, capacitance)
    eigenvalues wins.  Energy ordering inside the window is solver noise, so
    it cannot pick a reproducible representative; the eigenvalue key is
    invariant under the frustration-reversal map phi -> -phi, f -> 1-f, and
    expanding the orbit makes the choice independent of which symmetry
    partner the restart pool happened to find, so a flux point and its
    mirror image select matching states.
    """
    uniform = np.ndim(params.EJ_GHz) == 0
    candidates = []
    for phi, e, g in seeds:
        candidates.append((phi, e, g))
        if not uniform:
            continue
        for image in _symmetry_images(geometry, gauge, phi)[1:]:
            pp, ee, gg = _polish(geometry, gauge, params, image, tol)
            if abs(ee - e) <= window:
                candidates.append((pp, ee, gg))
    if len(candidates) == 1:
        return candidates[0]
    cap = capacitance_matrix(geometry, params)
    keys = [
        scipy.linalg.eigh(
            hessian(geometry, gauge, params, c[0]), cap, eigvals_only=True
        )
        for c in candidates
    ]
    pick = 0
    for k in range(1, len(candidates)):
        if _lex_less(keys[k], keys[pick]):
            pick = k
    return candidates[pick]


def minimize(
    geometry: ArrayGeometry,
    gauge: GaugeField,
    params: CircuitParams,
    config: MinimizerConfig = MinimizerConfig(),
    stream: tuple[int, ...] = (),
) -> GroundStateResult:
    """Best-of-restarts ground state at a fixed gauge (frustration).

    ``stream`` namespaces the random streams (sweeps pass the flux index) so
    that every (point, restart) pair has an independent, reproducible seed.

    When several distinct minima land inside the degeneracy window, the
    returned one is chosen by the smallest harmonic spectrum rather than by
    meaningless sub-window energy ordering; see ``_canonical_state``.
    """
    ej0 = params.ej_nominal()
    temperatures = ej0 * np.geomspace(
        config.t_initial_ej, config.t_final_ej, config.steps
    )
    incidence = build_incidence(geometry, gauge, params)
    seqs = [
        np.random.SeedSequence(entropy=config.seed, spawn_key=stream + (r,))
        for r in range(config.restarts)
    ]

    def task(r):
        return _run_restart(geometry, gauge, params, config, incidence, temperatures, seqs[r])

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            candidates = list(pool.map(task, range(config.restarts)))
    else:
        candidates = [task(r) for r in range(config.restarts)]

    energies = np.array([c[1] for c in candidates])
    window = config.degeneracy_window_ej * ej0
    tol = config.polish_tol_ej * ej0
    clusters = _cluster_minima(candidates, float(np.min(energies)), window)
    seeds = [
        candidates[members[int(np.argmin(energies[members]))]]
        for members in clusters
    ]
    phi, energy, gmax = _canonical_state(seeds, geometry, gauge, params, tol, window)
    return GroundStateResult(
        phi=phi,
        energy=energy,
        gradient_max=gmax,
        converged=gmax <= tol,
        degenerate_count=len(clusters),
        frustration=gauge.frustration,
        vortices=vortex_map(geometry, gauge, phi),
    )


def sweep_ground_states(
    geometry: ArrayGeometry,
    params: CircuitParams,
    flux_grid,
    config: MinimizerConfig = MinimizerConfig(),
) -> list[GroundStateResult]:
    """Ground states along a sorted flux grid with warm-start continuation."""
    flux_grid = np.asarray(flux_grid, dtype=float)
    if flux_grid.ndim != 1 or flux_grid.size == 0:
        raise ValueError("flux_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(flux_grid) < 0):
        raise ValueError("flux_grid must be sorted ascending")

    tol = config.polish_tol_ej * params.ej_nominal()
    window = config.degeneracy_window_ej * params.ej_nominal()
    results: list[GroundStateResult] = []
    for i, f in enumerate(flux_grid):
        gauge = build_gauge(geometry, f)
        fresh = minimize(geometry, gauge, params, config, stream=(i,))
        chosen = fresh
        jump = False
        if results:
            phi_w, e_w, g_w = _polish(geometry, gauge, params, results[-1].phi, tol)
            if e_w < fresh.energy - window:
                # continuation found a strictly better minimum than the
                # restarts did; keep its canonical symmetry partner
                phi_w, e_w, g_w = _canonical_state(
                    [(phi_w, e_w, g_w)], geometry, gauge, params, tol, window
                )
                chosen = GroundStateResult(
                    phi=phi_w,
                    energy=e_w,
                    gradient_max=g_w,
                    converged=g_w <= tol,
                    degenerate_count=fresh.degenerate_count,
                    frustration=float(f),
                    vortices=vortex_map(geometry, gauge, phi_w),
                )
            else:
                # within the window the fresh result wins (its degenerate
                # representative is canonical); flag a reorganisation when
                # continuation lost by more than the window
                jump = (e_w - fresh.energy) > window
        results.append(replace(chosen, jump=jump))
    return results
