"""Cavity reflection: array charge susceptibility, S11, photon number, fitting.

The drive pad (island 0) couples the array to a microwave cavity.  Linear
response of the pad charge to the cavity field gives a complex frequency
pull chi(nu) that enters the single-port reflection coefficient

    S11(nu) = kappa_ext / ( -i (nu - omega_c) + kappa_tot/2 + i chi ) - 1,

which for chi = 0 is the standard over/under-coupled resonator line shape

    S11 = ((kappa_ext - kappa_int)/2 + i (nu - omega_c))
          / ((kappa_ext + kappa_int)/2 - i (nu - omega_c)).

(The equivalent form 1 - kappa/D differs by a global minus sign, i.e. a
reference-plane choice; |S11| is identical.)  All linewidths are stored as
ordinary frequencies in MHz: a rate quoted as "2 pi x 1.5 MHz" is 1.5 here.

Susceptibility.  Driving the pad and eliminating the charge degrees of
freedom gives the pad-charge response through the matrix

    [ h_tilde (nu^2 - eta^2 C^-1 h_tilde)^-1 ]_{00},

whose poles sit exactly at the plasma mode frequencies.  Expanded in the
C-orthonormal eigenbasis this is sum_k w_k nu_k^2 / (nu^2 - nu_k^2) with pad
weights w_k = (C v_k)_0^2 that obey sum_k w_k = C_00.  Two photon-exchange
vertices of g/2e each plus one quadrature factor 1/sqrt(2) set the absolute
scale (see CHI_PULL_COEFF in constants.py); in working units

    chi_MHz(nu) = CHI_PULL_COEFF * g_MHz^2
                  * [ K h_tilde (nu^2 C - K h_tilde)^-1 C ]_{00}

with K = MODE_FREQ2_COEFF and the bracket in fF.  A single isolated mode
therefore pulls the cavity by CHI_PULL_COEFF * g^2 * w_k nu_k^2 /
(omega_c^2 - nu_k^2), which carries the sign of the textbook dispersive
shift: positive chi means the dressed resonance sits above the bare
omega_c, so modes above (below) the cavity push it down (up).  With a
finite shunt conductance Im(chi) <= 0, which adds to kappa_tot in the
denominator of S11 (extra broadening, |S11| <= 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .constants import CHI_PULL_COEFF, HBAR, MODE_FREQ2_COEFF, dbm_to_watts
from .energy import hessian
from .lattice import ArrayGeometry, CircuitParams, capacitance_matrix
from .spinwave import conductance_matrix, lossy_dynamical_matrix
from .lattice import build_gauge


class PoleError(ArithmeticError):
    """Probe frequency hit a lossless array resonance exactly."""


class FitError(RuntimeError):
    """Resonance fit failed to converge or left the scanned window."""


@dataclass(frozen=True)
class CavityParams:
    """Cavity and coupling parameters (ordinary frequencies: value = rate/2pi)."""

    omega_c_GHz: float = 10.127
    kappa_ext_MHz: float = 1.5
    kappa_int_MHz: float = 1.0
    g_MHz: float = 100.0

    def __post_init__(self) -> None:
        if self.omega_c_GHz <= 0 or not np.isfinite(self.omega_c_GHz):
            raise ValueError("omega_c_GHz must be positive")
        for name in ("kappa_ext_MHz", "kappa_int_MHz", "g_MHz"):
            v = getattr(self, name)
            if v < 0 or not np.isfinite(v):
                raise ValueError(f"{name} must be non-negative")

    @property
    def kappa_tot_MHz(self) -> float:
        return self.kappa_ext_MHz + self.kappa_int_MHz


@dataclass(frozen=True)
class ReflectionTrace:
    """A reflection scan: probe frequencies (GHz) and complex S11 samples."""

    nu_ghz: np.ndarray
    s11: np.ndarray


def susceptibility(
    hess: np.ndarray,
    cap: np.ndarray,
    gmat: np.ndarray | None,
    cavity: CavityParams,
    nu_ghz,
):
    """Complex cavity frequency pull chi (MHz) at probe frequency nu (GHz).

    ``gmat`` is the shunt conductance matrix (units G_0) or None for the
    lossless array.  Scalar or array ``nu_ghz`` accepted.  A lossless probe
    exactly on an array mode raises :class:`PoleError` rather than returning
    a silent infinity.
    """
    nu_arr = np.atleast_1d(np.asarray(nu_ghz, dtype=float))
    prefactor = CHI_PULL_COEFF * cavity.g_MHz**2
    c0 = cap[:, 0]
    out = np.empty(nu_arr.shape, dtype=complex)
    for i, nu in enumerate(nu_arr):
        ht = hess if gmat is None else lossy_dynamical_matrix(hess, gmat, nu)
        a = nu**2 * cap - MODE_FREQ2_COEFF * ht
        if gmat is None:
            # a lossless probe exactly on a mode makes `a` singular; LU would
            # quietly return garbage there, so test the smallest singular value
            sv = np.linalg.svd(a, compute_uv=False)
            scale = max(
                sv[0],
                nu**2 * np.max(np.abs(cap)) + MODE_FREQ2_COEFF * np.max(np.abs(ht)),
            )
            if sv[-1] <= 1e-14 * scale:
                raise PoleError(
                    f"probe frequency {nu} GHz sits on a lossless array mode"
                )
        try:
            y = np.linalg.solve(a, c0)
        except np.linalg.LinAlgError as exc:
            raise PoleError(
                f"probe frequency {nu} GHz sits on a lossless array mode"
            ) from exc
        val = MODE_FREQ2_COEFF * (ht[0, :] @ y)
        if not np.isfinite(val):
            raise PoleError(
                f"probe frequency {nu} GHz sits on a lossless array mode"
            )
        out[i] = prefactor * val
    return out[0] if np.isscalar(nu_ghz) or np.ndim(nu_ghz) == 0 else out


def s11(chi_mhz, cavity: CavityParams, nu_ghz):
    """Single-port reflection coefficient at probe nu (GHz) given chi (MHz)."""
    delta_mhz = (np.asarray(nu_ghz, dtype=float) - cavity.omega_c_GHz) * 1000.0
    denom = -1j * delta_mhz + cavity.kappa_tot_MHz / 2.0 + 1j * np.asarray(chi_mhz)
    return cavity.kappa_ext_MHz / denom - 1.0


def reflection_trace(
    geometry: ArrayGeometry,
    params: CircuitParams,
    cavity: CavityParams,
    ground_state,
    freq_grid,
    lossless: bool = False,
) -> ReflectionTrace:
    """S11 scan at one flux point, from a ground-state result."""
    gauge = build_gauge(geometry, ground_state.frustration)
    h = hessian(geometry, gauge, params, ground_state.phi)
    cap = capacitance_matrix(geometry, params)
    gmat = None if (lossless or params.G_over_G0 == 0) else conductance_matrix(geometry, params)
    freq_grid = np.asarray(freq_grid, dtype=float)
    chi = susceptibility(h, cap, gmat, cavity, freq_grid)
    return ReflectionTrace(nu_ghz=freq_grid, s11=s11(chi, cavity, freq_grid))


def reflection_map(
    sweep_results,
    geometry: ArrayGeometry,
    params: CircuitParams,
    cavity: CavityParams,
    freq_grid,
) -> np.ndarray:
    """Complex S11 on the (flux, frequency) grid of a ground-state sweep."""
    freq_grid = np.asarray(freq_grid, dtype=float)
    out = np.empty((len(sweep_results), freq_grid.size), dtype=complex)
    cap = capacitance_matrix(geometry, params)
    gmat = None if params.G_over_G0 == 0 else conductance_matrix(geometry, params)
    for i, res in enumerate(sweep_results):
        gauge = build_gauge(geometry, res.frustration)
        h = hessian(geometry, gauge, params, res.phi)
        chi = susceptibility(h, cap, gmat, cavity, freq_grid)
        out[i] = s11(chi, cavity, freq_grid)
    return out


def photon_number_from_watts(p_watts: float, cavity: CavityParams) -> float:
    """Steady-state intracavity photon number for input power in watts.

    n = 4 P / (hbar omega_c kappa_tot) with omega_c, kappa_tot as angular
    rates; linear in P.
    """
    omega_ang = 2.0 * np.pi * cavity.omega_c_GHz * 1e9
    kappa_ang = 2.0 * np.pi * cavity.kappa_tot_MHz * 1e6
    return 4.0 * p_watts / (HBAR * omega_ang * kappa_ang)


def photon_number(p_dbm: float, cavity: CavityParams) -> float:
    """Steady-state intracavity photon number for input power in dBm."""
    return photon_number_from_watts(dbm_to_watts(p_dbm), cavity)


@dataclass(frozen=True)
class FitResult:
    omega_c_GHz: float
    kappa_ext_MHz: float
    kappa_int_MHz: float
    residual: float  # rms of stacked re/im residuals


def _s11_model(nu_ghz, omega_c, kappa_ext, kappa_int):
    delta = (nu_ghz - omega_c) * 1000.0
    return ((kappa_ext - kappa_int) / 2.0 + 1j * delta) / (
        (kappa_ext + kappa_int) / 2.0 - 1j * delta
    )


def fit_resonance(trace: ReflectionTrace) -> FitResult:
    """Least-squares fit of (omega_c, kappa_ext, kappa_int) to a reflection scan.

    Real and imaginary parts are fitted simultaneously.  The scan should span
    the resonance by several linewidths.  Both coupling branches (kappa_ext
    greater or smaller than kappa_int) are tried since the dip depth alone
    does not distinguish them.
    """
    nu = np.asarray(trace.nu_ghz, dtype=float)
    data = np.asarray(trace.s11)
    if nu.size < 5:
        raise FitError("too few samples to fit a resonance")

    mag2 = np.abs(data) ** 2
    i0 = int(np.argmin(mag2))
    omega0 = nu[i0]
    # linewidth guess: full width where |S11|^2 rises halfway back to its edges
    floor = np.median(mag2[[0, -1]])
    half = (mag2[i0] + floor) / 2.0
    above = np.nonzero(mag2 > half)[0]
    lo = above[above < i0]
    hi = above[above > i0]
    if lo.size and hi.size:
        width_mhz = max((nu[hi[0]] - nu[lo[-1]]) * 1000.0, 1e-3)
    else:
        width_mhz = max((nu[-1] - nu[0]) * 200.0, 1e-3)
    depth = np.sqrt(mag2[i0])
    # |S11|_min = |ke - ki| / (ke + ki): the two branch guesses
    guesses = []
    for sign in (+1.0, -1.0):
        ke = width_mhz * (1.0 + sign * depth) / 2.0
        ki = width_mhz - ke
        guesses.append((omega0, max(ke, 1e-6), max(ki, 0.0)))

    def residuals(p):
        model = _s11_model(nu, *p)
        r = model - data
        return np.concatenate([r.real, r.imag])

    best = None
    for guess in guesses:
        sol = scipy.optimize.least_squares(
            residuals,
            guess,
            bounds=([nu[0], 0.0, 0.0], [nu[-1], np.inf, np.inf]),
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        if best is None or sol.cost < best.cost:
            best = sol
    if best is None or not best.success:
        raise FitError("resonance fit did not converge")
    omega_c, ke, ki = best.x
    span = nu[-1] - nu[0]
    if omega_c <= nu[0] + 1e-9 * span or omega_c >= nu[-1] - 1e-9 * span:
        raise FitError(
            f"fitted resonance {omega_c} GHz sits at the edge of the scanned window"
        )
    rms = float(np.sqrt(2.0 * best.cost / (2.0 * nu.size)))
    return FitResult(
        omega_c_GHz=float(omega_c),
        kappa_ext_MHz=float(ke),
        kappa_int_MHz=float(ki),
        residual=rms,
    )
