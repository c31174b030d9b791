"""Harmonic (plasma) modes of the array around a phase configuration.

Expanding the Josephson potential to second order around a minimum phi0
gives coupled equations of motion  C dV/dt = q_dot = -eta^2 h dPhi  for the
node flux deviations, eta = 2 pi / Phi_0, so the squared mode frequencies
are the eigenvalues of eta^2 h C^-1 (equivalently of the similar matrix
eta^2 C^-1 h).  In package units this is the symmetric-definite pencil

    MODE_FREQ2_COEFF * h v = nu^2 C v,     nu in GHz,

solved via Cholesky symmetrization (scipy.linalg.eigh with b=C); eigenvectors
are returned C-orthonormal (V^T C V = 1).  A dense non-symmetric eigensolve
of eta^2 C^-1 h is kept in the test suite as an independent oracle.

Dissipation enters through a per-junction shunt conductance G: the resistive
current has the same graph-Laplacian structure as the Hessian, and under the
e^{-i nu t} convention used by the cavity input-output relation the dynamical
matrix becomes

    h_tilde(nu) = h - i * nu * Gmat / eta^2,

whose imaginary part is -nu_GHz * (G/G_0) / (8 pi^2) * Laplacian in package
units.  The minus sign is the dissipative branch: it makes the array
susceptibility broaden (not sharpen) the cavity line.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .constants import JUNCTION_INDUCTANCE_COEFF_NH, LOSS_IM_COEFF, MODE_FREQ2_COEFF
from .energy import hessian, link_phases
from .lattice import ArrayGeometry, CircuitParams, GaugeField, build_gauge

#: modes below this frequency are counted as "soft" and worth flagging
SOFT_MODE_GHZ = 0.1

#: frequencies below this are indistinguishable from zero at double precision
#: once the curvature assembly's round-off (relative to EJ) is propagated
#: through the eigensolve
ZERO_FREQ_FLOOR_GHZ = 1e-3


class NotAMinimumError(ValueError):
    """The curvature matrix has a significantly negative eigenvalue."""


class SingularCurvatureError(np.linalg.LinAlgError):
    """The curvature matrix is (near-)singular, e.g. at a degenerate minimum."""


@dataclass(frozen=True)
class ModeSpectrum:
    """Plasma mode frequencies (GHz, ascending) and C-orthonormal eigenvectors."""

    frequencies_ghz: np.ndarray
    eigenvectors: np.ndarray  # column k belongs to frequencies_ghz[k]
    n_clamped: int = 0  # tiny negative eigenvalues clamped to zero

    @property
    def n_modes(self) -> int:
        return self.frequencies_ghz.size

    @property
    def n_soft(self) -> int:
        return int(np.sum(np.real(self.frequencies_ghz) < SOFT_MODE_GHZ))


def mode_spectrum(hess: np.ndarray, cap: np.ndarray) -> ModeSpectrum:
    """Normal modes of the pencil (MODE_FREQ2_COEFF * h, C).

    Eigenvalues within a relative tolerance below zero are clamped to zero
    (flat directions at a degenerate minimum produce harmless -1e-18-type
    round-off); anything more negative means the input configuration is not
    a minimum and raises :class:`NotAMinimumError`.  A complex ``hess`` (the
    lossy dynamical matrix) is handled by a dense non-symmetric solve and
    yields complex frequencies on the decaying branch (Im <= 0).
    """
    if np.iscomplexobj(hess):
        lam, vec = scipy.linalg.eig(
            MODE_FREQ2_COEFF * np.linalg.solve(cap, hess)
        )
        order = np.argsort(lam.real)
        lam, vec = lam[order], vec[:, order]
        freqs = np.sqrt(lam.astype(complex))
        freqs = np.where(freqs.imag > 0, -freqs, freqs)  # decaying branch
        return ModeSpectrum(frequencies_ghz=freqs, eigenvectors=vec)

    lam, vec = scipy.linalg.eigh(MODE_FREQ2_COEFF * hess, cap)
    # On a flat potential (e.g. a fully frustrated single-row chain) the
    # curvature is pure assembly round-off, so a tolerance relative to
    # max|lam| alone would collapse to zero and misread the noise as a
    # saddle.  Floor it at ZERO_FREQ_FLOOR_GHZ**2: modes below that are
    # numerically zero, while a genuine saddle sits orders of magnitude
    # below -tol.
    tol = max(1e-8 * np.max(np.abs(lam)), ZERO_FREQ_FLOOR_GHZ**2)
    if lam[0] < -tol:
        raise NotAMinimumError(
            f"curvature has negative eigenvalue {lam[0]:.3e} (tolerance {tol:.3e}); "
            "the configuration is not a minimum"
        )
    n_clamped = int(np.sum(lam < 0))
    if n_clamped:
        warnings.warn(
            f"clamped {n_clamped} tiny negative eigenvalue(s) to zero",
            RuntimeWarning,
            stacklevel=2,
        )
        lam = np.maximum(lam, 0.0)
    return ModeSpectrum(
        frequencies_ghz=np.sqrt(lam), eigenvectors=vec, n_clamped=n_clamped
    )


@dataclass(frozen=True)
class InductanceMatrix:
    """Linearized inductance matrix L = h^-1 / eta^2 in nH, with cond(h)."""

    matrix_nh: np.ndarray
    condition_number: float


def inductance_matrix(hess: np.ndarray) -> InductanceMatrix:
    """Invert the curvature matrix into an effective inductance matrix (nH)."""
    lam, vec = np.linalg.eigh(hess)
    amax = np.max(np.abs(lam))
    if amax == 0 or np.min(np.abs(lam)) < 1e-12 * amax:
        k = int(np.argmin(np.abs(lam)))
        raise SingularCurvatureError(
            "curvature matrix is singular; near-null eigenvector "
            f"{np.array2string(vec[:, k], precision=3, suppress_small=True)}"
        )
    return InductanceMatrix(
        matrix_nh=JUNCTION_INDUCTANCE_COEFF_NH * np.linalg.inv(hess),
        condition_number=float(amax / np.min(np.abs(lam))),
    )


def link_inductances(
    geometry: ArrayGeometry,
    gauge: GaugeField,
    params: CircuitParams,
    phi: np.ndarray,
) -> np.ndarray:
    """Per-junction linearized inductance 1/(eta^2 EJ cos gamma) in nH.

    Negative values flag junctions biased past pi/2 (inverted curvature).
    """
    w = params.ej_per_junction(geometry) * np.cos(link_phases(geometry, gauge, phi))
    return JUNCTION_INDUCTANCE_COEFF_NH / w


def conductance_matrix(geometry: ArrayGeometry, params: CircuitParams) -> np.ndarray:
    """Graph-Laplacian shunt conductance matrix over the free islands (units G_0)."""
    n = geometry.n_islands
    g = np.zeros((n + 1, n + 1))
    a, b = geometry.junction_a, geometry.junction_b
    w = np.full(geometry.n_junctions, params.G_over_G0)
    np.add.at(g, (a, a), w)
    np.add.at(g, (b, b), w)
    np.add.at(g, (a, b), -w)
    np.add.at(g, (b, a), -w)
    return g[:n, :n]


def lossy_dynamical_matrix(
    hess: np.ndarray, gmat: np.ndarray, nu_ghz: float
) -> np.ndarray:
    """Complex dynamical matrix h - i*nu*Gmat/eta^2 at probe frequency nu (GHz).

    See the module docstring for the sign convention; reduces to h when the
    conductance vanishes.
    """
    return hess - 1j * nu_ghz * LOSS_IM_COEFF * gmat


def spectrum_vs_flux(
    sweep_results,
    geometry: ArrayGeometry,
    params: CircuitParams,
    cap: np.ndarray | None = None,
) -> list[ModeSpectrum]:
    """Mode spectra at each point of a ground-state sweep (lossless)."""
    from .lattice import capacitance_matrix

    if cap is None:
        cap = capacitance_matrix(geometry, params)
    spectra = []
    for res in sweep_results:
        gauge = build_gauge(geometry, res.frustration)
        h = hessian(geometry, gauge, params, res.phi)
        spectra.append(mode_spectrum(h, cap))
    return spectra
