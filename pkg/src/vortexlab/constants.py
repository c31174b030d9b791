"""Physical constants and the unit conversions used across the package.

Internal working units
----------------------
energy        : GHz   (E/h, i.e. energies are quoted as ordinary frequencies)
capacitance   : fF
inductance    : nH
frequency     : GHz for mode/probe frequencies, MHz for cavity linewidths
flux          : dimensionless frustration f = Phi/Phi_0 per plaquette
phase         : radians

All frequencies are *ordinary* frequencies (cycles per unit time).  A quantity
quoted in the literature as "2 pi x 1.5 MHz" (an angular rate) is stored here
as 1.5 MHz.  Every formula in the package is written so that this convention
is consistent throughout; only the photon-number formula needs explicit 2*pi
factors, and it applies them internally.

Key derived conversion factors (exact SI 2019 definitions of e and h):

``MODE_FREQ2_COEFF``
    A harmonic network with potential curvature matrix h (in GHz per rad^2)
    and capacitance matrix C (in fF) has normal mode frequencies

        nu_k[GHz] = sqrt(MODE_FREQ2_COEFF * eigval_k(h C^-1)).

    Derivation: omega^2 = eta^2 h_J / C_F with eta = 2 pi / Phi_0 and
    h_J = h_planck * (h_GHz * 1e9).  Collecting powers of ten and using
    Phi_0 = h_planck / (2 e) gives nu_GHz^2 = (4 e^2 * 1e6 / h_planck) *
    h_GHz / C_fF.  For a single junction this reproduces the textbook plasma
    frequency sqrt(8 E_J E_C) / h with E_C = e^2 / 2C.

``JUNCTION_INDUCTANCE_COEFF_NH``
    The linearized inductance of a junction with energy-curvature
    w = E_J cos(gamma) (in GHz) is L[nH] = JUNCTION_INDUCTANCE_COEFF_NH / w.
    Equals Phi_0^2 / (4 pi^2 h_planck) expressed in nH*GHz.

``LOSS_IM_COEFF``
    In (GHz, G_0 = 2e^2/h) units the resistive term nu*G/eta^2 of the lossy
    dynamical matrix reduces to nu_GHz * (G/G_0) / (8 pi^2).  Dimensionless
    bookkeeping: G_0 / (eta^2 h_planck) = 1 / (8 pi^2) exactly.

``CHI_PULL_COEFF``
    Scale of the cavity frequency pull.  The cavity exchanges photons with
    the array through the pad voltage; each vertex carries g / 2e and the
    field quadrature contributes one factor 1/sqrt(2), so the pull is

        chi = (g^2 hbar / (4 sqrt(2) e^2)) * [h_t (nu^2 - eta^2 C^-1 h_t)^-1]_00

    in SI angular units.  The pad response in brackets equals
    (Phi_0/2pi)^2 * (a dimensionless mode sum) * C, so chi inherits the
    units of g^2 * (R_K * C).  Converting g and chi to ordinary MHz and C
    to fF leaves a single factor 2 pi * 1e6 * 1e-15 from g^2/chi, hence

        chi_MHz = CHI_PULL_COEFF * g_MHz^2 * S_fF,
        CHI_PULL_COEFF = (R_K / (4 sqrt(2))) * 1e-9,

    where S_fF = MODE_FREQ2_COEFF * [h_t (nu^2 C - K h_t)^-1 C]_00 is the
    pad-weighted mode sum sum_k w_k nu_k^2/(nu^2 - nu_k^2) (units fF,
    weights summing to C_00) and R_K = h/e^2 is the resistance quantum.
"""

from __future__ import annotations

import math

# Exact SI values (2019 redefinition).
ELEMENTARY_CHARGE = 1.602176634e-19  # C
PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2.0 * math.pi)  # J s
FLUX_QUANTUM = PLANCK / (2.0 * ELEMENTARY_CHARGE)  # Wb, superconducting Phi_0
CONDUCTANCE_QUANTUM = 2.0 * ELEMENTARY_CHARGE**2 / PLANCK  # S, G_0 = 2e^2/h

# nu_GHz^2 = MODE_FREQ2_COEFF * eig(h[GHz] C[fF]^-1); see module docstring.
MODE_FREQ2_COEFF = 4.0 * ELEMENTARY_CHARGE**2 * 1e6 / PLANCK  # GHz^2 fF / GHz

# L[nH] = JUNCTION_INDUCTANCE_COEFF_NH / (E_J cos(gamma) [GHz]).  The 1e9 (Hz per
# GHz) and 1e-9 (H per nH) powers of ten cancel exactly.
JUNCTION_INDUCTANCE_COEFF_NH = FLUX_QUANTUM**2 / (4.0 * math.pi**2 * PLANCK)

# Im part of the lossy dynamical matrix: nu_GHz * (G/G_0) * LOSS_IM_COEFF, in GHz.
LOSS_IM_COEFF = 1.0 / (8.0 * math.pi**2)

# chi_MHz = CHI_PULL_COEFF * g_MHz^2 * S_fF; see module docstring.
VON_KLITZING = PLANCK / ELEMENTARY_CHARGE**2  # ohm, R_K = h/e^2
CHI_PULL_COEFF = VON_KLITZING / (4.0 * math.sqrt(2.0)) * 1e-9  # MHz / (MHz^2 fF)


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power level in dBm to watts (0 dBm = 1 mW)."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def charging_energy_ghz(c_ff: float) -> float:
    """Single-electron charging energy E_C/h = e^2/(2C) in GHz for C in fF."""
    return ELEMENTARY_CHARGE**2 / (2.0 * c_ff * 1e-15) / PLANCK / 1e9


def capacitance_for_charging_energy(ec_ghz: float) -> float:
    """Inverse of :func:`charging_energy_ghz`: capacitance in fF giving E_C/h = ec_ghz."""
    return ELEMENTARY_CHARGE**2 / (2.0 * PLANCK * ec_ghz * 1e9) / 1e-15
