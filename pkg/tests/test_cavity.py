from __future__ import annotations

import numpy as np
import pytest

from conftest import rng
from vortexlab.cavity import (
    CavityParams,
    FitError,
    PoleError,
    ReflectionTrace,
    _s11_model,
    fit_resonance,
    photon_number,
    photon_number_from_watts,
    reflection_map,
    reflection_trace,
    s11,
    susceptibility,
)
from vortexlab.constants import CHI_PULL_COEFF, MODE_FREQ2_COEFF
from vortexlab.energy import hessian
from vortexlab.groundstate import MinimizerConfig, minimize, sweep_ground_states
from vortexlab.lattice import (
    CircuitParams,
    build_gauge,
    build_geometry,
    capacitance_matrix,
)
from vortexlab.spinwave import conductance_matrix, mode_spectrum

CAVITY = CavityParams()
FAST = MinimizerConfig(restarts=8, steps=20_000, seed=1)


def toy_array(L=2, W=3, f=0.3, seed=4):
    """Small array with disordered EJ so every mode couples to the pad."""
    geom = build_geometry(L, W)
    ej = 25.8 * (1.0 + 0.2 * rng(seed).uniform(-1, 1, geom.n_junctions))
    params = CircuitParams(EJ_GHz=ej)
    gauge = build_gauge(geom, f)
    res = minimize(geom, gauge, params, FAST)
    h = hessian(geom, gauge, params, res.phi)
    cap = capacitance_matrix(geom, params)
    return geom, params, h, cap


def test_susceptibility_matches_eigenmode_sum():
    # chi = pref * sum_k w_k nu_k^2 / (nu^2 - nu_k^2), w_k = (C v_k)_0^2,
    # evaluated independently from the mode decomposition
    _, _, h, cap = toy_array()
    ms = mode_spectrum(h, cap)
    w = (cap @ ms.eigenvectors)[0, :] ** 2
    assert np.sum(w) == pytest.approx(cap[0, 0], rel=1e-12)  # completeness
    pref = CHI_PULL_COEFF * CAVITY.g_MHz**2
    for nu in (1.0, 9.7, 26.3, 55.0):
        by_sum = pref * np.sum(w * ms.frequencies_ghz**2 / (nu**2 - ms.frequencies_ghz**2))
        by_solve = susceptibility(h, cap, None, CAVITY, nu)
        assert by_solve == pytest.approx(by_sum, rel=1e-9)
        assert by_solve.imag == 0.0


def test_susceptibility_poles_sit_on_mode_frequencies():
    _, params, h, cap = toy_array()
    ms = mode_spectrum(h, cap)
    w = (cap @ ms.eigenvectors)[0, :] ** 2
    assert np.min(w) > 1e-6 * cap[0, 0]  # disorder couples every mode
    assert np.min(np.diff(ms.frequencies_ghz)) > 1e-5 * ms.frequencies_ghz[-1]
    pref = CHI_PULL_COEFF * CAVITY.g_MHz**2
    for k, nu_k in enumerate(ms.frequencies_ghz):
        lo = susceptibility(h, cap, None, CAVITY, nu_k * (1 - 1e-7))
        hi = susceptibility(h, cap, None, CAVITY, nu_k * (1 + 1e-7))
        # residue w_k nu_k^2 > 0: chi -> -inf below the pole, +inf above,
        # so the sign change brackets the pole to 1e-7 relative in frequency
        pole_term = pref * w[k] / ((1 - 1e-7) ** 2 - 1.0)
        assert lo.real < 0 < hi.real
        assert lo.real == pytest.approx(pole_term, rel=0.15)
        assert hi.real == pytest.approx(-pole_term, rel=0.15)
        with pytest.raises(PoleError):
            susceptibility(h, cap, None, CAVITY, float(nu_k))


def test_single_mode_dispersive_pull():
    # one degree of freedom tuned close to the cavity: chi(omega_c) follows
    # the single-mode closed form exactly and scales as 1/Delta, with the
    # textbook sign (a mode below the cavity pushes the resonance up)
    c00 = 1.5
    wc = CAVITY.omega_c_GHz
    limit = CHI_PULL_COEFF * CAVITY.g_MHz**2 * c00 * 1000.0 * wc / 2.0
    for delta_mhz in (50.0, 100.0, 200.0):
        nu0 = wc - delta_mhz / 1000.0
        h = np.array([[nu0**2 * c00 / MODE_FREQ2_COEFF]])
        cap = np.array([[c00]])
        chi = susceptibility(h, cap, None, CAVITY, wc)
        exact = CHI_PULL_COEFF * CAVITY.g_MHz**2 * c00 * nu0**2 / (wc**2 - nu0**2)
        assert chi.real == pytest.approx(exact, rel=1e-12)
        assert chi.real > 0
        # chi * Delta approaches a constant; corrections enter at 1.5 Delta/omega_c
        assert chi.real * delta_mhz == pytest.approx(limit, rel=2.0 * delta_mhz / 1000.0 / wc)


def test_susceptibility_scalar_and_array_forms_agree():
    _, _, h, cap = toy_array()
    grid = np.array([5.0, 9.9, 31.4])
    vec = susceptibility(h, cap, None, CAVITY, grid)
    assert vec.shape == grid.shape
    for nu, chi in zip(grid, vec):
        assert susceptibility(h, cap, None, CAVITY, float(nu)) == chi


def test_loss_moves_chi_into_lower_half_plane():
    geom, params, h, cap = toy_array()
    gmat = conductance_matrix(geom, params)
    grid = np.linspace(5.0, 60.0, 301)
    chi = susceptibility(h, cap, gmat, CAVITY, grid)
    assert np.all(chi.imag < 0)
    assert np.all(np.isfinite(chi))  # poles are regularized by the loss


def test_s11_without_array_equals_resonator_line_shape():
    grid = np.linspace(10.0, 10.25, 501)
    for cav in (CAVITY, CavityParams(10.127, 0.8, 2.0, 50.0)):
        direct = s11(0.0, cav, grid)
        model = _s11_model(grid, cav.omega_c_GHz, cav.kappa_ext_MHz, cav.kappa_int_MHz)
        assert np.max(np.abs(direct - model)) < 1e-14


def test_s11_unitary_without_internal_loss():
    cav = CavityParams(kappa_int_MHz=0.0)
    grid = np.linspace(10.0, 10.25, 201)
    assert np.max(np.abs(np.abs(s11(0.0, cav, grid)) - 1.0)) < 1e-12
    # a lossless array keeps it unitary: chi is real
    _, _, h, cap = toy_array()
    chi = susceptibility(h, cap, None, cav, grid)
    assert np.max(np.abs(np.abs(s11(chi, cav, grid)) - 1.0)) < 1e-12


def test_s11_critical_coupling_dip_reaches_zero():
    cav = CavityParams(kappa_ext_MHz=1.2, kappa_int_MHz=1.2)
    assert s11(0.0, cav, cav.omega_c_GHz) == 0.0


def test_s11_passive_with_loss():
    geom, params, h, cap = toy_array()
    gmat = conductance_matrix(geom, params)
    grid = np.linspace(5.0, 60.0, 1001)
    chi = susceptibility(h, cap, gmat, CAVITY, grid)
    assert np.max(np.abs(s11(chi, CAVITY, grid))) <= 1.0 + 1e-12


def test_dip_sits_at_cavity_plus_chi():
    # for a slowly varying chi the reflection minimum is at omega_c + Re chi
    for chi_mhz in (-3.0 + 0.0j, 2.5 - 0.4j, 7.0 - 1.0j):
        grid = CAVITY.omega_c_GHz + np.linspace(-20, 20, 80_001) / 1000.0
        dip = grid[int(np.argmin(np.abs(s11(chi_mhz, CAVITY, grid))))]
        expected = CAVITY.omega_c_GHz + chi_mhz.real / 1000.0
        assert dip == pytest.approx(expected, abs=2 * (grid[1] - grid[0]))


def test_reflection_trace_and_map_shapes():
    geom = build_geometry(3, 3)
    params = CircuitParams()
    gs = sweep_ground_states(geom, params, np.linspace(0.0, 0.5, 4), FAST)
    grid = np.linspace(10.0, 10.25, 101)
    tr = reflection_trace(geom, params, CAVITY, gs[0], grid)
    assert isinstance(tr, ReflectionTrace)
    assert tr.s11.shape == grid.shape
    assert np.all(np.abs(tr.s11) <= 1.0 + 1e-12)
    m = reflection_map(gs, geom, params, CAVITY, grid)
    assert m.shape == (4, 101)
    assert np.all(np.isfinite(m))
    assert np.array_equal(m[0], tr.s11)


def test_photon_number_basics():
    assert photon_number_from_watts(0.0, CAVITY) == 0.0
    n1 = photon_number_from_watts(1e-16, CAVITY)
    n2 = photon_number_from_watts(2e-16, CAVITY)
    assert n2 == pytest.approx(2 * n1, rel=1e-12)
    # -132 dBm at the device working point
    assert photon_number(-132.0, CAVITY) == pytest.approx(2.3944362285286482, rel=1e-12)
    assert abs(photon_number(-132.0, CAVITY) - 2.4) < 0.05


def test_fit_round_trip_exact():
    grid = np.linspace(10.05, 10.21, 801)
    for ke, ki in ((1.5, 1.0), (0.7, 2.2), (2.0, 2.0), (3.1, 0.05)):
        cav = CavityParams(10.127, ke, ki, 100.0)
        fit = fit_resonance(ReflectionTrace(grid, s11(0.0, cav, grid)))
        assert fit.omega_c_GHz == pytest.approx(10.127, abs=1e-9)
        assert fit.kappa_ext_MHz == pytest.approx(ke, rel=1e-9)
        assert fit.kappa_int_MHz == pytest.approx(ki, rel=1e-9)
        assert fit.residual < 1e-12


def test_fit_tolerates_measurement_noise():
    grid = np.linspace(10.077, 10.177, 401)
    clean = s11(0.0, CAVITY, grid)
    good = 0
    for seed in range(100):
        r = rng(1000 + seed)
        noisy = clean + 0.01 * (r.standard_normal(grid.size) + 1j * r.standard_normal(grid.size))
        fit = fit_resonance(ReflectionTrace(grid, noisy))
        ok = (
            abs(fit.omega_c_GHz - CAVITY.omega_c_GHz) * 1000.0 < 0.02 * CAVITY.kappa_tot_MHz
            and abs(fit.kappa_ext_MHz - CAVITY.kappa_ext_MHz) < 0.02 * CAVITY.kappa_ext_MHz
            and abs(fit.kappa_int_MHz - CAVITY.kappa_int_MHz) < 0.02 * CAVITY.kappa_int_MHz
        )
        good += ok
    assert good >= 95


def test_fit_error_paths():
    with pytest.raises(FitError):
        fit_resonance(ReflectionTrace(np.linspace(10, 10.1, 3), np.ones(3, complex)))
    # resonance outside the scanned window drives the fit to the bound
    cav = CavityParams(10.3, 1.5, 1.0, 100.0)
    grid = np.linspace(10.05, 10.21, 401)
    with pytest.raises(FitError):
        fit_resonance(ReflectionTrace(grid, s11(0.0, cav, grid)))


def test_cavity_params_validation():
    with pytest.raises(ValueError):
        CavityParams(omega_c_GHz=-1.0)
    with pytest.raises(ValueError):
        CavityParams(kappa_ext_MHz=-0.1)
    assert CAVITY.kappa_tot_MHz == 2.5
