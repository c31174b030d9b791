from __future__ import annotations

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from conftest import SMALL_LATTICES, rng
from vortexlab.lattice import (
    NO_JUNCTION,
    CircuitParams,
    assemble_maxwell,
    build_gauge,
    build_geometry,
    capacitance_matrix,
    plaquette_gauge_sums,
)

LATTICE_SIZES = SMALL_LATTICES + [(10, 3), (30, 3), (7, 5)]


def enumerate_counts(L: int, W: int) -> tuple[int, int]:
    """Independent island/junction count by enumerating the raw (L+1)x(W+1) grid.

    Start from every grid node and every nearest-neighbour bond, then fuse the
    top and bottom rows into single nodes and drop bonds interior to a fused
    row.  Ground (the fused bottom row) is not a free island.
    """
    nodes = {(x, y) for x in range(L + 1) for y in range(W + 1)}

    def merge(node):
        x, y = node
        if y == 0:
            return "bottom"
        if y == W:
            return "top"
        return (x, y)

    merged_nodes = {merge(n) for n in nodes}
    bonds = []
    for x in range(L + 1):
        for y in range(W + 1):
            if x + 1 <= L:
                bonds.append(((x, y), (x + 1, y)))
            if y + 1 <= W:
                bonds.append(((x, y), (x, y + 1)))
    merged_bonds = [(merge(a), merge(b)) for a, b in bonds]
    junctions = [ab for ab in merged_bonds if ab[0] != ab[1]]
    free_islands = merged_nodes - {"bottom"}
    return len(free_islands), len(junctions)


@pytest.mark.parametrize("L,W", LATTICE_SIZES)
def test_island_and_junction_counts_match_enumeration(L, W):
    geom = build_geometry(L, W)
    n_islands, n_junctions = enumerate_counts(L, W)
    assert geom.n_islands == n_islands == (W - 1) * (L + 1) + 1
    assert geom.n_junctions == n_junctions == (W - 1) * L + W * (L + 1)


def test_device_counts():
    geom = build_geometry(30, 3)
    assert geom.n_islands == 63
    assert geom.n_junctions == 153
    assert geom.n_plaquettes == 90


@pytest.mark.parametrize("L,W", LATTICE_SIZES)
def test_junction_graph_connected_including_ground(L, W):
    geom = build_geometry(L, W)
    n = geom.n_islands + 1  # include ground
    ones = np.ones(geom.n_junctions)
    adj = coo_matrix((ones, (geom.junction_a, geom.junction_b)), shape=(n, n))
    n_comp, _ = connected_components(adj, directed=False)
    assert n_comp == 1


@pytest.mark.parametrize("L,W", LATTICE_SIZES)
def test_plaquette_legs_and_link_sharing(L, W):
    geom = build_geometry(L, W)
    assert geom.leg_junction.shape == (L * W, 4)
    # every leg is either a real junction or a fused-rail segment
    fused = geom.leg_junction == NO_JUNCTION
    assert np.array_equal(geom.leg_sign == 0, fused)
    # each junction appears in at most two plaquettes, with opposite signs
    # when shared; boundary junctions appear once
    usage: dict[int, list[int]] = {}
    for p in range(L * W):
        for l in range(4):
            j = geom.leg_junction[p, l]
            if j != NO_JUNCTION:
                usage.setdefault(int(j), []).append(int(geom.leg_sign[p, l]))
    for j, signs in usage.items():
        assert len(signs) in (1, 2)
        if len(signs) == 2:
            assert sorted(signs) == [-1, 1]
    # horizontal junctions sit between two plaquettes, so all of them shared
    n_horizontal = (W - 1) * L
    for j in range(n_horizontal):
        assert len(usage[j]) == 2


@pytest.mark.parametrize("L,W", [(1, 1), (3, 2), (30, 3), (4, 4)])
@pytest.mark.parametrize("f", [0.0, 1.0 / 6.0, 0.5, 0.123456, -0.3, 1.7])
def test_plaquette_gauge_sum_is_flux(L, W, f):
    geom = build_geometry(L, W)
    gauge = build_gauge(geom, f)
    sums = plaquette_gauge_sums(geom, gauge)
    assert np.allclose(sums, 2.0 * np.pi * f, rtol=0, atol=1e-9)


def test_gauge_periodicity_mod_two_pi():
    geom = build_geometry(5, 3)
    f = 0.217
    a0 = build_gauge(geom, f).link_phase
    a1 = build_gauge(geom, f + 1.0).link_phase
    diff = (a1 - a0) / (2.0 * np.pi)
    assert np.allclose(diff, np.rint(diff), atol=1e-12)


def test_gauge_transform_preserves_plaquette_sums():
    geom = build_geometry(4, 3)
    gauge = build_gauge(geom, 0.37)
    chi = rng(7).uniform(-10, 10, geom.n_islands)
    transformed = gauge.transformed(geom, chi)
    assert np.allclose(
        plaquette_gauge_sums(geom, transformed),
        plaquette_gauge_sums(geom, gauge),
        atol=1e-9,
    )


# ----------------------------------------------------------------- capacitance


def test_assemble_maxwell_single_island_to_ground():
    C = assemble_maxwell(1, [(0, 99, 0.008)])
    assert C.shape == (1, 1)
    assert C[0, 0] == pytest.approx(0.008)


def test_assemble_maxwell_matches_definition_on_random_network():
    r = rng(11)
    n = 9
    links = []
    for _ in range(40):
        i, j = r.integers(0, n + 1, size=2)  # index n acts as ground
        if i == j:
            continue
        links.append((int(i), int(j), float(r.uniform(0.01, 2.0))))
    C = assemble_maxwell(n, links)
    # oracle: direct definition, diagonal = sum incident, offdiag = -direct
    direct = np.zeros((n, n))
    incident = np.zeros(n)
    for i, j, c in links:
        for k in (i, j):
            if k < n:
                incident[k] += c
        if i < n and j < n:
            direct[i, j] += c
            direct[j, i] += c
    assert np.allclose(np.diag(C), incident)
    assert np.allclose(C - np.diag(np.diag(C)), -direct)
    assert np.allclose(C, C.T)


def test_device_capacitance_matrix_structure(full_geometry, device_params):
    C = capacitance_matrix(full_geometry, device_params)
    assert C.shape == (63, 63)
    assert np.allclose(C, C.T)
    np.linalg.cholesky(C)  # SPD
    # the pad couples to each top-row island through the junction capacitance
    L = full_geometry.L
    for x in range(L + 1):
        top = full_geometry.node_index(x, 2)
        assert C[0, top] == pytest.approx(-1.5)
    assert C[0, 0] == pytest.approx((L + 1) * 1.5 + 68.5)
    # interior diagonal pair (x,1)-(x+1,2) carries the diagonal capacitance
    i = full_geometry.node_index(3, 1)
    j = full_geometry.node_index(4, 2)
    assert C[i, j] == pytest.approx(-0.12)
    # nearest-neighbour island pair in a row
    i2 = full_geometry.node_index(3, 1)
    j2 = full_geometry.node_index(4, 1)
    assert C[i2, j2] == pytest.approx(-1.5)
    # anti-diagonal carries nothing unless Cdiag_both is set
    k = full_geometry.node_index(4, 1)
    m = full_geometry.node_index(3, 2)
    assert C[k, m] == pytest.approx(0.0)


def test_capacitance_both_diagonals_option(full_geometry, device_params):
    from dataclasses import replace

    both = replace(device_params, Cdiag_both=True)
    C = capacitance_matrix(full_geometry, both)
    k = full_geometry.node_index(4, 1)
    m = full_geometry.node_index(3, 2)
    assert C[k, m] == pytest.approx(-0.12)


@pytest.mark.parametrize("L,W", LATTICE_SIZES)
def test_capacitance_matrix_spd_random_params(L, W):
    r = rng(L * 100 + W)
    geom = build_geometry(L, W)
    params = CircuitParams(
        EJ_GHz=25.8,
        CJ_fF=float(r.uniform(0.1, 3.0)),
        Cdiag_fF=float(r.uniform(0.01, 1.0)),
        Cg_fF=float(r.uniform(0.001, 0.1)),
        CS_fF=float(r.uniform(1.0, 100.0)),
    )
    C = capacitance_matrix(geom, params)
    np.linalg.cholesky(C)
    assert np.allclose(C, C.T)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        CircuitParams(CJ_fF=-1.0)
    with pytest.raises(ValueError):
        CircuitParams(EJ_GHz=0.0)
    with pytest.raises(ValueError):
        CircuitParams(G_over_G0=-0.1)
    with pytest.raises(ValueError):
        build_geometry(0, 3)


def test_ej_per_junction_broadcast_and_validation(full_geometry):
    p = CircuitParams(EJ_GHz=25.8)
    ej = p.ej_per_junction(full_geometry)
    assert ej.shape == (153,)
    assert np.all(ej == 25.8)
    table = np.full(153, 20.0)
    assert np.all(p.with_ej(table).ej_per_junction(full_geometry) == 20.0)
    with pytest.raises(ValueError):
        p.with_ej(np.full(10, 20.0)).ej_per_junction(full_geometry)
