"""Josephson potential of the array and gauge-invariant vortex observables.

The classical potential over the free island phases phi (ground fixed at 0) is

    V(phi) = - sum_j EJ_j * cos(gamma_j),   gamma_j = phi_a - phi_b - A_ab,

summed over junctions j with canonical direction a -> b and link phase A_ab.
Energies are in GHz (E/h).  The gradient and Hessian follow directly:

    dV/dphi_i   = sum_j EJ_j sin(gamma_j) (delta_ai - delta_bi)
    d2V/dphi^2  = graph Laplacian weighted by EJ_j cos(gamma_j)

so at a minimum the Hessian is the inverse-inductance-like curvature matrix
used by the spin-wave calculation.

Vortex content: traversing a plaquette counterclockwise, the circulating
supercurrent (units of the junction critical current) is sum of sin(gamma)
over the four legs, and the winding number is

    n = round( sum_legs wrap(gamma) / 2pi + f )

with wrap(.) the principal branch (-pi, pi].  The raw leg phases around any
plaquette sum to exactly -2*pi*f, so n is an exact integer: it counts the
2*pi jumps hidden by the wrap, i.e. the vorticity.  With the gauge convention
of :mod:`vortexlab.lattice` a ground-state vortex carries n = +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import ArrayGeometry, CircuitParams, GaugeField, TWO_PI


def wrap_angle(theta: np.ndarray) -> np.ndarray:
    """Wrap angles to the principal branch (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), TWO_PI)


def canonicalize(phi: np.ndarray) -> np.ndarray:
    """Canonical representative of a phase configuration (each phase in (-pi, pi]).

    The potential is invariant under 2*pi shifts of any single island phase,
    so configurations should be compared in this canonical form.
    """
    return wrap_angle(phi)


def _phi_ext(geometry: ArrayGeometry, phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (geometry.n_islands,):
        raise ValueError(
            f"phase vector has shape {phi.shape}, expected ({geometry.n_islands},)"
        )
    return np.append(phi, 0.0)  # ground phase


def link_phases(geometry: ArrayGeometry, gauge: GaugeField, phi: np.ndarray) -> np.ndarray:
    """Gauge-invariant phase drops gamma_j = phi_a - phi_b - A_ab per junction."""
    pe = _phi_ext(geometry, phi)
    return pe[geometry.junction_a] - pe[geometry.junction_b] - gauge.link_phase


def potential(
    geometry: ArrayGeometry,
    gauge: GaugeField,
    params: CircuitParams,
    phi: np.ndarray,
) -> float:
    """Total Josephson potential V(phi) in GHz."""
    ej = params.ej_per_junction(geometry)
    return float(-np.sum(ej * np.cos(link_phases(geometry, gauge, phi))))


def gradient(
    geometry: ArrayGeometry,
    gauge: GaugeField,
    params: CircuitParams,
    phi: np.ndarray,
) -> np.ndarray:
    """dV/dphi over the free islands (GHz per radian)."""
    ej = params.ej_per_junction(geometry)
    s = ej * np.sin(link_phases(geometry, gauge, phi))
    g = np.zeros(geometry.n_islands + 1)
    np.add.at(g, geometry.junction_a, s)
    np.add.at(g, geometry.junction_b, -s)
    return g[: geometry.n_islands]


def hessian(
    geometry: ArrayGeometry,
    gauge: GaugeField,
    params: CircuitParams,
    phi: np.ndarray,
) -> np.ndarray:
    """Curvature matrix h_ij = d2V/dphi_i dphi_j over the free islands (GHz).

    A graph Laplacian with junction weights EJ_j cos(gamma_j); rows sum to the
    total weight of that island's junctions to ground.
    """
    ej = params.ej_per_junction(geometry)
    w = ej * np.cos(link_phases(geometry, gauge, phi))
    n = geometry.n_islands
    h = np.zeros((n + 1, n + 1))
    a, b = geometry.junction_a, geometry.junction_b
    np.add.at(h, (a, a), w)
    np.add.at(h, (b, b), w)
    np.add.at(h, (a, b), -w)
    np.add.at(h, (b, a), -w)
    return h[:n, :n]


@dataclass(frozen=True)
class VortexMap:
    """Per-plaquette circulation and integer winding, shaped (L, W) as [px, py]."""

    circulation: np.ndarray
    winding: np.ndarray

    @property
    def total_winding(self) -> int:
        return int(np.sum(self.winding))

    def to_rows(self):
        """Iterate (plaquette_x, plaquette_y, circulation, winding) row tuples."""
        L, W = self.circulation.shape
        for x in range(L):
            for y in range(W):
                yield x, y, float(self.circulation[x, y]), int(self.winding[x, y])


def vortex_map(
    geometry: ArrayGeometry,
    gauge: GaugeField,
    phi: np.ndarray,
) -> VortexMap:
    """Circulating current and winding number for every plaquette.

    Both quantities are gauge invariant.  The circulation is bounded by the
    number of junction legs (|c| <= 4); the winding is an exact integer.
    """
    gamma = link_phases(geometry, gauge, phi)
    gamma_ext = np.append(gamma, 0.0)  # NO_JUNCTION legs contribute nothing
    leg = geometry.leg_sign * gamma_ext[geometry.leg_junction]  # fused legs -> 0
    circ = np.sum(np.sin(leg), axis=1)
    wind = np.sum(wrap_angle(leg), axis=1)
    n = np.rint(wind / TWO_PI + gauge.frustration).astype(np.int64)
    L, W = geometry.L, geometry.W
    return VortexMap(
        circulation=circ.reshape(L, W).copy(),
        winding=n.reshape(L, W).copy(),
    )
