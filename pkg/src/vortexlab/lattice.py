"""Lattice geometry, gauge field, and electrostatics of the junction array.

The device is an L x W array of plaquettes whose top and bottom edges are
galvanically fused into two superconducting rails (the antenna pads).  The
bottom rail is the phase reference (ground, phase identically 0); the top
rail is a single free super-node and carries the dipole drive, so it gets
island index 0.  Between the rails sit W-1 rows of (L+1) individual islands.

Free phase degrees of freedom: (W-1)*(L+1) interior islands + 1 top rail.
Junctions: (W-1)*L horizontal (within interior rows) + W*(L+1) vertical
(between adjacent rows, including rows adjacent to the rails).  The fused
edges themselves contain no junctions.

Gauge convention (Landau-like): a vertical junction in column x, traversed
upward (x,y) -> (x,y+1), carries link phase A = x * 2*pi*f where f is the
frustration (flux quantum fraction per plaquette).  Horizontal junctions
carry A = 0.  The oriented sum of A around any plaquette (counterclockwise:
right along the bottom, up, left along the top, down) is then 2*pi*f.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

TWO_PI = 2.0 * np.pi

#: marker for a plaquette leg that runs along a fused rail (no junction there)
NO_JUNCTION = -1


@dataclass(frozen=True)
class ArrayGeometry:
    """Connectivity of the plaquette array.

    Node indexing: 0 = top rail (drive pad); 1 .. n_islands-1 = interior
    islands ordered row-major bottom-up; ``ground`` (== n_islands) = bottom
    rail.  Junction endpoint arrays use this extended indexing so that a
    phase vector can be evaluated as ``phi_ext = append(phi, 0.0)``.
    """

    L: int
    W: int
    n_islands: int
    ground: int
    # canonical junction direction a -> b (b is to the right, or above)
    junction_a: np.ndarray
    junction_b: np.ndarray
    junction_is_vertical: np.ndarray  # bool
    junction_column: np.ndarray  # column x for vertical junctions, -1 otherwise
    # plaquettes indexed p = px * W + py, counterclockwise legs
    # [bottom, right, top, left]; fused legs hold NO_JUNCTION / sign 0
    plaquette_x: np.ndarray
    plaquette_y: np.ndarray
    leg_junction: np.ndarray  # (n_plaquettes, 4) int
    leg_sign: np.ndarray  # (n_plaquettes, 4) int, +1 along canonical direction

    @property
    def n_junctions(self) -> int:
        return self.junction_a.size

    @property
    def n_plaquettes(self) -> int:
        return self.L * self.W

    def node_index(self, x: int, y: int) -> int:
        """Extended node index of grid point (x, y); y=0 bottom rail, y=W top rail."""
        if not (0 <= x <= self.L and 0 <= y <= self.W):
            raise ValueError(f"grid point ({x}, {y}) outside lattice")
        if y == 0:
            return self.ground
        if y == self.W:
            return 0
        return 1 + (y - 1) * (self.L + 1) + x


def build_geometry(L: int, W: int) -> ArrayGeometry:
    """Construct the island/junction/plaquette structure of an L x W array."""
    if L < 1 or W < 1:
        raise ValueError("lattice needs at least one plaquette in each direction")
    n_islands = (W - 1) * (L + 1) + 1
    ground = n_islands

    def node(x: int, y: int) -> int:
        if y == 0:
            return ground
        if y == W:
            return 0
        return 1 + (y - 1) * (L + 1) + x

    a, b, is_v, col = [], [], [], []
    # horizontal junctions, interior rows only
    for y in range(1, W):
        for x in range(L):
            a.append(node(x, y))
            b.append(node(x + 1, y))
            is_v.append(False)
            col.append(-1)
    n_horizontal = len(a)
    # vertical junctions, every column, every row gap (including to the rails)
    for x in range(L + 1):
        for y in range(W):
            a.append(node(x, y))
            b.append(node(x, y + 1))
            is_v.append(True)
            col.append(x)

    def j_horizontal(x: int, y: int) -> int:
        return (y - 1) * L + x

    def j_vertical(x: int, y: int) -> int:
        return n_horizontal + x * W + y

    n_p = L * W
    px = np.empty(n_p, dtype=np.int64)
    py = np.empty(n_p, dtype=np.int64)
    leg_j = np.full((n_p, 4), NO_JUNCTION, dtype=np.int64)
    leg_s = np.zeros((n_p, 4), dtype=np.int64)
    for x in range(L):
        for y in range(W):
            p = x * W + y
            px[p], py[p] = x, y
            if y > 0:  # bottom leg, traversed left -> right (canonical)
                leg_j[p, 0], leg_s[p, 0] = j_horizontal(x, y), 1
            leg_j[p, 1], leg_s[p, 1] = j_vertical(x + 1, y), 1  # right, upward
            if y + 1 < W:  # top leg, traversed right -> left (reversed)
                leg_j[p, 2], leg_s[p, 2] = j_horizontal(x, y + 1), -1
            leg_j[p, 3], leg_s[p, 3] = j_vertical(x, y), -1  # left, downward

    return ArrayGeometry(
        L=L,
        W=W,
        n_islands=n_islands,
        ground=ground,
        junction_a=np.asarray(a, dtype=np.int64),
        junction_b=np.asarray(b, dtype=np.int64),
        junction_is_vertical=np.asarray(is_v, dtype=bool),
        junction_column=np.asarray(col, dtype=np.int64),
        plaquette_x=px,
        plaquette_y=py,
        leg_junction=leg_j,
        leg_sign=leg_s,
    )


@dataclass(frozen=True)
class GaugeField:
    """Link phases A_ab (radians) along each junction's canonical direction.

    Observables only ever use A modulo 2*pi; the stored representative is the
    Landau form produced by :func:`build_gauge` unless constructed by hand
    (e.g. gauge-transformed copies in tests).
    """

    frustration: float
    link_phase: np.ndarray

    def transformed(self, geometry: ArrayGeometry, chi: np.ndarray) -> "GaugeField":
        """Gauge transform A_ab -> A_ab + chi_a - chi_b for a per-island shift chi.

        ``chi`` has one entry per free island; the ground entry is taken as 0.
        The companion phase shift is phi -> phi + chi.
        """
        chi_ext = np.append(np.asarray(chi, dtype=float), 0.0)
        shifted = self.link_phase + chi_ext[geometry.junction_a] - chi_ext[geometry.junction_b]
        return GaugeField(frustration=self.frustration, link_phase=shifted)


def build_gauge(geometry: ArrayGeometry, frustration: float) -> GaugeField:
    """Landau gauge for a uniform frustration f: A = x*2*pi*f on column-x up-links."""
    A = np.where(
        geometry.junction_is_vertical,
        geometry.junction_column * TWO_PI * frustration,
        0.0,
    )
    return GaugeField(frustration=float(frustration), link_phase=A)


def plaquette_gauge_sums(geometry: ArrayGeometry, gauge: GaugeField) -> np.ndarray:
    """Oriented sum of link phases around each plaquette (should be 2*pi*f)."""
    A_ext = np.append(gauge.link_phase, 0.0)  # index NO_JUNCTION -> 0 contribution
    return np.sum(geometry.leg_sign * A_ext[geometry.leg_junction], axis=1)


@dataclass(frozen=True)
class CircuitParams:
    """Electrical parameters of the array.

    ``EJ_GHz`` may be a scalar (uniform array) or a per-junction vector in the
    junction ordering of :class:`ArrayGeometry` (used for disorder studies).
    Capacitances in fF; the junction conductance is quoted in units of
    G_0 = 2e^2/h.
    """

    EJ_GHz: Union[float, np.ndarray] = 25.8
    CJ_fF: float = 1.5
    Cdiag_fF: float = 0.12
    Cg_fF: float = 0.008
    CS_fF: float = 68.5
    G_over_G0: float = 3.27e-3
    # one diagonal capacitor per plaquette (lower-left to upper-right); set
    # True to place capacitors on both diagonals instead
    Cdiag_both: bool = False

    def __post_init__(self) -> None:
        ej = np.asarray(self.EJ_GHz, dtype=float)
        if np.any(ej <= 0) or not np.all(np.isfinite(ej)):
            raise ValueError("EJ_GHz must be positive and finite")
        for name in ("CJ_fF", "Cdiag_fF", "Cg_fF", "CS_fF"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite")
        if not (np.isfinite(self.G_over_G0) and self.G_over_G0 >= 0):
            raise ValueError("G_over_G0 must be non-negative and finite")

    def ej_per_junction(self, geometry: ArrayGeometry) -> np.ndarray:
        """Per-junction Josephson energies (GHz), broadcasting a uniform scalar."""
        ej = np.asarray(self.EJ_GHz, dtype=float)
        if ej.ndim == 0:
            return np.full(geometry.n_junctions, float(ej))
        if ej.shape != (geometry.n_junctions,):
            raise ValueError(
                f"per-junction EJ table has shape {ej.shape}, "
                f"expected ({geometry.n_junctions},)"
            )
        return ej

    def ej_nominal(self) -> float:
        """Scalar energy scale used for annealing temperatures and tolerances."""
        return float(np.mean(np.asarray(self.EJ_GHz, dtype=float)))

    def with_ej(self, ej: np.ndarray) -> "CircuitParams":
        return replace(self, EJ_GHz=np.asarray(ej, dtype=float))


def assemble_maxwell(n: int, links: list[tuple[int, int, float]]) -> np.ndarray:
    """Maxwell capacitance matrix for ``n`` islands from a list of capacitors.

    Each link is (i, j, c) with extended indices; any index >= n or < 0 is
    treated as ground (contributes to the diagonal only).  Diagonal entries
    accumulate every capacitance incident on the island; off-diagonals are
    minus the direct island-island capacitance.
    """
    C = np.zeros((n, n))
    for i, j, c in links:
        i_free = 0 <= i < n
        j_free = 0 <= j < n
        if i_free:
            C[i, i] += c
        if j_free:
            C[j, j] += c
        if i_free and j_free:
            C[i, j] -= c
            C[j, i] -= c
    return C


def capacitance_matrix(geometry: ArrayGeometry, params: CircuitParams) -> np.ndarray:
    """Maxwell capacitance matrix (fF) over the free islands.

    Contributions: CJ across every junction, Cg from each interior island to
    ground, CS from the drive pad to ground, and Cdiag across each plaquette
    whose lower-left -> upper-right diagonal connects two *interior* islands
    (diagonals that would terminate on a fused rail are absent; the rails'
    electrostatics is dominated by CS and the junction capacitances).  With
    ``Cdiag_both`` the upper-left -> lower-right diagonal is added too.
    """
    links: list[tuple[int, int, float]] = []
    g = geometry.ground
    for a, b in zip(geometry.junction_a, geometry.junction_b):
        links.append((int(a), int(b), params.CJ_fF))

    def is_interior(node: int) -> bool:
        return 0 < node < geometry.n_islands

    for p in range(geometry.n_plaquettes):
        x = int(geometry.plaquette_x[p])
        y = int(geometry.plaquette_y[p])
        pairs = [(geometry.node_index(x, y), geometry.node_index(x + 1, y + 1))]
        if params.Cdiag_both:
            pairs.append((geometry.node_index(x + 1, y), geometry.node_index(x, y + 1)))
        for i, j in pairs:
            if is_interior(i) and is_interior(j):
                links.append((i, j, params.Cdiag_fF))

    for i in range(1, geometry.n_islands):
        links.append((i, g, params.Cg_fF))
    links.append((0, g, params.CS_fF))

    return assemble_maxwell(geometry.n_islands, links)
