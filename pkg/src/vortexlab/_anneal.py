"""Single-site Metropolis annealing kernel (numba).

The kernel works on an extended phase vector phi_ext (free islands followed
by one fixed 0.0 entry for the ground rail) and a CSR incidence structure:
for island i, entries inc_ptr[i]:inc_ptr[i+1] list its junctions as
(partner extended index, signed link phase, Josephson energy).  The signed
link phase is +A for junctions where i is the canonical tail and -A where it
is the head, so the local energy of island i is always

    -sum_k ej_k * cos(phi_i - phi_partner_k - A_signed_k)

regardless of junction orientation (cos is even).

All randomness is pre-drawn by the caller (site choices, Gaussian proposal
amplitudes, acceptance uniforms) so results are bit-reproducible and
independent of thread scheduling.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def metropolis_anneal(
    phi_ext,
    inc_ptr,
    inc_partner,
    inc_aphase,
    inc_ej,
    sites,
    normals,
    uniforms,
    temperatures,
    width0,
    adapt,
    target_acceptance,
    adapt_interval,
):
    """Run the annealing schedule in place; returns the final proposal width."""
    two_pi = 2.0 * np.pi
    width = width0
    accepted = 0
    steps = sites.shape[0]
    for step in range(steps):
        i = sites[step]
        delta = width * normals[step]
        de = 0.0
        for k in range(inc_ptr[i], inc_ptr[i + 1]):
            e = phi_ext[i] - phi_ext[inc_partner[k]] - inc_aphase[k]
            de -= inc_ej[k] * (np.cos(e + delta) - np.cos(e))
        if de <= 0.0 or uniforms[step] < np.exp(-de / temperatures[step]):
            x = phi_ext[i] + delta
            # keep phases in a bounded window (energy is 2*pi periodic per site)
            x -= two_pi * np.rint(x / two_pi)
            phi_ext[i] = x
            accepted += 1
        if adapt and (step + 1) % adapt_interval == 0:
            rate = accepted / adapt_interval
            if rate > target_acceptance:
                width = min(width * 1.05, np.pi)
            else:
                width = max(width / 1.05, 1e-3)
            accepted = 0
    return width


def build_incidence(geometry, gauge, params):
    """CSR incidence arrays consumed by :func:`metropolis_anneal`."""
    n = geometry.n_islands
    ej = params.ej_per_junction(geometry)
    rows, partners, aphases, ejs = [], [], [], []
    for j in range(geometry.n_junctions):
        a = int(geometry.junction_a[j])
        b = int(geometry.junction_b[j])
        A = float(gauge.link_phase[j])
        e = float(ej[j])
        if a < n:
            rows.append(a)
            partners.append(b)
            aphases.append(A)
            ejs.append(e)
        if b < n:
            rows.append(b)
            partners.append(a)
            aphases.append(-A)
            ejs.append(e)
    rows = np.asarray(rows, dtype=np.int64)
    order = np.argsort(rows, kind="stable")
    counts = np.bincount(rows, minlength=n)
    inc_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=inc_ptr[1:])
    return (
        inc_ptr,
        np.asarray(partners, dtype=np.int64)[order],
        np.asarray(aphases, dtype=np.float64)[order],
        np.asarray(ejs, dtype=np.float64)[order],
    )
