"""Numba inner loops for the Gibbs sampler and the greedy column pass."""

from __future__ import annotations

import numpy as np
from numba import njit

_TIE_TOL = 1e-9


@njit(cache=True)
def gibbs_sweeps(h, coupling, spins, uniforms, start_sweep, burn_in, thinning, out, kept):
    """Run one chunk of sequential Gibbs sweeps.

    ``uniforms`` has one row of U(0,1) draws per sweep.  Samples are kept
    after burn_in, one every ``thinning`` sweeps, written into ``out`` as
    bits.  Returns the updated number of kept samples.
    """
    n = h.shape[0]
    n_sweeps = uniforms.shape[0]
    for t in range(n_sweeps):
        for a in range(n):
            field = 2.0 * h[a]
            for b in range(n):
                field += 2.0 * coupling[a, b] * spins[b]
            p_minus = 1.0 / (1.0 + np.exp(field))
            if uniforms[t, a] < p_minus:
                spins[a] = -1
            else:
                spins[a] = 1
        sweep = start_sweep + t + 1
        if sweep > burn_in and (sweep - burn_in) % thinning == 0 and kept < out.shape[0]:
            for a in range(n):
                out[kept, a] = 1 if spins[a] == 1 else 0
            kept += 1
    return kept


@njit(cache=True)
def greedy_column_pass(bases, counts, ideal, tie_uniforms, column_out):
    """Place one column of the greedy sample matrix, row by row.

    For each row i, candidate bit b changes entry 2*base + b of every
    tracked subset table; the bit minimizing the summed l1 distance between
    empirical and ideal tables is chosen (random tie-break).  ``counts`` is
    updated in place.
    """
    n_rows = bases.shape[0]
    n_sub = bases.shape[1]
    for i in range(n_rows):
        denom = float(i + 1)
        score0 = 0.0
        score1 = 0.0
        for s in range(n_sub):
            p0 = 2 * bases[i, s]
            p1 = p0 + 1
            c0 = counts[s, p0]
            c1 = counts[s, p1]
            t0 = denom * ideal[s, p0]
            t1 = denom * ideal[s, p1]
            score0 += abs(c0 + 1.0 - t0) - abs(c0 - t0)
            score1 += abs(c1 + 1.0 - t1) - abs(c1 - t1)
        if abs(score0 - score1) < _TIE_TOL:
            bit = 1 if tie_uniforms[i] < 0.5 else 0
        elif score1 < score0:
            bit = 1
        else:
            bit = 0
        column_out[i] = bit
        for s in range(n_sub):
            counts[s, 2 * bases[i, s] + bit] += 1.0
