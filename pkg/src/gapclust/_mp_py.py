"""NumPy message-passing kernels (fallback when the compiled module is absent).

Both backends implement the same damped responsibility/availability
update and are kept bit-for-bit interchangeable: reductions that are
sensitive to floating-point order (the availability column sums) accumulate
in flat pair order here exactly as the C loops do, and elementwise damping
uses the identical two-rounding sequence.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def sparse_iteration(s, r, a, row_ptr, col, self_pos, forced, colsum, damping):
    """One update sweep over CSR support pairs, in place.

    Rows with a single candidate keep their (self) responsibility pinned,
    and availabilities toward such forced self-exemplar columns are zero:
    a node without alternatives is unconditionally available as exemplar.
    """
    n = row_ptr.shape[0] - 1
    nnz = s.shape[0]
    om = 1.0 - damping
    starts = row_ptr[:-1]
    counts = np.diff(row_ptr)
    forced = forced.view(np.bool_)  # stored as uint8 for the compiled twin

    # Responsibilities: r(i,k) <- s(i,k) - max_{k' != k} [a(i,k') + s(i,k')].
    u = a + s
    m1 = np.maximum.reduceat(u, starts)
    m1_rep = np.repeat(m1, counts)
    pos = np.arange(nnz)
    first = np.minimum.reduceat(np.where(u == m1_rep, pos, nnz), starts)
    u[first] = -np.inf
    m2 = np.maximum.reduceat(u, starts)
    rnew = s - m1_rep
    rnew[first] = s[first] - m2
    pinned = self_pos[forced]
    saved = r[pinned]
    r *= damping
    r += om * rnew
    r[pinned] = saved

    # Availabilities from column sums of clamped responsibilities
    # (self responsibilities enter unclamped).
    rp = np.maximum(r, 0.0)
    rp[self_pos] = r[self_pos]
    colsum[:] = np.bincount(col, weights=rp, minlength=n)
    anew = colsum[col] - rp
    da = anew[self_pos].copy()
    np.minimum(anew, 0.0, out=anew)
    anew[self_pos] = da
    fmask = forced[col]
    fmask[self_pos] = False
    anew[fmask] = 0.0
    a *= damping
    a += om * anew


def dense_iteration(s, r, a, colsum, damping):
    """One update sweep over full (n, n) message matrices, in place."""
    n = s.shape[0]
    om = 1.0 - damping
    rows = np.arange(n)

    u = a + s
    idx = np.argmax(u, axis=1)
    m1 = u[rows, idx]
    u[rows, idx] = -np.inf
    m2 = u.max(axis=1)
    rnew = s - m1[:, None]
    rnew[rows, idx] = s[rows, idx] - m2
    r *= damping
    r += om * rnew

    rp = np.maximum(r, 0.0)
    rp[rows, rows] = r[rows, rows]
    colsum[:] = np.cumsum(rp, axis=0)[-1]
    anew = colsum[None, :] - rp
    da = anew[rows, rows].copy()
    np.minimum(anew, 0.0, out=anew)
    anew[rows, rows] = da
    a *= damping
    a += om * anew
