"""Pure-Python tableau kernel.

Mirrors ``_ctableau.pyx`` operation for operation so both backends produce
bitwise-identical tableaux.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2
NUMERIC_FAILURE = 3


def pivot(T, row, col):
    prow = T[row] / T[row, col]
    f = T[:, col].copy()
    f[row] = 0.0
    T -= np.outer(f, prow)
    T[row] = prow


def simplex(T, basis, n_enter, max_iter, tol_opt, tol_piv, bland_after):
    """Minimise the reduced-cost row of ``T`` in place.

    ``T`` has the constraint rows first and the reduced-cost row last, the
    right-hand side in the final column. Only columns below ``n_enter`` may
    enter the basis. Returns ``(status, iterations)``.
    """
    m = T.shape[0] - 1
    degenerate = 0
    it = 0
    while True:
        d = T[m, :n_enter]
        if degenerate > bland_after:
            neg = np.flatnonzero(d < -tol_opt)
            if neg.size == 0:
                return OPTIMAL, it
            col = int(neg[0])
        else:
            if n_enter == 0:
                return OPTIMAL, it
            col = int(np.argmin(d))
            if not d[col] < -tol_opt:
                return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it

        column = T[:m, col]
        cand = column > tol_piv
        if not cand.any():
            return UNBOUNDED, it
        rhs = np.maximum(T[:m, -1], 0.0)
        ratios = np.full(m, np.inf)
        ratios[cand] = rhs[cand] / column[cand]
        best = ratios.min()
        ties = np.flatnonzero(ratios == best)
        row = int(ties[np.argmin(basis[ties])])
        if best <= 0.0:
            degenerate += 1
        pivot(T, row, col)
        basis[row] = col
        it += 1


SQRT_HALF = 0.7071067811865476


def pow2_recip(amax):
    """Power of two nearest (in log scale) to ``1 / amax``; 1 where ``amax`` is 0."""
    mant, exp = np.frexp(amax)
    p = np.where(mant >= SQRT_HALF, exp, exp - 1)
    return np.where(amax > 0, np.ldexp(1.0, -p), 1.0)


def prepare(A, b, codes, tol_feas):
    """Equilibrate ``A x (codes) b, x >= 0`` and lay out the phase-1 tableau.

    Codes are 0 for ``<=``, 1 for ``>=`` and 2 for ``=``. All-zero rows are
    checked directly and dropped; if one is violated the result is ``None``.
    Otherwise returns ``(T, basis, art0, keep, row_scale, col_scale,
    feas_limit)``, where ``feas_limit`` is the phase-1 objective a feasible
    system may leave behind.
    """
    nonzero = (A != 0.0).any(axis=1)
    if not nonzero.all():
        bz, cz = b[~nonzero], codes[~nonzero]
        slack = tol_feas * np.maximum(1.0, np.abs(bz))
        ok = np.where(cz == 0, bz >= -slack, np.where(cz == 1, bz <= slack, np.abs(bz) <= slack))
        if not ok.all():
            return None
    keep = np.flatnonzero(nonzero)
    A, b, codes = A[keep], b[keep], codes[keep]
    m, ns = A.shape

    row_scale = pow2_recip(np.abs(A).max(axis=1)) if m else np.ones(0)
    A = A * row_scale[:, None]
    b = b * row_scale
    col_scale = pow2_recip(np.abs(A).max(axis=0)) if m else np.ones(ns)
    A = A * col_scale[None, :]

    flip = b < 0
    A[flip] = -A[flip]
    b = np.where(flip, -b, b)
    codes = np.where(flip & (codes != 2), 1 - codes, codes)
    feas_limit = tol_feas * (1.0 + (float(b.max()) if m else 0.0))

    has_slack, has_art = codes != 2, codes != 0
    art0 = ns + int(has_slack.sum())
    ncols = art0 + int(has_art.sum())
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :ns] = A
    T[:m, -1] = b
    rows = np.arange(m)
    slack_col = ns + np.cumsum(has_slack) - 1
    art_col = art0 + np.cumsum(has_art) - 1
    T[rows[has_slack], slack_col[has_slack]] = np.where(codes[has_slack] == 0, 1.0, -1.0)
    T[rows[has_art], art_col[has_art]] = 1.0
    basis = np.where(has_art, art_col, slack_col).astype(np.int64)
    # phase-1 reduced costs: minus the sum of the artificial rows
    for i in np.flatnonzero(has_art):
        T[m] -= T[i]
    T[m, art0:ncols] = 0.0
    return T, basis, art0, keep, row_scale, col_scale, feas_limit
