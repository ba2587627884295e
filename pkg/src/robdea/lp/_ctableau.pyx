# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tableau kernel; arithmetic matches ``_pytableau`` exactly."""

cimport cython
from libc.math cimport INFINITY, fabs, frexp, ldexp
from libc.stdlib cimport malloc, free

import numpy as np

cdef int OPTIMAL = 0
cdef int UNBOUNDED = 1
cdef int ITERATION_LIMIT = 2
cdef int NUMERIC_FAILURE = 3
cdef double SQRT_HALF = 0.7071067811865476


cdef inline double _pow2_recip(double amax) nogil:
    cdef int e
    cdef double mant
    if not amax > 0.0:
        return 1.0
    mant = frexp(amax, &e)
    if mant < SQRT_HALF:
        e -= 1
    return ldexp(1.0, -e)


cdef void _pivot(double[:, ::1] T, Py_ssize_t row, Py_ssize_t col, double* prow, double* f) nogil:
    cdef Py_ssize_t nr = T.shape[0]
    cdef Py_ssize_t nc = T.shape[1]
    cdef Py_ssize_t i, j
    cdef double piv = T[row, col]
    cdef double fi
    for j in range(nc):
        prow[j] = T[row, j] / piv
    for i in range(nr):
        f[i] = T[i, col]
    f[row] = 0.0
    for i in range(nr):
        fi = f[i]
        for j in range(nc):
            T[i, j] = T[i, j] - fi * prow[j]
    for j in range(nc):
        T[row, j] = prow[j]


def pivot(double[:, ::1] T, Py_ssize_t row, Py_ssize_t col):
    cdef double* prow = <double*> malloc(T.shape[1] * sizeof(double))
    cdef double* f = <double*> malloc(T.shape[0] * sizeof(double))
    if prow == NULL or f == NULL:
        free(prow)
        free(f)
        raise MemoryError()
    _pivot(T, row, col, prow, f)
    free(prow)
    free(f)


def simplex(double[:, ::1] T, long long[::1] basis, Py_ssize_t n_enter,
            long max_iter, double tol_opt, double tol_piv, long bland_after):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t last = T.shape[1] - 1
    cdef Py_ssize_t i, j, col, row
    cdef long degenerate = 0
    cdef long it = 0
    cdef double best, ratio, a, rhs, dmin
    cdef int status
    cdef double* prow = <double*> malloc(T.shape[1] * sizeof(double))
    cdef double* f = <double*> malloc(T.shape[0] * sizeof(double))
    if prow == NULL or f == NULL:
        free(prow)
        free(f)
        raise MemoryError()
    with nogil:
        while True:
            col = -1
            if degenerate > bland_after:
                for j in range(n_enter):
                    if T[m, j] < -tol_opt:
                        col = j
                        break
            elif n_enter > 0:
                dmin = T[m, 0]
                col = 0
                for j in range(1, n_enter):
                    if T[m, j] < dmin:
                        dmin = T[m, j]
                        col = j
                if not dmin < -tol_opt:
                    col = -1
            if col < 0:
                status = OPTIMAL
                break
            if it >= max_iter:
                status = ITERATION_LIMIT
                break

            row = -1
            best = INFINITY
            for i in range(m):
                a = T[i, col]
                if a > tol_piv:
                    rhs = T[i, last]
                    if rhs < 0.0:
                        rhs = 0.0
                    ratio = rhs / a
                    if ratio < best or (ratio == best and basis[i] < basis[row]):
                        best = ratio
                        row = i
            if row < 0:
                status = UNBOUNDED
                break
            if best <= 0.0:
                degenerate += 1
            _pivot(T, row, col, prow, f)
            basis[row] = col
            it += 1
    free(prow)
    free(f)
    return status, it


def prepare(const double[:, :] A, const double[:] b, const signed char[:] codes, double tol_feas):
    cdef Py_ssize_t k = A.shape[0]
    cdef Py_ssize_t ns = A.shape[1]
    cdef Py_ssize_t i, j, r, m, s, a, art0, ncols
    cdef double bi, slack, amax, v, bmax
    cdef signed char c
    cdef bint ok

    keep_list = []
    for i in range(k):
        ok = False
        for j in range(ns):
            if A[i, j] != 0.0:
                ok = True
                break
        if ok:
            keep_list.append(i)
            continue
        bi = b[i]
        slack = tol_feas * (fabs(bi) if fabs(bi) > 1.0 else 1.0)
        c = codes[i]
        if c == 0:
            ok = bi >= -slack
        elif c == 1:
            ok = bi <= slack
        else:
            ok = fabs(bi) <= slack
        if not ok:
            return None
    keep = np.array(keep_list, dtype=np.intp)
    m = keep.shape[0]

    row_scale_a = np.ones(m)
    col_scale_a = np.ones(ns)
    As_a = np.empty((m, ns))
    bs_a = np.empty(m)
    cs_a = np.empty(m, dtype=np.int8)
    cdef double[::1] row_scale = row_scale_a
    cdef double[::1] col_scale = col_scale_a
    cdef double[:, ::1] As = As_a
    cdef double[::1] bs = bs_a
    cdef signed char[::1] cs = cs_a
    cdef Py_ssize_t[::1] kp = keep

    for r in range(m):
        i = kp[r]
        amax = 0.0
        for j in range(ns):
            v = fabs(A[i, j])
            if v > amax:
                amax = v
        row_scale[r] = _pow2_recip(amax)
        for j in range(ns):
            As[r, j] = A[i, j] * row_scale[r]
        bs[r] = b[i] * row_scale[r]
        cs[r] = codes[i]
    if m:
        for j in range(ns):
            amax = 0.0
            for r in range(m):
                v = fabs(As[r, j])
                if v > amax:
                    amax = v
            col_scale[j] = _pow2_recip(amax)
        for r in range(m):
            for j in range(ns):
                As[r, j] = As[r, j] * col_scale[j]

    bmax = 0.0
    s = a = 0
    for r in range(m):
        if bs[r] < 0.0:
            bs[r] = -bs[r]
            for j in range(ns):
                As[r, j] = -As[r, j]
            if cs[r] != 2:
                cs[r] = 1 - cs[r]
        if r == 0 or bs[r] > bmax:
            bmax = bs[r]
        if cs[r] != 2:
            s += 1
        if cs[r] != 0:
            a += 1
    feas_limit = tol_feas * (1.0 + (bmax if m else 0.0))

    art0 = ns + s
    ncols = art0 + a
    T_a = np.zeros((m + 1, ncols + 1))
    basis_a = np.empty(m, dtype=np.int64)
    cdef double[:, ::1] T = T_a
    cdef long long[::1] basis = basis_a
    s = a = 0
    for r in range(m):
        for j in range(ns):
            T[r, j] = As[r, j]
        T[r, ncols] = bs[r]
        if cs[r] == 0:
            T[r, ns + s] = 1.0
            basis[r] = ns + s
            s += 1
        else:
            if cs[r] == 1:
                T[r, ns + s] = -1.0
                s += 1
            T[r, art0 + a] = 1.0
            basis[r] = art0 + a
            a += 1
    for r in range(m):
        if cs[r] != 0:
            for j in range(ncols + 1):
                T[m, j] = T[m, j] - T[r, j]
    for j in range(art0, ncols):
        T[m, j] = 0.0
    return T_a, basis_a, art0, keep, row_scale_a, col_scale_a, feas_limit
