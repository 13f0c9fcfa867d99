# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration of deterministic local wirings.

Party A's wirings (input map f: x' -> x, output map g: (a, x') -> a') are
enumerated in mixed radix; party B plays the closed-form best response.
For each f the contribution of every (a, x', a') is tabulated once, so
stepping g only updates the digits that changed.
"""

from libc.stdlib cimport calloc, free

import numpy as np


cdef double _response(const double *C, Py_ssize_t nBg, Py_ssize_t nBr, Py_ssize_t nYg, Py_ssize_t nYr) nogil:
    """sum_y' max_y sum_b max_b' C[b', b, y', y]."""
    cdef Py_ssize_t yp, y, b, bp
    cdef double tot = 0.0, m, inner, s, val
    for yp in range(nYg):
        m = -1e300
        for y in range(nYr):
            inner = 0.0
            for b in range(nBr):
                s = -1e300
                for bp in range(nBg):
                    val = C[((bp * nBr + b) * nYg + yp) * nYr + y]
                    if val > s:
                        s = val
                inner += s
            if inner > m:
                m = inner
        tot += m
    return tot


cdef void _exact(double *C, const double *T, const long *g, Py_ssize_t ng, Py_ssize_t nAg, Py_ssize_t csize) nogil:
    """C = sum_i T[i, g[i]], summed in a fixed order."""
    cdef Py_ssize_t i, c
    cdef const double *row
    for c in range(csize):
        C[c] = 0.0
    for i in range(ng):
        row = T + (i * nAg + g[i]) * csize
        for c in range(csize):
            C[c] += row[c]


def best_response_enumeration(const double[:, :, :, ::1] F, const double[:, :, :, ::1] P):
    """Return ``(value, f, g)`` maximizing over A's wirings with B best responding.

    ``F[a', b', x', y']`` is the target payoff, ``P[a, b, x, y]`` the source box.
    """
    cdef Py_ssize_t nAg = F.shape[0], nBg = F.shape[1], nXg = F.shape[2], nYg = F.shape[3]
    cdef Py_ssize_t nAr = P.shape[0], nBr = P.shape[1], nXr = P.shape[2], nYr = P.shape[3]
    cdef Py_ssize_t ng = nAr * nXg
    cdef Py_ssize_t csize = nBg * nBr * nYg * nYr
    cdef long *f = <long *> calloc(nXg, sizeof(long))
    cdef long *g = <long *> calloc(ng, sizeof(long))
    cdef long *best_f = <long *> calloc(nXg, sizeof(long))
    cdef long *best_g = <long *> calloc(ng, sizeof(long))
    cdef double *C = <double *> calloc(csize, sizeof(double))
    cdef double *E = <double *> calloc(csize, sizeof(double))
    # T[(a * nXg + x') * nAg + a'][b', b, y', y] = F[a', b', x', y'] P[a, b, f(x'), y]
    cdef double *T = <double *> calloc(ng * nAg * csize, sizeof(double))
    cdef Py_ssize_t i, xp, a, ap, bp, b, yp, y, x, c, base
    cdef double best = -1e300, tot, s
    cdef const double *old_row
    cdef const double *new_row
    cdef bint done_f, done_g
    if f == NULL or g == NULL or C == NULL or E == NULL or T == NULL or best_f == NULL or best_g == NULL:
        free(f); free(g); free(C); free(E); free(T); free(best_f); free(best_g)
        raise MemoryError()
    try:
        done_f = False
        while not done_f:
            for xp in range(nXg):
                x = f[xp]
                for a in range(nAr):
                    for ap in range(nAg):
                        base = ((a * nXg + xp) * nAg + ap) * csize
                        for bp in range(nBg):
                            for b in range(nBr):
                                for yp in range(nYg):
                                    s = F[ap, bp, xp, yp]
                                    for y in range(nYr):
                                        T[base + ((bp * nBr + b) * nYg + yp) * nYr + y] = s * P[a, b, x, y]
            for i in range(ng):
                g[i] = 0
            _exact(C, T, g, ng, nAg, csize)
            done_g = False
            while not done_g:
                tot = _response(C, nBg, nBr, nYg, nYr)
                if tot > best - 1e-9:
                    # confirm near-best candidates with an exact, order-fixed sum
                    _exact(E, T, g, ng, nAg, csize)
                    tot = _response(E, nBg, nBr, nYg, nYr)
                    if tot > best + 1e-15:
                        best = tot
                        for i in range(nXg):
                            best_f[i] = f[i]
                        for i in range(ng):
                            best_g[i] = g[i]
                # next g in mixed radix, updating C digit by digit
                done_g = True
                for i in range(ng):
                    old_row = T + (i * nAg + g[i]) * csize
                    g[i] += 1
                    if g[i] < nAg:
                        new_row = T + (i * nAg + g[i]) * csize
                        for c in range(csize):
                            C[c] += new_row[c] - old_row[c]
                        done_g = False
                        break
                    g[i] = 0
                    new_row = T + i * nAg * csize
                    for c in range(csize):
                        C[c] += new_row[c] - old_row[c]
            done_f = True
            for i in range(nXg):
                f[i] += 1
                if f[i] < nXr:
                    done_f = False
                    break
                f[i] = 0
        fo = np.array([best_f[i] for i in range(nXg)], dtype=np.int64)
        go = np.array([best_g[i] for i in range(ng)], dtype=np.int64).reshape(nAr, nXg)
        return best, fo, go
    finally:
        free(f); free(g); free(C); free(E); free(T); free(best_f); free(best_g)
