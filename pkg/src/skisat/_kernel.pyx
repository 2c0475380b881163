# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled integration loop.

Per-clause true-literal counts and the two current components (drive from
unsatisfied clauses, hold from single-satisfier clauses) are maintained
incrementally and only touched when a comparator output flips.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t, int8_t, uint8_t

cnp.import_array()


cdef struct Net:
    int64_t *var0
    int64_t *sign
    int64_t *ptr
    int64_t *count
    int64_t *tsum
    int64_t *tsgn
    int64_t *drive
    int64_t *hold
    int64_t unsat


cdef inline void _contrib(Net *s, int64_t j, int64_t d) noexcept nogil:
    cdef int64_t c = s.count[j], m
    if c == 0:
        for m in range(s.ptr[j], s.ptr[j + 1]):
            s.drive[s.var0[m]] += d * s.sign[m]
        s.unsat += d
    elif c == 1:
        s.hold[s.tsum[j]] += d * s.tsgn[j]


cdef inline void _flip(Net *s, int64_t i, int8_t xi, int64_t *occ_ptr,
                       int64_t *occ_clause, int64_t *occ_sign) noexcept nogil:
    cdef int64_t o, j, sg
    for o in range(occ_ptr[i], occ_ptr[i + 1]):
        j = occ_clause[o]
        sg = occ_sign[o]
        _contrib(s, j, -1)
        if (xi == 1) == (sg > 0):
            s.count[j] += 1
            s.tsum[j] += i
            s.tsgn[j] += sg
        else:
            s.count[j] -= 1
            s.tsum[j] -= i
            s.tsgn[j] -= sg
        _contrib(s, j, 1)


def simulate(cnp.int64_t[::1] var0, cnp.int64_t[::1] sign, cnp.int64_t[::1] ptr,
             cnp.int64_t[::1] occ_ptr, cnp.int64_t[::1] occ_clause, cnp.int64_t[::1] occ_sign,
             double[::1] v, const uint8_t[::1] p_bits, const double[:, ::1] noise,
             int64_t slot_steps, double delta_v, double threshold, bint record_trace):
    cdef int64_t n = v.shape[0]
    cdef int64_t nc = ptr.shape[0] - 1
    cdef int64_t n_steps = p_bits.shape[0]
    cdef int64_t n_inject = noise.shape[0]
    cdef int64_t i, j, m, t, cur, nflip, solved_at = -1, best
    cdef double nv
    cdef int8_t nx
    cdef bint masked

    x_arr = np.empty(n, dtype=np.int8)
    cdef int8_t[::1] x = x_arr
    count_arr = np.zeros(nc, dtype=np.int64)
    tsum_arr = np.zeros(nc, dtype=np.int64)
    tsgn_arr = np.zeros(nc, dtype=np.int64)
    drive_arr = np.zeros(n, dtype=np.int64)
    hold_arr = np.zeros(n, dtype=np.int64)
    flips_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] count = count_arr, tsum = tsum_arr, tsgn = tsgn_arr
    cdef int64_t[::1] drive = drive_arr, hold = hold_arr, flips = flips_arr
    trace_arr = np.zeros(n_steps if record_trace else 0, dtype=np.int32)
    cdef int32_t[::1] trace = trace_arr

    cdef Net s
    s.var0 = &var0[0]
    s.sign = &sign[0]
    s.ptr = &ptr[0]
    s.count = &count[0]
    s.tsum = &tsum[0]
    s.tsgn = &tsgn[0]
    s.drive = &drive[0]
    s.hold = &hold[0]
    s.unsat = 0

    for i in range(n):
        x[i] = 1 if v[i] >= threshold else 0
    for j in range(nc):
        for m in range(ptr[j], ptr[j + 1]):
            if (x[var0[m]] == 1) == (sign[m] > 0):
                count[j] += 1
                tsum[j] += var0[m]
                tsgn[j] += sign[m]
        _contrib(&s, j, 1)

    best = s.unsat
    best_x_arr = x_arr.copy()
    if best == 0:
        return 0, int(best), best_x_arr, trace_arr[:0] if record_trace else None

    with nogil:
        for t in range(n_steps):
            if n_inject > 0 and t % slot_steps == 0 and t // slot_steps < n_inject:
                nflip = 0
                for i in range(n):
                    nv = v[i] + noise[t // slot_steps, i]
                    if nv < 0.0:
                        nv = 0.0
                    elif nv > 1.0:
                        nv = 1.0
                    v[i] = nv
                    nx = 1 if nv >= threshold else 0
                    if nx != x[i]:
                        flips[nflip] = i
                        nflip += 1
                for m in range(nflip):
                    i = flips[m]
                    x[i] = 1 - x[i]
                    _flip(&s, i, x[i], &occ_ptr[0], &occ_clause[0], &occ_sign[0])

            masked = p_bits[t] != 0
            nflip = 0
            for i in range(n):
                cur = drive[i] if masked else drive[i] + hold[i]
                if cur != 0:
                    nv = v[i] + delta_v * <double>cur
                    if nv < 0.0:
                        nv = 0.0
                    elif nv > 1.0:
                        nv = 1.0
                    v[i] = nv
                    nx = 1 if nv >= threshold else 0
                    if nx != x[i]:
                        flips[nflip] = i
                        nflip += 1
            for m in range(nflip):
                i = flips[m]
                x[i] = 1 - x[i]
                _flip(&s, i, x[i], &occ_ptr[0], &occ_clause[0], &occ_sign[0])

            if record_trace:
                trace[t] = <int32_t>s.unsat
            if s.unsat < best:
                best = s.unsat
                with gil:
                    best_x_arr[:] = x_arr
            if s.unsat == 0:
                solved_at = t + 1
                break

    if record_trace and solved_at >= 0:
        trace_arr = trace_arr[:solved_at]
    return solved_at, int(best), best_x_arr, trace_arr if record_trace else None
