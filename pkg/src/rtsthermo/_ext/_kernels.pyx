# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hysteresis detector and run merger."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def hysteresis_runs(const double[::1] samples, double low, double high):
    """Run-length encoded hysteresis states of ``samples``.

    Returns ``(states, lengths)`` with ``states`` 1 for the high level and 0
    for the low level.  Samples before the first decisive sample inherit its
    state; if no sample is decisive a single run of state -1 is returned.
    """
    cdef Py_ssize_t n = samples.shape[0]
    cdef Py_ssize_t i, k = 0, start = 0, first = -1
    cdef signed char cur = -1
    cdef double x
    for i in range(n):
        x = samples[i]
        if x > high:
            cur = 1
            first = i
            break
        if x < low:
            cur = 0
            first = i
            break
    if first < 0:
        return np.array([-1], dtype=np.int8), np.array([n], dtype=np.int64)

    # a run per crossing is the worst case; grow on demand
    cdef Py_ssize_t cap = 1024
    states_arr = np.empty(cap, dtype=np.int8)
    lengths_arr = np.empty(cap, dtype=np.int64)
    cdef signed char[::1] states = states_arr
    cdef long long[::1] lengths = lengths_arr
    for i in range(first + 1, n):
        x = samples[i]
        if cur == 1:
            if x < low:
                if k == cap:
                    cap *= 2
                    states_arr = np.resize(states_arr, cap)
                    lengths_arr = np.resize(lengths_arr, cap)
                    states = states_arr
                    lengths = lengths_arr
                states[k] = 1
                lengths[k] = i - start
                k += 1
                start = i
                cur = 0
        else:
            if x > high:
                if k == cap:
                    cap *= 2
                    states_arr = np.resize(states_arr, cap)
                    lengths_arr = np.resize(lengths_arr, cap)
                    states = states_arr
                    lengths = lengths_arr
                states[k] = 0
                lengths[k] = i - start
                k += 1
                start = i
                cur = 1
    if k == cap:
        states_arr = np.resize(states_arr, cap + 1)
        lengths_arr = np.resize(lengths_arr, cap + 1)
        states = states_arr
        lengths = lengths_arr
    states[k] = cur
    lengths[k] = n - start
    k += 1
    return states_arr[:k].copy(), lengths_arr[:k].copy()


def merge_short_runs(const signed char[::1] states, const long long[::1] lengths,
                     long long min_len):
    """Absorb runs shorter than ``min_len`` into the preceding run."""
    cdef Py_ssize_t n = states.shape[0]
    out_s_arr = np.empty(n, dtype=np.int8)
    out_l_arr = np.empty(n, dtype=np.int64)
    cdef signed char[::1] out_s = out_s_arr
    cdef long long[::1] out_l = out_l_arr
    cdef Py_ssize_t i, k = 0
    for i in range(n):
        if k == 0:
            out_s[0] = states[i]
            out_l[0] = lengths[i]
            k = 1
        elif lengths[i] < min_len or states[i] == out_s[k - 1]:
            out_l[k - 1] += lengths[i]
        else:
            out_s[k] = states[i]
            out_l[k] = lengths[i]
            k += 1
    return out_s_arr[:k].copy(), out_l_arr[:k].copy()


from libc.stdio cimport snprintf
from libc.stdlib cimport malloc, free


def format_trace_rows(double t0, double dt, const double[::1] samples):
    """``time_s,current_A`` rows as ASCII bytes, both columns in ``%.17g``."""
    cdef Py_ssize_t n = samples.shape[0]
    # two %.17g fields are at most 24 chars each, plus ',' and '\n'
    cdef Py_ssize_t row_max = 52
    cdef char* buf = <char*> malloc(n * row_max + 1)
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, pos = 0
    try:
        for i in range(n):
            pos += snprintf(buf + pos, row_max + 1, b"%.17g,%.17g\n", t0 + i * dt, samples[i])
        return buf[:pos]
    finally:
        free(buf)
