"""Pure numpy implementations of the detection kernels.

Same contracts as the compiled ``_ext._kernels`` module; selected by
:mod:`rtsthermo.kernels` when the extension is not built.
"""

import numpy as np


def hysteresis_runs(samples, low, high):
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    n = samples.size
    decisive = np.full(n, -1, dtype=np.int8)
    decisive[samples > high] = 1
    decisive[samples < low] = 0
    idx = np.flatnonzero(decisive >= 0)
    if idx.size == 0:
        return np.array([-1], dtype=np.int8), np.array([n], dtype=np.int64)
    # forward-fill the last decisive state; leading samples take the first one
    last = np.zeros(n, dtype=np.int64)
    last[idx] = idx
    np.maximum.accumulate(last, out=last)
    last[: idx[0]] = idx[0]
    states = decisive[last]
    edges = np.flatnonzero(np.diff(states)) + 1
    starts = np.concatenate(([0], edges))
    lengths = np.diff(np.concatenate((starts, [n]))).astype(np.int64)
    return states[starts].copy(), lengths


def merge_short_runs(states, lengths, min_len):
    out_s = []
    out_l = []
    for s, l in zip(np.asarray(states).tolist(), np.asarray(lengths).tolist()):
        if not out_s:
            out_s.append(s)
            out_l.append(l)
        elif l < min_len or s == out_s[-1]:
            out_l[-1] += l
        else:
            out_s.append(s)
            out_l.append(l)
    return np.array(out_s, dtype=np.int8), np.array(out_l, dtype=np.int64)


def format_trace_rows(t0, dt, samples):
    times = (t0 + dt * np.arange(len(samples))).tolist()
    return "".join(
        "%.17g,%.17g\n" % row for row in zip(times, np.asarray(samples, dtype=np.float64).tolist())
    ).encode("ascii")
