"""Compare the compiled and pure-numpy detection kernels.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

Times hysteresis detection, short-run merging and CSV formatting on a
seeded default-scenario trace and checks that both backends agree.
"""

import argparse
import time

import numpy as np

from rtsthermo import _kernels_py
from rtsthermo.estimator import thresholds_for_levels
from rtsthermo.rts_sim import RateModel, TraceConfig, render_trace, simulate_events

try:
    from rtsthermo._ext import _kernels as _cy
except ImportError:
    _cy = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--samples", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cfg = TraceConfig(seed=1)
    model = RateModel(5.44e-3, 1e-3)
    n_events = max(int(args.samples / cfg.sample_rate / (model.tau1_mean + model.tau2_mean) * 2), 2)
    trace = render_trace(simulate_events(model, n_events, seed=0), cfg)
    x = trace.samples[: args.samples]
    det = thresholds_for_levels(cfg.current_1, cfg.current_2, cfg.noise_sigma)
    print(f"{x.size} samples, {n_events} transitions")

    backends = [("python", _kernels_py)] + ([("cython", _cy)] if _cy else [])
    results = {}
    for name, impl in backends:
        t_h, runs = best_of(lambda: impl.hysteresis_runs(x, det.threshold_low, det.threshold_high),
                            args.repeat)
        t_m, merged = best_of(lambda: impl.merge_short_runs(*runs, det.min_dwell_samples), args.repeat)
        t_f, text = best_of(lambda: impl.format_trace_rows(0.0, trace.dt, x), 1)
        results[name] = (t_h, t_m, t_f, runs, merged, text)

    print(f"{'kernel':<12}" + "".join(f"{n:>12}" for n, _ in backends) + ("     speedup" if _cy else ""))
    for i, kernel in enumerate(("hysteresis", "merge", "format_csv")):
        row = f"{kernel:<12}" + "".join(f"{results[n][i]:>11.3f}s" for n, _ in backends)
        if _cy:
            row += f"{results['python'][i] / results['cython'][i]:>11.1f}x"
        print(row)

    if _cy:
        py, cy = results["python"], results["cython"]
        same = (np.array_equal(py[3][0], cy[3][0]) and np.array_equal(py[3][1], cy[3][1])
                and np.array_equal(py[4][0], cy[4][0]) and np.array_equal(py[4][1], cy[4][1])
                and py[5] == cy[5])
        print(f"outputs identical: {same}")
    else:
        print("compiled extension not built; python backend only")


if __name__ == "__main__":
    main()
