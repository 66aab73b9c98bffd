"""Computations behind the CLI verbs, as plain functions of a RunConfig."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .config import RunConfig
from .ensemble import (
    consistent_island_area,
    effective_energy_gap,
    infinite_reservoir_ratio,
    occupation_probability,
    occupation_ratio,
    partition_qg,
    state_equation_residual,
)
from .estimator import analyze_trace
from .fermi2d import ReservoirSpec, fd_oracle, thermo_point
from .rts_sim import (
    EventList,
    GENERATOR_ID,
    RateModel,
    SampledTrace,
    dwell_means_from_ratio,
    render_trace,
    simulate_events,
)

__all__ = [
    "parse_sweep",
    "thermo_rows",
    "ratio_report",
    "limit_sweep",
    "rate_model",
    "simulate",
    "analyze",
    "roundtrip_once",
    "roundtrip",
]


def parse_sweep(text: str) -> tuple[str, np.ndarray]:
    """``"T=0.1:10:100"`` -> ``("T", linspace(0.1, 10, 100))``."""
    name, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or len(parts) != 3:
        raise ValueError(f"sweep {text!r} is not of the form NAME=start:stop:count")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError(f"sweep count must be >= 1, got {count}")
    return name.strip(), np.linspace(start, stop, count)


def thermo_rows(cfg: RunConfig, temperatures=None, oracle: bool = True) -> list[dict]:
    """Closed-form bath thermodynamics, with the Fermi-Dirac oracle alongside."""
    r, k_B = cfg.reservoir, cfg.constants.k_B
    temps = [cfg.temperature] if temperatures is None else list(temperatures)
    rows = []
    for T in temps:
        tp = thermo_point(r.n2, r.sigma2, r.g, T, k_B)
        row = {"T_K": float(T), "kT_over_mu": k_B * T / tp.mu, "mu_meV": tp.mu, "U_meV": tp.u,
               "Psi_meV": tp.psi, "S_meV_per_K": tp.s, "c_A": tp.c_a, "P_meV_per_nm2": tp.p}
        if oracle and T > 0:
            o = fd_oracle(r.n2, r.sigma2, r.g, T, k_B)
            row.update(mu_oracle_meV=o.mu_exact, U_oracle_meV=o.u_exact,
                       U_rel_gap=abs(tp.u - o.u_exact) / abs(o.u_exact))
        else:
            row.update(mu_oracle_meV=None, U_oracle_meV=None, U_rel_gap=None)
        rows.append(row)
    return rows


def ratio_report(cfg: RunConfig) -> dict:
    p = cfg.params()
    dist = occupation_probability(p)
    ratio = occupation_ratio(p)
    inf = infinite_reservoir_ratio(p)
    area = consistent_island_area(p)
    return {
        "X_meV": effective_energy_gap(p),
        "beta_X": p.beta * effective_energy_gap(p),
        "mu_meV": p.mu,
        "p1": dist.p1,
        "p2": dist.p2,
        "ratio": ratio.value,
        "log_ratio": ratio.log,
        "ratio_infinite_n2": inf.value,
        "log_ratio_infinite_n2": inf.log,
        "log_Z_QG": partition_qg(p).log,
        "state_equation_residual": state_equation_residual(p),
        "consistent_sigma1_nm2": area.sigma1,
        "consistent_sigma1_note": area.reason,
        "inputs": cfg.echo(),
    }


def limit_sweep(cfg: RunConfig, n2_min=None, n2_max=None, points=None,
                fixed_density=None) -> dict:
    """Finite-bath ratio against its infinite-bath limit over a log-spaced N2 grid.

    With ``fixed_density`` the bath area grows with ``N2`` so the chemical
    potential stays put; otherwise the area is fixed and ``mu`` grows
    linearly in ``N2``.  Returns rows and the fitted log-log slopes of the
    relative gap and of the exponent gap.
    """
    sw = cfg.sweep
    n2_min = sw["n2_min"] if n2_min is None else n2_min
    n2_max = sw["n2_max"] if n2_max is None else n2_max
    points = sw["points"] if points is None else points
    fixed_density = sw["fixed_density"] if fixed_density is None else fixed_density
    if n2_min < 1 or n2_max < n2_min or points < 1:
        raise ValueError(f"invalid N2 sweep [{n2_min}, {n2_max}] with {points} points")
    grid = np.unique(np.round(np.geomspace(n2_min, n2_max, points)).astype(np.int64))
    base = cfg.reservoir
    rows = []
    for n2 in grid.tolist():
        sigma2 = base.sigma2 * n2 / base.n2 if fixed_density else base.sigma2
        p = replace(cfg.params(), reservoir=ReservoirSpec(n2, sigma2, base.g))
        lr, li = occupation_ratio(p).log, infinite_reservoir_ratio(p).log
        rows.append({
            "n2": n2, "sigma2_nm2": sigma2, "mu_meV": p.mu,
            "ratio": occupation_ratio(p).value, "ratio_infinite": infinite_reservoir_ratio(p).value,
            "gap": abs(math.expm1(lr - li)), "log_gap": abs(lr - li),
        })
    out = {"fixed_density": bool(fixed_density), "rows": rows, "slope": None, "log_gap_slope": None}
    if len(rows) >= 2:
        x = np.log([r["n2"] for r in rows])
        out["slope"] = float(np.polyfit(x, np.log([r["gap"] for r in rows]), 1)[0])
        out["log_gap_slope"] = float(np.polyfit(x, np.log([r["log_gap"] for r in rows]), 1)[0])
    return out


def rate_model(cfg: RunConfig, temperature: float | None = None) -> RateModel:
    ratio = occupation_ratio(cfg.params(temperature))
    if not ratio.representable:
        raise FloatingPointError(f"occupation ratio exp({ratio.log:.6g}) overflows; dwell times undefined")
    return dwell_means_from_ratio(float(ratio), cfg.attempt_rate)


def simulate(cfg: RunConfig, rep: int = 0) -> tuple[EventList, SampledTrace, dict]:
    """Events, rendered trace and sidecar fields for repetition ``rep``."""
    model = rate_model(cfg)
    events = simulate_events(model, cfg.n_transitions, (cfg.seed, rep, 0))
    trace = render_trace(events, replace(cfg.trace, seed=(cfg.seed, rep, 1)))
    sidecar = {
        "seed": cfg.seed,
        "repetition": rep,
        "generator": GENERATOR_ID,
        "model": {"tau1_mean_s": model.tau1_mean, "tau2_mean_s": model.tau2_mean,
                  "ratio": model.ratio},
        "config": cfg.echo(),
    }
    return events, trace, sidecar


def analyze(cfg: RunConfig, trace: SampledTrace, detection=None) -> dict:
    res = analyze_trace(trace, detection or cfg.detection, cfg.reservoir, cfg.dot, cfg.constants,
                        fano_window=cfg.fano_window, log_floor=cfg.log_floor)
    res["inputs_echo"] = cfg.echo()
    return res


def roundtrip_once(cfg: RunConfig, rep: int) -> dict:
    events, trace, _ = simulate(cfg, rep)
    res = analyze_trace(trace, cfg.detection, cfg.reservoir, cfg.dot, cfg.constants,
                        fano_window=cfg.fano_window, log_floor=cfg.log_floor)
    t = cfg.temperature
    z = None
    if res["valid"] and res["sigma_t"]:
        z = (res["t_hat"] - t) / res["sigma_t"]
    return {"repetition": rep, "T_true_K": t, "T_hat_K": res["t_hat"], "sigma_T_K": res["sigma_t"],
            "z": z, "rel_err": None if res["t_hat"] is None else (res["t_hat"] - t) / t,
            "valid": res["valid"], "true_transitions": events.n_transitions,
            "detected_transitions": res["n_transitions"]}


def _once(args):
    return roundtrip_once(*args)


def roundtrip(cfg: RunConfig, repetitions: int | None = None, workers: int | None = None) -> dict:
    """Repeated simulate/analyze runs with summary calibration statistics.

    Runs are independent; with ``workers > 1`` they fan out over processes
    and are collected in repetition order.
    """
    reps = cfg.repetitions if repetitions is None else repetitions
    workers = cfg.workers if workers is None else workers
    if reps < 1:
        raise ValueError(f"repetitions must be >= 1, got {reps}")
    jobs = [(cfg, i) for i in range(reps)]
    if workers > 1 and reps > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            runs = list(ex.map(_once, jobs))
    else:
        runs = [_once(j) for j in jobs]
    zs = np.array([r["z"] for r in runs if r["z"] is not None], dtype=float)
    summary = {
        "repetitions": reps,
        "valid_runs": int(zs.size),
        "T_true_K": cfg.temperature,
        "z_mean": float(zs.mean()) if zs.size else None,
        "z_std": float(zs.std(ddof=1)) if zs.size > 1 else None,
        "coverage_3sigma": float(np.count_nonzero(np.abs(zs) <= 3.0)) / reps,
        "covered_3sigma": int(np.count_nonzero(np.abs(zs) <= 3.0)),
    }
    return {"summary": summary, "runs": runs, "inputs": cfg.echo()}
