"""Dwell-time analysis of telegraph traces and temperature recovery.

Pipeline: :func:`detect_states` turns a sampled current into an
:class:`~rtsthermo.rts_sim.EventList`, :func:`dwell_statistics` reduces it
to mean dwell times, and :func:`estimate_temperature` inverts the
finite-bath occupation ratio ``tau1/tau2 = (deg1/deg2) exp(X / k_B T)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .ensemble import DotSpec, LogValue, energy_gap
from .fermi2d import PhysicalConstants, ReservoirSpec
from .rts_sim import EventList, SampledTrace, make_rng

__all__ = [
    "DetectionConfig",
    "DwellTimeStats",
    "TemperatureEstimate",
    "InsufficientStatistics",
    "TemperatureUnidentifiable",
    "NegativeTemperature",
    "thresholds_for_levels",
    "detect_states",
    "match_transitions",
    "dwell_statistics",
    "fano_factor",
    "fano_factor_renewal",
    "occupancy_fraction",
    "occupancy_fraction_sigma",
    "invert_ratio_for_temperature",
    "estimate_temperature",
    "bootstrap_sigma_t",
    "analyze_trace",
]

DEFAULT_LOG_FLOOR = 1e-6


@dataclass(frozen=True)
class DetectionConfig:
    """Dual-threshold (hysteresis) detector settings.

    ``high_state`` is the occupancy assigned to the high current level.
    """

    threshold_low: float
    threshold_high: float
    min_dwell_samples: int = 2
    high_state: int = 1

    def __post_init__(self):
        if not self.threshold_low < self.threshold_high:
            raise ValueError(
                f"detection.threshold_low ({self.threshold_low!r}) must be below "
                f"detection.threshold_high ({self.threshold_high!r})"
            )
        if int(self.min_dwell_samples) != self.min_dwell_samples or self.min_dwell_samples < 1:
            raise ValueError(f"detection.min_dwell_samples must be an integer >= 1, got {self.min_dwell_samples!r}")
        if self.high_state not in (1, 2):
            raise ValueError(f"detection.high_state must be 1 or 2, got {self.high_state!r}")


def thresholds_for_levels(current_1: float, current_2: float, noise_sigma: float,
                          k: float = 2.0, min_dwell_samples: int = 2) -> DetectionConfig:
    """Thresholds ``k`` noise deviations inside each current level.

    Falls back to a narrow band around the midpoint when the levels are too
    close for the requested margin.
    """
    lo_level, hi_level = sorted((current_1, current_2))
    low, high = lo_level + k * noise_sigma, hi_level - k * noise_sigma
    if not low < high:
        mid, gap = 0.5 * (lo_level + hi_level), hi_level - lo_level
        low, high = mid - 0.05 * gap, mid + 0.05 * gap
    return DetectionConfig(low, high, min_dwell_samples, 1 if current_1 > current_2 else 2)


def detect_states(trace: SampledTrace, cfg: DetectionConfig) -> EventList:
    """Hysteresis state detection.

    The state drops to low only below ``threshold_low`` and rises to high only
    above ``threshold_high``.  Runs shorter than ``min_dwell_samples`` are
    absorbed into the preceding run.  Durations are whole multiples of ``dt``.
    If no sample crosses either threshold the result is empty and ``note``
    says why.
    """
    states, lengths = kernels.hysteresis_runs(trace.samples, cfg.threshold_low, cfg.threshold_high)
    if states[0] < 0:
        lo, hi = float(trace.samples.min()), float(trace.samples.max())
        return EventList(
            [], [],
            note=(f"no sample outside [{cfg.threshold_low:g}, {cfg.threshold_high:g}]; "
                  f"samples span [{lo:g}, {hi:g}]"),
        )
    if cfg.min_dwell_samples > 1:
        states, lengths = kernels.merge_short_runs(states, lengths, int(cfg.min_dwell_samples))
    low_state = 3 - cfg.high_state
    occ = np.where(states == 1, cfg.high_state, low_state)
    return EventList(occ, lengths * trace.dt)


class TransitionMatch(NamedTuple):
    matched: int
    missed: int
    spurious: int

    @property
    def error_rate(self) -> float:
        """(missed + spurious) per true transition."""
        n_true = self.matched + self.missed
        return (self.missed + self.spurious) / n_true if n_true else float(self.spurious > 0)


def match_transitions(detected: EventList, truth: EventList, tolerance: float) -> TransitionMatch:
    """Greedy one-to-one pairing of transition times within ``tolerance`` seconds."""
    td = detected.transition_times() if len(detected) else np.empty(0)
    tt = truth.transition_times() if len(truth) else np.empty(0)
    i = j = matched = 0
    while i < tt.size and j < td.size:
        if abs(tt[i] - td[j]) <= tolerance:
            matched += 1
            i += 1
            j += 1
        elif tt[i] < td[j]:
            i += 1
        else:
            j += 1
    return TransitionMatch(matched, tt.size - matched, td.size - matched)


class InsufficientStatistics(ValueError):
    """Too few complete dwells to form the requested statistic."""

    def __init__(self, message, counts=None):
        super().__init__(message)
        self.counts = counts or {}


@dataclass(frozen=True)
class DwellTimeStats:
    n1_events: int
    n2_events: int
    tau1_hat: float
    tau2_hat: float
    tau1_var: float
    tau2_var: float

    @property
    def ratio(self) -> float:
        return self.tau1_hat / self.tau2_hat


def dwell_statistics(events: EventList) -> DwellTimeStats:
    """Mean and variance of the complete dwells of each state.

    The first and last dwells are censored by the record boundaries and are
    dropped.  For exponential dwells the sample mean is the maximum
    likelihood estimate of the mean.

    Raises
    ------
    InsufficientStatistics
        If either state has fewer than two complete dwells.
    """
    states = events.states[1:-1]
    durations = events.durations[1:-1]
    d1, d2 = durations[states == 1], durations[states == 2]
    counts = {"n1": int(d1.size), "n2": int(d2.size)}
    if d1.size < 2 or d2.size < 2:
        raise InsufficientStatistics(
            f"insufficient statistics: need >= 2 complete dwells per state, got {counts}", counts
        )
    return DwellTimeStats(
        n1_events=counts["n1"], n2_events=counts["n2"],
        tau1_hat=float(d1.mean()), tau2_hat=float(d2.mean()),
        tau1_var=float(d1.var(ddof=1)), tau2_var=float(d2.var(ddof=1)),
    )


def _n_windows(total, window):
    k = int(math.floor(total / window))
    # tolerate round-off when total is an exact multiple of window
    if (k + 1) * window <= total * (1 + 1e-12):
        k += 1
    return k


def fano_factor(events: EventList, window: float) -> float:
    """Variance-to-mean ratio of transition counts in consecutive windows.

    Raises ``ValueError`` when fewer than 10 full windows fit in the record
    or no transition falls inside them.
    """
    if not window > 0:
        raise ValueError(f"window must be > 0, got {window!r}")
    total = events.total_time
    k = _n_windows(total, window)
    if k < 10:
        raise ValueError(f"fano factor needs >= 10 windows; record of {total:g} s holds {k} of {window:g} s")
    t = events.transition_times()
    idx = np.floor(t / window).astype(np.int64)
    counts = np.bincount(idx[idx < k], minlength=k)
    mean = counts.mean()
    if mean == 0:
        raise ValueError("no transitions inside the counting windows")
    return float(counts.var(ddof=1) / mean)


def fano_factor_renewal(tau1: float, tau2: float) -> float:
    """Long-window Fano factor of transition counts for exponential alternating dwells.

    ``2 (tau1^2 + tau2^2) / (tau1 + tau2)^2``; equals 1 only for ``tau1 == tau2``,
    where the transitions form a Poisson process.
    """
    return 2.0 * (tau1 * tau1 + tau2 * tau2) / (tau1 + tau2) ** 2


def occupancy_fraction(events: EventList) -> tuple[float, float]:
    """Fractions of the record spent in states 1 and 2."""
    total = events.total_time
    if total <= 0:
        raise ValueError("empty event list")
    f1 = float(events.durations[events.states == 1].sum() / total)
    return f1, 1.0 - f1


def occupancy_fraction_sigma(tau1: float, tau2: float, total_time: float) -> float:
    """Asymptotic standard deviation of the state-1 time fraction.

    Alternating renewal process with exponential dwells:
    ``Var f1 = 2 tau1^2 tau2^2 / ((tau1 + tau2)^3 T)``.
    """
    return math.sqrt(2.0 * tau1**2 * tau2**2 / ((tau1 + tau2) ** 3 * total_time))


class TemperatureUnidentifiable(ValueError):
    """The ratio carries no temperature information (degenerate ratio or zero gap)."""


class NegativeTemperature(ValueError):
    """Ratio and energy gap imply a negative temperature."""

    def __init__(self, message, value):
        super().__init__(message)
        self.value = value


def _log_ratio(ratio) -> float:
    if isinstance(ratio, LogValue):
        return ratio.log
    if not ratio > 0:
        raise ValueError(f"ratio must be > 0, got {ratio!r}")
    return math.log(ratio)


def invert_ratio_for_temperature(
    ratio,
    reservoir: ReservoirSpec,
    dot: DotSpec,
    constants: PhysicalConstants | None = None,
    *,
    infinite_reservoir: bool = False,
) -> float:
    """Temperature (K) at which the ensemble produces ``ratio = p1/p2``.

    ``T = X / (k_B ln(ratio deg2 / deg1))``.  ``ratio`` may be a float or a
    :class:`~rtsthermo.ensemble.LogValue`.

    Raises
    ------
    TemperatureUnidentifiable
        If the log ratio is zero or the energy gap ``X`` is zero.
    NegativeTemperature
        If the ratio lies on the wrong side of ``deg1/deg2`` for the sign of ``X``.
    """
    constants = constants or PhysicalConstants()
    L = _log_ratio(ratio) + math.log(dot.deg2 / dot.deg1)
    x = energy_gap(reservoir, dot, infinite_reservoir=infinite_reservoir)
    if L == 0.0:
        raise TemperatureUnidentifiable("ratio equals the degeneracy ratio; temperature diverges")
    if x == 0.0:
        raise TemperatureUnidentifiable("energy gap X is zero; ratio is temperature independent")
    t = x / (constants.k_B * L)
    if t < 0:
        raise NegativeTemperature(
            f"ratio and gap X = {x:g} meV give T = {t:g} K < 0", t
        )
    return t


@dataclass(frozen=True)
class TemperatureEstimate:
    t_hat: float
    sigma_t: float
    valid: bool
    reason: str = ""
    ratio: float = math.nan
    gap: float = math.nan

    def z_score(self, t_true: float) -> float:
        return (self.t_hat - t_true) / self.sigma_t if self.sigma_t > 0 else math.nan


def estimate_temperature(
    stats: DwellTimeStats,
    reservoir: ReservoirSpec,
    dot: DotSpec,
    constants: PhysicalConstants | None = None,
    *,
    log_floor: float = DEFAULT_LOG_FLOOR,
) -> TemperatureEstimate:
    """Temperature from mean dwell times with a delta-method standard error.

    The standard error of ``ln(tau1/tau2)`` is ``sqrt(1/n1 + 1/n2)`` for
    exponential dwells, and ``sigma_t = T |sigma_L / L|``.  The estimate is
    flagged invalid rather than raised when the log ratio is inside
    ``log_floor`` or the implied temperature is not positive.
    """
    constants = constants or PhysicalConstants()
    r = stats.ratio
    x = energy_gap(reservoir, dot)
    L = math.log(r) + math.log(dot.deg2 / dot.deg1)
    if abs(L) < log_floor:
        return TemperatureEstimate(math.nan, math.nan, False,
                                   "ratio indistinguishable from degeneracy ratio", r, x)
    if x == 0.0:
        return TemperatureEstimate(math.nan, math.nan, False,
                                   "energy gap X is zero; temperature unidentifiable", r, x)
    t = x / (constants.k_B * L)
    sigma_l = math.sqrt(1.0 / stats.n1_events + 1.0 / stats.n2_events)
    sigma_t = abs(t) * sigma_l / abs(L)
    if t <= 0:
        return TemperatureEstimate(t, sigma_t, False,
                                   "negative temperature: ratio on the wrong side of deg1/deg2 for the sign of X",
                                   r, x)
    return TemperatureEstimate(t, sigma_t, True, "", r, x)


def bootstrap_sigma_t(
    events: EventList,
    reservoir: ReservoirSpec,
    dot: DotSpec,
    constants: PhysicalConstants | None = None,
    *,
    n_boot: int = 1000,
    seed=0,
) -> float:
    """Bootstrap standard error of the temperature, resampling complete dwells.

    Useful when dwell counts are too small for the delta method.
    """
    constants = constants or PhysicalConstants()
    dwell_statistics(events)  # raises on too few dwells
    states, durations = events.states[1:-1], events.durations[1:-1]
    d1, d2 = durations[states == 1], durations[states == 2]
    rng = make_rng(seed)
    m1 = d1[rng.integers(0, d1.size, (n_boot, d1.size))].mean(axis=1)
    m2 = d2[rng.integers(0, d2.size, (n_boot, d2.size))].mean(axis=1)
    L = np.log(m1 / m2) + math.log(dot.deg2 / dot.deg1)
    t = energy_gap(reservoir, dot) / (constants.k_B * L)
    return float(np.std(t, ddof=1))


def analyze_trace(
    trace: SampledTrace,
    detection: DetectionConfig,
    reservoir: ReservoirSpec,
    dot: DotSpec,
    constants: PhysicalConstants | None = None,
    *,
    fano_window: float | None = None,
    log_floor: float = DEFAULT_LOG_FLOOR,
) -> dict:
    """Full trace-to-temperature pipeline; returns the results record.

    ``fano_window`` defaults to 20 mean cycle lengths.  Statistics that
    cannot be formed are reported as ``None`` with the reason.
    """
    events = detect_states(trace, detection)
    out = {"tau1_hat": None, "tau2_hat": None, "n1": 0, "n2": 0, "fano": None,
           "f1": None, "f2": None, "t_hat": None, "sigma_t": None,
           "valid": False, "reason": events.note, "n_transitions": events.n_transitions}
    if len(events) == 0:
        return out
    out["f1"], out["f2"] = occupancy_fraction(events)
    try:
        stats = dwell_statistics(events)
    except InsufficientStatistics as exc:
        out["reason"] = str(exc)
        out["n1"], out["n2"] = exc.counts["n1"], exc.counts["n2"]
        return out
    out.update(tau1_hat=stats.tau1_hat, tau2_hat=stats.tau2_hat,
               n1=stats.n1_events, n2=stats.n2_events)
    window = fano_window or 20.0 * (stats.tau1_hat + stats.tau2_hat)
    try:
        out["fano"] = fano_factor(events, window)
    except ValueError:
        out["fano"] = None
    out["fano_window_s"] = window
    est = estimate_temperature(stats, reservoir, dot, constants, log_floor=log_floor)
    out.update(
        t_hat=est.t_hat if math.isfinite(est.t_hat) else None,
        sigma_t=est.sigma_t if math.isfinite(est.sigma_t) else None,
        valid=est.valid, reason=est.reason,
    )
    return out
