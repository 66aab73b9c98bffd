"""Seeded two-state random telegraph signal generator.

Dwell times in each occupancy are exponential (Poissonian switching), and the
two mean dwell times stand in the ratio of the occupation probabilities.  The
absolute time scale is set by an attempt rate ``nu0`` that fixes the mean
dwell in the two-electron state to ``1/nu0``.

Random numbers come from numpy's PCG64 bit generator seeded through
``numpy.random.SeedSequence``; :data:`GENERATOR_ID` records this in trace
metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GENERATOR_ID",
    "RateModel",
    "EventList",
    "TraceConfig",
    "SampledTrace",
    "make_rng",
    "dwell_means_from_ratio",
    "simulate_events",
    "render_trace",
]

GENERATOR_ID = f"numpy.random.PCG64 (SeedSequence) numpy {np.__version__}"


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator from an int, a tuple of ints, a ``SeedSequence`` or a generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (tuple, list)):
        seed = np.random.SeedSequence([int(s) for s in seed])
    elif not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class RateModel:
    """Mean dwell times (s) in the one- and two-electron states."""

    tau1_mean: float
    tau2_mean: float

    def __post_init__(self):
        for name in ("tau1_mean", "tau2_mean"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def ratio(self) -> float:
        return self.tau1_mean / self.tau2_mean

    @property
    def stationary_p1(self) -> float:
        """Long-run fraction of time spent in state 1."""
        return self.tau1_mean / (self.tau1_mean + self.tau2_mean)


@dataclass
class EventList:
    """Alternating dwell record of the island occupancy.

    ``states[i]`` is the occupancy (1 or 2) during the ``i``-th dwell and
    ``durations[i]`` its length in seconds.  An empty list (no dwells) is
    allowed and carries the reason in ``note``.
    """

    states: np.ndarray
    durations: np.ndarray
    note: str = ""

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.int8)
        self.durations = np.asarray(self.durations, dtype=np.float64)
        if self.states.shape != self.durations.shape or self.states.ndim != 1:
            raise ValueError("states and durations must be 1-d arrays of equal length")
        if self.states.size:
            if not np.all((self.states == 1) | (self.states == 2)):
                raise ValueError("states must be 1 or 2")
            if np.any(self.states[1:] == self.states[:-1]):
                raise ValueError("states must strictly alternate")
            if not np.all(self.durations > 0):
                raise ValueError("dwell durations must be > 0")

    @property
    def initial_state(self) -> int | None:
        return int(self.states[0]) if self.states.size else None

    @property
    def total_time(self) -> float:
        return float(self.durations.sum())

    @property
    def n_transitions(self) -> int:
        return max(self.states.size - 1, 0)

    def __len__(self):
        return int(self.states.size)

    @property
    def dwells(self) -> list[tuple[int, float]]:
        return list(zip(self.states.tolist(), self.durations.tolist()))

    def transition_times(self) -> np.ndarray:
        """Times of the state changes, measured from the start of the record."""
        return np.cumsum(self.durations)[:-1]

    def for_state(self, state: int) -> np.ndarray:
        return self.durations[self.states == state]

    def summary(self) -> dict:
        """Ground-truth summary written to trace sidecars."""
        out = {"initial_state": self.initial_state, "n_dwells": len(self),
               "n_transitions": self.n_transitions, "total_time_s": self.total_time}
        for s in (1, 2):
            d = self.for_state(s)
            out[f"n{s}"] = int(d.size)
            out[f"tau{s}_mean_s"] = float(d.mean()) if d.size else None
            out[f"time{s}_s"] = float(d.sum())
        return out


@dataclass(frozen=True)
class TraceConfig:
    """Sampling and current levels for rendering an event list.

    The default polarity puts the one-electron state on the high current
    level; swapping ``current_1`` and ``current_2`` reverses it.
    """

    sample_rate: float = 400e3
    current_1: float = 1.0e-9
    current_2: float = 0.4e-9
    noise_sigma: float = 0.1e-9
    #: int or tuple of ints, see :func:`make_rng`
    seed: int | tuple = 0

    def __post_init__(self):
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise ValueError(f"trace.sample_rate must be > 0, got {self.sample_rate!r}")
        if self.current_1 == self.current_2:
            raise ValueError("trace.current_1 and trace.current_2 must differ")
        if not self.noise_sigma >= 0:
            raise ValueError(f"trace.noise_sigma must be >= 0, got {self.noise_sigma!r}")

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def snr(self) -> float:
        """Level separation over noise standard deviation."""
        d = abs(self.current_1 - self.current_2)
        return math.inf if self.noise_sigma == 0 else d / self.noise_sigma

    def level(self, state: int) -> float:
        return self.current_1 if state == 1 else self.current_2


@dataclass
class SampledTrace:
    """Uniformly sampled current record (A)."""

    t0: float
    dt: float
    samples: np.ndarray
    truth: EventList | None = None
    #: dwells too short to contain any sample when rendered
    subsample_dwells: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("trace needs a nonempty 1-d sample array")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)


def dwell_means_from_ratio(ratio: float, attempt_rate: float) -> RateModel:
    """Mean dwell times with ``tau2 = 1/attempt_rate`` and ``tau1/tau2 = ratio``."""
    if not (ratio > 0 and math.isfinite(ratio)):
        raise ValueError(f"ratio must be positive and finite, got {ratio!r}")
    if not (attempt_rate > 0 and math.isfinite(attempt_rate)):
        raise ValueError(f"attempt_rate must be positive and finite, got {attempt_rate!r}")
    tau2 = 1.0 / attempt_rate
    return RateModel(tau1_mean=ratio * tau2, tau2_mean=tau2)


def simulate_events(model: RateModel, target_transitions: int, seed) -> EventList:
    """Draw an alternating exponential dwell sequence with ``target_transitions`` switches.

    The initial state is drawn from the stationary time fraction
    ``tau1/(tau1 + tau2)``, so time averages are unbiased from the start.
    Output is a deterministic function of ``(model, target_transitions, seed)``.
    """
    if int(target_transitions) != target_transitions or target_transitions < 1:
        raise ValueError(f"target_transitions must be an integer >= 1, got {target_transitions!r}")
    n = int(target_transitions) + 1
    rng = make_rng(seed)
    first = 1 if rng.random() < model.stationary_p1 else 2
    states = np.empty(n, dtype=np.int8)
    states[0::2] = first
    states[1::2] = 3 - first
    means = np.where(states == 1, model.tau1_mean, model.tau2_mean)
    durations = rng.standard_exponential(n) * means
    # exponential draws are > 0 except with probability ~2^-53
    durations[durations == 0] = np.nextafter(0.0, 1.0)
    return EventList(states, durations)


def render_trace(events: EventList, config: TraceConfig, t0: float = 0.0) -> SampledTrace:
    """Sample the piecewise-constant current of ``events`` with white Gaussian noise.

    Sample ``k`` sits at ``t0 + k dt`` and takes the level of the dwell that
    contains it.  Dwells that fall between two samples leave no trace; their
    count is reported in ``subsample_dwells``.
    """
    if len(events) == 0:
        raise ValueError("cannot render an empty event list")
    dt = config.dt
    total = events.total_time
    n = max(int(math.floor(total / dt)), 1)
    # index of the first sample at or after each dwell end
    ends = np.minimum(np.ceil(np.cumsum(events.durations) / dt), n).astype(np.int64)
    counts = np.diff(np.concatenate(([0], ends)))
    counts[-1] += n - ends[-1]
    levels = np.where(events.states == 1, config.current_1, config.current_2)
    if config.noise_sigma > 0:
        samples = make_rng(config.seed).standard_normal(n)
        samples *= config.noise_sigma
        samples += np.repeat(levels, counts)
    else:
        samples = np.repeat(levels, counts)
    meta = {
        "generator": GENERATOR_ID,
        "seed": list(config.seed) if isinstance(config.seed, (tuple, list)) else int(config.seed),
        "sample_rate_Hz": config.sample_rate,
        "current_1_A": config.current_1,
        "current_2_A": config.current_2,
        "noise_sigma_A": config.noise_sigma,
    }
    return SampledTrace(t0=t0, dt=dt, samples=samples, truth=events,
                        subsample_dwells=int(np.count_nonzero(counts == 0)), metadata=meta)
