"""Finite-bath grand canonical ensemble of a (1 <-> 2)-electron quantum dot,
random telegraph signal simulation, and temperature recovery from dwell times."""

__version__ = "0.1.0"

from .fermi2d import PhysicalConstants, ReservoirSpec, dos_2d, fd_oracle
from .ensemble import (
    DotSpec,
    EnsembleParams,
    LogValue,
    occupation_probability,
    occupation_ratio,
    partition_qg,
)
from .rts_sim import EventList, RateModel, SampledTrace, TraceConfig, simulate_events, render_trace
from .estimator import (
    DetectionConfig,
    detect_states,
    dwell_statistics,
    estimate_temperature,
    invert_ratio_for_temperature,
)

__all__ = [
    "PhysicalConstants", "ReservoirSpec", "dos_2d", "fd_oracle",
    "DotSpec", "EnsembleParams", "LogValue", "occupation_probability", "occupation_ratio",
    "partition_qg", "EventList", "RateModel", "SampledTrace", "TraceConfig",
    "simulate_events", "render_trace", "DetectionConfig", "detect_states",
    "dwell_statistics", "estimate_temperature", "invert_ratio_for_temperature",
]
