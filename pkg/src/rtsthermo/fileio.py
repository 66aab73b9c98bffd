"""File formats shared by the simulator, the analyzer and the CLI.

Trace CSV:  header ``time_s,current_A`` then one sample per line.
Sidecar:    ``<trace>.json`` next to the CSV with config, seed, generator id
            and the ground-truth dwell summary.
Events CSV: header ``state,duration_s``.

Floats are written with 17 significant digits so they read back bit-exact.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from pathlib import Path

import numpy as np

from . import kernels
from .rts_sim import EventList, SampledTrace

__all__ = [
    "TRACE_HEADER",
    "EVENTS_HEADER",
    "SchemaError",
    "dump_json",
    "write_json",
    "write_trace",
    "read_trace",
    "write_events",
    "read_events",
    "write_table",
]

TRACE_HEADER = "time_s,current_A"
EVENTS_HEADER = "state,duration_s"


class SchemaError(ValueError):
    """Input file does not follow the documented schema."""


def _clean(obj):
    # JSON has no NaN/inf; numpy scalars are not serialisable
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dump_json(obj) -> str:
    """Deterministic JSON text (sorted keys, repr floats, NaN as null)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dump_json(obj))


def write_trace(path, trace: SampledTrace, sidecar: dict | None = None) -> Path:
    """Write ``trace`` to ``path`` (CSV) and its sidecar to ``path`` with ``.json`` suffix."""
    path = Path(path)
    with open(path, "wb") as f:
        f.write(TRACE_HEADER.encode() + b"\n")
        f.write(kernels.format_trace_rows(float(trace.t0), float(trace.dt), trace.samples))
    side = {"t0_s": trace.t0, "dt_s": trace.dt, "n_samples": int(trace.samples.size),
            "subsample_dwells": trace.subsample_dwells, "metadata": trace.metadata}
    if trace.truth is not None:
        side["truth"] = trace.truth.summary()
    side.update(sidecar or {})
    write_json(path.with_suffix(".json"), side)
    return path


def _first_bad_line(path, ncols, kinds):
    with open(path, newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if lineno == 1:
                continue
            if len(row) != ncols:
                return f"{path}:{lineno}: expected {ncols} fields, got {len(row)}"
            for value, kind in zip(row, kinds):
                try:
                    kind(value)
                except ValueError:
                    return f"{path}:{lineno}: cannot parse {value!r} as {kind.__name__}"
    return f"{path}: unreadable content"


def _loadtxt(path):
    # an empty body is reported by the caller, not as a numpy warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.float64, ndmin=2)


def _check_header(path, expected):
    with open(path) as f:
        header = f.readline().strip()
    if header != expected:
        raise SchemaError(f"{path}:1: expected header {expected!r}, got {header!r}")


def read_trace(path) -> tuple[SampledTrace, dict]:
    """Read a trace CSV and, if present, its sidecar JSON.

    Raises
    ------
    SchemaError
        With ``file:line`` for malformed content.
    """
    path = Path(path)
    _check_header(path, TRACE_HEADER)
    try:
        data = _loadtxt(path)
    except ValueError:
        raise SchemaError(_first_bad_line(path, 2, (float, float))) from None
    if data.shape[0] == 0:
        raise SchemaError(f"{path}: no samples after the header")
    if data.shape[1] != 2:
        raise SchemaError(_first_bad_line(path, 2, (float, float)))
    if not np.all(np.isfinite(data)):
        row = int(np.flatnonzero(~np.all(np.isfinite(data), axis=1))[0])
        raise SchemaError(f"{path}:{row + 2}: non-finite value")
    side_path = path.with_suffix(".json")
    sidecar = json.loads(side_path.read_text()) if side_path.exists() else {}
    times = data[:, 0]
    if "dt_s" in sidecar:
        dt = float(sidecar["dt_s"])
    elif times.size > 1:
        dt = float(times[1] - times[0])
    else:
        raise SchemaError(f"{path}: single sample and no sidecar; sampling interval unknown")
    if times.size > 1:
        expected = times[0] + dt * np.arange(times.size)
        bad = np.flatnonzero(np.abs(times - expected) > 1e-6 * dt + 1e-12 * np.abs(expected))
        if bad.size:
            raise SchemaError(f"{path}:{int(bad[0]) + 2}: time not on the uniform grid of dt={dt!r} s")
    trace = SampledTrace(t0=float(times[0]), dt=dt, samples=data[:, 1],
                         metadata=sidecar.get("metadata", {}))
    return trace, sidecar


def write_events(path, events: EventList) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        f.write(EVENTS_HEADER + "\n")
        f.writelines("%d,%.17g\n" % row for row in zip(events.states.tolist(), events.durations.tolist()))
    return path


def read_events(path) -> EventList:
    path = Path(path)
    _check_header(path, EVENTS_HEADER)
    try:
        data = _loadtxt(path)
    except ValueError:
        raise SchemaError(_first_bad_line(path, 2, (int, float))) from None
    if data.size == 0:
        return EventList([], [])
    try:
        return EventList(data[:, 0].astype(np.int8), data[:, 1])
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def write_table(fh, rows: list[dict], fmt: str) -> None:
    """Emit ``rows`` to the open text stream as CSV or JSON."""
    if fmt == "json":
        fh.write(dump_json(rows))
        return
    if not rows:
        return
    cols = list(rows[0])
    fh.write(",".join(cols) + "\n")
    for r in rows:
        fh.write(",".join(_cell(r[c]) for c in cols) + "\n")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)
