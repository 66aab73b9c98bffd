"""Run configuration: packaged defaults, a JSON file, then command-line overrides."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .ensemble import DotSpec, EnsembleParams
from .estimator import DetectionConfig, thresholds_for_levels
from .fermi2d import M_E, PhysicalConstants, ReservoirSpec, dos_2d
from .rts_sim import TraceConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "default_config_dict", "config_schema"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _data(name):
    return json.loads(resources.files("rtsthermo").joinpath("data", name).read_text())


def default_config_dict() -> dict:
    return _data("defaults.json")


def config_schema() -> dict:
    return _data("config.schema.json")


def _merge(base, update):
    for k, v in update.items():
        if isinstance(v, dict) and isinstance(base.get(k), dict):
            _merge(base[k], v)
        else:
            base[k] = v
    return base


def _parse_override(item: str):
    key, sep, text = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"override {item!r} is not of the form section.field=value")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return key.strip().split("."), value


@dataclass(frozen=True)
class RunConfig:
    constants: PhysicalConstants
    reservoir: ReservoirSpec
    dot: DotSpec
    temperature: float
    attempt_rate: float
    n_transitions: int
    trace: TraceConfig
    detection: DetectionConfig
    fano_window: float | None
    log_floor: float
    repetitions: int
    workers: int
    sweep: dict
    seed: int
    raw: dict

    def params(self, temperature: float | None = None) -> EnsembleParams:
        return EnsembleParams(self.reservoir, self.dot,
                              self.temperature if temperature is None else temperature,
                              self.constants)

    def echo(self) -> dict:
        """Resolved inputs for reproducibility records."""
        out = copy.deepcopy(self.raw)
        out.pop("_comment", None)
        out["constants"] = {"k_B": self.constants.k_B, "hbar": self.constants.hbar,
                            "m_eff": self.constants.m_eff}
        out["reservoir"]["g"] = self.reservoir.g
        out["dot"]["delta_e_l"] = self.dot.delta_e_l
        out["detection"] = {"threshold_low": self.detection.threshold_low,
                            "threshold_high": self.detection.threshold_high,
                            "min_dwell_samples": self.detection.min_dwell_samples,
                            "high_state": self.detection.high_state}
        return out


def _build(d: dict) -> RunConfig:
    c = d["constants"]
    kw = {k: c[k] for k in ("k_B", "hbar") if c.get(k) is not None}
    constants = PhysicalConstants(m_eff=c["m_eff_ratio"] * M_E, **kw)

    r = d["reservoir"]
    g = r["g"] if r.get("g") is not None else dos_2d(constants)
    reservoir = ReservoirSpec(r["n2"], float(r["sigma2"]), float(g))

    dd = dict(d["dot"])
    s_hr, hw = dd.pop("s_hr", None), dd.pop("hbar_omega", None)
    if s_hr is not None or hw is not None:
        if s_hr is None or hw is None:
            raise ConfigError("dot.s_hr and dot.hbar_omega must be given together")
        dd["delta_e_l"] = s_hr * hw
    if dd.get("delta_e_l") is None:
        raise ConfigError("dot.delta_e_l is required unless dot.s_hr and dot.hbar_omega are given")
    dot = DotSpec(**dd)

    t = d["trace"]
    trace = TraceConfig(sample_rate=t["sample_rate"], current_1=t["current_1"],
                        current_2=t["current_2"], noise_sigma=t["noise_sigma"], seed=d["seed"])

    det = d["detection"]
    auto = thresholds_for_levels(trace.current_1, trace.current_2, trace.noise_sigma,
                                 det["k_sigma"], det["min_dwell_samples"])
    detection = DetectionConfig(
        det["threshold_low"] if det.get("threshold_low") is not None else auto.threshold_low,
        det["threshold_high"] if det.get("threshold_high") is not None else auto.threshold_high,
        det["min_dwell_samples"],
        det["high_state"] if det.get("high_state") is not None else auto.high_state,
    )

    sw = d["sweep"]
    if sw["n2_max"] < sw["n2_min"]:
        raise ConfigError("sweep.n2_max must be >= sweep.n2_min")
    if not d["temperature"] > 0:
        raise ConfigError("temperature must be > 0")

    return RunConfig(
        constants=constants, reservoir=reservoir, dot=dot,
        temperature=float(d["temperature"]), attempt_rate=float(d["attempt_rate"]),
        n_transitions=int(d["n_transitions"]), trace=trace, detection=detection,
        fano_window=d["analysis"]["fano_window"], log_floor=d["analysis"]["log_floor"],
        repetitions=int(d["roundtrip"]["repetitions"]), workers=int(d["roundtrip"]["workers"]),
        sweep=dict(sw), seed=int(d["seed"]), raw=d,
    )


def load_config(path=None, overrides=(), **direct) -> RunConfig:
    """Resolve a :class:`RunConfig`.

    Precedence, lowest first: packaged defaults, the JSON file at ``path``,
    ``section.field=value`` strings in ``overrides``, then keyword arguments
    for top-level keys (``seed=...``, ``temperature=...``).

    Raises
    ------
    ConfigError
        Naming the offending field when validation fails.
    """
    d = default_config_dict()
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
        _check_schema(user, str(path))
        _merge(d, user)
    for item in overrides:
        keys, value = _parse_override(item)
        node = d
        for k in keys[:-1]:
            if not isinstance(node.get(k), dict):
                raise ConfigError(f"override {item!r}: unknown section {k!r}")
            node = node[k]
        node[keys[-1]] = value
    for k, v in direct.items():
        if v is not None:
            d[k] = v
    _check_schema(d, "configuration")
    try:
        return _build(d)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _check_schema(d, where):
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(d), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        field = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {field}: {e.message}")
