import math

import numpy as np
import pytest

from rtsthermo.config import load_config
from rtsthermo.workflows import limit_sweep, parse_sweep, rate_model, ratio_report, roundtrip


def test_parse_sweep():
    name, values = parse_sweep("T=0.1:10:100")
    assert name == "T" and values.size == 100 and values[0] == 0.1 and values[-1] == 10.0
    with pytest.raises(ValueError):
        parse_sweep("T=1:2:0")
    with pytest.raises(ValueError):
        parse_sweep("T:1:2:3")


def test_default_density_sweep_is_pre_asymptotic():
    # at 1e-2 nm^-2, beta mu ~ 109 and the N2 = 100 gap exponent is 1.64,
    # so the relative gap has not yet reached its 1/N2 regime
    res = limit_sweep(load_config())
    assert res["slope"] == pytest.approx(-0.9348, abs=5e-4)
    assert res["log_gap_slope"] == pytest.approx(-1.0, abs=1e-9)
    first = res["rows"][0]
    assert first["gap"] == pytest.approx(abs(math.expm1(-first["log_gap"])), rel=1e-12)


def test_sweep_slope_tends_to_minus_one_with_lower_density():
    slopes = [limit_sweep(load_config(overrides=[f"reservoir.sigma2={s2}"]))["slope"]
              for s2 in (1e4, 9e4, 1e6)]
    assert slopes[0] > slopes[1] > slopes[2] >= -1.0
    assert slopes[2] == pytest.approx(-1.0, abs=0.002)


def test_rate_model_defaults():
    m = rate_model(load_config())
    assert m.tau2_mean == 1e-3
    assert m.ratio == pytest.approx(ratio_report(load_config())["ratio"], rel=1e-15)


def test_roundtrip_summary_fields():
    res = roundtrip(load_config(overrides=["n_transitions=300"]), repetitions=3)
    s = res["summary"]
    assert s["repetitions"] == 3 and s["valid_runs"] == 3
    assert s["coverage_3sigma"] == s["covered_3sigma"] / 3
    zs = np.array([r["z"] for r in res["runs"]])
    assert s["z_mean"] == pytest.approx(zs.mean())


def test_roundtrip_rejects_zero():
    with pytest.raises(ValueError):
        roundtrip(load_config(), repetitions=0)
