import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rtsthermo import _kernels_py, kernels

try:
    from rtsthermo._ext import _kernels as _cy
except ImportError:  # extension not built
    _cy = None

needs_ext = pytest.mark.skipif(_cy is None, reason="compiled extension not built")
samples = arrays(np.float64, st.integers(1, 300), elements=st.floats(-3, 3, allow_nan=False))


def test_backend_named():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", [_kernels_py, pytest.param(_cy, marks=needs_ext)],
                         ids=["python", "cython"])
class TestContracts:
    def test_hysteresis_basic(self, impl):
        x = np.array([0.5, 2.0, 0.5, -2.0, 0.5, 0.6, 2.0])
        s, l = impl.hysteresis_runs(x, -1.0, 1.0)
        # leading undecided sample takes the first decisive state
        assert s.tolist() == [1, 0, 1]
        assert l.tolist() == [3, 3, 1]

    def test_hysteresis_undecided(self, impl):
        s, l = impl.hysteresis_runs(np.zeros(5), -1.0, 1.0)
        assert s.tolist() == [-1] and l.tolist() == [5]

    def test_merge(self, impl):
        s, l = impl.merge_short_runs(np.array([1, 0, 1, 0], np.int8), np.array([5, 1, 4, 6], np.int64), 2)
        assert s.tolist() == [1, 0] and l.tolist() == [10, 6]
        s, l = impl.merge_short_runs(np.array([1, 0], np.int8), np.array([1, 6], np.int64), 2)
        assert s.tolist() == [1, 0] and l.tolist() == [1, 6]

    def test_format(self, impl):
        out = impl.format_trace_rows(0.0, 0.5, np.array([1e-9, 0.1]))
        assert out == b"0,1.0000000000000001e-09\n0.5,0.10000000000000001\n"


@needs_ext
@settings(max_examples=200, deadline=None)
@given(samples, st.floats(-1, 0), st.floats(0.01, 1), st.integers(1, 4))
def test_backends_agree(x, low, width, min_len):
    high = low + width
    a = _kernels_py.hysteresis_runs(x, low, high)
    b = _cy.hysteresis_runs(x, low, high)
    assert a[0].tolist() == b[0].tolist() and a[1].tolist() == b[1].tolist()
    if a[0][0] >= 0:
        ma = _kernels_py.merge_short_runs(*a, min_len)
        mb = _cy.merge_short_runs(*b, min_len)
        assert ma[0].tolist() == mb[0].tolist() and ma[1].tolist() == mb[1].tolist()
    assert _kernels_py.format_trace_rows(1.5, 1e-3, x) == _cy.format_trace_rows(1.5, 1e-3, x)


@settings(max_examples=200, deadline=None)
@given(samples, st.floats(-1, 0), st.floats(0.01, 1), st.integers(1, 4))
def test_runs_partition_the_trace(x, low, width, min_len):
    s, l = kernels.hysteresis_runs(x, low, low + width)
    assert l.sum() == x.size and np.all(l > 0)
    if s[0] >= 0:
        assert np.all(s[1:] != s[:-1])
        ms, ml = kernels.merge_short_runs(s, l, min_len)
        assert ml.sum() == x.size
        assert np.all(ms[1:] != ms[:-1])
        assert np.all(ml[1:] >= min_len)


def test_format_round_trips_exactly():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(1000) * 1e-9
    text = kernels.format_trace_rows(0.0, 2.5e-6, x).decode()
    back = np.array([float(r.split(",")[1]) for r in text.splitlines()])
    assert back.tobytes() == x.tobytes()
