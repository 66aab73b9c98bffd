import pytest

from rtsthermo.ensemble import DotSpec, EnsembleParams
from rtsthermo.fermi2d import PhysicalConstants, ReservoirSpec


@pytest.fixture
def constants():
    return PhysicalConstants()


@pytest.fixture
def reservoir():
    return ReservoirSpec(n2=100, sigma2=1e4)


@pytest.fixture
def dot():
    return DotSpec(e_t=15.538, delta_e_c=20.0, delta_e_l=5.0, sigma1=10.0)


@pytest.fixture
def params(reservoir, dot, constants):
    return EnsembleParams(reservoir, dot, 4.2, constants)


# acceptance criteria: one summary line each, with the measured detail
_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    number, title = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    status = "PASS" if rep.passed else "FAIL"
    if number not in _ACCEPTANCE or status == "FAIL":
        _ACCEPTANCE[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2} {status}: {title} ({detail})")


@pytest.fixture
def detail(request):
    """Attach a measured value to the acceptance summary line."""
    def add(text):
        request.node.user_properties.append(("detail", text))
        print(text)
    return add
