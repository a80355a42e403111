import pytest
from hypothesis import HealthCheck, settings

import pdga.algebra as _algebra
import pdga.hodge as _hodge

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

CRITERIA = {}

# Everything the suite produces that the sweep tests re-verify at the end:
# every HodgeData built anywhere, and every map accepted by check_morphism.
SEEN = {"hodge": [], "maps": []}

_hodge_init = _hodge.HodgeData.__init__


def _recording_init(self, *args, **kwargs):
    _hodge_init(self, *args, **kwargs)
    SEEN["hodge"].append(self)


_hodge.HodgeData.__init__ = _recording_init

_check_morphism = _algebra.check_morphism


def _recording_check_morphism(f, a, or_a=None, b=None, or_b=None):
    rep = _check_morphism(f, a, or_a, b, or_b)
    accepted = rep["chainMap"] and rep["multiplicative"] and rep["unital"] and rep["quasiIso"]
    if accepted and rep["orientationCompatible"] is True:
        SEEN["maps"].append((f, a, or_a, b, or_b))
    return rep


# modules importing check_morphism by name are loaded after this point
_algebra.check_morphism = _recording_check_morphism


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion covered by the test")
    config.addinivalue_line("markers", "sweep: re-verifies objects recorded during the whole run; runs last")


def pytest_collection_modifyitems(session, config, items):
    items.sort(key=lambda it: it.get_closest_marker("sweep") is not None)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = CRITERIA.get(n, (text, True))
        CRITERIA[n] = (text, prev[1] and rep.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        text, ok = CRITERIA[n]
        terminalreporter.write_line("criterion %d: %s  %s" % (n, "PASS" if ok else "FAIL", text))
