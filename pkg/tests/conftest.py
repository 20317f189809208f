import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from valuation_lab import convex_hull, contains_origin_interior  # noqa: E402
from valuation_lab.harness import unimodular_from_rng  # noqa: E402
from valuation_lab.linalg import LinearMap, mpq  # noqa: E402

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


def q(s) -> mpq:
    return mpq(s) if isinstance(s, int) else mpq(*map(int, s.split("/")))


def pts(*coords):
    return [tuple(q(c) if isinstance(c, str) else mpq(c) for c in p) for p in coords]


@pytest.fixture
def kite():
    """conv{(-1,0), (2,0), (0,1), (0,-1)}."""
    return convex_hull([(-1, 0), (2, 0), (0, 1), (0, -1)])


small_rationals = st.builds(
    lambda p, d: mpq(p, d), st.integers(-6, 6), st.integers(1, 3)
)


@st.composite
def origin_polytopes(draw, n=2, max_points=None):
    """Random hulls of small rational points that contain the origin in their interior.

    The points always include a scaled cross-polytope so the origin is inside.
    """
    r = draw(st.integers(1, 3))
    base = []
    for i in range(n):
        for s in (r, -r):
            base.append(tuple(mpq(s) if j == i else mpq(0) for j in range(n)))
    extra = draw(st.lists(st.tuples(*[small_rationals] * n), min_size=0, max_size=max_points or 2 * n))
    P = convex_hull(base + list(extra))
    assert contains_origin_interior(P)
    return P


def unimodular_maps(n=2, det_sign=1):
    return st.integers(0, 10 ** 6).map(lambda seed: unimodular_from_rng(random.Random(seed), n, det_sign))


def gl_maps(n=2):
    rows = st.lists(st.lists(small_rationals, min_size=n, max_size=n), min_size=n, max_size=n)
    return rows.map(LinearMap).filter(lambda phi: phi.det != 0)


# -- acceptance reporting ---------------------------------------------------------
# Tests marked ``@pytest.mark.criterion(n, text)`` get one PASS/FAIL line each in
# the terminal summary, so a run of tests/test_acceptance.py reads as a checklist.

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, text = mark.args
    ok = report.passed and _CRITERIA.get(number, (text, True))[1]
    _CRITERIA[number] = (text, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        text, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}")
