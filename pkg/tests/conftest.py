import random
import re
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from pschur.scalars import QQi

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict[int, list] = {}


def rand_qqi(rng: random.Random, bound: int = 4, den: int = 4, complex_: bool = True) -> QQi:
    re_ = Fraction(rng.randint(-bound * den, bound * den), rng.randint(1, den))
    im = Fraction(rng.randint(-bound * den, bound * den), rng.randint(1, den)) if complex_ else 0
    return QQi(re_, im)


def rand_coeffs(rng: random.Random, n: int, **kw) -> list:
    return [rand_qqi(rng, **kw) for _ in range(n)]


fractions_st = st.fractions(min_value=-5, max_value=5, max_denominator=6)
qqi_st = st.builds(QQi, fractions_st, fractions_st)


@st.composite
def coeff_seq(draw, min_size=1, max_size=6):
    return draw(st.lists(qqi_st, min_size=min_size, max_size=max_size))


@st.composite
def hermitian_exact(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    m = [[None] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = QQi(draw(fractions_st))
        for j in range(i):
            v = draw(qqi_st)
            m[i][j] = v
            m[j][i] = v.conjugate()
    return m


@pytest.fixture
def rng():
    return random.Random(20261015)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        ok = all(o == "passed" for o in _outcomes[k])
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}")
