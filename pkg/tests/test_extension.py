import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import forced_jump_instance
from conftest import qqi_st
from oracles import det_sympy
from pschur.classifier import Verdict, classify_trig, verdict
from pschur.errors import (BackendError, HorizonTooSmall, NoRankPreservingExtension, NotSolvable,
                           PreconditionViolated)
from pschur.extension import (det_as_function_of_cn, extend_to_class, inertia_bump_step,
                              inertia_trace, rank_preserving_step, stabilization_index,
                              step_law_violations, unique_extension_stream, unit_point)
from pschur.inertia import TolerancePolicy, inertia
from pschur.scalars import QQi
from pschur.toeplitz import moment_matrix

F = Fraction
EX = TolerancePolicy.exact()


def top(c):
    return inertia(moment_matrix(c, len(c) - 1), EX)


@pytest.mark.parametrize("c,abg", [
    ([1, F(1, 2)], (-1, F(1, 4), F(1, 2))),
    ([1, 0], (-1, 0, 1)),
    ([1], (-1, 0, 1)),
])
def test_det_quadratic_examples(c, abg):
    q = det_as_function_of_cn([QQi(x) for x in c])
    assert (q.alpha, q.beta, q.gamma) == tuple(QQi(x) if i == 1 else x for i, x in enumerate(abg))


@settings(max_examples=40, deadline=None)
@given(st.lists(qqi_st, min_size=0, max_size=3), qqi_st)
def test_det_quadratic_reproduces_determinant(tail, x):
    c = [QQi(1)] + tail
    q = det_as_function_of_cn(c)
    m = moment_matrix(c + [x], len(c)).entries
    assert q(x) == det_sympy(m)


def test_circle_example():
    plan = rank_preserving_step([QQi(1), QQi(F(1, 2))])
    assert plan.kind == "circle" and plan.center == F(1, 4) and plan.radius == F(3, 4)
    q = det_as_function_of_cn([QQi(1), QQi(F(1, 2))])
    assert q(QQi(1)) == 0 and q(QQi(F(-1, 2))) == 0
    assert len(plan.produced_terms) >= 3
    for x in plan.produced_terms:
        assert q(x) == 0 and top([1, F(1, 2), x]).rank == 2


def test_unique_examples():
    assert rank_preserving_step([QQi(1), QQi(1)]).produced_terms == [1]
    assert unique_extension_stream([QQi(1), QQi(1)], 5) == [1] * 5
    assert unique_extension_stream([QQi(1), QQi(-1)], 3) == [1, -1, 1]
    c = [QQi(1), QQi(F(1, 2)), QQi(1)]
    terms = unique_extension_stream(c, 2)
    assert all(t.rank == 2 for t in inertia_trace(c + terms)[2:])
    with pytest.raises(NoRankPreservingExtension):
        rank_preserving_step([QQi(x) for x in (1, 1, 1, 0)])
    with pytest.raises(PreconditionViolated):
        unique_extension_stream([QQi(1), QQi(2)], 2)


def test_line_case():
    # alpha vanishes here even though |M_0| = 0 is not the obstruction
    plan = rank_preserving_step([QQi(0), QQi(1)])
    assert plan.kind == "line"
    for x in plan.produced_terms:
        assert top([0, 1, x]).rank == 2


def test_bump_examples():
    c = [QQi(1), QQi(F(1, 2))]
    assert det_as_function_of_cn(c)(QQi(2)) == F(-5, 2)
    assert top(c + [QQi(2)]).nu == 1
    assert det_as_function_of_cn(c)(QQi(F(1, 4))) == F(9, 16)
    # M_1 is already positive definite, so the bump takes pi from 2 to 3
    assert top(c).pi == 2 and top(c + [QQi(F(1, 4))]).pi == 3
    for direction, key in (("nu", 0), ("pi", 2)):
        plan = inertia_bump_step(c, direction)
        assert len(set(plan.produced_terms)) >= 3
        for x in plan.produced_terms:
            before, after = top(c), top(c + [x])
            assert after.zeta == 0 and after[key] == before[key] + 1
    assert top([1, 2]).nu == 1
    with pytest.raises(PreconditionViolated):
        inertia_bump_step([QQi(1), QQi(1)], "nu")


def test_extend_examples():
    out = extend_to_class([QQi(1), QQi(2)], 1, 1, horizon=8)
    assert len(out) == 8
    assert all((t.nu, t.pi) == (1, 1) for t in inertia_trace([1, 2] + out)[1:])
    assert extend_to_class([QQi(1), QQi(1)], 0, 1, horizon=6) == [1] * 6
    out = extend_to_class([QQi(1), QQi(1)], 1, 2, horizon=8)
    trace = inertia_trace([1, 1] + out)
    assert trace[2].rank == trace[1].rank + 2
    assert (trace[-1].nu, trace[-1].pi) == (1, 2)
    with pytest.raises(NotSolvable):
        extend_to_class([QQi(1), QQi(1)], 0, 2)
    with pytest.raises(HorizonTooSmall):
        extend_to_class([QQi(1), QQi(2)], 4, 4, horizon=2)
    with pytest.raises(BackendError):
        extend_to_class(np.array([1.0, 2.0]), 1, 1)


def test_degenerate_thresholds():
    c = [QQi(x) for x in (1, 1, 1, 0)]
    out = extend_to_class(c, 2, 3, horizon=6)
    assert (inertia_trace(c + out)[-1].nu, inertia_trace(c + out)[-1].pi) == (2, 3)
    for nu, pi in ((1, 2), (1, 3), (2, 2)):
        with pytest.raises(NotSolvable):
            extend_to_class(c, nu, pi)


@settings(max_examples=25, deadline=None)
@given(st.lists(qqi_st, min_size=1, max_size=3), st.integers(0, 3), st.integers(0, 3))
def test_extensions_obey_step_laws(tail, dnu, dpi):
    c = [QQi(1)] + tail
    cls = classify_trig(c)
    nu, pi = cls.threshold_nu + dnu, cls.threshold_pi + dpi
    assert verdict(cls, nu, pi) == Verdict.InfinitelyMany
    out = extend_to_class(c, nu, pi, horizon=2 * (nu + pi) + 4)
    trace = inertia_trace(c + out)
    assert step_law_violations(trace) == []
    k = stabilization_index(trace)
    assert all((t.nu, t.pi) == (nu, pi) for t in trace[k:])


def test_forced_jump_instances():
    rng = random.Random(9)
    for _ in range(10):
        c, r = forced_jump_instance(rng)
        base = top(c)
        assert base.rank > r
        x = QQi(rng.randint(-9, 9), rng.randint(-9, 9))
        assert top(c + [x]).rank == base.rank + 2


def test_perturbing_unique_stream_lifts_both():
    c = [QQi(1), QQi(F(1, 2)), QQi(1)]
    x = unique_extension_stream(c, 1)[0]
    before = top(c)
    after = top(c + [x + QQi(F(1, 3))])
    assert (after.nu, after.pi) == (before.nu + 1, before.pi + 1)


def test_unit_points_rational():
    pts = {unit_point(t) for t in range(-3, 4)}
    assert len(pts) == 7 and all(p.abs2() == 1 for p in pts)


def test_step_law_checker_flags_bad_trace():
    from pschur.inertia import Inertia
    assert step_law_violations([Inertia(0, 0, 1), Inertia(1, 0, 2)]) == []
    assert step_law_violations([Inertia(0, 0, 1), Inertia(0, 0, 3)])
