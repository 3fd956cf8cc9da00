"""Constructive moment extensions with prescribed rank and inertia.

Everything here runs over Q(i). Each constructed term is re-checked with the
exact inertia routine before it is returned, so a plan never hands back a
value that fails its own predicate.

Appending a trial moment ``x`` to ``c_0..c_{n-1}`` gives

    det M_n(x) = alpha |x|^2 + 2 Re(conj(beta) x) + gamma,
    alpha = -det M_{n-2}.

When ``alpha != 0`` the zero set is the circle ``|x + beta/alpha| = R`` with
``R = |det M_{n-1} / det M_{n-2}|`` (Desnanot-Jacobi), so ``R`` is rational
and rational points on it come from the tangent half-angle map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Iterator

import numpy as np

from .classifier import CaseLabel, Verdict, classify_trig, verdict
from .errors import (BackendError, HorizonTooSmall, NoRankPreservingExtension,
                     NotSolvable, PreconditionViolated)
from .inertia import Inertia, TolerancePolicy, inertia, rank_det
from .linalg import nullspace
from .scalars import EXACT, QQi, array_backend, exact_sqrt
from .toeplitz import as_sequence, moment_matrix

_EXACT = TolerancePolicy.exact()


def _exact_moments(c) -> list[QQi]:
    arr = as_sequence(c)
    if array_backend(arr) != EXACT:
        raise BackendError("moment extension runs on exact (Gaussian rational) data only")
    return list(arr)


def _det_with(c: list[QQi], x) -> Fraction:
    """``det M_n`` after appending ``x``; ``det M_{-1} = 1``."""
    seq = c + [QQi.coerce(x)]
    return rank_det(moment_matrix(seq, len(seq) - 1), _EXACT)[1]


def _det_top(c: list[QQi]) -> Fraction:
    return Fraction(1) if not c else rank_det(moment_matrix(c, len(c) - 1), _EXACT)[1]


def _inertia_top(c: list[QQi]) -> Inertia:
    if not c:
        return Inertia(0, 0, 0)
    return inertia(moment_matrix(c, len(c) - 1), _EXACT)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class DetQuadratic:
    """``det M_n(x) = alpha |x|^2 + 2 Re(conj(beta) x) + gamma``."""

    alpha: Fraction
    beta: QQi
    gamma: Fraction

    def __call__(self, x) -> Fraction:
        x = QQi.coerce(x)
        return self.alpha * x.abs2() + 2 * (self.beta.conjugate() * x).re + self.gamma

    @property
    def is_circle(self) -> bool:
        return self.alpha != 0

    @property
    def center(self) -> QQi:
        if not self.alpha:
            raise ValueError("zero set is a line, not a circle")
        return -self.beta / self.alpha

    @property
    def radius_squared(self) -> Fraction:
        if not self.alpha:
            raise ValueError("zero set is a line, not a circle")
        return self.beta.abs2() / (self.alpha * self.alpha) - self.gamma / self.alpha


def det_as_function_of_cn(c) -> DetQuadratic:
    """Fit the quadratic from ``det M_n`` at ``x = 0, 1, -1, i``."""
    c = _exact_moments(c)
    if not c:
        raise ValueError("need at least one moment")
    d0 = _det_with(c, 0)
    d1 = _det_with(c, 1)
    dm = _det_with(c, -1)
    di = _det_with(c, QQi(0, 1))
    gamma = d0
    alpha = (d1 + dm) / 2 - gamma
    beta = QQi((d1 - dm) / 4, (di - alpha - gamma) / 2)
    return DetQuadratic(alpha, beta, gamma)


def unit_point(t: int) -> QQi:
    """Rational point ``((1 - t^2) + 2 t i) / (1 + t^2)`` on the unit circle."""
    d = Fraction(1 + t * t)
    return QQi(Fraction(1 - t * t) / d, Fraction(2 * t) / d)


def _tparams() -> Iterator[int]:
    yield 0
    for k in count(1):
        yield k
        yield -k


@dataclass
class ExtensionPlan:
    """One constructive step and the terms it produced.

    ``kind`` is ``"circle"`` (or ``"line"`` when the zero set degenerates),
    ``"recurrence"`` or ``"bump"``.
    """

    kind: str
    produced_terms: list = field(default_factory=list)
    center: QQi | None = None
    radius: Fraction | float | None = None
    direction: QQi | None = None  # line case: points are base + t*direction
    recurrence: list | None = None  # u_1..u_rho with u_0 = 1
    target_sign: int | None = None
    quadratic: DetQuadratic | None = None


def _case_test(c: list[QQi]):
    """(rank, det M_{n-1}, det M_{rank-1}) for the prefix."""
    rho = _inertia_top(c).rank
    det_top = _det_top(c)
    minor = _det_top(c[:rho])
    return rho, det_top, minor


def rank_preserving_step(c, samples: int = 3) -> ExtensionPlan:
    """Values of ``c_n`` that keep ``rank M_n = rank M_{n-1}``.

    Invertible ``M_{n-1}`` gives a circle (or line) of solutions, of which
    ``samples`` rational members are produced and verified. A singular
    ``M_{n-1}`` with nonzero leading minor of order ``rank`` gives the unique
    recurrence value. Otherwise no such value exists.
    """
    c = _exact_moments(c)
    rho, det_top, minor = _case_test(c)
    if det_top == 0:
        if minor == 0:
            raise NoRankPreservingExtension(
                f"leading minor of order {rho} vanishes; every next moment raises the rank")
        u = _recurrence(c, rho)
        x = _next_by_recurrence(c, u)
        plan = ExtensionPlan("recurrence", [x], recurrence=u)
        _verify_rank_kept(c, [x])
        return plan
    q = det_as_function_of_cn(c)
    pts = []
    if q.is_circle:
        center = q.center
        radius = exact_sqrt(q.radius_squared)
        if not isinstance(radius, Fraction):
            raise AssertionError("circle radius should be rational")
        for t in _tparams():
            pts.append(center + unit_point(t) * radius)
            if len(pts) == samples:
                break
        plan = ExtensionPlan("circle", pts, center=center, radius=radius, quadratic=q)
    else:
        # det = 2 Re(conj(beta) x) + gamma: a line through base, direction i*beta
        if not q.beta:
            raise AssertionError("determinant independent of the new moment")
        base = -q.beta * (q.gamma / (2 * q.beta.abs2()))
        direction = QQi(0, 1) * q.beta
        pts = [base + direction * t for t in range(samples)]
        plan = ExtensionPlan("line", pts, center=base, direction=direction, quadratic=q)
    rho_prev = len(c)
    for x in pts:
        if _inertia_top(c + [x]).rank != rho_prev:
            raise AssertionError(f"sample {x} does not keep the rank")
    return plan


def _recurrence(c: list[QQi], rho: int) -> list[QQi]:
    """``u_1..u_rho`` with ``c_m = -sum_k u_k c_{m-k}`` from ``ker M_rho`` (``u_0 = 1``)."""
    if rho >= len(c):
        # M_rho not yet available; rho == n only when M_{n-1} is invertible
        raise PreconditionViolated("no kernel vector of M_rho inside the data")
    ker = nullspace(moment_matrix(c, rho).entries)
    if ker.shape[1] != 1:
        raise AssertionError(f"ker M_{rho} has dimension {ker.shape[1]}")
    u = list(ker[:, 0])
    if not u[0]:
        raise AssertionError("kernel vector has zero leading entry")
    return [v / u[0] for v in u[1:]]


def _next_by_recurrence(c: list[QQi], u: list[QQi]) -> QQi:
    m = len(c)
    s = QQi(0)
    for k, uk in enumerate(u, start=1):
        s = s + uk * c[m - k]
    return -s


def _verify_rank_kept(c: list[QQi], new: list[QQi]):
    base = _inertia_top(c)
    seq = list(c)
    for x in new:
        seq.append(x)
        iner = _inertia_top(seq)
        if iner.nu != base.nu or iner.pi != base.pi:
            raise AssertionError(f"inertia changed from {base} to {iner}")


def unique_extension_stream(c, k: int) -> list[QQi]:
    """The next ``k`` moments of the unique rank-preserving extension."""
    c = _exact_moments(c)
    rho, det_top, minor = _case_test(c)
    if det_top != 0 or minor == 0:
        raise PreconditionViolated(
            "the unique extension needs a singular M_{n-1} with nonzero leading minor of order rank")
    u = _recurrence(c, rho)
    seq = list(c)
    out = []
    for _ in range(k):
        x = _next_by_recurrence(seq, u)
        seq.append(x)
        out.append(x)
    _verify_rank_kept(c, out)
    return out


def inertia_bump_step(c, direction: str, samples: int = 3) -> ExtensionPlan:
    """Values of ``c_n`` raising ``nu`` (``direction="nu"``) or ``pi`` by one with ``M_n`` invertible."""
    c = _exact_moments(c)
    direction = direction.lower()
    if direction not in ("nu", "pi"):
        raise ValueError("direction must be 'nu' or 'pi'")
    det_prev = _det_top(c)
    if det_prev == 0:
        raise PreconditionViolated("inertia bump needs an invertible M_{n-1}")
    # sign(det M_n / det M_{n-1}) is the sign of the new eigenvalue
    want = -_sign(det_prev) if direction == "nu" else _sign(det_prev)
    q = det_as_function_of_cn(c)
    pts = []
    if q.is_circle:
        center = q.center
        radius = exact_sqrt(q.radius_squared)
        # on center + s*u: det = alpha (s^2 - R^2)
        s = 2 * radius if _sign(q.alpha) == want else radius / 2
        for t in _tparams():
            pts.append(center + unit_point(t) * s)
            if len(pts) == samples:
                break
    else:
        base = -q.beta * (q.gamma / (2 * q.beta.abs2()))
        # det(base + s*beta) = 2 s |beta|^2
        pts = [base + q.beta * (want * s) for s in range(1, samples + 1)]
    prev = _inertia_top(c)
    expect = Inertia(prev.nu + 1, 0, prev.pi) if direction == "nu" else Inertia(prev.nu, 0, prev.pi + 1)
    for x in pts:
        got = _inertia_top(c + [x])
        if got != expect:
            raise AssertionError(f"bump candidate {x} gave {got}, expected {expect}")
    return ExtensionPlan("bump", pts, target_sign=want, quadratic=q,
                         center=q.center if q.is_circle else None)


def _rank_raising_term(c: list[QQi]) -> QQi:
    """A next moment that raises the rank (avoiding the unique rank-keeping one)."""
    rho = _inertia_top(c).rank
    for v in count():
        x = QQi(v)
        if _inertia_top(c + [x]).rank > rho:
            return x
    raise AssertionError("unreachable")


def extend_to_class(c, nu: int, pi: int | None = None, horizon: int = 8) -> list[QQi]:
    """``horizon`` further moments consistent with ``nu`` negative and ``pi`` positive squares.

    The output is a prefix of an extension whose moment matrices stabilize at
    inertia ``(nu, 0, pi)`` (with ``M_j`` singular beyond the stabilization
    point). ``pi=None`` picks the smallest reachable ``pi``.
    """
    c = _exact_moments(c)
    cls = classify_trig(c)
    v = verdict(cls, nu, pi)
    if v == Verdict.NoSolution:
        raise NotSolvable(f"no extension with nu={nu}, pi={pi}: case {cls.label.value}")
    if v == Verdict.Unique:
        return unique_extension_stream(c, horizon)
    if pi is None:
        pi = cls.base_pi if cls.label == CaseLabel.A_Invertible else cls.threshold_pi
    seq = list(c)
    out: list[QQi] = []

    def push(x):
        seq.append(x)
        out.append(x)

    while _det_top(seq) == 0:
        push(_rank_raising_term(seq))
    while _inertia_top(seq).nu < nu:
        push(inertia_bump_step(seq, "nu", samples=1).produced_terms[0])
    while _inertia_top(seq).pi < pi:
        push(inertia_bump_step(seq, "pi", samples=1).produced_terms[0])
    reached = _inertia_top(seq)
    if (reached.nu, reached.pi) != (nu, pi):
        raise AssertionError(f"construction overshot: {reached} for target ({nu}, {pi})")
    if len(out) > horizon:
        raise HorizonTooSmall(
            f"inertia stabilizes only after {len(out)} terms; horizon is {horizon}")
    if len(out) < horizon:
        push(rank_preserving_step(seq, samples=1).produced_terms[0])
    if len(out) < horizon:
        for x in unique_extension_stream(seq, horizon - len(out)):
            push(x)
    trace = inertia_trace(seq)
    if (trace[-1].nu, trace[-1].pi) != (nu, pi):
        raise AssertionError(f"final inertia {trace[-1]} misses target ({nu}, {pi})")
    return out


def inertia_trace(c) -> list[Inertia]:
    """Inertia of ``M_0, M_1, ..., M_{n-1}``."""
    c = _exact_moments(c)
    return [inertia(moment_matrix(c, j), _EXACT) for j in range(len(c))]


def stabilization_index(trace: list[Inertia]) -> int:
    """First ``j`` from which the (nu, pi) counts stay constant."""
    last = (trace[-1].nu, trace[-1].pi)
    j = len(trace) - 1
    while j > 0 and (trace[j - 1].nu, trace[j - 1].pi) == last:
        j -= 1
    return j


def step_law_violations(trace: list[Inertia]) -> list[str]:
    """Check the rank-step laws between consecutive moment matrices.

    The rank grows by 0, 1 or 2; growth 0 keeps both counts, growth 1 raises
    exactly one of them, growth 2 raises both.
    """
    bad = []
    for j in range(1, len(trace)):
        p, q = trace[j - 1], trace[j]
        d, dn, dp = q.rank - p.rank, q.nu - p.nu, q.pi - p.pi
        allowed = {0: {(0, 0)}, 1: {(1, 0), (0, 1)}, 2: {(1, 1)}}.get(d)
        if allowed is None:
            bad.append(f"j={j}: rank step {d}")
        elif (dn, dp) not in allowed:
            bad.append(f"j={j}: rank step {d} with (dnu, dpi) = ({dn}, {dp})")
    return bad
