"""Toeplitz, Hankel and moment matrices built from Taylor coefficients.

Conventions: ``T_r`` is r x r (coefficients ``a_0..a_{r-1}``) while the
moment matrix ``M_r`` is (r+1) x (r+1) (moments ``c_0..c_r``). Coefficients
and moments are tied by ``c_0 = 1``, ``c_k = sum_{i<k} c_i a_{k-1-i}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadLeadingMoment, RangeError
from .inertia import HermitianMatrix, TolerancePolicy, inertia
from .scalars import EXACT, QQi, adjoint, array_backend, as_array, backend_of, eye, zeros


class Side(str, Enum):
    LEFT = "left"  # I - T T*
    RIGHT = "right"  # I - T* T
    CONJ_LEFT = "conj_left"  # I - T~ T~*
    CONJ_RIGHT = "conj_right"  # I - T~* T~


def as_sequence(values) -> np.ndarray:
    """1-D exact or float array; mixed backends raise :class:`BackendError`."""
    if isinstance(values, np.ndarray) and values.ndim == 1:
        backend_of(values)
        return values if values.dtype == object or values.dtype == complex else as_array(values)
    arr = as_array(list(values))
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional sequence")
    return arr


def _check_len(a: np.ndarray):
    if len(a) < 1:
        raise RangeError("a coefficient sequence needs at least one term")


def _lower_from_column(col: np.ndarray) -> np.ndarray:
    r = len(col)
    out = zeros((r, r), array_backend(col))
    for i in range(r):
        for j in range(i + 1):
            out[i, j] = col[i - j]
    return out


def lower_toeplitz(a, r: int) -> np.ndarray:
    """``T_r``: lower-triangular Toeplitz with first column ``a_0..a_{r-1}``."""
    a = as_sequence(a)
    _check_len(a)
    if not 1 <= r <= len(a):
        raise RangeError(f"r={r} outside 1..{len(a)}")
    return _lower_from_column(a[:r])


def conj_toeplitz(a, r: int) -> np.ndarray:
    """``T~_r``: the same matrix built from the conjugated coefficients."""
    return np.conj(lower_toeplitz(a, r))


def hankel_Q(a, r: int) -> np.ndarray:
    """``Q_r[i, j] = a_{i+j+1}`` (needs ``len(a) >= 2r``)."""
    a = as_sequence(a)
    if r < 1 or len(a) < 2 * r:
        raise RangeError(f"Q_{r} needs at least {2 * r} coefficients, got {len(a)}")
    out = zeros((r, r), array_backend(a))
    for i in range(r):
        for j in range(r):
            out[i, j] = a[i + j + 1]
    return out


def schur_gram(a, r: int, side: Side | str = Side.LEFT) -> HermitianMatrix:
    """One of ``I - TT*``, ``I - T*T``, ``I - T~T~*``, ``I - T~*T~`` of order r."""
    side = Side(side)
    t = lower_toeplitz(a, r)
    if side in (Side.CONJ_LEFT, Side.CONJ_RIGHT):
        t = np.conj(t)
    prod = t @ adjoint(t) if side in (Side.LEFT, Side.CONJ_LEFT) else adjoint(t) @ t
    backend = array_backend(t)
    return HermitianMatrix(eye(r, backend) - prod, backend)


def d_block(a, r: int) -> HermitianMatrix:
    """The 2r x 2r block ``[[I - TT*, Q], [Q*, I - T~T~*]]``."""
    a = as_sequence(a)
    if r < 1 or len(a) < 2 * r:
        raise RangeError(f"the order-{r} block needs {2 * r} coefficients")
    left = schur_gram(a, r, Side.LEFT).entries
    right = schur_gram(a, r, Side.CONJ_LEFT).entries
    q = hankel_Q(a, r)
    full = np.block([[left, q], [adjoint(q), right]])
    return HermitianMatrix(full, array_backend(a))


def coeffs_to_moments(a) -> np.ndarray:
    """Moments ``c_0 = 1, c_1, ..., c_n`` for coefficients ``a_0..a_{n-1}``."""
    a = as_sequence(a)
    _check_len(a)
    backend = array_backend(a)
    n = len(a)
    c = zeros(n + 1, backend)
    c[0] = QQi(1) if backend == EXACT else 1.0
    for k in range(1, n + 1):
        s = c[0] * a[k - 1]
        for i in range(1, k):
            s = s + c[i] * a[k - 1 - i]
        c[k] = s
    return c


def moments_to_coeffs(c) -> np.ndarray:
    """Inverse of :func:`coeffs_to_moments`; requires ``c_0 = 1``."""
    c = as_sequence(c)
    if len(c) < 2:
        raise RangeError("need at least c_0 and c_1")
    if c[0] != 1:
        raise BadLeadingMoment(f"c_0 must be 1, got {c[0]}")
    backend = array_backend(c)
    n = len(c) - 1
    a = zeros(n, backend)
    for k in range(1, n + 1):
        # c_k = a_{k-1} + sum_{i=1}^{k-1} c_i a_{k-1-i}
        s = c[k]
        for i in range(1, k):
            s = s - c[i] * a[k - 1 - i]
        a[k - 1] = s
    return a


def moment_matrix(c, r: int) -> HermitianMatrix:
    """``M_r``: (r+1) x (r+1) Hermitian Toeplitz with first column ``c_0..c_r``."""
    c = as_sequence(c)
    if not 0 <= r <= len(c) - 1:
        raise RangeError(f"M_{r} needs c_0..c_{r}, only {len(c)} moments given")
    backend = array_backend(c)
    out = zeros((r + 1, r + 1), backend)
    for i in range(r + 1):
        for j in range(r + 1):
            out[i, j] = c[i - j] if i >= j else np.conj(c[j - i])
    return HermitianMatrix(out, backend)


def flip(n: int, backend: str = EXACT) -> np.ndarray:
    """The exchange matrix ``J_n`` (ones on the anti-diagonal)."""
    out = zeros((n, n), backend)
    one = QQi(1) if backend == EXACT else 1.0
    for i in range(n):
        out[i, n - 1 - i] = one
    return out


def structural_matrices(c, r: int):
    """``(B_r, J_{r+1}, C_r)`` for moments ``c_0..c_r``.

    ``B_r`` is lower-triangular Toeplitz in ``c`` ((r+1) x (r+1)) and
    ``C_r = diag(I_r, B_r) @ [[0, B_r* J_{r+1}], [I_r, 0]]``, of order 2r+1.
    """
    c = as_sequence(c)
    if not 0 <= r <= len(c) - 1:
        raise RangeError(f"B_{r} needs c_0..c_{r}")
    backend = array_backend(c)
    b = _lower_from_column(c[: r + 1])
    j = flip(r + 1, backend)
    n = 2 * r + 1
    left = eye(n, backend)
    left[r:, r:] = b
    right = zeros((n, n), backend)
    right[: r + 1, r:] = adjoint(b) @ j
    right[r + 1:, :r] = eye(r, backend)
    return b, j, left @ right


def _block_diag(*blocks) -> np.ndarray:
    backend = array_backend(blocks[0])
    n = sum(b.shape[0] for b in blocks)
    out = zeros((n, n), backend)
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


@dataclass
class IdentityCheck:
    name: str
    r: int
    passed: bool
    residual: float


@dataclass
class IdentityReport:
    exact: bool
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]


def _compare(lhs: np.ndarray, rhs: np.ndarray, exact: bool, tol: float):
    if exact:
        ok = lhs.shape == rhs.shape and bool(np.all(lhs == rhs))
        return ok, 0.0 if ok else float("inf")
    res = float(np.max(np.abs(lhs - rhs), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(lhs), initial=0.0)))
    return res <= tol * scale, res


def verify_identities(a, tol: float = 1e-9) -> IdentityReport:
    """Check the factorizations of ``M_r``, ``conj(M_r)`` and ``M_{2r}``.

    For ``1 <= r <= n``::

        M_r       = B_r diag(1, I - T_r T_r*) B_r*
        M_r       = B_r* diag(I - T_r* T_r, 1) B_r
        conj(M_r) = B~_r* diag(I - T~_r* T~_r, 1) B~_r

    and for ``1 <= r <= n/2``::

        M_2r = C_r [[I - TT*, 0, Q], [0, 1, 0], [Q*, 0, I - T~T~*]] C_r*

    Exact inputs are compared entry for entry; float inputs to ``tol``.
    """
    a = as_sequence(a)
    _check_len(a)
    backend = array_backend(a)
    exact = backend == EXACT
    c = coeffs_to_moments(a)
    n = len(a)
    report = IdentityReport(exact=exact)
    one = eye(1, backend)
    for r in range(1, n + 1):
        m = moment_matrix(c, r).entries
        b, _, _ = structural_matrices(c, r)
        bt = np.conj(b)
        left = schur_gram(a, r, Side.LEFT).entries
        right = schur_gram(a, r, Side.RIGHT).entries
        conj_right = schur_gram(a, r, Side.CONJ_RIGHT).entries
        checks = [
            ("stronger_left", b @ _block_diag(one, left) @ adjoint(b), m),
            ("stronger_right", adjoint(b) @ _block_diag(right, one) @ b, m),
            ("conjugate", adjoint(bt) @ _block_diag(conj_right, one) @ bt, np.conj(m)),
        ]
        for name, lhs, rhs in checks:
            ok, res = _compare(lhs, rhs, exact, tol)
            report.checks.append(IdentityCheck(name, r, ok, res))
    for r in range(1, n // 2 + 1):
        _, _, cr = structural_matrices(c, r)
        left = schur_gram(a, r, Side.LEFT).entries
        right = schur_gram(a, r, Side.CONJ_LEFT).entries
        q = hankel_Q(a, r)
        mid = zeros((2 * r + 1, 2 * r + 1), backend)
        mid[:r, :r] = left
        mid[:r, r + 1:] = q
        mid[r, r] = one[0, 0]
        mid[r + 1:, :r] = adjoint(q)
        mid[r + 1:, r + 1:] = right
        m2 = moment_matrix(c, 2 * r).entries
        ok, res = _compare(cr @ mid @ adjoint(cr), m2, exact, tol)
        report.checks.append(IdentityCheck("bigmatrix", r, ok, res))
    return report


@dataclass
class CorollaryReport:
    """Inertia per order for the four Schur Grams and the block matrix, plus violations."""

    sides: dict = field(default_factory=dict)  # side -> [(nu, pi) for r = 1..n]
    block: list = field(default_factory=list)  # (nu, pi) of d_block for r = 1..n//2
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_corollaries(a, eps_rel: float | None = None) -> CorollaryReport:
    """The four Grams share ``nu`` and ``pi`` at every order; ``I - TT*`` and the block are monotone."""
    a = as_sequence(a)
    _check_len(a)
    exact = array_backend(a) == EXACT
    pol = TolerancePolicy.exact() if exact else TolerancePolicy.floating(eps_rel or 1e-9)
    n = len(a)
    rep = CorollaryReport()
    for side in Side:
        rep.sides[side.value] = [inertia(schur_gram(a, r, side), pol)[::2] for r in range(1, n + 1)]
    for r in range(1, n + 1):
        vals = {s: seq[r - 1] for s, seq in rep.sides.items()}
        if len(set(vals.values())) != 1:
            rep.violations.append(f"r={r}: sides disagree {vals}")
    rep.block = [inertia(d_block(a, r), pol)[::2] for r in range(1, n // 2 + 1)]
    for name, seq in (("left", rep.sides[Side.LEFT.value]), ("block", rep.block)):
        for r in range(1, len(seq)):
            if seq[r][0] < seq[r - 1][0] or seq[r][1] < seq[r - 1][1]:
                rep.violations.append(f"{name}: inertia decreases at r={r + 1}")
    return rep
