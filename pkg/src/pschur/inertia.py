"""Inertia, signature, rank and determinant of Hermitian matrices.

The exact backend runs a symmetric block elimination over Q(i): a nonzero
diagonal entry is used as a 1x1 pivot, otherwise a nonzero off-diagonal
entry ``b`` gives the 2x2 pivot ``[[0, b], [conj(b), 0]]`` (one negative and
one positive eigenvalue). Sylvester's law of inertia makes the pivot signs
the answer; the product of pivot determinants is the determinant.

The float backend counts eigenvalue signs against a relative threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BackendError, DegenerateTolerance, HermitianError
from .scalars import EXACT, FLOAT, QQi, array_backend, as_array, backend_of

DEFAULT_EPS_REL = 1e-9


@dataclass(frozen=True)
class TolerancePolicy:
    """``exact`` or ``float`` with a relative zero threshold ``eps_rel``."""

    mode: str = EXACT
    eps_rel: float = DEFAULT_EPS_REL

    def __post_init__(self):
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == FLOAT and not self.eps_rel > 0:
            raise ValueError("eps_rel must be positive")

    @classmethod
    def exact(cls) -> "TolerancePolicy":
        return cls(EXACT)

    @classmethod
    def floating(cls, eps_rel: float = DEFAULT_EPS_REL) -> "TolerancePolicy":
        return cls(FLOAT, eps_rel)


class Inertia(NamedTuple):
    nu: int
    zeta: int
    pi: int

    @property
    def rank(self) -> int:
        return self.nu + self.pi

    @property
    def signature(self) -> int:
        return self.pi - self.nu

    @property
    def n(self) -> int:
        return self.nu + self.zeta + self.pi


class HermitianMatrix:
    """Validated dense Hermitian matrix in one backend.

    Exact input must be Hermitian bit for bit. Floating input is checked to a
    relative tolerance and then symmetrized, so the stored array is exactly
    Hermitian.
    """

    __slots__ = ("entries", "backend")

    def __init__(self, entries, backend: str | None = None, *, rtol: float = 1e-12):
        a = entries.entries if isinstance(entries, HermitianMatrix) else entries
        backend = backend or (array_backend(a) if isinstance(a, np.ndarray) else backend_of(a))
        try:
            arr = as_array(a, backend)
        except Exception as exc:
            raise HermitianError(str(exc)) from exc
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise HermitianError(f"expected a square matrix, got shape {arr.shape}")
        if backend == EXACT:
            n = arr.shape[0]
            for i in range(n):
                if arr[i, i].im:
                    raise HermitianError(f"diagonal entry {i} is not real")
                for j in range(i + 1, n):
                    if arr[i, j] != arr[j, i].conjugate():
                        raise HermitianError(f"entries ({i},{j}) and ({j},{i}) are not conjugate")
        else:
            scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
            if np.max(np.abs(arr - arr.conj().T), initial=0.0) > rtol * scale:
                raise HermitianError("matrix is not Hermitian")
            arr = (arr + arr.conj().T) / 2
        self.entries = arr
        self.backend = backend

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix(-self.entries, self.backend)

    def __repr__(self):
        return f"HermitianMatrix(n={self.n}, backend={self.backend!r})"


def _coerce(h) -> HermitianMatrix:
    return h if isinstance(h, HermitianMatrix) else HermitianMatrix(h)


def _policy_for(h: HermitianMatrix, pol: TolerancePolicy | None) -> TolerancePolicy:
    if pol is None:
        return TolerancePolicy.exact() if h.backend == EXACT else TolerancePolicy.floating()
    return pol


def _exact_pivots(arr: np.ndarray):
    """Block-diagonal pivots of a Hermitian Q(i) matrix.

    Returns (nu, zeta, pi, det) with det a Fraction.
    """
    n = arr.shape[0]
    a = [[arr[i, j] for j in range(n)] for i in range(n)]
    rest = list(range(n))
    nu = pi = 0
    det = Fraction(1)
    while rest:
        k = next((i for i in rest if a[i][i]), None)
        if k is not None:
            d = a[k][k].re
            rest.remove(k)
            row = a[k]
            for i in rest:
                f = a[i][k]
                if not f:
                    continue
                f = f / d
                ai = a[i]
                for j in rest:
                    if row[j]:
                        ai[j] = ai[j] - f * row[j]
            det *= d
            if d > 0:
                pi += 1
            else:
                nu += 1
            continue
        pair = next(((i, j) for ii, i in enumerate(rest) for j in rest[ii + 1:] if a[i][j]), None)
        if pair is None:
            return nu, len(rest), pi, Fraction(0)
        i0, j0 = pair
        b = a[i0][j0]
        rest.remove(i0)
        rest.remove(j0)
        inv_b = QQi(1) / b
        inv_bc = inv_b.conjugate()
        # A_rest -= C E^{-1} C*,  E = [[0, b], [conj b, 0]]
        for p in rest:
            ap = a[p]
            x, y = ap[i0], ap[j0]
            if not x and not y:
                continue
            for q in rest:
                s = QQi(0)
                if x and a[j0][q]:
                    s = s + x * inv_bc * a[j0][q]
                if y and a[i0][q]:
                    s = s + y * inv_b * a[i0][q]
                if s:
                    ap[q] = ap[q] - s
        det *= -b.abs2()
        nu += 1
        pi += 1
    return nu, 0, pi, det


def _float_eigs(h: HermitianMatrix, pol: TolerancePolicy):
    arr = h.entries
    if h.n == 0:
        return np.zeros(0), 0.0
    if arr.dtype == object:
        arr = np.array([[complex(v) for v in row] for row in arr], dtype=complex)
    w = np.linalg.eigvalsh(arr)
    norm_inf = float(np.max(np.sum(np.abs(arr), axis=1)))
    thr = pol.eps_rel * max(1.0, norm_inf)
    return w, thr


def _float_inertia(h: HermitianMatrix, pol: TolerancePolicy, *, check: bool = True) -> Inertia:
    w, thr = _float_eigs(h, pol)
    mag = np.abs(w)
    if check and np.any((mag > thr / 10) & (mag <= thr * 10)):
        raise DegenerateTolerance(
            f"eigenvalue within a decade of the zero threshold {thr:.3g}; use exact input")
    nu = int(np.sum(w < -thr))
    pi = int(np.sum(w > thr))
    return Inertia(nu, h.n - nu - pi, pi)


def inertia(h, pol: TolerancePolicy | None = None) -> Inertia:
    """Counts of negative, zero and positive eigenvalues of ``h``.

    >>> inertia([[0, 1], [1, 0]])
    Inertia(nu=1, zeta=0, pi=1)
    """
    h = _coerce(h)
    pol = _policy_for(h, pol)
    if pol.mode == EXACT:
        if h.backend != EXACT:
            raise BackendError("exact policy requires exact entries")
        nu, zeta, pi, _ = _exact_pivots(h.entries)
        return Inertia(nu, zeta, pi)
    return _float_inertia(h, pol)


def count_negative(h, eps_rel: float = DEFAULT_EPS_REL) -> int:
    """Negative eigenvalue count below ``-eps_rel*max(1,|h|_inf)``, no degeneracy check.

    Meant for large sampled Gram matrices whose clustered near-zero spectrum
    would trip :class:`DegenerateTolerance` without affecting the count.
    """
    h = _coerce(h)
    return _float_inertia(h, TolerancePolicy.floating(eps_rel), check=False).nu


def signature(h, pol: TolerancePolicy | None = None) -> int:
    return inertia(h, pol).signature


def rank_det(h, pol: TolerancePolicy | None = None):
    """Rank and (real) determinant; exact Fraction or tolerance-rounded float."""
    h = _coerce(h)
    pol = _policy_for(h, pol)
    if pol.mode == EXACT:
        nu, zeta, pi, det = _exact_pivots(h.entries)
        return nu + pi, det
    iner = _float_inertia(h, pol)
    if iner.zeta:
        return iner.rank, 0.0
    w, _ = _float_eigs(h, pol)
    return iner.rank, float(np.prod(w)) if w.size else 1.0


def determinant(h, pol: TolerancePolicy | None = None):
    return rank_det(h, pol)[1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def signature_via_minors(minor_dets: Sequence) -> int:
    """Signature from leading principal minors, sum of sign(|M_{j-1}| |M_j|).

    ``minor_dets`` lists ``|M_0|, ..., |M_{n-1}|``; ``|M_{-1}| = 1``.
    """
    prev = 1
    total = 0
    for d in minor_dets:
        total += _sign(prev) * _sign(d)
        prev = d
    return total


def leading_minors(h, pol: TolerancePolicy | None = None) -> list:
    """Determinants of the leading principal submatrices of orders 1..n."""
    h = _coerce(h)
    return [determinant(HermitianMatrix(h.entries[:k, :k], h.backend), pol)
            for k in range(1, h.n + 1)]
