"""Small dense linear-algebra helpers over Q(i) (object arrays) or complex128."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .scalars import EXACT, QQi, array_backend, eye


def _rref(a: np.ndarray):
    """Reduced row echelon form over Q(i); returns (R, pivot_columns)."""
    m = [[QQi.coerce(v) for v in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = QQi(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    out = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = m[i][j]
    return out, pivots


def rank(a: np.ndarray, tol: float = 1e-10) -> int:
    if array_backend(a) == EXACT:
        return len(_rref(a)[1])
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def nullspace(a: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Columns spanning ker(a). Exact rref basis or orthonormal float basis."""
    rows, cols = a.shape
    if array_backend(a) != EXACT:
        if rows == 0:
            return np.eye(cols, dtype=complex)
        return scipy.linalg.null_space(a, rcond=tol)
    if rows == 0:
        return eye(cols, EXACT)
    r, pivots = _rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.empty((cols, len(free)), dtype=object)
    basis.fill(QQi(0))
    for k, f in enumerate(free):
        basis[f, k] = QQi(1)
        for i, p in enumerate(pivots):
            basis[p, k] = -r[i, f]
    return basis


def inverse(a: np.ndarray) -> np.ndarray:
    if array_backend(a) != EXACT:
        return np.linalg.inv(a)
    n = a.shape[0]
    aug = np.concatenate([a, eye(n, EXACT)], axis=1)
    r, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    return r[:, n:]


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if array_backend(a) != EXACT:
        return np.linalg.solve(a, b)
    return inverse(a) @ b
