"""Independent reference computations (sympy and numpy) for cross-checking."""

import numpy as np
import sympy

from pschur.scalars import QQi


def to_sympy(m) -> sympy.Matrix:
    def conv(x):
        x = QQi.coerce(x)
        return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
            x.im.numerator, x.im.denominator)

    return sympy.Matrix([[conv(x) for x in row] for row in np.asarray(m, dtype=object)])


def _sign_changes(coeffs) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def inertia_charpoly(m) -> tuple:
    """(nu, zeta, pi) from the characteristic polynomial.

    The polynomial of a Hermitian matrix is real-rooted, so Descartes' rule of
    signs counts positive roots exactly.
    """
    sm = to_sympy(m)
    n = sm.shape[0]
    lam = sympy.Symbol("lam")
    p = sympy.Poly(sympy.expand(sm.charpoly(lam).as_expr()), lam)
    coeffs = [sympy.nsimplify(sympy.re(c)) for c in p.all_coeffs()]
    zeta = 0
    while zeta < len(coeffs) and coeffs[len(coeffs) - 1 - zeta] == 0:
        zeta += 1
    pi = _sign_changes(coeffs)
    neg = [c * (-1) ** (len(coeffs) - 1 - k) for k, c in enumerate(coeffs)]
    nu = _sign_changes(neg)
    assert nu + zeta + pi == n
    return nu, zeta, pi


def det_sympy(m):
    return to_sympy(m).det()


def inertia_eigh(m, tol: float = 1e-9) -> tuple:
    w = np.linalg.eigvalsh(np.asarray(m, dtype=complex))
    thr = tol * max(1.0, float(np.max(np.abs(np.asarray(m, dtype=complex)).sum(axis=1))))
    return int(np.sum(w < -thr)), int(np.sum(np.abs(w) <= thr)), int(np.sum(w > thr))


def to_complex(m) -> np.ndarray:
    return np.asarray([[complex(QQi.coerce(x).re) + 1j * float(QQi.coerce(x).im) for x in row]
                       for row in np.asarray(m, dtype=object)])
