"""Kernel Gram matrices, Blaschke constructions and coefficient diagnostics.

``K_S(w, z) = (1 - S(z) conj S(w)) / (1 - z conj w)``; the Gram matrix on
points ``z_0..z_{m-1}`` has entry ``(i, j) = K_S(z_j, z_i)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import PoleAtSamplePoint
from .inertia import HermitianMatrix, Inertia, TolerancePolicy, count_negative, inertia
from .scalars import (EXACT, QQi, as_array, backend_of, exact_sqrt, in_open_disk,
                      is_exact_scalar, zeros)
from .toeplitz import as_sequence, schur_gram

POLE_TOL = 1e-13


def _trim(c: list) -> list:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(p: list, q: list) -> list:
    out = [p[0] * 0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _horner(p: Sequence, z):
    acc = p[-1]
    for coef in reversed(p[:-1]):
        acc = acc * z + coef
    return acc


def _deriv(p: Sequence) -> list:
    if len(p) == 1:
        return [p[0] * 0]
    return [p[k] * k for k in range(1, len(p))]


@dataclass
class RationalFunction:
    """``num(z) / den(z)`` with ascending coefficient lists in one backend.

    ``tag`` records how the function was built (``"general"``,
    ``"blaschke_product"`` or ``"blaschke_quotient"``) and ``meta`` keeps the
    construction data (zeros, unimodular constant, ...).
    """

    num: list
    den: list
    tag: str = "general"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        backend = backend_of(list(self.num) + list(self.den))
        self.num = _trim(list(as_array(list(self.num), backend)))
        self.den = _trim(list(as_array(list(self.den), backend)))
        self.backend = backend
        if all(d == 0 for d in self.den):
            raise ValueError("denominator is identically zero")

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls([value], [1])

    @classmethod
    def polynomial(cls, coeffs) -> "RationalFunction":
        return cls(list(coeffs), [1])

    def _prepare(self, z):
        """Point and coefficient lists in a common backend.

        An exact function evaluated at a floating point drops to complex
        arithmetic; the reverse never happens implicitly.
        """
        if self.backend == EXACT:
            try:
                return QQi.coerce(z), self.num, self.den, True
            except TypeError:
                pass
            return (complex(z), [complex(c) for c in self.num],
                    [complex(c) for c in self.den], False)
        return complex(z), self.num, self.den, False

    @staticmethod
    def _check_pole(d, den, exact: bool, z):
        if exact:
            if not d:
                raise PoleAtSamplePoint(f"pole at {z}")
        elif abs(d) <= POLE_TOL * max(1.0, max(abs(c) for c in den)):
            raise PoleAtSamplePoint(f"pole at {z}")

    def __call__(self, z):
        z, num, den, exact = self._prepare(z)
        d = _horner(den, z)
        self._check_pole(d, den, exact, z)
        return _horner(num, z) / d

    def derivative_at(self, z):
        z, num, den, exact = self._prepare(z)
        d = _horner(den, z)
        self._check_pole(d, den, exact, z)
        n = _horner(num, z)
        return (_horner(_deriv(num), z) * d - n * _horner(_deriv(den), z)) / (d * d)

    def tilde(self) -> "RationalFunction":
        """``S~(z) = conj(S(conj z))``: conjugate every coefficient."""
        return RationalFunction([np.conj(c) for c in self.num], [np.conj(c) for c in self.den])

    def reciprocal(self) -> "RationalFunction":
        return RationalFunction(self.den, self.num)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(_poly_mul(self.num, other.num), _poly_mul(self.den, other.den))

    def taylor(self, n: int) -> list:
        """First ``n`` Taylor coefficients at the origin."""
        d0 = self.den[0]
        if d0 == 0:
            raise PoleAtSamplePoint("pole at the origin")
        num = list(self.num) + [self.num[0] * 0] * n
        out = []
        for k in range(n):
            s = num[k]
            for j in range(1, min(k, len(self.den) - 1) + 1):
                s = s - self.den[j] * out[k - j]
            out.append(s / d0)
        return out


def blaschke_product(zeros_: Iterable, gamma=1) -> RationalFunction:
    """``gamma * prod (z - z_k) / (1 - conj(z_k) z)``."""
    zs = list(zeros_)
    vals = list(zs) + [gamma]
    backend = backend_of(vals)
    one = QQi(1) if backend == EXACT else 1.0
    num, den = [gamma * one], [one]
    for zk in zs:
        if not in_open_disk(zk):
            raise ValueError(f"zero {zk} is not inside the unit disk")
        num = _poly_mul(num, [-zk * one, one])
        den = _poly_mul(den, [one, -np.conj(zk * one)])
    return RationalFunction(num, den, "blaschke_product", {"zeros": zs, "gamma": gamma})


def _check_points(points: Sequence):
    seen = set()
    for z in points:
        if not in_open_disk(z):
            raise ValueError(f"point {z} is not inside the open unit disk")
        if is_exact_scalar(z):
            q = QQi.coerce(z)
            key = (q.re, q.im)
        else:
            key = complex(z)
        if key in seen:
            raise ValueError(f"repeated point {z}")
        seen.add(key)


def gram_KS(values: Sequence[tuple]) -> HermitianMatrix:
    """Gram matrix of ``K_S`` from ``(point, S(point))`` pairs."""
    pts = [p for p, _ in values]
    _check_points(pts)
    flat = [x for pair in values for x in pair]
    backend = backend_of(flat) if flat else EXACT
    z = list(as_array(pts, backend))
    s = list(as_array([v for _, v in values], backend))
    m = len(z)
    g = zeros((m, m), backend)
    for i in range(m):
        for j in range(m):
            g[i, j] = (1 - s[i] * np.conj(s[j])) / (1 - z[i] * np.conj(z[j]))
    return HermitianMatrix(g, backend)


def sample_values(S, points: Sequence) -> list[tuple]:
    return [(z, S(z)) for z in points]


def _divided_difference(S: RationalFunction, z, w):
    """``(S(z) - S(conj w)) / (z - conj w)``, or ``S'(z)`` when ``z = conj w``."""
    wb = np.conj(w)
    if S.backend == EXACT:
        if z == wb:
            return S.derivative_at(z)
    elif abs(complex(z) - complex(wb)) <= 1e-12:
        return S.derivative_at(z)
    return (S(z) - S(wb)) / (z - wb)


def gram_D(S: RationalFunction, points: Sequence) -> HermitianMatrix:
    """The 2m x 2m Gram matrix of the block kernel ``D_S`` on ``points``."""
    _check_points(points)
    backend = S.backend
    if backend == EXACT:
        backend_of(list(points))  # floats among points would be a mixed input
    z = list(as_array(list(points), backend))
    st = S.tilde()
    m = len(z)
    k1 = gram_KS([(p, S(p)) for p in z]).entries
    k2 = gram_KS([(p, st(p)) for p in z]).entries
    top = zeros((m, m), backend)
    bot = zeros((m, m), backend)
    for i in range(m):
        for j in range(m):
            top[i, j] = _divided_difference(S, z[i], z[j])
            bot[i, j] = _divided_difference(st, z[i], z[j])
    full = np.block([[k1, top], [bot, k2]])
    return HermitianMatrix(full, backend, rtol=1e-9)


def szego_gram(points: Sequence) -> HermitianMatrix:
    return gram_KS([(z, 0) for z in points])


@dataclass
class BlaschkeCaseStudy:
    gram: HermitianMatrix
    inertia: Inertia
    witness: HermitianMatrix
    witness_det: object


def blaschke_witness(w0, z2) -> HermitianMatrix:
    """``[[0, 1/(1 - z2 conj w0)], [1/(1 - w0 conj z2), 1/(1 - |z2|^2)]]``."""
    backend = backend_of([w0, z2])
    w0, z2 = as_array([w0, z2], backend)
    m = zeros((2, 2), backend)
    m[0, 1] = 1 / (1 - z2 * np.conj(w0))
    m[1, 0] = 1 / (1 - w0 * np.conj(z2))
    m[1, 1] = 1 / (1 - z2 * np.conj(z2))
    return HermitianMatrix(m, backend)


def blaschke_case_study(points: Sequence, w0_index: int = 0) -> BlaschkeCaseStudy:
    """Gram of ``S = 1`` at ``w0`` and ``0`` elsewhere, its inertia and the 2x2 witness."""
    if len(points) < 2:
        raise ValueError("need w0 and at least one other point")
    pts = list(points)
    w0 = pts[w0_index]
    values = [(z, 1 if k == w0_index else 0) for k, z in enumerate(pts)]
    g = gram_KS(values)
    z2 = pts[1] if w0_index == 0 else pts[0]
    wit = blaschke_witness(w0, z2)
    e = wit.entries
    det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
    det = det.re if isinstance(det, QQi) else float(np.real(det))
    return BlaschkeCaseStudy(g, inertia(g), wit, det)


def blaschke_interpolant(zeros_: Sequence, w0, theta: float = 0.0) -> RationalFunction:
    """``S_1 = (gamma (z - alpha)/(1 - conj(alpha) z))^{-1} B(z)`` with ``S_1(w0) = 1``.

    ``B`` has simple zeros at ``zeros_``. ``alpha`` sits at pseudo-hyperbolic
    distance ``|B(w0)|`` from ``w0`` so that ``|gamma| = 1``; ``theta`` picks
    the direction and is rotated off any zero that would collide. With no
    zeros the distance would be 1, so ``alpha`` is taken at distance 1/2 and
    ``gamma`` is no longer unimodular.
    """
    zs = [complex(z) for z in zeros_]
    w0 = complex(w0)
    if any(abs(z - w0) < 1e-15 for z in zs):
        raise ValueError("w0 is one of the zeros")
    B = blaschke_product(zs, 1.0) if zs else RationalFunction.constant(1.0)
    bw0 = B(w0)
    m = abs(bw0) if zs else 0.5

    def phi(u):
        return (w0 - u) / (1 - np.conj(w0) * u)

    alpha = None
    for k in range(64):
        cand = phi(m * cmath.exp(1j * (theta + k * 0.1)))
        if all(abs(cand - z) > 1e-9 for z in zs + [w0]):
            alpha = cand
            break
    gamma = bw0 / ((w0 - alpha) / (1 - w0 * np.conj(alpha)))
    # S_1 = B(z) (1 - conj(alpha) z) / (gamma (z - alpha))
    num = _poly_mul(B.num, [1.0, -np.conj(alpha)])
    den = _poly_mul([gamma * c for c in B.den], [-alpha, 1.0])
    return RationalFunction(num, den, "blaschke_quotient",
                            {"zeros": zs, "w0": w0, "alpha": alpha, "gamma": gamma})


@dataclass
class NegSqEstimate:
    kappa: int
    stabilized: bool
    sequence: list[int]


def _coeff_list(a, r_max: int) -> list:
    if callable(a):
        return [a(k) for k in range(r_max)]
    if hasattr(a, "__next__"):
        return [next(a) for _ in range(r_max)]
    return list(a)[:r_max]


def negsq_from_coeffs(a, r_max: int, stability_window: int = 3) -> NegSqEstimate:
    """``nu(I_r - T_r T_r*)`` for ``r = 1..r_max`` and whether the tail is constant.

    ``a`` may be a sequence, an iterator, or a function ``k -> a_k``.
    """
    if not (r_max >= stability_window >= 2):
        raise ValueError("need r_max >= stability_window >= 2")
    coeffs = as_sequence(_coeff_list(a, r_max))
    r_max = min(r_max, len(coeffs))
    exact = coeffs.dtype == object
    seq = []
    for r in range(1, r_max + 1):
        h = schur_gram(coeffs, r)
        seq.append(inertia(h, TolerancePolicy.exact()).nu if exact else count_negative(h))
    tail = seq[-stability_window:]
    stable = len(tail) == stability_window and len(set(tail)) == 1
    return NegSqEstimate(seq[-1], stable, seq)


@dataclass
class GrowthReport:
    K: Fraction | float
    rho: Fraction | float
    holds: bool
    increasing_trend: bool
    ratios: list = field(default_factory=list)


def _abs2(x):
    return x.abs2() if isinstance(x, QQi) else abs(complex(x)) ** 2


def coeff_growth_check(a) -> GrowthReport:
    """Smallest geometric envelope ``|a_j| <= K rho^j`` on the tail ``j >= 1``.

    ``rho`` is the largest ratio ``|a_j / a_{j-1}|`` (``j >= 2``, skipping zero
    denominators) and ``K = max |a_j| / rho^j``. Rational data give exact
    values whenever the square roots are rational.
    """
    a = list(as_sequence(a))
    if len(a) < 4:
        raise ValueError("need at least four coefficients")
    sq = [_abs2(x) for x in a]
    ratios2 = [sq[j] / sq[j - 1] for j in range(2, len(a)) if sq[j - 1]]
    rho2 = max(ratios2, default=0)
    tail = range(1, len(a))
    if rho2 == 0:
        # no usable ratio: a zero tail has envelope 0, anything else has no finite K at rho = 0
        if any(sq[j] for j in tail):
            return GrowthReport(float("inf"), 0, False, False, [])
        return GrowthReport(0, 0, True, False, [])
    k2 = max(sq[j] / rho2 ** j for j in tail)
    root = exact_sqrt if isinstance(rho2, Fraction) else (lambda v: float(v) ** 0.5)
    ratios = [root(r) for r in ratios2]
    trend = len(ratios2) >= 2 and all(x < y for x, y in zip(ratios2, ratios2[1:]))
    return GrowthReport(root(k2), root(rho2), True, trend, ratios)


def disk_grid(radius: float, n_radial: int, n_angular: int) -> list[complex]:
    """Deterministic polar grid inside ``|z| <= radius`` (origin included)."""
    pts = [0j]
    for i in range(1, n_radial + 1):
        r = radius * i / n_radial
        for k in range(n_angular):
            pts.append(r * cmath.exp(2j * cmath.pi * (k + 0.5 * (i % 2)) / n_angular))
    return pts


def sampled_negsq(S: Callable, points: Sequence, eps_rel: float = 1e-9) -> int:
    """Negative eigenvalue count of the ``K_S`` Gram on ``points`` (float)."""
    vals = []
    for z in points:
        try:
            vals.append((complex(z), complex(S(z))))
        except PoleAtSamplePoint:
            continue
    return count_negative(gram_KS(vals), eps_rel)
