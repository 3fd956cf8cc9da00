"""Scalar backends: exact Gaussian rationals and double-precision complex.

Exact values are :class:`QQi` instances stored in numpy ``object`` arrays, so
the same array expressions (``@``, ``.T``, ``np.conj``) serve both backends.
Floating values are plain ``complex128`` arrays.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

from .errors import BackendError

EXACT = "exact"
FLOAT = "float"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (Integral, Rational)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, bool):
        return Fraction(int(x))
    # Floats are refused on purpose: an exact run must never round.
    raise TypeError(f"cannot build an exact scalar from {type(x).__name__}")


class QQi:
    """Gaussian rational ``re + im*i`` with :class:`fractions.Fraction` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QQi):
            if im:
                raise TypeError("QQi(QQi, im) is ambiguous")
            self.re, self.im = re.re, re.im
            return
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    @classmethod
    def coerce(cls, x) -> "QQi":
        return x if isinstance(x, QQi) else cls(x)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re + other.re, self.im + other.im)
        try:
            o = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re + o, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re - other.re, self.im - other.im)
        try:
            o = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re - o, self.im)

    def __rsub__(self, other):
        try:
            o = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return QQi(o - self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, QQi):
            if not other.im:
                return QQi(self.re * other.re, self.im * other.re)
            if not self.im:
                return QQi(self.re * other.re, self.re * other.im)
            return QQi(self.re * other.re - self.im * other.im,
                       self.re * other.im + self.im * other.re)
        try:
            o = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re * o, self.im * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QQi.coerce(other) if not isinstance(other, QQi) else other
        if not other.im:
            if not other.re:
                raise ZeroDivisionError("QQi division by zero")
            return QQi(self.re / other.re, self.im / other.re)
        d = other.re * other.re + other.im * other.im
        return QQi((self.re * other.re + self.im * other.im) / d,
                   (self.im * other.re - self.re * other.im) / d)

    def __rtruediv__(self, other):
        return QQi.coerce(other) / self

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QQi(1) / (self ** -k)
        out, base = QQi(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def is_real(self) -> bool:
        return not self.im

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (Integral, Rational)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    # -- conversion ---------------------------------------------------------
    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def __repr__(self):
        return f"QQi({format_exact(self)!r})"

    def __str__(self):
        return format_exact(self)


# ---------------------------------------------------------------------------
# string encoding


_NUM = r"[+-]?(?:\d+(?:/\d+)?)"
_EXACT_RE = re.compile(
    rf"^\s*(?:(?P<re>{_NUM})(?P<im>[+-](?:\d+(?:/\d+)?)?i)?|(?P<pim>{_NUM}?i))\s*$"
)
_FLT = r"[+-]?(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|inf|nan)"
_FLOAT_RE = re.compile(
    rf"^\s*(?:(?P<re>{_FLT})(?P<im>[+-](?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|inf|nan)?i)?|(?P<pim>{_FLT}?i))\s*$"
)


def _imag_part(text: str, conv):
    body = text[:-1]
    if body in ("", "+"):
        return conv("1")
    if body == "-":
        return -conv("1")
    return conv(body)


def parse_exact(text: str) -> QQi:
    """Parse ``"p/q"``, ``"p/q+r/si"``, ``"r/si"`` into a :class:`QQi`."""
    m = _EXACT_RE.match(text)
    if not m:
        raise ValueError(f"not a Gaussian rational: {text!r}")
    if m.group("pim") is not None:
        return QQi(0, _imag_part(m.group("pim"), Fraction))
    im = _imag_part(m.group("im"), Fraction) if m.group("im") else 0
    return QQi(Fraction(m.group("re")), im)


def parse_float(text: str) -> complex:
    """Parse a decimal literal, optionally with an ``...i`` imaginary part."""
    m = _FLOAT_RE.match(text)
    if not m:
        raise ValueError(f"not a decimal literal: {text!r}")
    if m.group("pim") is not None:
        value = complex(0.0, _imag_part(m.group("pim"), float))
    else:
        im = _imag_part(m.group("im"), float) if m.group("im") else 0.0
        value = complex(float(m.group("re")), im)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"non-finite value: {text!r}")
    return value


def format_exact(x) -> str:
    """Canonical exact encoding; real values omit the imaginary part."""
    x = QQi.coerce(x)
    if not x.im:
        return str(x.re)
    sign = "+" if x.im > 0 else "-"
    return f"{x.re}{sign}{abs(x.im)}i"


def format_float(x) -> str:
    x = complex(x)
    if x.imag == 0.0:
        return repr(x.real + 0.0)
    sign = "+" if math.copysign(1.0, x.imag) > 0 else "-"
    return f"{x.real + 0.0!r}{sign}{abs(x.imag)!r}i"


def format_scalar(x) -> str:
    if isinstance(x, (QQi, Fraction, int)):
        return format_exact(x)
    return format_float(x)


# ---------------------------------------------------------------------------
# backend detection and array construction


def is_exact_scalar(x) -> bool:
    return isinstance(x, (QQi, Fraction, Integral)) and not isinstance(x, np.floating)


def backend_of(values) -> str:
    """Return :data:`EXACT` or :data:`FLOAT` for a collection of scalars.

    Plain integers are compatible with both backends. A mixture of exact
    rationals and floating values is rejected.
    """
    arr = values if isinstance(values, np.ndarray) else None
    if arr is not None and arr.dtype != object:
        return FLOAT
    flat = list(np.asarray(values, dtype=object).ravel()) if arr is None else list(arr.ravel())
    saw_exact = saw_float = False
    for v in flat:
        if isinstance(v, (QQi, Fraction)):
            saw_exact = True
        elif isinstance(v, (Integral, np.integer)) and not isinstance(v, bool):
            continue
        elif isinstance(v, (float, complex, np.floating, np.complexfloating)):
            saw_float = True
        else:
            raise BackendError(f"unsupported scalar type {type(v).__name__}")
    if saw_exact and saw_float:
        raise BackendError("mixed exact and floating scalars")
    return FLOAT if saw_float else EXACT


def as_array(values, backend: str | None = None) -> np.ndarray:
    """Coerce nested sequences to an exact (object) or complex128 array."""
    if backend is None:
        backend = backend_of(values)
    if backend == EXACT:
        src = np.asarray(values, dtype=object)
        if src.dtype == object and src.size and all(isinstance(v, QQi) for v in src.ravel()):
            return src.copy()
        out = np.empty(src.shape, dtype=object)
        for idx, v in np.ndenumerate(src):
            out[idx] = QQi.coerce(v)
        return out
    if backend == FLOAT:
        if isinstance(values, np.ndarray) and values.dtype == object:
            if any(isinstance(v, (QQi, Fraction)) for v in values.ravel()):
                raise BackendError("exact scalars cannot enter the float backend implicitly")
        arr = np.asarray(values, dtype=complex)
        if not np.all(np.isfinite(arr)):
            raise BackendError("NaN or Inf in floating input")
        return arr
    raise ValueError(f"unknown backend {backend!r}")


def array_backend(a: np.ndarray) -> str:
    return EXACT if a.dtype == object else FLOAT


def zeros(shape, backend: str) -> np.ndarray:
    if backend == EXACT:
        out = np.empty(shape, dtype=object)
        out.fill(QQi(0))
        # fill() shares one instance; QQi is immutable so this is safe
        return out
    return np.zeros(shape, dtype=complex)


def eye(n: int, backend: str) -> np.ndarray:
    out = zeros((n, n), backend)
    one = QQi(1) if backend == EXACT else 1.0
    for i in range(n):
        out[i, i] = one
    return out


def one(backend: str):
    return QQi(1) if backend == EXACT else complex(1.0)


def zero(backend: str):
    return QQi(0) if backend == EXACT else complex(0.0)


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def is_zero(x) -> bool:
    return not x if isinstance(x, QQi) else x == 0


def exact_sqrt(q: Fraction):
    """Square root of a nonnegative rational: a Fraction when it is a perfect square, else a float."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return math.sqrt(n / d)


def in_open_disk(z) -> bool:
    """``|z| < 1``, decided exactly for exact scalars."""
    if isinstance(z, (QQi, Fraction, Integral)):
        return QQi.coerce(z).abs2() < 1
    return abs(complex(z)) < 1
