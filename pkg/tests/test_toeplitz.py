from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings

from conftest import coeff_seq, rand_coeffs
from oracles import to_sympy
from pschur.errors import BadLeadingMoment, BackendError, RangeError
from pschur.inertia import TolerancePolicy, inertia
from pschur.linalg import inverse
from pschur.scalars import QQi, as_array
from pschur.toeplitz import (Side, check_corollaries, coeffs_to_moments, d_block, flip, hankel_Q,
                             lower_toeplitz, moment_matrix, moments_to_coeffs, schur_gram,
                             structural_matrices, verify_identities)

EX = TolerancePolicy.exact()
half = Fraction(1, 2)


def eq(m, rows):
    return np.array_equal(np.asarray(m, dtype=object), as_array(np.asarray(rows).tolist()))


def test_lower_toeplitz_examples():
    assert eq(lower_toeplitz([5], 1), [[5]])
    assert eq(lower_toeplitz([0, 0, 0], 3), np.zeros((3, 3), dtype=int))
    assert eq(lower_toeplitz([2, -3], 2), [[2, 0], [-3, 2]])
    assert eq(np.conj(lower_toeplitz([QQi(0, 1)], 1)), [[QQi(0, -1)]])
    with pytest.raises(RangeError):
        lower_toeplitz([1, 2], 3)


def test_hankel_examples():
    assert eq(hankel_Q([0, 1, 0, 0], 2), [[1, 0], [0, 0]])
    assert eq(hankel_Q([7, 9], 1), [[9]])
    assert eq(hankel_Q([2, -3, 6, -12], 2), [[-3, 6], [6, -12]])
    with pytest.raises(RangeError):
        hankel_Q([1, 2, 3], 2)


def test_schur_gram_examples():
    assert eq(schur_gram([half], 1, Side.LEFT).entries, [[Fraction(3, 4)]])
    for side in Side:
        assert eq(schur_gram([0], 1, side).entries, [[1]])
    assert eq(schur_gram([2], 1, Side.LEFT).entries, [[-3]])


def test_d_block_examples():
    assert eq(d_block([0, 0], 1).entries, [[1, 0], [0, 1]])
    assert eq(d_block([0, 1], 1).entries, [[1, 1], [1, 1]])
    assert eq(d_block([half, 0], 1).entries, [[Fraction(3, 4), 0], [0, Fraction(3, 4)]])


def test_moment_bridge_examples():
    assert eq(coeffs_to_moments([QQi(3, 1)]), [1, QQi(3, 1)])
    assert eq(coeffs_to_moments([2, -3]), [1, 2, 1])
    with pytest.raises(BadLeadingMoment):
        moments_to_coeffs([2, 1])


@given(coeff_seq(max_size=8))
def test_moment_bridge_roundtrip(a):
    assert eq(moments_to_coeffs(coeffs_to_moments(a)), a)


def test_moment_matrix_examples():
    assert eq(moment_matrix([1], 0).entries, [[1]])
    assert eq(moment_matrix([1, half], 1).entries, [[1, half], [half, 1]])
    assert eq(moment_matrix([1, 2], 1).entries, [[1, 2], [2, 1]])
    c = [1, QQi(1, 2)]
    assert eq(moment_matrix(c, 1).entries, [[1, QQi(1, -2)], [QQi(1, 2), 1]])


def test_structural_examples(rng):
    b, j, _ = structural_matrices([1, QQi(2, 1)], 1)
    assert eq(b, [[1, 0], [QQi(2, 1), 1]])
    j2 = flip(2)
    assert eq(j2, [[0, 1], [1, 0]]) and eq(j2 @ j2, np.eye(2, dtype=int))
    for r in range(1, 5):
        c = coeffs_to_moments(rand_coeffs(rng, r))
        _, _, cr = structural_matrices(c, r)
        assert eq(cr @ inverse(cr), np.eye(2 * r + 1, dtype=int))


@pytest.mark.parametrize("a", [[half], [0, 0, 0, 0], [2, -3]])
def test_identity_examples(a):
    rep = verify_identities(as_array(a))
    assert rep.exact and rep.passed
    names = {(c.name, c.r) for c in rep.checks}
    if len(a) == 2:
        assert ("stronger_left", 2) in names and ("bigmatrix", 1) in names


def test_identities_against_sympy(rng):
    # recompute one factorization entirely in sympy
    for n in (2, 3, 4):
        a = rand_coeffs(rng, n)
        c = to_sympy([coeffs_to_moments(a)])
        r = n
        M = sympy.Matrix(r + 1, r + 1, lambda i, j: c[i - j] if i >= j else sympy.conjugate(c[j - i]))
        B = sympy.Matrix(r + 1, r + 1, lambda i, j: c[i - j] if i >= j else 0)
        asym = to_sympy([a])
        T = sympy.Matrix(r, r, lambda i, j: asym[i - j] if i >= j else 0)
        D = sympy.diag(1, sympy.eye(r) - T * T.H)
        assert sympy.simplify(B * D * B.H - M) == sympy.zeros(r + 1, r + 1)
        assert to_sympy(moment_matrix(coeffs_to_moments(a), r).entries) == M


@settings(max_examples=40, deadline=None)
@given(coeff_seq(max_size=6))
def test_identities_hold_exactly(a):
    assert verify_identities(a).passed


def test_identities_float_mode(rng):
    a = np.array([complex(x.re) + 1j * float(x.im) for x in rand_coeffs(rng, 6)])
    rep = verify_identities(a)
    # residuals are relative to the largest entry, which grows with the moments
    assert not rep.exact and rep.passed


def test_mixed_backend_rejected():
    with pytest.raises(BackendError):
        verify_identities([half, 0.5])


@settings(max_examples=40, deadline=None)
@given(coeff_seq(max_size=6))
def test_corollaries(a):
    rep = check_corollaries(a)
    assert rep.passed, rep.violations
    c = coeffs_to_moments(a)
    n = len(a)
    for r in range(1, n + 1):
        m = inertia(moment_matrix(c, r), EX)
        g = inertia(schur_gram(a, r), EX)
        assert m.nu == g.nu and m.pi == g.pi + 1
    kappa = rep.sides["left"][-1][0]
    assert all(nu <= kappa for nu, _ in rep.block)
