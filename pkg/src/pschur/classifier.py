"""Solvability of the indefinite moment and coefficient extension problems.

Both problems are decided by one Hermitian matrix built from the data: the
moment matrix ``M_{n-1}`` for moments ``c_0..c_{n-1}``, or ``I_n - T_n T_n*``
for coefficients ``a_0..a_{n-1}``. Three regimes exist:

* governing matrix invertible: every class at or above its inertia is reachable;
* singular, with the leading minor of order ``rank`` nonzero: one rank-keeping
  extension, then forbidden gaps up to ``inertia + dim ker``;
* singular, leading minor of order ``rank`` zero: nothing below
  ``inertia + dim ker``.

Classes are addressed as ``(nu, pi)`` with ``pi=None`` meaning any number of
positive squares. On the coefficient side ``pi`` counts positive squares of
``I - TT*``, one less than the matching moment class.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateTolerance, InexactDegenerate
from .inertia import Inertia, TolerancePolicy, inertia, rank_det
from .scalars import EXACT, array_backend
from .toeplitz import as_sequence, coeffs_to_moments, moment_matrix, schur_gram


class CaseLabel(str, Enum):
    A_Invertible = "A_Invertible"
    B_InvertibleHigher = "B_InvertibleHigher"
    C_UniqueDegenerate = "C_UniqueDegenerate"
    D_ForbiddenGap = "D_ForbiddenGap"
    E_DegenerateInfinite = "E_DegenerateInfinite"
    F_NoMinimal = "F_NoMinimal"
    G_ForbiddenGapHard = "G_ForbiddenGapHard"
    H_HardInfinite = "H_HardInfinite"


class Verdict(str, Enum):
    NoSolution = "NoSolution"
    Unique = "Unique"
    InfinitelyMany = "InfinitelyMany"


class Governing(str, Enum):
    MOMENT = "moment"  # M_{n-1}
    COEFF = "coeff"  # I_n - T_n T_n*


@dataclass(frozen=True)
class Classification:
    """Inertia data of the governing matrix and the regime it falls in.

    ``label`` is one of ``A_Invertible``, ``C_UniqueDegenerate`` or
    ``F_NoMinimal``; finer labels depend on the queried class and come from
    :func:`governing_clause`.
    """

    governing: Governing
    order: int
    base: Inertia
    kernel_dim: int
    rank: int
    det: object
    det_rank_minor: object
    label: CaseLabel

    @property
    def base_nu(self) -> int:
        return self.base.nu

    @property
    def base_pi(self) -> int:
        return self.base.pi

    @property
    def threshold_nu(self) -> int:
        return self.base.nu + self.kernel_dim

    @property
    def threshold_pi(self) -> int:
        return self.base.pi + self.kernel_dim

    @property
    def gap_nu(self) -> range:
        """Forbidden ``nu`` values strictly between base and threshold (regime C)."""
        if self.label != CaseLabel.C_UniqueDegenerate:
            return range(0)
        return range(self.base_nu + 1, self.threshold_nu)

    @property
    def gap_pi(self) -> range:
        if self.label != CaseLabel.C_UniqueDegenerate:
            return range(0)
        return range(self.base_pi + 1, self.threshold_pi)


def _classify(matrix_at, order: int, governing: Governing, backend: str) -> Classification:
    """Shared case split; ``matrix_at(k)`` is the governing matrix of size k."""
    h = matrix_at(order)
    if backend == EXACT:
        pol = TolerancePolicy.exact()
        iner = inertia(h, pol)
        _, det = rank_det(h, pol)
    else:
        pol = TolerancePolicy.floating()
        try:
            iner = inertia(h, pol)
        except DegenerateTolerance as exc:
            raise InexactDegenerate(str(exc)) from exc
        if iner.zeta:
            raise InexactDegenerate(
                "governing matrix is numerically singular; supply exact data")
        _, det = rank_det(h, pol)
    rho = iner.rank
    if iner.zeta == 0:
        label = CaseLabel.A_Invertible
        minor = det
    else:
        # leading block of size rho; the empty determinant is 1
        minor = 1 if rho == 0 else rank_det(matrix_at(rho), pol)[1]
        label = CaseLabel.C_UniqueDegenerate if minor != 0 else CaseLabel.F_NoMinimal
    return Classification(governing, order, iner, iner.zeta, rho, det, minor, label)


def classify_trig(c) -> Classification:
    """Classify moments ``c_0..c_{n-1}`` (``c_0`` real, not necessarily 1) via ``M_{n-1}``."""
    c = as_sequence(c)
    if len(c) < 1:
        raise ValueError("need at least one moment")
    backend = array_backend(c)
    return _classify(lambda k: moment_matrix(c, k - 1), len(c), Governing.MOMENT, backend)


def classify_cf(a) -> Classification:
    """Classify coefficients ``a_0..a_{n-1}`` via ``I_n - T_n T_n*``."""
    a = as_sequence(a)
    if len(a) < 1:
        raise ValueError("need at least one coefficient")
    backend = array_backend(a)
    return _classify(lambda k: schur_gram(a, k), len(a), Governing.COEFF, backend)


def verdict(cls: Classification, nu: int, pi: int | None = None) -> Verdict:
    """Whether the class with ``nu`` negative and ``pi`` positive squares is reachable."""
    b_nu, b_pi = cls.base_nu, cls.base_pi
    t_nu, t_pi = cls.threshold_nu, cls.threshold_pi
    if cls.label == CaseLabel.A_Invertible:
        ok = nu >= b_nu and (pi is None or pi >= b_pi)
        return Verdict.InfinitelyMany if ok else Verdict.NoSolution
    if nu >= t_nu and (pi is None or pi >= t_pi):
        return Verdict.InfinitelyMany
    if cls.label == CaseLabel.C_UniqueDegenerate and nu == b_nu and pi in (None, b_pi):
        return Verdict.Unique
    return Verdict.NoSolution


def governing_clause(cls: Classification, nu: int, pi: int | None = None) -> CaseLabel:
    """The finer case label that settles the query ``(nu, pi)``.

    Queries below the base inertia are excluded by monotonicity alone and
    report the regime label.
    """
    b_nu, b_pi = cls.base_nu, cls.base_pi
    above_t = nu >= cls.threshold_nu and (pi is None or pi >= cls.threshold_pi)
    if cls.label == CaseLabel.A_Invertible:
        if nu > b_nu or (pi is not None and pi > b_pi):
            if nu >= b_nu and (pi is None or pi >= b_pi):
                return CaseLabel.B_InvertibleHigher
        return CaseLabel.A_Invertible
    if cls.label == CaseLabel.C_UniqueDegenerate:
        if above_t:
            return CaseLabel.E_DegenerateInfinite
        if nu in cls.gap_nu or (pi is not None and pi in cls.gap_pi):
            return CaseLabel.D_ForbiddenGap
        return CaseLabel.C_UniqueDegenerate
    if above_t:
        return CaseLabel.H_HardInfinite
    if nu == b_nu and pi is None:
        return CaseLabel.F_NoMinimal
    return CaseLabel.G_ForbiddenGapHard


def trig_solvable_in(c, nu: int, pi: int | None = None) -> Verdict:
    return verdict(classify_trig(c), nu, pi)


def cf_solvable_in(a, nu: int, pi_prime: int | None = None) -> Verdict:
    """Verdict for the class with ``nu`` negative and ``pi_prime`` positive squares of ``I - TT*``."""
    return verdict(classify_cf(a), nu, pi_prime)


def equiv_check(a) -> bool:
    """Coefficient and moment sides agree: same regime, same ``nu`` and kernel, ``pi`` shifted by one."""
    cf = classify_cf(a)
    tr = classify_trig(coeffs_to_moments(a))
    return (cf.label == tr.label
            and cf.base_nu == tr.base_nu
            and cf.base_pi + 1 == tr.base_pi
            and cf.rank + 1 == tr.rank
            and cf.kernel_dim == tr.kernel_dim)
