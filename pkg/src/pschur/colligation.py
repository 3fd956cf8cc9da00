"""Interpolation by generalized Schur functions through operator colligations.

Given finite data ``A, B`` on points ``Omega`` of the disk, the kernel

    K(w, z) = (A(z) conj A(w) - B(z) conj B(w)) / (1 - conj(w) z)

defines a finite-dimensional Pontryagin space ``H_K``. An isometric relation
built from kernel sections is completed to a partial isometry
``V = [[T, F], [G, H]]`` and ``S(z) = H + z G (1 - zT)^{-1} F`` satisfies
``B = A S`` except at a handful of points (at most the negative index).

Elements of ``H_K`` are stored as coordinates in a rank basis of kernel
sections ``K(z_i, .)``, ``i in I``; an element with coordinates ``x`` takes
the values ``P[:, I] @ x`` where ``P[i, j] = K(z_j, z_i)``, and the metric is
``P[I, I]``. Scalars ride along in a final slot with the Euclidean metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (DefectNotPositive, ExceptionalPoint, IsometryResidualTooLarge,
                     KernelMismatch, NumericallySingularCompletion)
from .inertia import HermitianMatrix, count_negative
from .kernels import disk_grid, gram_KS

ISOMETRY_TOL = 1e-10
BLOCK_TOL = 1e-9
FACTOR_TOL = 1e-8
RANK_TOL = 1e-10
COND_LIMIT = 1e12
EXCEPTIONAL_BALL = 1e-8


@dataclass(frozen=True)
class InterpolationInstance:
    """Points of the open disk with scalar data ``A``, ``B`` and a base point index."""

    points: tuple
    A: tuple
    B: tuple
    w0_index: int = 0

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        a = tuple(complex(v) for v in self.A)
        b = tuple(complex(v) for v in self.B)
        if not pts:
            raise ValueError("need at least one point")
        if not (len(pts) == len(a) == len(b)):
            raise ValueError("points, A and B must have equal length")
        for z in pts:
            if not abs(z) < 1:
                raise ValueError(f"point {z} is not inside the open unit disk")
        for i in range(len(pts)):
            for j in range(i):
                if pts[i] == pts[j]:
                    raise ValueError(f"repeated point {pts[i]}")
        if not 0 <= self.w0_index < len(pts):
            raise ValueError("base point index out of range")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)

    @property
    def w0(self) -> complex:
        return self.points[self.w0_index]

    @property
    def m(self) -> int:
        return len(self.points)

    @classmethod
    def from_function(cls, points, S, A=None, w0_index: int = 0) -> "InterpolationInstance":
        pts = [complex(z) for z in points]
        a = [1.0] * len(pts) if A is None else [complex(A(z)) if callable(A) else complex(v) for z, v in zip(pts, A)]
        b = [a_i * complex(S(z)) for a_i, z in zip(a, pts)]
        return cls(tuple(pts), tuple(a), tuple(b), w0_index)


def mobius(w0: complex):
    """``phi(z) = (w0 - z) / (1 - conj(w0) z)``, an involution of the disk with ``phi(w0) = 0``."""
    w0 = complex(w0)

    def phi(z):
        return (w0 - z) / (1 - w0.conjugate() * z)

    return phi


@dataclass(frozen=True)
class MobiusRecord:
    w0: complex
    identity: bool

    def forward(self, z):
        return z if self.identity else mobius(self.w0)(z)

    # phi is an involution
    backward = forward


def mobius_normalize(inst: InterpolationInstance):
    """Move the base point to the origin (and first position); return the new instance and the map."""
    rec = MobiusRecord(inst.w0, inst.w0 == 0)
    order = [inst.w0_index] + [i for i in range(inst.m) if i != inst.w0_index]
    pts = tuple(rec.forward(inst.points[i]) for i in order)
    pts = (0j,) + pts[1:]
    norm = InterpolationInstance(pts, tuple(inst.A[i] for i in order),
                                 tuple(inst.B[i] for i in order), 0)
    return norm, rec, order


def kernel_gram(points, A, B, shift: bool = False) -> np.ndarray:
    """``P[i, j] = K(z_j, z_i)``; ``shift=True`` multiplies the ``B`` term by ``z_i conj(z_j)``."""
    z = np.asarray(points, dtype=complex)
    a = np.asarray(A, dtype=complex)
    b = np.asarray(B, dtype=complex)
    zz = np.outer(z, z.conj())
    bb = np.outer(b, b.conj())
    if shift:
        bb = zz * bb
    p = (np.outer(a, a.conj()) - bb) / (1 - zz)
    return (p + p.conj().T) / 2


def _negatives(h: np.ndarray, tol: float = 1e-9) -> int:
    if h.size == 0:
        return 0
    return count_negative(HermitianMatrix(h, "float"), tol)


@dataclass
class KernelSpaceRep:
    """Rank-basis model of ``H_K`` on a finite point set."""

    gram: np.ndarray  # full P
    basis: list  # indices I
    coords: np.ndarray  # X, column j = coordinates of K(z_j, .)
    metric: np.ndarray  # P[I, I]
    kappa: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def values(self, x: np.ndarray) -> np.ndarray:
        """Function values on the point set of the element with coordinates ``x``."""
        return self.gram[:, self.basis] @ x


def rank_basis(p: np.ndarray, tol: float = RANK_TOL) -> list:
    if p.size == 0:
        return []
    _, r, piv = scipy.linalg.qr(p, pivoting=True)
    d = np.abs(np.diag(r))
    if d.size == 0 or d[0] == 0:
        return []
    k = int(np.sum(d > tol * d[0]))
    return sorted(int(i) for i in piv[:k])


def _space_from_gram(p: np.ndarray) -> KernelSpaceRep:
    basis = rank_basis(p)
    metric = p[np.ix_(basis, basis)]
    coords = np.linalg.solve(metric, p[basis, :]) if basis else np.zeros((0, p.shape[0]), complex)
    return KernelSpaceRep(p, basis, coords, metric, _negatives(metric))


def kernel_space(inst: InterpolationInstance) -> KernelSpaceRep:
    return _space_from_gram(kernel_gram(inst.points, inst.A, inst.B))


@dataclass
class Relation:
    """Generator pairs as columns: ``domain`` in ``H_K + G``, ``range`` in ``H_K + F``."""

    domain: np.ndarray
    range: np.ndarray
    metric: np.ndarray  # J = diag(P_I, 1)
    labels: list
    isometry_residual: float = 0.0


def _metric(ksp: KernelSpaceRep) -> np.ndarray:
    r = ksp.dim
    j = np.zeros((r + 1, r + 1), complex)
    j[:r, :r] = ksp.metric
    j[r, r] = 1.0
    return j


def simplified_form(inst: InterpolationInstance, first, second) -> complex:
    """Closed-form inner product of two generator pairs (normalized instance).

    ``first = (a_idx, u1, u2)`` and ``second = (b_idx, v1, v2)`` index points
    ``alpha``, ``beta`` of the instance; ``a_idx is None`` is allowed when
    ``u1 = 0``.
    """
    z, A, B = inst.points, inst.A, inst.B
    A0 = A[0]
    ia, u1, u2 = first
    ib, v1, v2 = second
    out = A0 * A0.conjugate() * u2 * np.conj(v2)
    if u1:
        al, Aa = z[ia], A[ia]
        out += (A0 * Aa.conjugate() - A0 * A0.conjugate()) / al.conjugate() * u1 * np.conj(v2)
    if v1:
        be, Ab = z[ib], A[ib]
        out += (Ab * A0.conjugate() - A0 * A0.conjugate()) / be * u2 * np.conj(v1)
    if u1 and v1:
        kab = (Ab * Aa.conjugate() - B[ib] * B[ia].conjugate()) / (1 - al.conjugate() * be)
        mix = (Ab * Aa.conjugate() - Ab * A0.conjugate() - A0 * Aa.conjugate() + A0 * A0.conjugate())
        out += (kab + mix / (al.conjugate() * be)) * u1 * np.conj(v1)
    return complex(out)


def build_relation(inst: InterpolationInstance, ksp: KernelSpaceRep) -> Relation:
    """Generators of the isometric relation for a normalized instance (base point first, at 0).

    For each ``alpha != 0`` the ``u1`` slot gives the pair
    ``(K(alpha,.), (conj A(alpha) - conj A(0))/conj alpha)`` and
    ``((K(alpha,.) - K(0,.))/conj alpha, (conj B(alpha) - conj B(0))/conj alpha)``;
    the ``u2`` slot gives ``(0, conj A(0))`` and ``(K(0,.), conj B(0))``.
    """
    if inst.points[0] != 0 or inst.w0_index != 0:
        raise ValueError("build_relation expects a normalized instance")
    r = ksp.dim
    X = ksp.coords
    A = np.asarray(inst.A)
    B = np.asarray(inst.B)
    cols_d, cols_r, labels = [], [], []
    for a in range(1, inst.m):
        al = inst.points[a].conjugate()
        d = np.zeros(r + 1, complex)
        g = np.zeros(r + 1, complex)
        d[:r] = X[:, a]
        d[r] = (A[a].conjugate() - A[0].conjugate()) / al
        g[:r] = (X[:, a] - X[:, 0]) / al
        g[r] = (B[a].conjugate() - B[0].conjugate()) / al
        cols_d.append(d)
        cols_r.append(g)
        labels.append((a, 1, 0))
    d = np.zeros(r + 1, complex)
    g = np.zeros(r + 1, complex)
    d[r] = A[0].conjugate()
    g[:r] = X[:, 0]
    g[r] = B[0].conjugate()
    cols_d.append(d)
    cols_r.append(g)
    labels.append((None, 0, 1))
    D = np.array(cols_d).T
    R = np.array(cols_r).T
    J = _metric(ksp)
    gd = D.conj().T @ J @ D
    gr = R.conj().T @ J @ R
    closed = np.array([[simplified_form(inst, labels[j], labels[i]) for j in range(len(labels))]
                       for i in range(len(labels))])
    scale = max(1.0, float(np.max(np.abs(closed))))
    res = max(float(np.max(np.abs(gd - closed))), float(np.max(np.abs(gr - closed)))) / scale
    if res > ISOMETRY_TOL:
        raise IsometryResidualTooLarge(f"relation isometry residual {res:.3g}")
    return Relation(D, R, J, labels, res)


@dataclass
class Defects:
    M_basis: np.ndarray
    N_basis: np.ndarray
    M_gram: np.ndarray
    N_gram: np.ndarray
    M_positive: bool
    N_positive: bool


def _complement(cols: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Basis of the ``J``-orthogonal complement of the column span."""
    if cols.shape[1] == 0:
        return np.eye(J.shape[0], dtype=complex)
    return scipy.linalg.null_space(cols.conj().T @ J, rcond=RANK_TOL)


def _positive(g: np.ndarray, tol: float = 1e-9) -> bool:
    if g.size == 0:
        return True
    w = np.linalg.eigvalsh((g + g.conj().T) / 2)
    return bool(w[0] > tol * max(1.0, float(np.max(np.abs(w)))))


def defect_subspaces(rel: Relation, check: bool = True) -> Defects:
    """``J``-orthogonal complements of the domain (``M``) and range (``N``) spans."""
    J = rel.metric
    Mb = _complement(rel.domain, J)
    Nb = _complement(rel.range, J)
    Mg = Mb.conj().T @ J @ Mb
    Ng = Nb.conj().T @ J @ Nb
    out = Defects(Mb, Nb, Mg, Ng, _positive(Mg), _positive(Ng))
    if check and not (out.M_positive and out.N_positive):
        which = [n for n, ok in (("M", out.M_positive), ("N", out.N_positive)) if not ok]
        raise DefectNotPositive(f"defect subspace(s) {' and '.join(which)} not a Hilbert space")
    return out


@dataclass
class Colligation:
    """``V = [[T, F], [G, H]]`` on ``H_K + C`` with state metric ``P``."""

    T: np.ndarray
    F: np.ndarray
    G: np.ndarray
    H: complex
    metric: np.ndarray
    eigenvalues: np.ndarray
    exceptional_points: list  # points z of the disk with 1 - zT singular
    report: dict = field(default_factory=dict)

    @property
    def V(self) -> np.ndarray:
        r = self.T.shape[0]
        v = np.zeros((r + 1, r + 1), complex)
        v[:r, :r] = self.T
        v[:r, r] = self.F
        v[r, :r] = self.G
        v[r, r] = self.H
        return v


def _independent(cols: np.ndarray) -> list:
    if cols.shape[1] == 0:
        return []
    _, r, piv = scipy.linalg.qr(cols, pivoting=True)
    d = np.abs(np.diag(r))
    if d.size == 0 or d[0] == 0:
        return []
    k = int(np.sum(d > RANK_TOL * d[0]))
    return sorted(int(i) for i in piv[:k])


def _partial_isometry(src: np.ndarray, dst: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Map ``src`` columns to ``dst`` columns and kill the ``J``-complement of ``span src``."""
    idx = _independent(src)
    n = J.shape[0]
    if not idx:
        return np.zeros((n, n), complex)
    sb, db = src[:, idx], dst[:, idx]
    gb = sb.conj().T @ J @ sb
    if np.linalg.cond(gb) > COND_LIMIT:
        raise NumericallySingularCompletion(f"generator Gram condition number {np.linalg.cond(gb):.3g}")
    out = db @ np.linalg.solve(gb, sb.conj().T @ J)
    resid = np.max(np.abs(out @ src - dst), initial=0.0) / max(1.0, np.max(np.abs(dst), initial=0.0))
    if resid > BLOCK_TOL:
        raise IsometryResidualTooLarge(f"relation is not single valued (residual {resid:.3g})")
    return out


def _exceptional(T: np.ndarray):
    if T.size == 0:
        return np.zeros(0, complex), []
    lam = np.linalg.eigvals(T)
    pts = [complex(1 / l) for l in lam if abs(l) > 1 + 1e-12]
    return lam, pts


def _assemble(V: np.ndarray, J: np.ndarray, report: dict) -> Colligation:
    r = V.shape[0] - 1
    W = np.linalg.solve(J, V.conj().T @ J)  # metric adjoint
    p = W @ V
    report["partial_isometry_residual"] = float(np.max(np.abs(p @ p - p), initial=0.0))
    if report["partial_isometry_residual"] > BLOCK_TOL * max(1.0, float(np.max(np.abs(p), initial=0.0))):
        raise IsometryResidualTooLarge("completion is not a partial isometry")
    T, F, G, H = V[:r, :r], V[:r, r], V[r, :r], complex(V[r, r])
    lam, pts = _exceptional(T)
    return Colligation(T, F, G, H, J[:r, :r], lam, pts, report)


def complete_colligation(inst: InterpolationInstance, ksp: KernelSpaceRep, rel: Relation,
                         defects: Defects | None = None) -> Colligation:
    """Partial isometry whose adjoint maps domain generators to range generators."""
    if defects is not None and not (defects.M_positive and defects.N_positive):
        raise DefectNotPositive("defect subspaces must be Hilbert spaces")
    J = rel.metric
    Wstar = _partial_isometry(rel.domain, rel.range, J)  # this is V*
    V = np.linalg.solve(J, Wstar.conj().T @ J)
    col = _assemble(V, J, {})
    col.report["block_residual"] = _block_residual(inst, ksp, col)
    if col.report["block_residual"] > BLOCK_TOL:
        raise IsometryResidualTooLarge(f"block formulas fail (residual {col.report['block_residual']:.3g})")
    return col


def _block_residual(inst: InterpolationInstance, ksp: KernelSpaceRep, col: Colligation) -> float:
    """Largest violation of the four block formulas on the (normalized) point set."""
    if ksp.dim == 0:
        return abs(inst.A[0] * col.H - inst.B[0]) / (1 + abs(inst.B[0]))
    z = np.asarray(inst.points)
    A = np.asarray(inst.A)
    B = np.asarray(inst.B)
    vals_basis = ksp.gram[:, ksp.basis]  # column k = values of basis element k
    vals_T = vals_basis @ col.T
    vals_F = vals_basis @ col.F
    res = [abs(A[0] * col.H - B[0])]
    res.extend(np.abs(A[0] * col.G - vals_basis[0]))
    nz = z != 0
    if np.any(nz):
        lhs_T = vals_T[nz]
        rhs_T = (vals_basis[nz] - np.outer(A[nz], col.G)) / z[nz][:, None]
        res.extend(np.abs(lhs_T - rhs_T).ravel())
        rhs_F = (B[nz] - A[nz] * col.H) / z[nz]
        res.extend(np.abs(vals_F[nz] - rhs_F))
    scale = max(1.0, float(np.max(np.abs(vals_basis))), float(np.max(np.abs(B))))
    return float(max(res)) / scale


def transfer_eval(col: Colligation, z) -> complex:
    """``H + z G (1 - zT)^{-1} F``."""
    z = complex(z)
    for p in col.exceptional_points:
        if abs(z - p) < EXCEPTIONAL_BALL:
            raise ExceptionalPoint(f"1 - zT is singular near {p}")
    r = col.T.shape[0]
    if r == 0:
        return col.H
    try:
        x = np.linalg.solve(np.eye(r) - z * col.T, col.F)
    except np.linalg.LinAlgError as exc:
        raise ExceptionalPoint(f"1 - zT is singular at {z}") from exc
    return complex(col.H + z * (col.G @ x))


@dataclass
class TransferFunction:
    """``S(z) = S'(phi(z))`` where ``S'`` is the colligation transfer function."""

    colligation: Colligation
    mobius: MobiusRecord
    kappa: int
    space: KernelSpaceRep | None = None
    defects: Defects | None = None
    relation: Relation | None = None

    def __call__(self, z) -> complex:
        return transfer_eval(self.colligation, self.mobius.forward(complex(z)))

    @property
    def exceptional_points(self) -> list:
        return [self.mobius.backward(p) for p in self.colligation.exceptional_points]


def factor_check(inst: InterpolationInstance, tf, tol: float = FACTOR_TOL) -> list:
    """Points where ``|B - A S| > tol (1 + |A| + |B|)`` (exceptional points count as failures)."""
    bad = []
    for z, a, b in zip(inst.points, inst.A, inst.B):
        try:
            s = tf(z)
        except ExceptionalPoint:
            bad.append(z)
            continue
        if abs(b - a * s) > tol * (1 + abs(a) + abs(b)):
            bad.append(z)
    return bad


def vanishing_subspace_positive(inst: InterpolationInstance, ksp: KernelSpaceRep | None = None) -> bool:
    """Elements of ``H_K`` vanishing off the base point form a Hilbert subspace."""
    ksp = ksp or kernel_space(inst)
    if ksp.dim == 0:
        return True
    rows = [i for i in range(inst.m) if i != inst.w0_index]
    if not rows:
        return _positive(ksp.metric)
    basis = scipy.linalg.null_space(ksp.gram[np.ix_(rows, ksp.basis)], rcond=RANK_TOL)
    return _positive(basis.conj().T @ ksp.metric @ basis)


def solve(inst: InterpolationInstance, *, square: bool = False) -> TransferFunction:
    """Run normalization, kernel space, relation, defects and completion.

    ``square=True`` uses the hypotheses ``A(w0) = 1`` and a Hilbert space of
    elements vanishing off ``w0`` in place of the two defect assumptions,
    which are then checked as consequences.
    """
    if square:
        if abs(inst.A[inst.w0_index] - 1) > 1e-12:
            raise ValueError("square variant needs A(w0) = 1")
        if not vanishing_subspace_positive(inst):
            raise DefectNotPositive("elements vanishing off w0 do not form a Hilbert space")
    norm, rec, _ = mobius_normalize(inst)
    ksp = kernel_space(norm)
    rel = build_relation(norm, ksp)
    defects = defect_subspaces(rel)
    col = complete_colligation(norm, ksp, rel, defects)
    return TransferFunction(col, rec, ksp.kappa, ksp, defects, rel)


def two_kernel_solve(points: Sequence, A: Sequence, B: Sequence) -> TransferFunction:
    """Interpolate via the kernels ``K_1`` and ``K_2`` (``B`` term weighted by ``z conj w``)."""
    inst = InterpolationInstance(tuple(points), tuple(A), tuple(B), 0)
    p1 = kernel_gram(inst.points, inst.A, inst.B)
    p2 = kernel_gram(inst.points, inst.A, inst.B, shift=True)
    nu1, nu2 = _negatives(p1), _negatives(p2)
    if nu1 != nu2:
        raise KernelMismatch(f"K_1 has {nu1} negative squares, K_2 has {nu2}")
    ksp = _space_from_gram(p1)
    r = ksp.dim
    z = np.asarray(inst.points)
    first = np.zeros((r + 1, inst.m), complex)
    second = np.zeros((r + 1, inst.m), complex)
    first[:r] = ksp.coords
    first[r] = np.conj(inst.B)
    second[:r] = ksp.coords * z.conj()[None, :]
    second[r] = np.conj(inst.A)
    J = _metric(ksp)
    gf = first.conj().T @ J @ first
    gs = second.conj().T @ J @ second
    iso = float(np.max(np.abs(gf - gs), initial=0.0)) / max(1.0, float(np.max(np.abs(gf), initial=0.0)))
    if iso > ISOMETRY_TOL:
        raise IsometryResidualTooLarge(f"two-kernel relation residual {iso:.3g}")
    V = _partial_isometry(first, second, J)
    col = _assemble(V, J, {"isometry_residual": iso})
    rel = Relation(first, second, J, list(range(inst.m)), iso)
    return TransferFunction(col, MobiusRecord(0j, True), ksp.kappa, ksp, None, rel)


@dataclass
class Certificate:
    kappa_prime: int
    kappa: int
    trace: list  # (number of sample points, negative count)

    @property
    def within_bound(self) -> bool:
        return self.kappa_prime <= self.kappa


def certify_schur_class(tf, levels: int = 3, kappa: int | None = None,
                        radius: float = 0.9, eps_rel: float = 1e-9) -> Certificate:
    """Largest negative count of sampled ``K_S`` Grams on nested disk grids."""
    if kappa is None:
        kappa = getattr(tf, "kappa", 0)
    exc = list(getattr(tf, "exceptional_points", []))
    trace = []
    pts_all: list = []
    for lv in range(1, levels + 1):
        grid = disk_grid(radius, 2 * lv, 4 * lv + 2)
        for z in grid:
            if any(abs(z - p) < 1e-3 for p in exc):
                continue
            if all(abs(z - q) > 1e-12 for q in pts_all):
                pts_all.append(z)
        vals = []
        for z in pts_all:
            try:
                s = complex(tf(z))
            except ExceptionalPoint:
                continue
            if math.isfinite(s.real) and math.isfinite(s.imag):
                vals.append((z, s))
        trace.append((len(vals), count_negative(gram_KS(vals), eps_rel)))
    return Certificate(max(n for _, n in trace), kappa, trace)
