"""Acceptance suite: one test per criterion, at the stated tolerances.

A PASS/FAIL line per criterion is printed in the terminal summary (see conftest).
"""

import random
import shutil
import subprocess
import sys
import time
from fractions import Fraction as F
from functools import lru_cache

import numpy as np
import pytest
import sympy
from builders import forced_jump_instance
from conftest import rand_coeffs, rand_qqi

from pschur.classifier import (CaseLabel, Verdict, cf_solvable_in, classify_cf, classify_trig,
                               equiv_check, verdict)
from pschur.colligation import (InterpolationInstance, certify_schur_class, factor_check,
                                kernel_gram, solve, two_kernel_solve)
from pschur.errors import NotSolvable
from pschur.extension import (extend_to_class, inertia_trace, rank_preserving_step,
                              stabilization_index, step_law_violations, unique_extension_stream)
from pschur.inertia import TolerancePolicy, count_negative, determinant, inertia
from pschur.io import dump_instance, make_instance
from pschur.kernels import (RationalFunction, blaschke_case_study, blaschke_product,
                            blaschke_witness, coeff_growth_check, disk_grid, negsq_from_coeffs,
                            sampled_negsq)
from pschur.scalars import EXACT, FLOAT, QQi
from pschur.toeplitz import (Side, check_corollaries, coeffs_to_moments, d_block, moment_matrix,
                             schur_gram, verify_identities)

EX = TolerancePolicy.exact()
half = F(1, 2)


@lru_cache(maxsize=None)
def corpus() -> tuple:
    rng = random.Random(1)
    return tuple(tuple(rand_coeffs(rng, rng.randint(1, 8))) for _ in range(200))


# -- 1, 2: exact identities and inertia corollaries --------------------------

def test_criterion_01_identities_bit_exact():
    t0 = time.perf_counter()
    bad = []
    for a in corpus():
        rep = verify_identities(list(a))
        assert rep.exact
        if not rep.passed:
            bad.append((a, [(c.name, c.r) for c in rep.failures()]))
    elapsed = time.perf_counter() - t0
    print(f"identities: {len(corpus())} sequences, {len(bad)} failures, {elapsed:.1f}s")
    assert bad == []
    assert elapsed < 30


def test_criterion_02_corollaries():
    violations = []
    for a in corpus():
        rep = check_corollaries(list(a))
        violations += rep.violations
        # the four Gram orientations share (nu, pi) at every r <= n
        assert len(rep.sides) == 4
        for r in range(len(a)):
            assert len({rep.sides[s][r] for s in rep.sides}) == 1
    assert violations == []


# -- 3: equivalence of the coefficient and moment pictures --------------------

def _schur_factors():
    return [
        RationalFunction([QQi(F(1, 6)), QQi(half)], [QQi(1)]),  # (z + 1/3)/2
        RationalFunction.constant(QQi(F(1, 4), F(1, 3))),
    ]


_ALPHAS = [QQi(half), QQi(F(-1, 3), F(1, 4))]


@pytest.mark.parametrize("kappa", [0, 1, 2])
@pytest.mark.parametrize("which", [0, 1])
def test_criterion_03_equivalence_sequences(kappa, which):
    S = _schur_factors()[which]
    for alpha in _ALPHAS[:kappa]:
        S = S * blaschke_product([alpha]).reciprocal()
    a = S.taylor(32)
    c = coeffs_to_moments(a)
    rs = range(1, 17)
    seqs = {
        "I-TT*": [inertia(schur_gram(a, r), EX).nu for r in rs],
        "I-T~T~*": [inertia(schur_gram(a, r, Side.CONJ_LEFT), EX).nu for r in rs],
        "d_block": [inertia(d_block(a, r), EX).nu for r in rs],
        "M_r": [inertia(moment_matrix(c, r), EX).nu for r in rs],
    }
    for name, seq in seqs.items():
        assert seq[-1] == kappa, (name, seq)
        assert all(x <= kappa for x in seq), (name, seq)
        assert seq == sorted(seq), (name, seq)
    # independent float route: sampled kernel Gram on a disk grid
    grid = [z for z in disk_grid(0.85, 4, 9) if all(abs(z - complex(al)) > 0.05 for al in _ALPHAS)]
    assert sampled_negsq(S, grid) == kappa


def test_criterion_03_classifiers_agree():
    rng = random.Random(2)
    inputs = [rand_coeffs(rng, rng.randint(1, 6)) for _ in range(180)]
    # boundary cases: unimodular leading term and zero tails
    for _ in range(30):
        u = [QQi(1), QQi(-1), QQi(0, 1), QQi(F(3, 5), F(4, 5))][rng.randrange(4)]
        inputs.append([u] + [QQi(0)] * rng.randint(0, 3) + rand_coeffs(rng, rng.randint(0, 2)))
    assert len(inputs) >= 200
    mismatches = [a for a in inputs if not equiv_check(a)]
    assert mismatches == []


# -- 4: classifier ground truth ------------------------------------------------

def test_criterion_04_classifier_ground_truth():
    # a = (1): unique, S = 1
    assert cf_solvable_in([QQi(1)], 0) == Verdict.Unique
    c = coeffs_to_moments([QQi(1)])
    assert list(c) == [1, 1]
    assert unique_extension_stream(list(c), 10) == [1] * 10

    # a = (2): infinitely many in S_1
    assert cf_solvable_in([QQi(2)], 1) == Verdict.InfinitelyMany
    c = list(coeffs_to_moments([QQi(2)]))
    assert c == [1, 2]
    plan = rank_preserving_step(c, samples=3)
    assert len(set(plan.produced_terms)) >= 3
    streams = set()
    for x in plan.produced_terms:
        ext = c + [x] + unique_extension_stream(c + [x], 6)
        trace = inertia_trace(ext)
        assert all((t.nu, t.pi) == (1, 1) for t in trace[1:])
        streams.add(tuple(ext))
    assert len(streams) >= 3

    # degenerate moments (1, 1, 1, 0)
    c = [QQi(x) for x in (1, 1, 1, 0)]
    cls = classify_trig(c)
    assert cls.label == CaseLabel.F_NoMinimal
    assert (cls.threshold_nu, cls.threshold_pi) == (2, 3)
    out = extend_to_class(c, 2, 3, horizon=8)
    last = inertia_trace(c + out)[-1]
    assert (last.nu, last.pi) == (2, 3)
    for nu in range(0, 4):
        for pi in range(0, 5):
            if nu >= 2 and pi >= 3:
                continue
            assert verdict(cls, nu, pi) == Verdict.NoSolution
            with pytest.raises(NotSolvable):
                extend_to_class(c, nu, pi)


# -- 5: extension step laws -------------------------------------------------------

def test_criterion_05_step_laws():
    rng = random.Random(5)
    runs = 0
    violations = []
    while runs < 100:
        c = [QQi(rng.randint(1, 3))] + rand_coeffs(rng, rng.randint(0, 3), bound=2, den=3)
        if rng.random() < 0.3 and len(c) > 1:
            c[-1] = QQi(0)
        cls = classify_trig(c)
        nu = cls.threshold_nu + rng.randint(0, 2)
        pi = cls.threshold_pi + rng.randint(0, 2)
        out = extend_to_class(c, nu, pi, horizon=2 * (nu + pi) + 4)
        trace = inertia_trace(c + out)
        violations += step_law_violations(trace)
        k = stabilization_index(trace)
        assert all((t.nu, t.pi) == (nu, pi) for t in trace[k:])
        runs += 1
    assert violations == []

    # instances where every continuation lifts the rank by exactly two
    for _ in range(20):
        c, r = forced_jump_instance(rng)
        base = inertia_trace(c)[-1]
        assert base.rank > r
        for _ in range(3):
            x = rand_qqi(rng, bound=9, den=1)
            trace = inertia_trace(c + [x])
            assert trace[-1].rank == base.rank + 2
            assert (trace[-1].nu, trace[-1].pi) == (base.nu + 1, base.pi + 1)
            assert step_law_violations(trace) == []


# -- 6: positive-definite Pick interpolation -----------------------------------------

def test_criterion_06_positive_interpolation():
    rng = np.random.default_rng(2026)
    grid = disk_grid(0.999, 15, 17)
    assert len(grid) == 256
    done = 0
    while done < 60:
        z = np.sqrt(rng.random(3)) * 0.95 * np.exp(2j * np.pi * rng.random(3))
        w = np.sqrt(rng.random(3)) * 0.9 * np.exp(2j * np.pi * rng.random(3))
        if np.linalg.eigvalsh(kernel_gram(z, [1] * 3, w))[0] <= 0:
            continue
        t0 = time.perf_counter()
        tf = solve(InterpolationInstance(tuple(z), (1,) * 3, tuple(w)))
        res = max(abs(tf(p) - v) for p, v in zip(z, w))
        peak = max(abs(tf(g)) for g in grid)
        elapsed = time.perf_counter() - t0
        assert res < 1e-8
        assert peak <= 1 + 1e-8
        assert elapsed < 1
        done += 1


# -- 7: indefinite interpolation from 1/b ------------------------------------------------

def inv_b(z):
    # 1/b with b(z) = (z + 1/2)/(1 + z/2)
    return (1 + z / 2) / (z + 0.5)


def test_criterion_07_indefinite_interpolation():
    pts = [0, 0.25, -0.25, 1 / 3, -0.4]
    B = [inv_b(z) for z in pts]
    A = [1] * 5
    assert count_negative(kernel_gram(pts, A, B)) == 1

    inst = InterpolationInstance(tuple(pts), tuple(A), tuple(B))
    tf = solve(inst)
    assert tf.kappa == 1
    assert len(tf.colligation.exceptional_points) <= 1
    fails = factor_check(inst, tf)
    assert len(fails) <= 1
    cert = certify_schur_class(tf)
    assert cert.kappa_prime == 1

    tf2 = two_kernel_solve(pts, A, B)
    assert tf2.kappa == tf.kappa
    fails2 = factor_check(inst, tf2)
    assert len(fails2) <= 1
    assert certify_schur_class(tf2).kappa_prime == 1
    for z, b in zip(pts, B):
        if z in fails or z in fails2:
            continue
        assert abs(tf(z) - tf2(z)) < 1e-8
        assert abs(tf(z) - b) < 1e-8


# -- 8: constant-one Blaschke case study --------------------------------------------------

def _disk_point(rng):
    while True:
        p = QQi(F(rng.randint(-9, 9), 10), F(rng.randint(-9, 9), 10))
        if p.abs2() < 1:
            return p


def test_criterion_08_blaschke_witness():
    rng = random.Random(8)
    pairs = 0
    while pairs < 100:
        w0, z2 = _disk_point(rng), _disk_point(rng)
        if w0 == z2:
            continue
        assert determinant(blaschke_witness(w0, z2), EX) < 0
        pairs += 1
    for m in range(2, 7):
        for _ in range(5):
            pts = []
            while len(pts) < m:
                p = _disk_point(rng)
                if p not in pts:
                    pts.append(p)
            study = blaschke_case_study(pts, w0_index=rng.randrange(m))
            assert study.inertia.nu == 1


# -- 9: negative squares from coefficients --------------------------------------------------

def test_criterion_09_negsq_stabilization():
    z = sympy.symbols("z")
    poly = sympy.series((2 + z) / (1 + 2 * z), z, 0, 16).removeO()
    oracle = [sympy.Rational(poly.coeff(z, k)) for k in range(16)]
    inv = RationalFunction([QQi(1), QQi(half)], [QQi(half), QQi(1)])
    a = inv.taylor(16)
    assert [F(int(x.p), int(x.q)) for x in oracle] == a
    assert a[:5] == [2, -3, 6, -12, 24]

    est = negsq_from_coeffs(a, 8)
    assert est.stabilized and est.kappa == 1
    assert est.sequence.index(1) < 8

    flat = negsq_from_coeffs([QQi(2)] + [QQi(0)] * 11, 12)
    assert flat.sequence == list(range(1, 13))
    assert not flat.stabilized

    g = coeff_growth_check(a)
    assert (g.K, g.rho) == (F(3, 2), 2)


# -- 10: CLI determinism ---------------------------------------------------------------------

def _write(path, kind, backend, **vectors):
    path.write_text(dump_instance(make_instance(kind, backend, **vectors)))
    return str(path)


def _run(args, cwd):
    return subprocess.run([sys.executable, "-m", "pschur.cli", *args], cwd=cwd,
                          capture_output=True, timeout=120)


def test_criterion_10_determinism(tmp_path):
    src = tmp_path / "inputs"
    src.mkdir()
    q = lambda *x: [QQi(F(v)) if not isinstance(v, QQi) else v for v in x]
    files = {
        "herm": _write(src / "herm.json", "hermitian_matrix", EXACT, matrix=[q(1, 2), q(2, 1)]),
        "coef": _write(src / "coef.json", "coeffs", EXACT, a=q(half, 3, -1)),
        "inv": _write(src / "inv.json", "coeffs", EXACT, a=q(2, -3, 6, -12, 24, -48, 96, -192)),
        "mom": _write(src / "mom.json", "moments", EXACT, c=q(1, 1, 1, 0)),
        "interp": _write(src / "interp.json", "interpolation", FLOAT,
                         points=[0, 0.25, -0.25, 1 / 3, -0.4],
                         B=[inv_b(z) for z in [0, 0.25, -0.25, 1 / 3, -0.4]], w0_index=0),
        "ks": _write(src / "ks.json", "kernel_sample", EXACT,
                     points=q(0, half), values=q(1, 1)),
    }
    commands = [
        ["inertia", files["herm"]],
        ["inertia", files["ks"], "--table"],
        ["classify", files["coef"], "--nu", "0"],
        ["classify", files["mom"], "--nu", "1", "--pi", "2"],
        ["extend", files["mom"], "--nu", "2", "--pi", "3", "--horizon", "5"],
        ["extend", files["mom"], "--nu", "1", "--pi", "1"],
        ["interpolate", files["interp"]],
        ["interpolate", files["interp"], "--method", "two-kernel"],
        ["verify", files["coef"], "--suite", "identities"],
        ["verify", files["coef"], "--suite", "corollaries"],
        ["verify", files["inv"], "--suite", "negsq", "--r-max", "8"],
        ["demo-blaschke", "--points=0,1/2,-1/3", "--w0-index", "1", "--seed", "7"],
    ]
    recs = tmp_path / "records"
    recs.mkdir()
    originals = []
    for k, cmd in enumerate(commands):
        rec = recs / f"run{k}.json"
        first = _run([*cmd, "--record", str(rec)], tmp_path)
        second = _run(cmd, tmp_path)
        assert first.stdout == second.stdout and first.returncode == second.returncode
        assert rec.exists(), cmd
        originals.append((rec, first))
    # replay from the records alone, elsewhere, with the inputs gone
    shutil.rmtree(src)
    elsewhere = tmp_path / "elsewhere"
    elsewhere.mkdir()
    codes = set()
    for rec, first in originals:
        again = _run(["replay", str(rec)], elsewhere)
        assert again.returncode == 0, again.stderr.decode()
        assert again.stdout == first.stdout
        codes.add(first.returncode)
    assert {0, 5} <= codes  # successes and a not-solvable run are both covered
