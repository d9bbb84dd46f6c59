"""Acceptance suite: one recorded outcome per sub-part, one summary line per criterion.

Sub-parts that do not hold in this implementation are asserted as stated and
marked xfail(strict=True); their criterion line reads FAIL.
"""

import itertools
import json
import time
from fractions import Fraction

import pytest

from thetalift import oracle as O
from thetalift import thetalift as TL
from thetalift.cli import run
from thetalift.gsp4cosets import closure_scan, cosets
from thetalift.localfield import FieldParams
from thetalift.schwartz import Ideal, Shell, negate_argument
from thetalift.weilrep import fourier1, gauss_integral, haar_constant

TITLES = {
    1: "Gauss-sum suite",
    2: "Fourier involution and Haar constants",
    3: "invariance suites",
    4: "ramified structure",
    5: "support scans",
    6: "coset completeness",
    7: "Bessel closed forms and nonvanishing",
    8: "unramified degeneration",
    9: "representation cross-check",
    10: "determinism",
}
RESULTS = {k: [] for k in TITLES}

KINDS = ("split", "inert", "ramified")
PRIMES = (3, 5)


def acceptance_cases(p):
    out = [TL.Case.make("split", p, n1=a, n2=b) for a in range(3) for b in range(3)]
    out += [TL.Case.make("inert", p, n) for n in range(3)]
    out += [TL.Case.make("ramified", p, n) for n in range(3)]
    return out


def record(criterion, part, ok, note=""):
    RESULTS[criterion].append((part, bool(ok), note))
    return ok


# 1 ---------------------------------------------------------------------------

def test_c1_gauss_suite():
    t0 = time.perf_counter()
    worst = 0.0
    exact = True
    for p, kind in itertools.product((3, 5, 7), KINDS):
        P = FieldParams.make(p, kind)
        for m, vc, tw in itertools.product(range(-3, 4), range(-5, 4), (False, True)):
            c = Fraction(p) ** vc
            for c_set, name in ((Ideal(m), "ideal"), (Shell(m), "shell")):
                sym = gauss_integral(P, c_set, tw, c)
                num = O.numeric_gauss(P, name, m, tw, c)
                worst = max(worst, abs(sym.evaluate(tau=O.gauss_sum(p)) - num))
                if sym.is_rational():
                    x = sym.as_fraction()
                    scaled = num.real * x.denominator
                    exact &= Fraction(round(scaled), x.denominator) == x and abs(num.imag) < 1e-9
    elapsed = time.perf_counter() - t0
    record(1, "values", worst < 1e-9 and exact, f"max deviation {worst:.1e}")
    record(1, "runtime", elapsed < 10, f"{elapsed:.1f} s")
    assert worst < 1e-9 and exact and elapsed < 10


# 2 ---------------------------------------------------------------------------

def test_c2_involution_library():
    from test_fourier import library
    count = 0
    for p, kind in itertools.product((3, 5, 7), KINDS):
        P = FieldParams.make(p, kind)
        lib = library(P)
        assert len(lib) >= 20
        for f in lib:
            assert fourier1(fourier1(f)) == negate_argument(f)
            count += 1
    record(2, "involution", True, f"{count} functions")


def test_c2_haar_split_inert():
    ok = all(haar_constant(FieldParams.make(p, k)).evaluate() == 1
             for p in (3, 5, 7) for k in ("split", "inert"))
    record(2, "Haar split/inert = 1", ok)
    assert ok


@pytest.mark.xfail(strict=True, reason="self-dual constant for dc1..dc4 is q^(-3/2)")
def test_c2_haar_ramified():
    vals = {p: haar_constant(FieldParams.make(p, "ramified")).evaluate() for p in (3, 5, 7)}
    ok = all(abs(v - 1 / p) < 1e-12 for p, v in vals.items())
    record(2, "Haar ramified = q^-1", ok, "got q^-3/2")
    assert ok


# 3 ---------------------------------------------------------------------------

def test_c3_invariance():
    t0 = time.perf_counter()
    failures = []
    for p in PRIMES:
        for case in acceptance_cases(p):
            rep = TL.invariance_report(TL.build_phi(case))
            if not rep.ok:
                failures.append(case.label())
    elapsed = time.perf_counter() - t0
    record(3, "sweeps", not failures, f"{2 * 15} cases, failures {failures}")
    record(3, "runtime", elapsed < 300, f"{elapsed:.1f} s")
    assert not failures and elapsed < 300


# 4 ---------------------------------------------------------------------------

def test_c4_disjoint_summands():
    ok = all(TL.summand_overlaps(TL.build_phi(TL.Case.make("ramified", p, n))).disjoint
             for p in PRIMES for n in range(3))
    record(4, "summands disjoint", ok)
    assert ok


def test_c4_kprime():
    ok = True
    for p in (3, 5, 7):
        chk = TL.kprime_checks(FieldParams.make(p, "ramified"))
        ok &= chk["fourth_power_one"] and chk["modulus_error"] < 1e-9
    record(4, "k'^4 = 1, |k'| = 1", ok)
    assert ok


def test_c4_identity_boxes():
    ok = all(i.boxes_match for p in (3, 5, 7) for n in range(3)
             for i in TL.fourier_identities(TL.Case.make("ramified", p, n)).values())
    record(4, "Fourier identity supports", ok)
    assert ok


@pytest.mark.xfail(strict=True, reason="transform constants are q k' and q^(1-2N) k' up to sign")
def test_c4_identity_constants():
    ok = all(i.constants_match for p in (3, 5, 7) for n in range(3)
             for i in TL.fourier_identities(TL.Case.make("ramified", p, n)).values())
    record(4, "Fourier identity constants", ok, "displayed constants not reproduced")
    assert ok


# 5 ---------------------------------------------------------------------------

def test_c5_support_scans():
    bad = []
    points = 0
    for p in PRIMES:
        for case in acceptance_cases(p):
            rep = TL.scan_support(case)
            points += rep.count
            if not rep.ok:
                bad.append(case.label())
    record(5, "zero mismatches", not bad, f"{points} points")
    assert not bad


# 6 ---------------------------------------------------------------------------

def test_c6_cosets():
    ok = True
    for p in PRIMES:
        for N in range(1, 5):
            r = closure_scan("K_mod_Kl", N, p)
            ok &= r.count == p ** N + p ** (N - 1) and r.disjoint and r.closed
        for N in range(2, 5):
            r = closure_scan("K_mod_KT", N, p)
            ok &= r.count == (p + 1) ** 2 and r.disjoint and r.closed
    record(6, "counts, disjointness, closure", ok, "N <= 4")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_c7_closed_forms():
    ok = True
    for p in (3, 5, 7):
        P = FieldParams.make(p, "split")
        for a, b in itertools.product(range(3), repeat=2):
            v = TL.bessel_at_identity(TL.Case.make("split", p, n1=a, n2=b)).coefficient
            ok &= v == TL.gamma0_fraction(P, a) * TL.gamma0_fraction(P, b) and v != 0
        Pi = FieldParams.make(p, "inert")
        for n in range(3):
            v = TL.bessel_at_identity(TL.Case.make("inert", p, n)).coefficient
            ok &= v == TL.gamma0_fraction(Pi, n) and v != 0
        for n in range(3):
            case = TL.Case.make("ramified", p, n)
            for cd, c2 in itertools.product((1, -1), repeat=2):
                v = TL.bessel_at_identity(case, cd, c2).coefficient
                vol = Fraction(1, p + 1)
                if n > 0:
                    ok &= v == c2 * vol * (cd * (1 - Fraction(1, p)) + Fraction(1, p))
                else:
                    ok &= v == c2 * (cd * p + vol * (cd * (4 * p - 2) + p * p + p))
                ok &= v != 0
    ok &= TL.bessel_at_identity(TL.Case.make("ramified", 3, 0)).coefficient == Fraction(5, 2)
    record(7, "closed forms reproduced and nonzero", ok)
    assert ok


@pytest.mark.xfail(strict=True, reason="first-principles assembly gives q^2 chi(2 delta) vol(Gamma0)")
def test_c7_assembly_consistency():
    ok = all(TL.bessel_assembly(TL.Case.make("ramified", p, n)).coefficient ==
             TL.bessel_at_identity(TL.Case.make("ramified", p, n)).coefficient
             for p in (3, 5, 7) for n in range(3))
    record(7, "closed form equals first-principles assembly", ok, "assembly differs")
    assert ok


# 8 ---------------------------------------------------------------------------

def test_c8_unramified():
    ok = all(TL.bessel_at_identity(TL.Case.make("inert", p, 0)).coefficient == 1
             for p in (3, 5, 7))
    record(8, "coefficient exactly 1", ok)
    assert ok


# 9 ---------------------------------------------------------------------------

def test_c9_representation():
    worst = 0.0
    for p, kind in itertools.product((3, 5), KINDS):
        rep = O.representation_check(FieldParams.make(p, kind), words=100, seed=p)
        assert rep.words == 100
        worst = max(worst, rep.max_deviation)
    record(9, "100 words per case", worst < 1e-8, f"max deviation {worst:.1e}")
    assert worst < 1e-8


# 10 --------------------------------------------------------------------------

def test_c10_determinism(tmp_path):
    argv = ["full-report", "--p", "3", "--case", "ramified", "--n", "2", "--seed", "1"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(argv + ["--output", str(a)])
    run(argv + ["--output", str(b)])
    ok = a.read_bytes() == b.read_bytes() and json.loads(a.read_text())["command"] == "full-report"
    record(10, "byte-identical full-report", ok)
    assert ok
