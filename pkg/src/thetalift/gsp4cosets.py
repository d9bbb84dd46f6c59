"""Exact GSp(4) matrices, paramodular and Klingen subgroups, the subgroup T
and the coset decompositions used to build and check invariant vectors.

Conventions: J = [[0, I], [-I, 0]], g in GSp(4) iff g^t J g = lambda(g) J.
iota(g1, g2) places g1 on the coordinates (1, 3) and g2 on (2, 4).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .localfield import as_fraction, val_or_inf, valuation

Row = Tuple[Fraction, Fraction, Fraction, Fraction]
INF = float("inf")


class NotSymplecticError(ValueError):
    pass


_ZERO = Fraction(0)


def _mat_mul(a, b):
    # most entries are zero; skipping them is the main cost saving
    out = []
    for i in range(4):
        ai = [(k, x) for k, x in enumerate(a[i]) if x]
        row = []
        for j in range(4):
            acc = _ZERO
            for k, x in ai:
                y = b[k][j]
                if y:
                    acc = acc + x * y
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _transpose(a):
    return tuple(tuple(a[j][i] for j in range(4)) for i in range(4))


_J = tuple(tuple(Fraction(v) for v in row) for row in
           ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0)))


@dataclass(frozen=True)
class Gsp4Matrix:
    rows: Tuple[Row, Row, Row, Row]
    lam: Fraction

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> "Gsp4Matrix":
        r = tuple(tuple(as_fraction(x) for x in row) for row in rows)
        if len(r) != 4 or any(len(row) != 4 for row in r):
            raise NotSymplecticError("a 4x4 matrix is required")
        m = _mat_mul(_mat_mul(_transpose(r), _J), r)
        lam = m[0][2]
        if lam == 0 or any(m[i][j] != lam * _J[i][j] for i in range(4) for j in range(4)):
            raise NotSymplecticError("matrix is not a symplectic similitude")
        return cls(r, lam)  # type: ignore[arg-type]

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        return self.rows[ij[0]][ij[1]]

    def __matmul__(self, other: "Gsp4Matrix") -> "Gsp4Matrix":
        return Gsp4Matrix(_mat_mul(self.rows, other.rows), self.lam * other.lam)  # type: ignore[arg-type]

    def inverse(self) -> "Gsp4Matrix":
        # g^-1 = lambda^-1 J^-1 g^t J
        jinv = tuple(tuple(-x for x in row) for row in _J)
        m = _mat_mul(_mat_mul(jinv, _transpose(self.rows)), _J)
        inv = 1 / self.lam
        return Gsp4Matrix(tuple(tuple(x * inv for x in row) for row in m), inv)  # type: ignore[arg-type]

    def is_identity(self) -> bool:
        return all(self.rows[i][j] == (1 if i == j else 0) for i in range(4) for j in range(4))

    def to_json(self) -> list:
        return [[str(x) for x in row] for row in self.rows]

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.rows) + "]"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def identity() -> Gsp4Matrix:
    return Gsp4Matrix.of([[1 if i == j else 0 for j in range(4)] for i in range(4)])


def levi(a, lam=1) -> Gsp4Matrix:
    """[[A, 0], [0, lam A^-t]] for a 2x2 A = ((a1, a2), (a3, a4))."""
    (a1, a2), (a3, a4) = [[as_fraction(x) for x in row] for row in a]
    lam = as_fraction(lam)
    d = a1 * a4 - a2 * a3
    if d == 0:
        raise NotSymplecticError("singular Levi block")
    # lam A^-t = lam/d [[a4, -a3], [-a2, a1]]
    f = lam / d
    return Gsp4Matrix.of([[a1, a2, 0, 0], [a3, a4, 0, 0],
                          [0, 0, f * a4, -f * a3], [0, 0, -f * a2, f * a1]])


def unipotent(b1, b2, b3) -> Gsp4Matrix:
    return Gsp4Matrix.of([[1, 0, b1, b2], [0, 1, b2, b3], [0, 0, 1, 0], [0, 0, 0, 1]])


def lower_unipotent(c1, c2, c3) -> Gsp4Matrix:
    return Gsp4Matrix.of([[1, 0, 0, 0], [0, 1, 0, 0], [c1, c2, 1, 0], [c2, c3, 0, 1]])


def weyl_j() -> Gsp4Matrix:
    return Gsp4Matrix(_J, Fraction(1))  # type: ignore[arg-type]


def iota(g1, g2) -> Gsp4Matrix:
    """Embed a pair of 2x2 matrices with equal determinant."""
    (a, b), (c, d) = [[as_fraction(x) for x in row] for row in g1]
    (e, f), (g, h) = [[as_fraction(x) for x in row] for row in g2]
    if a * d - b * c != e * h - f * g:
        raise NotSymplecticError("iota needs det g1 = det g2")
    return Gsp4Matrix.of([[a, 0, b, 0], [0, e, 0, f], [c, 0, d, 0], [0, g, 0, h]])


def s2() -> Gsp4Matrix:
    return iota(((1, 0), (0, 1)), ((0, 1), (-1, 0)))


def t_n(p: int, N: int) -> Gsp4Matrix:
    w = Fraction(p) ** N
    return iota(((0, 1 / w), (-w, 0)), ((1, 0), (0, 1)))


def similitude_diag(lam) -> Gsp4Matrix:
    """diag(1, 1, lam, lam)."""
    lam = as_fraction(lam)
    return Gsp4Matrix.of([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, lam, 0], [0, 0, 0, lam]])


def scalar(z) -> Gsp4Matrix:
    z = as_fraction(z)
    return Gsp4Matrix.of([[z if i == j else 0 for j in range(4)] for i in range(4)])


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def paramodular_pattern(N: int) -> Tuple[Tuple[int, ...], ...]:
    return ((0, 0, -N, 0), (N, 0, 0, 0), (N, N, 0, N), (N, 0, 0, 0))


def klingen_pattern(N: int) -> Tuple[Tuple[int, ...], ...]:
    return ((0, 0, 0, 0), (N, 0, 0, 0), (N, N, 0, N), (N, 0, 0, 0))


def t_pattern(N: int) -> Tuple[Tuple[int, ...], ...]:
    """Valuation floors of the order containing T (a group for N >= 2)."""
    return ((0, 0, 1 - N, 0), (N, 0, 0, 1), (N, N - 1, 0, N), (N - 1, 0, 0, 0))


def _fits(g: Gsp4Matrix, pattern, p: int) -> bool:
    return all(val_or_inf(g.rows[i][j], p) >= pattern[i][j] for i in range(4) for j in range(4))


def _unit(x: Fraction, p: int) -> bool:
    return x != 0 and valuation(x, p) == 0


def in_paramodular(g: Gsp4Matrix, N: int, p: int) -> bool:
    return _unit(g.lam, p) and _fits(g, paramodular_pattern(N), p)


def in_klingen(g: Gsp4Matrix, N: int, p: int) -> bool:
    return _unit(g.lam, p) and _fits(g, klingen_pattern(N), p)


@dataclass(frozen=True)
class TFactorization:
    lower: Gsp4Matrix  # [[1, 0], [C, 1]]
    levi: Gsp4Matrix  # m(A)
    upper: Gsp4Matrix  # [[1, B], [0, 1]]


def _m2(g: Gsp4Matrix, r: int, c: int):
    return ((g.rows[r][c], g.rows[r][c + 1]), (g.rows[r + 1][c], g.rows[r + 1][c + 1]))


def _m2_mul(x, y):
    return ((x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
            (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]))


def _m2_inv(x):
    d = x[0][0] * x[1][1] - x[0][1] * x[1][0]
    return ((x[1][1] / d, -x[0][1] / d), (-x[1][0] / d, x[0][0] / d))


def t_factor(g: Gsp4Matrix, N: int, p: int) -> Optional[TFactorization]:
    """Write g = lower(C) m(A) upper(B) with the T generator domains, if possible.

    A in Gamma0(p^N), B in [p^(1-N), o; o, p], C in [p^N, p^(N-1); p^(N-1), o].
    """
    if g.lam != 1:
        return None
    a = _m2(g, 0, 0)
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if det == 0 or not _unit(det, p):
        return None
    ainv = _m2_inv(a)
    c = _m2_mul(_m2(g, 2, 0), ainv)
    b = _m2_mul(ainv, _m2(g, 0, 2))
    v = lambda x: val_or_inf(x, p)
    if not (v(a[1][0]) >= N and v(a[0][0]) >= 0 and v(a[0][1]) >= 0 and v(a[1][1]) >= 0):
        return None
    if not (v(b[0][0]) >= 1 - N and v(b[0][1]) >= 0 and v(b[1][1]) >= 1 and b[0][1] == b[1][0]):
        return None
    if not (v(c[0][0]) >= N and v(c[0][1]) >= N - 1 and v(c[1][1]) >= 0 and c[0][1] == c[1][0]):
        return None
    # for symplectic g the lower-right block is forced: d = c a^-1 b + a^-t
    low = lower_unipotent(c[0][0], c[0][1], c[1][1])
    mid = levi(a)
    up = unipotent(b[0][0], b[0][1], b[1][1])
    return TFactorization(low, mid, up)


def in_t(g: Gsp4Matrix, N: int, p: int) -> bool:
    """Membership in T, decided by an explicit factorization into its generators.

    For N >= 2 the pattern order has unit diagonal modulo its radical, so
    every element of it factors; below that the test is not a decision.
    """
    if N < 2:
        raise ValueError("the T membership test needs N >= 2")
    if g.lam != 1 or not _fits(g, t_pattern(N), p):
        return False
    return t_factor(g, N, p) is not None


# ---------------------------------------------------------------------------
# Iwahori factorization of Klingen elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IwahoriFactors:
    upper: Gsp4Matrix
    levi: Gsp4Matrix
    lower: Gsp4Matrix
    params: dict


def klingen_upper(a, b, c) -> Gsp4Matrix:
    return Gsp4Matrix.of([[1, a, c, b], [0, 1, b, 0], [0, 0, 1, 0], [0, 0, -a, 1]])


def klingen_levi(u, s, lam=1) -> Gsp4Matrix:
    (s1, s2_), (s3, s4) = s
    u, lam = as_fraction(u), as_fraction(lam)
    return Gsp4Matrix.of([[u, 0, 0, 0], [0, s1, 0, s2_], [0, 0, lam / u, 0], [0, s3, 0, s4]])


def klingen_lower(p: int, N: int, a1, b1, c1) -> Gsp4Matrix:
    w = Fraction(p) ** N
    a1, b1, c1 = (as_fraction(x) for x in (a1, b1, c1))
    return Gsp4Matrix.of([[1, 0, 0, 0], [w * a1, 1, 0, 0],
                          [w * c1, w * b1, 1, -w * a1], [w * b1, 0, 0, 1]])


def iwahori_factor(k: Gsp4Matrix, N: int, p: int) -> IwahoriFactors:
    """k = upper(a, b, c) * levi(u, s) * lower(a', b', c') for k in Kl(p^N)."""
    if not in_klingen(k, N, p):
        raise ValueError("element is not in the Klingen subgroup")
    r3 = k.rows[2]
    k33 = r3[2]
    if not _unit(k33, p):
        raise ValueError("factorization failed: (3,3) entry is not a unit")
    w = Fraction(p) ** N
    c1, b1, a1 = r3[0] / k33 / w, r3[1] / k33 / w, -r3[3] / k33 / w
    low = klingen_lower(p, N, a1, b1, c1)
    par = k @ low.inverse()
    u = par.rows[0][0]
    s = ((par.rows[1][1], par.rows[1][3]), (par.rows[3][1], par.rows[3][3]))
    mid = klingen_levi(u, s, k.lam)
    up = par @ mid.inverse()
    a, b, c = up.rows[0][1], up.rows[0][3], up.rows[0][2]
    if klingen_upper(a, b, c) != up or up @ mid @ low != k:
        raise ValueError("factorization failed")
    for x in (a, b, c, a1, b1, c1):
        if val_or_inf(x, p) < 0:
            raise ValueError("factorization failed: non-integral parameter")
    return IwahoriFactors(up, mid, low, {"a": a, "b": b, "c": c, "u": u, "s": s,
                                         "a1": a1, "b1": b1, "c1": c1})


# ---------------------------------------------------------------------------
# Generators and coset lists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorInstance:
    family: str  # "levi", "unipotent", "s2", "tN"
    matrix: Gsp4Matrix
    params: dict


def _units(p: int) -> List[int]:
    return list(range(1, p))


def generators_k(N: int, p: int, with_similitude: bool = True) -> List[GeneratorInstance]:
    """Instances of the four generator families of K(p^N).

    Every parameter ranges over its domain modulo one digit beyond its
    valuation floor: a1, a4 over unit residues, a2 over o/p, a3 over
    p^N/p^(N+1), b_i over o/p.  The similitude lambda is swept with A = 1.
    """
    w = Fraction(p) ** N
    out: List[GeneratorInstance] = []
    for a1, a4, a2, r3 in itertools.product(_units(p), _units(p), range(p), range(p)):
        a3 = w * r3
        if (a1 * a4 - a2 * a3) % p == 0:
            continue  # only reachable when N = 0
        out.append(GeneratorInstance("levi", levi(((a1, a2), (a3, a4))),
                                     {"A": [[a1, a2], [str(a3), a4]], "lambda": 1}))
    if with_similitude:
        for lam in _units(p)[1:]:
            out.append(GeneratorInstance("levi", levi(((1, 0), (0, 1)), lam),
                                         {"A": [[1, 0], [0, 1]], "lambda": lam}))
    for b1, b2, b3 in itertools.product(range(p), repeat=3):
        out.append(GeneratorInstance("unipotent", unipotent(Fraction(b1) / w, b2, b3),
                                     {"b": [b1, b2, b3]}))
    out.append(GeneratorInstance("s2", s2(), {}))
    out.append(GeneratorInstance("tN", t_n(p, N), {"N": N}))
    return out


def primitive_root(p: int) -> int:
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in range(2, p) if (p - 1) % r == 0 and
               all(r % d for d in range(2, r))):
            return g
    return 1


def generators_k_minimal(N: int, p: int, with_similitude: bool = True) -> List[GeneratorInstance]:
    """A generating set of K(p^N): one instance per additive or cyclic direction."""
    w = Fraction(p) ** N
    g = primitive_root(p)
    out = [GeneratorInstance("levi", levi(a), {"A": [[str(x) for x in r] for r in a], "lambda": 1})
           for a in (((g, 0), (0, 1)), ((1, 0), (0, g)), ((1, 1), (0, 1)), ((1, 0), (w, 1)))]
    if with_similitude and p > 2:
        out.append(GeneratorInstance("levi", levi(((1, 0), (0, 1)), g),
                                     {"A": [[1, 0], [0, 1]], "lambda": g}))
    for b in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        out.append(GeneratorInstance("unipotent", unipotent(Fraction(b[0]) / w, b[1], b[2]),
                                     {"b": list(b)}))
    out.append(GeneratorInstance("s2", s2(), {}))
    out.append(GeneratorInstance("tN", t_n(p, N), {"N": N}))
    return out


def generators_klingen(N: int, p: int) -> List[GeneratorInstance]:
    """Instances of the Iwahori factors generating Kl(p^N) with lambda = 1."""
    out: List[GeneratorInstance] = []
    for a, b, c in itertools.product(range(p), repeat=3):
        out.append(GeneratorInstance("kl_upper", klingen_upper(a, b, c), {"a": a, "b": b, "c": c}))
    for u in _units(p):
        out.append(GeneratorInstance("kl_levi", klingen_levi(u, ((1, 0), (0, 1))), {"u": u}))
    for x in range(p):
        out.append(GeneratorInstance("kl_levi", klingen_levi(1, ((1, x), (0, 1))), {"s": [[1, x], [0, 1]]}))
        out.append(GeneratorInstance("kl_levi", klingen_levi(1, ((1, 0), (x, 1))), {"s": [[1, 0], [x, 1]]}))
    for x in _units(p):
        out.append(GeneratorInstance("kl_levi", klingen_levi(1, ((x, 0), (0, Fraction(1, x)))),
                                     {"s": [[x, 0], [0, f"1/{x}"]]}))
    for a1, b1, c1 in itertools.product(range(p), repeat=3):
        out.append(GeneratorInstance("kl_lower", klingen_lower(p, N, a1, b1, c1),
                                     {"a1": a1, "b1": b1, "c1": c1}))
    return out


@dataclass
class CosetList:
    kind: str
    N: int
    p: int
    representatives: List[Gsp4Matrix]
    labels: List[str]

    def __len__(self) -> int:
        return len(self.representatives)

    def to_json(self) -> dict:
        return {"kind": self.kind, "N": self.N, "p": self.p, "count": len(self),
                "representatives": [{"label": l, "matrix": g.to_json()}
                                    for l, g in zip(self.labels, self.representatives)]}


COSET_KINDS = ("K_mod_Kl", "Kl_mod_KlT", "K_mod_KT")


def cosets(kind: str, N: int, p: int) -> CosetList:
    w = Fraction(p) ** N
    reps: List[Gsp4Matrix] = []
    labels: List[str] = []
    if kind == "K_mod_Kl":
        if N < 1:
            raise ValueError("K_mod_Kl needs N >= 1")
        for u in range(p ** N):
            reps.append(unipotent(Fraction(u) / w, 0, 0))
            labels.append(f"upper13({u}/p^{N})")
        tn = t_n(p, N)
        for u in range(p ** (N - 1)):
            reps.append(tn @ unipotent(Fraction(u) * p / w, 0, 0))
            labels.append(f"tN*upper13({u}/p^{N - 1})")
    elif kind == "Kl_mod_KlT":
        reps.append(s2())
        labels.append("s2")
        for v in range(p):
            reps.append(unipotent(0, 0, v))
            labels.append(f"upper24({v})")
    elif kind == "K_mod_KT":
        s, tn = s2(), t_n(p, N)
        for u, v in itertools.product(range(p), repeat=2):
            reps.append(unipotent(Fraction(u) / w, 0, v))
            labels.append(f"upper({u}/p^{N},{v})")
        for u in range(p):
            reps.append(s @ unipotent(Fraction(u) / w, 0, 0))
            labels.append(f"s2*upper13({u}/p^{N})")
        for v in range(p):
            reps.append(tn @ unipotent(0, 0, v))
            labels.append(f"tN*upper24({v})")
        reps.append(tn @ s)
        labels.append("tN*s2")
    else:
        raise ValueError(f"unknown coset kind {kind!r}")
    return CosetList(kind, N, p, reps, labels)


def subgroup_test(kind: str, N: int, p: int) -> Callable[[Gsp4Matrix], bool]:
    if kind == "K_mod_Kl":
        return lambda g: in_klingen(g, N, p)
    # T-based quotients: T contains only lambda = 1 elements
    return lambda g: in_t(g, N, p)


def ambient_generators(kind: str, N: int, p: int, full: bool = False) -> List[GeneratorInstance]:
    if kind == "Kl_mod_KlT":
        return generators_klingen(N, p)
    sim = kind == "K_mod_Kl"
    if full:
        return generators_k(N, p, with_similitude=sim)
    return generators_k_minimal(N, p, with_similitude=sim)


def _scaled(g: Gsp4Matrix) -> Tuple[Tuple[Tuple[int, ...], ...], int]:
    """Integer rows and the common denominator of a matrix."""
    den = math.lcm(*(x.denominator for row in g.rows for x in row))
    return tuple(tuple(int(x * den) for x in row) for row in g.rows), den


def _vp(n: int, p: int) -> float:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _klingen_product(N: int, p: int) -> Callable:
    """in_klingen(a @ b) on scaled integer matrices, stopping at the first failure."""
    pattern = klingen_pattern(N)
    # the (0, 2) floor separates Kl from K, so it usually decides first
    order = [(0, 2)] + [(i, j) for i in range(4) for j in range(4) if (i, j) != (0, 2)]

    def test(a, b, lam) -> bool:
        (ra, da), (rb, db) = a, b
        if not _unit(lam, p):
            return False
        shift = _vp(da * db, p)
        for i, j in order:
            x = ra[i][0] * rb[0][j] + ra[i][1] * rb[1][j] + ra[i][2] * rb[2][j] + ra[i][3] * rb[3][j]
            if _vp(x, p) - shift < pattern[i][j]:
                return False
        return True
    return test


class CosetLocator:
    """Finds the cosets of a list containing a given element."""

    def __init__(self, cl: CosetList, member: Callable[[Gsp4Matrix], bool]):
        self.cl = cl
        self.member = member
        self.inverses = [r.inverse() for r in cl.representatives]
        self._fast = None
        if cl.kind == "K_mod_Kl":
            self._fast = _klingen_product(cl.N, cl.p)
            self._scaled = [_scaled(r) for r in self.inverses]

    def hits(self, g: Gsp4Matrix, first: bool = False) -> List[int]:
        out = []
        if self._fast is not None:
            gs = _scaled(g)
            tests = (self._fast(s, gs, r.lam * g.lam) for s, r in zip(self._scaled, self.inverses))
        else:
            tests = (self.member(r @ g) for r in self.inverses)
        for i, ok in enumerate(tests):
            if ok:
                out.append(i)
                if first:
                    break
        return out


def locate(g: Gsp4Matrix, cl: CosetList, member: Callable[[Gsp4Matrix], bool],
           first: bool = False) -> List[int]:
    return CosetLocator(cl, member).hits(g, first)


@dataclass
class ClosureReport:
    kind: str
    N: int
    p: int
    count: int
    disjoint: bool
    closed: bool
    checked: int
    failures: List[str]

    def to_json(self) -> dict:
        return {"kind": self.kind, "N": self.N, "p": self.p, "count": self.count,
                "disjoint": self.disjoint, "closed": self.closed, "checked": self.checked,
                "failures": self.failures[:20]}


def closure_scan(kind: str, N: int, p: int, full: bool = False,
                 coset_list: Optional[CosetList] = None) -> ClosureReport:
    """Check that the coset list is disjoint and stable under the generators.

    Stability under left multiplication by a generating set, together with
    the identity coset being present, gives completeness.  The T quotients
    are taken inside the lambda = 1 part, where T lives.  ``full`` sweeps
    every residue instance of the generator families instead.  An explicit
    ``coset_list`` replaces the built-in representatives.
    """
    cl = coset_list or cosets(kind, N, p)
    member = subgroup_test(kind, N, p)
    loc = CosetLocator(cl, member)
    failures: List[str] = []
    disjoint = True
    for j, r in enumerate(cl.representatives):
        others = [i for i in loc.hits(r) if i != j]
        if others:
            disjoint = False
            failures.extend(f"{cl.labels[i]} ~ {cl.labels[j]}" for i in others if i < j)
    if not loc.hits(identity()):
        failures.append("identity coset missing")
    closed = True
    checked = 0
    for gen in ambient_generators(kind, N, p, full):
        for i, r in enumerate(cl.representatives):
            # disjointness is checked above, so the first hit is the only one
            hits = loc.hits(gen.matrix @ r, first=disjoint)
            checked += 1
            if len(hits) != 1:
                closed = False
                failures.append(f"{gen.family}{gen.params} * {cl.labels[i]} -> {len(hits)} cosets")
    return ClosureReport(kind, N, p, len(cl), disjoint, closed and not failures, checked, failures)
