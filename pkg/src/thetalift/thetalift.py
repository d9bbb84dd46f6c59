"""Explicit Schwartz functions, paramodular invariance, supports and Bessel values.

Conventions: the Whittaker newform W is never evaluated.  Only three facts
about it enter, H-invariance, Gamma0-invariance and the torus law of its
zeta integral, so B(1, phi, W, s) is a rational multiple of the formal Z.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .gsp4cosets import (CosetLocator, Gsp4Matrix, cosets, generators_k, in_t, levi,
                         lower_unipotent, s2, t_factor, t_n, unipotent)
from .localfield import ExtElement, FieldParams, legendre, val_or_inf, valuation
from .quadspace import GsoElement, base_points, m2_det, m2_inv, m2_mul, mat2
from .scalar import GaussRat, SymbolicScalar
from .schwartz import (Ideal, SchwartzFunction, Shell, e_ideal, equal, evaluate, scalar,
                       tensor, to_json)
from .weilrep import OracleOnly, kprime, unipotent_family_sum, weil_apply

KINDS = ("split", "inert", "ramified")


class UnsupportedCase(ValueError):
    """Configuration outside the explicit constructions."""


class NotComputable(ValueError):
    """The formal model of W does not determine the requested quantity."""


# ---------------------------------------------------------------------------
# Cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Case:
    kind: str
    p: int
    levels: Tuple[int, ...]

    @classmethod
    def make(cls, kind: str, p: int, n: Optional[int] = None, n1: Optional[int] = None,
             n2: Optional[int] = None) -> "Case":
        if kind not in KINDS:
            raise UnsupportedCase(f"unknown case {kind!r}")
        if kind == "split":
            levels = (n1 or 0, n2 or 0) if n is None else (n, n)
        else:
            if n is None:
                raise UnsupportedCase(f"{kind} needs a level n")
            levels = (n,)
        if any(l < 0 for l in levels):
            raise UnsupportedCase("levels must be >= 0")
        case = cls(kind, p, tuple(levels))
        case.params  # validates p
        return case

    @property
    def params(self) -> FieldParams:
        return _params(self.p, self.kind)

    @property
    def n(self) -> int:
        return max(self.levels)

    @property
    def N(self) -> int:
        if self.kind == "split":
            return sum(self.levels)
        if self.kind == "inert":
            return 2 * self.levels[0]
        return self.levels[0] + 2

    @property
    def q(self) -> int:
        return self.p

    def label(self) -> str:
        lv = ",".join(str(l) for l in self.levels)
        return f"{self.kind}({lv}) p={self.p}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p, "levels": list(self.levels), "N": self.N}


@lru_cache(maxsize=None)
def _params(p: int, kind: str) -> FieldParams:
    try:
        return FieldParams.make(p, kind)
    except ValueError as exc:
        raise UnsupportedCase(str(exc)) from exc


@dataclass(frozen=True)
class WhittakerSymbol:
    """The newform W of the case: only its level and its transformation laws."""

    case: Case

    @property
    def level(self) -> Tuple[int, ...]:
        return self.case.levels


# ---------------------------------------------------------------------------
# The explicit functions
# ---------------------------------------------------------------------------


@dataclass
class PhiBundle:
    case: Case
    phi: SchwartzFunction
    factors: Tuple[SchwartzFunction, SchwartzFunction]
    tilde: Optional[SchwartzFunction] = None
    summands: Dict[int, SchwartzFunction] = field(default_factory=dict)
    display: Dict[int, SchwartzFunction] = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {"case": self.case.to_json(), "phi": to_json(self.phi),
               "factors": [to_json(f) for f in self.factors]}
        if self.tilde is not None:
            doc["tilde"] = to_json(self.tilde)
            doc["summands"] = {str(k): to_json(v) for k, v in sorted(self.summands.items())}
        return doc


def gamma_symbol(params: FieldParams) -> SymbolicScalar:
    return scalar(params, 1, gamma=1)


def summand_constants(params: FieldParams) -> Dict[int, SymbolicScalar]:
    """Constants in front of the four ramified summands, as the engine produces them."""
    q = params.q
    gk = gamma_symbol(params) * kprime(params)
    base = scalar(params, q * q)
    return {1: base, 2: base * gk, 3: base * gk, 4: base * gk * gk}


def display_constants(params: FieldParams) -> Dict[int, SymbolicScalar]:
    """Constants in front of the four ramified summands in the closed-form display."""
    q = params.q
    return {1: scalar(params, q * q), 2: scalar(params, q), 3: scalar(params, q),
            4: scalar(params, 1)}


def _ramified_display(params: FieldParams, n: int) -> Dict[int, SchwartzFunction]:
    """The four summands written as boxes, with the displayed constants."""
    N = n + 2
    box = lambda sets, tw=(), cons=(), c=1: SchwartzFunction.box(params, sets, tw, c, cons)
    phi1 = [*e_ideal(params, n + 1), Ideal(0), Shell(n)]
    phi2 = [*e_ideal(params, -1), Ideal(-1), Shell(-1)]
    # [P^(n+2), pi_E o^x; P^(2n+3), P^(n+2)] and [o_E, pi_E^-1 o^x; P, o_E]
    x_small = [*e_ideal(params, n + 2), Shell(0), Ideal(n + 1)]
    y_small = [*e_ideal(params, 0), Shell(-1), Ideal(0)]
    c = display_constants(params)
    return {
        1: box(phi1 + phi2, (3, 7), (("xx", N), ("yy", 0)), c[1]),
        2: box(phi1 + y_small, (3, 6), (("xx", N),), c[2]),
        3: box(x_small + phi2, (2, 7), (("yy", 0),), c[3]),
        4: box(x_small + y_small, (2, 6), (), c[4]),
    }


def build_phi(case: Case) -> PhiBundle:
    P = case.params
    N = case.N
    box = lambda sets, tw=(): SchwartzFunction.box(P, sets, tw)
    if case.kind == "split":
        n1, n2 = case.levels
        f1 = box([Ideal(n2), Ideal(0), Ideal(N), Ideal(n1)])
        f2 = box([Ideal(0)] * 4)
        return PhiBundle(case, tensor(f1, f2), (f1, f2))
    if case.kind == "inert":
        n = case.levels[0]
        f1 = box([Ideal(n), Ideal(n), Ideal(0), Ideal(N)])
        f2 = box([Ideal(0)] * 4)
        return PhiBundle(case, tensor(f1, f2), (f1, f2))
    n = case.levels[0]
    f1 = box([*e_ideal(P, n + 1), Ideal(0), Shell(n)], (3,))
    f2 = box([*e_ideal(P, -1), Ideal(-1), Shell(-1)], (3,))
    tilde = tensor(f1, f2)
    wN = Fraction(P.p) ** (-N)
    xx = unipotent_family_sum(tilde, "xx", wN)
    summands = {
        1: unipotent_family_sum(xx, "yy", 1),
        2: weil_apply(s2(), None, xx),
        3: weil_apply(t_n(P.p, N), None, unipotent_family_sum(tilde, "yy", 1)),
        4: weil_apply(t_n(P.p, N) @ s2(), None, tilde),
    }
    phi = summands[1] + summands[2] + summands[3] + summands[4]
    return PhiBundle(case, phi, (f1, f2), tilde, summands, _ramified_display(P, n))


def summand_structure(bundle: PhiBundle) -> Dict[int, dict]:
    """Compare each engine summand with its displayed box after fixing the constant.

    Returns per summand whether the boxes agree once the constant is the
    engine one, and whether the displayed constant itself agrees.
    """
    P = bundle.case.params
    eng, disp = summand_constants(P), display_constants(P)
    out = {}
    for i in range(1, 5):
        rescaled = bundle.display[i].scale(eng[i] / disp[i])
        out[i] = {
            "boxes_match": bool(equal(bundle.summands[i], rescaled)),
            "constant_engine": str(eng[i]),
            "constant_display": str(disp[i]),
            "constants_match": eng[i] == disp[i],
        }
    return out


# ---------------------------------------------------------------------------
# Companions in GSO(X)
# ---------------------------------------------------------------------------


def norm_preimage(params: FieldParams, lam, bound: int = 60) -> Optional[ExtElement]:
    """A unit u of E with N(u) = lam exactly, searched among small rationals."""
    lam = Fraction(lam)
    d = params.delta
    p = params.p
    for z in range(1, bound):
        if z % p == 0:
            continue
        for y in range(0, bound):
            s = lam * z * z + d * y * y
            if s < 0:
                continue
            r = _rational_sqrt(s)
            if r is not None:
                u = ExtElement.of(params, r / z, Fraction(y, z))
                if u.norm() == lam:
                    return u
    return None


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    import math
    a, b = x.numerator, x.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def companion(case: Case, lam) -> Optional[GsoElement]:
    """An element of GSO(X) with similitude lam fixing the explicit phi.

    Returns None when lam is not a similitude of GSO(X) (ramified non-norms).
    """
    P = case.params
    lam = Fraction(lam)
    if case.kind == "split":
        return GsoElement.split(P, mat2(lam, 0, 0, 1), mat2(1, 0, 0, 1))
    u = norm_preimage(P, lam)
    if u is None:
        return None
    one = ExtElement.of(P, 1)
    zero = ExtElement.of(P, 0)
    return GsoElement.nonsplit(P, 1, ((u, zero), (zero, one)))


# ---------------------------------------------------------------------------
# Invariance
# ---------------------------------------------------------------------------


@dataclass
class FamilyVerdict:
    family: str
    target: str
    sweep: int
    passed: int
    excluded: int = 0
    route: str = "direct"
    residue: List[str] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed + self.excluded == self.sweep and not self.failures

    def to_json(self) -> dict:
        return {"family": self.family, "target": self.target, "sweep": self.sweep,
                "passed": self.passed, "excluded": self.excluded, "route": self.route,
                "verdict": "pass" if self.ok else "fail", "gamma_residue": self.residue,
                "failures": self.failures[:10]}


@dataclass
class InvarianceReport:
    case: Case
    families: List[FamilyVerdict]

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.families)

    def to_json(self) -> dict:
        return {"case": self.case.to_json(), "ok": self.ok,
                "families": [f.to_json() for f in self.families]}


def t_generators(N: int, p: int) -> List[Tuple[str, Gsp4Matrix]]:
    """Generators of T: Levi Gamma0(p^N), upper B and lower C in their domains."""
    w = Fraction(p) ** N
    out = []
    for a1, a4, a2, r3 in itertools.product(range(1, p), range(1, p), range(p), range(p)):
        out.append(("levi", levi(((a1, a2), (w * r3, a4)))))
    for r1, r2, r3 in itertools.product(range(p), repeat=3):
        out.append(("upper", unipotent(Fraction(r1) * p / w, r2, r3 * p)))
    for r1, r2, r3 in itertools.product(range(p), repeat=3):
        out.append(("lower", lower_unipotent(w * r1, w / p * r2, r3)))
    return out


def _residue(diff: SchwartzFunction) -> List[str]:
    exps = set()
    for t in diff.terms:
        exps |= t.coeff.gamma_exponents()
    return [f"gamma^{e}" for e in sorted(exps) if e]


def resolve_gamma(f: SchwartzFunction) -> SchwartzFunction:
    """Substitute the resolved Weil index for the gamma symbol in every coefficient."""
    P = f.params
    k, _ = exact_constants(P.p, P.kind)
    powers = {g: scalar(P, _I_POW[(k * g) % 4]) for g in range(4)}
    return SchwartzFunction(P, f.dim, [t.with_coeff(t.coeff.substitute_gamma(powers))
                                       for t in f.terms])


def fixes(image: SchwartzFunction, f: SchwartzFunction) -> bool:
    """image == f once gamma takes its resolved value."""
    if image == f:
        return True
    return bool(equal(resolve_gamma(image), resolve_gamma(f)))


def t_apply(t: Gsp4Matrix, case: Case, f: SchwartzFunction) -> SchwartzFunction:
    """omega(t) f for t in T, through its lower-Levi-upper factorization."""
    fac = t_factor(t, case.N, case.p)
    if fac is None:
        raise ValueError("element is not in T")
    out = weil_apply(fac.upper, None, f)
    out = weil_apply(fac.levi, None, out)
    return weil_apply(fac.lower, None, out)


class _Structural:
    """Certify omega(k) phi = phi through phi = sum_i omega(g_i) phi_tilde.

    For each coset representative g_i the element g_j^-1 k g_i lies in T for
    a unique j, and phi_tilde is checked to be fixed by it directly.
    """

    def __init__(self, case: Case, tilde: SchwartzFunction):
        self.case = case
        self.tilde = tilde
        self.cl = cosets("K_mod_KT", case.N, case.p)
        self.loc = CosetLocator(self.cl, lambda g: in_t(g, case.N, case.p))
        self.invs = self.loc.inverses
        self.cache: Dict[str, bool] = {}

    def check(self, k: Gsp4Matrix) -> Tuple[bool, str]:
        seen = set()
        for i, gi in enumerate(self.cl.representatives):
            hits = self.loc.hits(k @ gi, first=True)
            if not hits:
                return False, f"no coset for {self.cl.labels[i]}"
            j = hits[0]
            seen.add(j)
            t = self.invs[j] @ k @ gi
            key = str(t.to_json())
            if key not in self.cache:
                self.cache[key] = fixes(t_apply(t, self.case, self.tilde), self.tilde)
            if not self.cache[key]:
                return False, f"tilde not fixed by g_{j}^-1 k g_{i}"
        if len(seen) != len(self.cl):
            return False, "coset map is not a permutation"
        return True, ""


def invariance_report(bundle: PhiBundle, families: Optional[Sequence[str]] = None) -> InvarianceReport:
    """Sweep the generator families of K(p^N) against phi (and T against phi_tilde)."""
    case = bundle.case
    N, p = case.N, case.p
    phi = bundle.phi
    verdicts: Dict[str, FamilyVerdict] = {}
    structural: Optional[_Structural] = None
    for inst in generators_k(N, p, with_similitude=True):
        if families and inst.family not in families:
            continue
        v = verdicts.setdefault(inst.family, FamilyVerdict(inst.family, "phi", 0, 0))
        v.sweep += 1
        g = inst.matrix
        lam = g.lam
        h = None
        if lam != 1:
            h = companion(case, lam)
            if h is None:
                v.excluded += 1
                continue
        try:
            out = weil_apply(g, h, phi)
        except OracleOnly:
            if bundle.tilde is None or lam != 1:
                v.failures.append(f"unsupported element {inst.params}")
                continue
            structural = structural or _Structural(case, bundle.tilde)
            ok, why = structural.check(g)
            v.route = "cosets"
            if ok:
                v.passed += 1
            else:
                v.failures.append(f"{inst.params}: {why}")
            continue
        for r in _residue(out - phi):
            if r not in v.residue:
                v.residue.append(r)
        if fixes(out, phi):
            v.passed += 1
        else:
            v.failures.append(f"{inst.params}: not fixed")
    out_list = list(verdicts.values())
    if bundle.tilde is not None and (not families or "T" in families):
        tv = FamilyVerdict("T", "phi_tilde", 0, 0)
        for name, g in t_generators(N, p):
            tv.sweep += 1
            try:
                res = weil_apply(g, None, bundle.tilde)
            except OracleOnly:
                tv.failures.append(f"{name} {g.to_json()}: unsupported element")
                continue
            tv.residue.extend(r for r in _residue(res - bundle.tilde) if r not in tv.residue)
            if fixes(res, bundle.tilde):
                tv.passed += 1
            else:
                tv.failures.append(f"{name} {g.to_json()}")
        out_list.append(tv)
    return InvarianceReport(case, out_list)


# ---------------------------------------------------------------------------
# Supports
# ---------------------------------------------------------------------------


def _pi_e(params: FieldParams) -> ExtElement:
    if params.kind == "ramified":
        return ExtElement.of(params, 0, 1)
    return ExtElement.of(params, params.p)


def _ve(x: ExtElement) -> float:
    return float("inf") if x.is_zero() else x.valuation()


def _ramified_family(case: Case, h: GsoElement) -> Optional[str]:
    """Closed form: normalize t to a unit, then read the Gamma0 block pattern.

    The family letter refers to M = A''^-1 where A'' is the normalized block,
    the matrix through which h^-1 acts on the base points.
    """
    n = case.levels[0]
    p = case.p
    vt = valuation(h.t, p)
    (a, b), (c, d) = h.g1
    va, vb, vc, vd = (_ve(e) - vt for e in (a, b, c, d))
    if va < 0 or vb < 0 or vd < 0 or vc < n:
        return None
    # M = adj(A'')/det: lower-left ~ c'', lower-right ~ a''
    if n == 0:
        if vc == 0:
            return "a" if va == 0 else "b"
        return "c"
    return "a" if vc == n else "c"


def _inert_closed(case: Case, h: GsoElement) -> bool:
    n = case.levels[0]
    vt = valuation(h.t, case.p)
    if vt % 2:
        return False
    k = vt // 2
    (a, b), (c, d) = h.g1
    va, vb, vc, vd = (_ve(e) - k for e in (a, b, c, d))
    return va >= 0 and vb >= 0 and vd >= 0 and vc >= n


def _split_closed(case: Case, h: GsoElement) -> bool:
    n1, n2 = case.levels
    p = case.p
    v = lambda x: val_or_inf(x, p)
    (a1, b1), (c1, d1) = h.g1
    (a2, b2), (c2, d2) = h.g2
    D = -valuation(m2_det(h.g1), p)
    lo_a, hi_a = -min(v(a1), v(b1)), min(v(a2), v(b2))
    lo_b, hi_b = max(n1 - v(c1), -v(d1)), min(v(c2) - n2, v(d2))
    return lo_a <= hi_a and lo_b <= hi_b and lo_a + lo_b <= D <= hi_a + hi_b


def closed_form_class(case: Case, h: GsoElement) -> str:
    if case.kind == "split":
        return "support" if _split_closed(case, h) else "outside"
    if case.kind == "inert":
        return "support" if _inert_closed(case, h) else "outside"
    fam = _ramified_family(case, h)
    return f"family ({fam})" if fam else "outside"


_FAMILY_OF_SUMMAND = {1: "a", 2: "b", 3: "c", 4: "d"}


def direct_class(bundle: PhiBundle, h: GsoElement) -> str:
    x1, x2 = base_points(bundle.case.params)
    hinv = h.inverse()
    pt = (hinv.apply(x1), hinv.apply(x2))
    if bundle.tilde is None:
        return "support" if not evaluate(bundle.phi, pt).is_zero() else "outside"
    hits = [i for i in range(1, 5) if not evaluate(bundle.summands[i], pt).is_zero()]
    if not hits:
        return "outside"
    if len(hits) > 1:
        return "overlap " + ",".join(_FAMILY_OF_SUMMAND[i] for i in hits)
    return f"family ({_FAMILY_OF_SUMMAND[hits[0]]})"


@dataclass
class SupportClass:
    closed: str
    direct: str

    @property
    def agree(self) -> bool:
        return self.closed == self.direct

    def to_json(self) -> dict:
        return {"closed": self.closed, "direct": self.direct, "agree": self.agree}


class SupportMismatch(AssertionError):
    """Closed form and direct membership disagree."""


def classify_support(h: GsoElement, case: Case, bundle: Optional[PhiBundle] = None,
                     strict: bool = True) -> SupportClass:
    if not h.in_so():
        raise ValueError("classify_support needs h in SO(X)")
    bundle = bundle or build_phi(case)
    out = SupportClass(closed_form_class(case, h), direct_class(bundle, h))
    if strict and not out.agree:
        raise SupportMismatch(f"{case.label()}: closed {out.closed} vs direct {out.direct}")
    return out


def _to_so_nonsplit(params: FieldParams, A, sign: int) -> GsoElement:
    """rho(t, A diag(1, conj det A)) with t = sign * N(det A) lies in SO(X)."""
    d = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    one = ExtElement.of(params, 1)
    zero = ExtElement.of(params, 0)
    adj = m2_mul(A, ((one, zero), (zero, d.conj())))
    return GsoElement.nonsplit(params, sign * d.norm(), adj)


def _k_grid(params: FieldParams, depth: int, residues: Sequence) -> List[tuple]:
    """I, w and elementary unipotents with entries pi^m r, m in [0, depth)."""
    if params.split:
        one, zero, pi = Fraction(1), Fraction(0), Fraction(params.p)
        mk = lambda x: x
    else:
        one, zero, pi = ExtElement.of(params, 1), ExtElement.of(params, 0), _pi_e(params)
        mk = lambda x: x if isinstance(x, ExtElement) else ExtElement.of(params, x)
    out = [((one, zero), (zero, one)), ((zero, one), (-one, zero))]
    for m in range(depth):
        for r in residues:
            x = mk(r) * (pi ** m if params.split else _pow(pi, m))
            out.append(((one, zero), (x, one)))
            out.append(((one, x), (zero, one)))
    return out


def _pow(x: ExtElement, m: int) -> ExtElement:
    out = ExtElement.of(x.params, 1)
    base = x if m >= 0 else x.inverse()
    for _ in range(abs(m)):
        out = out * base
    return out


def nonresidue(p: int) -> int:
    return next(a for a in range(2, p) if legendre(a, p) == -1)


def support_grid(case: Case, depth: Optional[int] = None) -> List[GsoElement]:
    """The stated scan grid of SO(X) elements.

    Split: rho(diag(p^i, p^j) k1, diag(p^i', 1) k2 diag(1, x)) with x fixing the
    determinant, i, j, i' in [-1, depth), k in the K grid.  Non-split:
    rho(+-N(det A), A diag(1, conj det A)) with A = diag(pi^i u, pi^j) k.
    """
    P = case.params
    depth = case.n + 3 if depth is None else depth
    vals = range(-1, depth)
    out: List[GsoElement] = []
    if P.split:
        ks = _k_grid(P, depth, (1,))
        pw = lambda m: Fraction(P.p) ** m
        left = []
        for i, j in itertools.product(vals, repeat=2):
            for k in ks:
                left.append(m2_mul(((pw(i), 0), (0, pw(j))), k))
        right = []
        for i in vals:
            for k in ks:
                right.append(m2_mul(((pw(i), 0), (0, 1)), k))
        for g1 in left:
            d1 = m2_det(g1)
            for g2 in right:
                x = 1 / (d1 * m2_det(g2))
                out.append(GsoElement.split(P, g1, m2_mul(g2, ((1, 0), (0, x)))))
        return out
    eps = nonresidue(P.p)
    ks = _k_grid(P, depth, (1, eps))
    pi = _pi_e(P)
    zero = ExtElement.of(P, 0)
    for i, j in itertools.product(vals, repeat=2):
        for u in (1, eps):
            dg = ((_pow(pi, i) * u, zero), (zero, _pow(pi, j)))
            for k in ks:
                A = m2_mul(dg, k)
                for sign in (1, -1):
                    out.append(_to_so_nonsplit(P, A, sign))
    return out


@dataclass
class ScanReport:
    case: Case
    depth: int
    count: int
    mismatches: List[str]
    tally: Dict[str, int]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"case": self.case.to_json(), "depth": self.depth, "count": self.count,
                "mismatches": len(self.mismatches), "examples": self.mismatches[:10],
                "tally": dict(sorted(self.tally.items()))}


def scan_support(case: Case, depth: Optional[int] = None,
                 bundle: Optional[PhiBundle] = None) -> ScanReport:
    depth = case.n + 3 if depth is None else depth
    bundle = bundle or build_phi(case)
    mism: List[str] = []
    tally: Dict[str, int] = {}
    grid = support_grid(case, depth)
    for h in grid:
        sc = classify_support(h, case, bundle, strict=False)
        tally[sc.direct] = tally.get(sc.direct, 0) + 1
        if not sc.agree:
            mism.append(f"{sc.closed} vs {sc.direct} at {h}")
    return ScanReport(case, depth, len(grid), mism, tally)


# ---------------------------------------------------------------------------
# Volumes
# ---------------------------------------------------------------------------

# Entry conditions: "O" any, "U" unit, (">=", k) or ("==", k) with k >= 1 in
# the valuation of E (of L when split).
Pattern = Tuple[object, object, object, object]

TABLE_ROWS: Dict[str, Tuple[Pattern, Tuple[Fraction, Fraction]]] = {}


def _row(name, pattern, const, slope):
    TABLE_ROWS[name] = (pattern, (Fraction(const), Fraction(slope)))


# value = const + slope * vol(Gamma), slope may depend on q: stored lazily below
VOLUME_DESCRIPTORS = (
    "Gamma",
    "UU_UP",  # [o^x, o^x; o^x, P]
    "PU_UU",  # [P, o^x; o^x, o^x]
    "PU_UP",  # [P, o^x; o^x, P]
    "UO_UU",  # [o^x, o; o^x, o^x]
    "UO_PU",  # [o^x, o; P, o^x]
    "UO_NU",  # [o^x, o; pi^n o^x, o^x]
    "UO_N1U",  # [o^x, o; P^(n+1), o^x]
    "split_support",
    "inert_support",
)


def _table_row(name: str, q: int, n: int) -> Tuple[Pattern, Fraction, Fraction]:
    """Pattern and (constant, multiple of vol(Gamma)) of a Table-1 row."""
    one = Fraction(1)
    qq = Fraction(q)
    rows = {
        "UU_UP": (("U", "U", "U", (">=", 1)), 0, one - 1 / qq),
        "PU_UU": (((">=", 1), "U", "U", "U"), 0, one - 1 / qq),
        "PU_UP": (((">=", 1), "U", "U", (">=", 1)), 0, 1 / qq),
        "UO_UU": (("U", "O", "U", "U"), one, -(3 - 1 / qq)),
        "UO_PU": (("U", "O", (">=", 1), "U"), 0, one),
        "UO_NU": (("U", "O", ("==", n) if n else "U", "U"), 0, one - 1 / qq),
        "UO_N1U": (("U", "O", (">=", n + 1), "U"), 0, 1 / qq),
    }
    if name not in rows:
        raise KeyError(f"unknown volume descriptor {name!r}")
    pat, c, s = rows[name]
    return pat, Fraction(c), s


def volume(descriptor: str, case: Case) -> Fraction:
    """Volumes of subsets of rho(o^x, GL(2, o_E)), total mass 1."""
    q = case.q
    if descriptor == "Gamma":
        return Fraction(1, q + 1)
    if descriptor == "split_support":
        if case.kind != "split":
            raise KeyError("split_support needs the split case")
        n1, n2 = case.levels
        return gamma0_fraction(case.params, n1) * gamma0_fraction(case.params, n2)
    if descriptor == "inert_support":
        if case.kind != "inert":
            raise KeyError("inert_support needs the inert case")
        return gamma0_fraction(case.params, case.levels[0])
    _, c, s = _table_row(descriptor, q, case.n)
    return c + s * volume("Gamma", case)


def _residue_field(params: FieldParams):
    """Elements of the residue field of E (of L when split) as int pairs, and the product."""
    p = params.p
    if params.kind == "inert":
        d = int(params.delta) % p
        elems = np.array([(x, y) for x in range(p) for y in range(p)], dtype=np.int64)

        def mul(u, v):
            return np.stack([(u[..., 0] * v[..., 0] + d * u[..., 1] * v[..., 1]) % p,
                             (u[..., 0] * v[..., 1] + u[..., 1] * v[..., 0]) % p], axis=-1)
    else:
        elems = np.array([(x, 0) for x in range(p)], dtype=np.int64)

        def mul(u, v):
            return np.stack([(u[..., 0] * v[..., 0]) % p, np.zeros_like(u[..., 0])], axis=-1)
    return elems, mul


def pattern_fraction(params: FieldParams, pattern: Pattern) -> Fraction:
    """Haar proportion of GL(2, o_E) (GL(2, o) when split) with the entry pattern.

    The residue reduction is enumerated over the residue field; deeper
    valuation conditions on an entry already zero mod P contribute their
    exact conditional measure.
    """
    p = params.p
    elems, mul = _residue_field(params)
    qe = len(elems)
    idx = np.arange(qe)
    grids = np.meshgrid(idx, idx, idx, idx, indexing="ij")
    ent = [elems[g.ravel()] for g in grids]
    det = (mul(ent[0], ent[3]) - mul(ent[1], ent[2])) % p
    ok = (det != 0).any(axis=-1)
    weight = Fraction(1)
    for e, cond in zip(ent, pattern):
        nz = (e != 0).any(axis=-1)
        if cond == "U":
            ok &= nz
        elif cond == "O":
            pass
        else:
            op, k = cond
            ok &= ~nz
            if op == ">=":
                weight *= Fraction(1, qe) ** (k - 1)
            else:
                weight *= Fraction(1, qe) ** (k - 1) * (1 - Fraction(1, qe))
    total = int(((det != 0).any(axis=-1)).sum())
    return Fraction(int(ok.sum()), total) * weight


def gamma0_fraction(params: FieldParams, n: int) -> Fraction:
    """Volume of Gamma0(P^n) inside GL(2, o_E), i.e. 1 / index, by residue counting."""
    if n == 0:
        return Fraction(1)
    return pattern_fraction(params, ("O", "O", (">=", n), "O"))


# ---------------------------------------------------------------------------
# Zeta integrals and Bessel transformation laws
# ---------------------------------------------------------------------------


def _residue_degree(params: FieldParams) -> int:
    return 2 if params.kind == "inert" else 1


def abs_power_monomial(params: FieldParams, v: int, f: int = 1, sign: int = 1) -> SymbolicScalar:
    """|x|^(sign (s - 1/2)) for nu(x) = v in a field of residue degree f, u = q^-s."""
    e = sign * f * v
    return scalar(params, 1, half_q=e, u=e)


def zeta_translate(W: WhittakerSymbol, h: GsoElement) -> SymbolicScalar:
    """Z(s, pi(h) W) as a monomial times the formal Z.

    Supported: h in H, h a diagonal torus element, or h in the support of the
    explicit phi (where the torus part is a unit twist).
    """
    case = W.case
    P = case.params
    from .quadspace import stabilizer_closed_form
    if stabilizer_closed_form(h):
        return scalar(P, 1, z=1)
    if P.split:
        g1, g2 = h.g1, h.g2
        if g1[0][1] == 0 and g1[1][0] == 0 and g2[0][1] == 0 and g2[1][0] == 0:
            # rho(diag(t1, t2), .) acting through the first factor
            t1, t2 = g1[0][0] / g2[1][1], g1[1][1] / g2[0][0]
            return abs_power_monomial(P, valuation(t2 / t1, P.p)).with_zeta()
    else:
        g = h.g1
        if g[0][1].is_zero() and g[1][0].is_zero():
            t1, t2 = g[0][0], g[1][1]
            v = (t2 / t1).valuation()
            return abs_power_monomial(P, v, _residue_degree(P) if P.kind == "inert" else 1).with_zeta()
    if closed_form_class(case, h) != "outside":
        return scalar(P, 1, z=1)
    raise NotComputable("h does not factor through H, the torus and Gamma0")


def zeta_torus(params: FieldParams, t1, t2) -> SymbolicScalar:
    """|t2/t1|^(s - 1/2) Z for a torus element with entries in L."""
    v = valuation(Fraction(t2) / Fraction(t1), params.p)
    return abs_power_monomial(params, v).with_zeta()


@dataclass
class TransformFactor:
    monomial: SymbolicScalar
    phase: Fraction = Fraction(0)  # psi(b2) = exp(2 pi i phase)

    def __str__(self) -> str:
        if self.phase:
            return f"{self.monomial}·ψ({self.phase})"
        return str(self.monomial)


def bessel_transform(params: FieldParams, kind: str, **kw) -> TransformFactor:
    """Factor by which B changes under a torus, unipotent or similitude translate."""
    if kind == "torus":
        t1, t2 = Fraction(kw["t1"]), Fraction(kw["t2"])
        v = valuation(t1 / t2, params.p)
        # |t1/t2|^(1/2 - s) = q^(-v/2) q^(v s) = u^-v q^(-v/2)
        return TransformFactor(scalar(params, 1, half_q=-v, u=-v))
    if kind == "unipotent":
        from .localfield import frac_part
        return TransformFactor(scalar(params, 1), frac_part(Fraction(kw["b2"]), params.p))
    if kind == "similitude":
        v = valuation(Fraction(kw["lam"]), params.p)
        return TransformFactor(scalar(params, 1, half_q=-v, u=-v))
    raise ValueError(f"unknown class {kind!r}")


# ---------------------------------------------------------------------------
# Bessel values at the identity
# ---------------------------------------------------------------------------


@dataclass
class BesselValue:
    case: Case
    coefficient: Fraction
    route: str
    chi_delta: Optional[int] = None
    chi_two: Optional[int] = None
    families: List[dict] = field(default_factory=list)
    formula: Optional[str] = None

    @property
    def nonzero(self) -> bool:
        return self.coefficient != 0

    def exact(self) -> str:
        c = self.coefficient
        return f"{c.numerator}/{c.denominator}·Z"

    def to_json(self) -> dict:
        doc = {"case": self.case.to_json(), "route": self.route,
               "besselCoefficient": self.exact(), "nonzero": self.nonzero}
        if self.chi_delta is not None:
            doc["chi_delta"] = self.chi_delta
            doc["chi_two"] = self.chi_two
        if self.formula:
            doc["formula"] = self.formula
        if self.families:
            doc["families"] = self.families
        return doc


def chi_delta(case: Case) -> int:
    """chi(delta) for the ramified character: equals chi(-1) since -delta is a norm."""
    return legendre(-1, case.p)


def chi_two(case: Case) -> int:
    return legendre(2, case.p)


def ramified_display(q: int, n: int, chi_d: int, chi_2: int) -> Fraction:
    """The closed-form ramified value, with formal signs chi(delta), chi(2)."""
    v = Fraction(1, q + 1)
    if n > 0:
        return chi_2 * v * (chi_d * (1 - Fraction(1, q)) + Fraction(1, q))
    return chi_2 * (chi_d * q + v * (chi_d * (4 * q - 2) + q * q + q))


def ramified_paper_assembly(q: int, n: int, chi_d: int, chi_2: int) -> Fraction:
    """The bracket before simplification: family volumes times displayed constants."""
    v = Fraction(1, q + 1)
    qf = Fraction(q)
    if n > 0:
        vol_a, vol_c = (1 - 1 / qf) * v, v / qf
        return chi_2 * (chi_d * q * vol_a + q * q * vol_c)
    vol_a = 1 - (3 - 1 / qf) * v + (1 - 1 / qf) * v
    return chi_2 * (chi_d * q * vol_a + q * q * v + q * v)


def bessel_at_identity(case: Case, chi_d: Optional[int] = None,
                       chi_2: Optional[int] = None) -> BesselValue:
    """B(1, phi, W, s) / Z by the closed-form route.

    Split and inert: volume of the support (its zeta factor is |2|^(s-1/2) = 1
    and phi is 1 there).  Ramified: the displayed closed form in the formal
    signs chi(delta), chi(2), defaulting to their actual values.
    """
    P = case.params
    if case.kind == "split":
        vol = volume("split_support", case)
        return BesselValue(case, vol, "closed form",
                           families=[{"family": "support", "volume": str(vol), "value": "1"}])
    if case.kind == "inert":
        vol = volume("inert_support", case)
        return BesselValue(case, vol, "closed form",
                           families=[{"family": "support", "volume": str(vol), "value": "1"}])
    cd = chi_delta(case) if chi_d is None else chi_d
    c2 = chi_two(case) if chi_2 is None else chi_2
    if cd not in (1, -1) or c2 not in (1, -1):
        raise ValueError("character values must be +-1")
    n = case.levels[0]
    out = BesselValue(case, ramified_display(P.q, n, cd, c2), "closed form", cd, c2)
    out.formula = ramified_display_formula(P.q, n, cd, c2)
    return out


def ramified_display_formula(q: int, n: int, chi_d: int, chi_2: int) -> str:
    """The closed form with the signs and vol(Gamma) substituted, unevaluated."""
    v = f"(1/{q + 1})"
    if n > 0:
        return f"({chi_2})·{v}·[({chi_d})·(1-1/{q}) + 1/{q}]·Z"
    return f"({chi_2})·[({chi_d})·{q} + {v}·(({chi_d})·{4 * q - 2} + {q * q + q})]·Z"


# exact instantiation of gamma and tau ------------------------------------

_I_POW = [GaussRat(Fraction(1)), GaussRat(Fraction(0), Fraction(1)),
          GaussRat(Fraction(-1)), GaussRat(Fraction(0), Fraction(-1))]


@lru_cache(maxsize=None)
def exact_constants(p: int, kind: str) -> Tuple[int, int]:
    """(k, e) with gamma = i^k and tau = i^e sqrt(q), read off the oracle."""
    from .oracle import resolve_constants
    c = resolve_constants(_params(p, kind))
    quarter = lambda z: int(round(np.angle(z) / (np.pi / 2))) % 4
    return quarter(c.gamma1), quarter(c.tau / np.sqrt(p))


def instantiate(x: SymbolicScalar, params: FieldParams) -> SymbolicScalar:
    """Replace gamma and tau by their exact values; leaves q^(1/2) powers only."""
    k, e = exact_constants(params.p, params.kind)
    i_pow = _I_POW
    out = x.zero()
    for (hq, b, g, t, z), c in x.terms.items():
        c2 = c * i_pow[(k * g + e * t) % 4]
        out = out + SymbolicScalar(x.q, x.chi_m1, {(hq + t, b, 0, 0, z): c2})
    return out


def _family_patterns(n: int) -> Dict[str, List[Pattern]]:
    """M-patterns of the ramified support families, split into Table-1 rows."""
    if n == 0:
        return {"a": [("U", "O", "U", "U"), ((">=", 1), "U", "U", "U")],
                "b": [("U", "U", "U", (">=", 1)), ((">=", 1), "U", "U", (">=", 1))],
                "c": [("U", "O", (">=", 1), "U")]}
    return {"a": [("U", "O", ("==", n), "U")], "c": [("U", "O", (">=", n + 1), "U")]}


def _sample_entry(params: FieldParams, cond, rng: random.Random) -> ExtElement:
    p = params.p
    pi = _pi_e(params)
    unit = lambda: ExtElement.of(params, rng.randrange(1, p), rng.randrange(p))
    if cond == "U":
        return unit()
    if cond == "O":
        return ExtElement.of(params, rng.randrange(p), rng.randrange(p)) + _pow(pi, 1) * unit()
    op, k = cond
    if op == "==":
        return _pow(pi, k) * unit()
    return _pow(pi, k) * ExtElement.of(params, rng.randrange(p), rng.randrange(p))


def _family_value(bundle: PhiBundle, fam: str, pattern: Pattern, samples: int,
                  seed: int) -> Tuple[Optional[SymbolicScalar], int]:
    """The value of phi(h^-1 x) over h = rho(t, M^-1) with M in the pattern."""
    P = bundle.case.params
    rng = random.Random(seed)
    x1, x2 = base_points(P)
    values = set()
    value = None
    checked = 0
    while checked < samples:
        M = tuple(_sample_entry(P, c, rng) for c in pattern)
        A = ((M[0], M[1]), (M[2], M[3]))
        if _ve(A[0][0] * A[1][1] - A[0][1] * A[1][0]) != 0:
            continue
        Ainv = m2_inv(A)
        for sign in (1, -1):
            h = _to_so_nonsplit(P, Ainv, sign)
            hinv = h.inverse()
            v = instantiate(evaluate(bundle.phi, (hinv.apply(x1), hinv.apply(x2))), P)
            values.add(str(v))
            value = v
        checked += 1
    if len(values) != 1:
        return None, checked
    return value, checked


def bessel_assembly(case: Case, samples: int = 40, seed: int = 0) -> BesselValue:
    """B(1, phi, W, s) / Z from first principles.

    Supports come from the closed-form families, volumes from residue
    counting of the true Gamma0(P^n), and the value of phi on each family
    from the engine summands, certified constant by sampling.
    """
    bundle = build_phi(case)
    P = case.params
    if case.kind != "ramified":
        value = bessel_at_identity(case)
        # certify phi = 1 on sampled support points
        for h in support_grid(case, case.n + 2)[:: max(1, len(support_grid(case, case.n + 2)) // 200)]:
            if closed_form_class(case, h) == "support":
                x1, x2 = base_points(P)
                hinv = h.inverse()
                val = evaluate(bundle.phi, (hinv.apply(x1), hinv.apply(x2)))
                if val != scalar(P, 1):
                    raise AssertionError("phi is not 1 on its support")
        value.route = "assembly"
        return value
    n = case.levels[0]
    total = Fraction(0)
    fams = []
    for fam, pats in _family_patterns(n).items():
        for j, pat in enumerate(pats):
            vol = pattern_fraction(P, pat)
            val, k = _family_value(bundle, fam, pat, samples, seed + 7 * j)
            if val is None:
                raise AssertionError(f"value of phi is not constant on family ({fam})")
            if not val.is_rational():
                raise AssertionError(f"value {val} on family ({fam}) is not rational")
            total += vol * val.as_fraction()
            fams.append({"family": fam, "pattern": [str(c) for c in pat], "volume": str(vol),
                         "value": str(val), "samples": k})
    return BesselValue(case, total, "assembly", chi_delta(case), chi_two(case), fams)


# ---------------------------------------------------------------------------
# Ramified structure checks
# ---------------------------------------------------------------------------


@dataclass
class OverlapReport:
    window: dict
    points: int
    support_sizes: Dict[int, int]
    overlaps: Dict[str, int]

    @property
    def disjoint(self) -> bool:
        return not any(self.overlaps.values())

    def to_json(self) -> dict:
        return {"window": self.window, "points": self.points,
                "support_sizes": {str(k): v for k, v in self.support_sizes.items()},
                "overlaps": self.overlaps, "disjoint": self.disjoint}


def summand_overlaps(bundle: PhiBundle) -> OverlapReport:
    """Tabulate the four summands on a common exact window and count shared support points."""
    from .oracle import FiniteWindow, resolve_constants, sample
    if bundle.tilde is None:
        raise ValueError("summands exist only in the ramified case")
    P = bundle.case.params
    consts = resolve_constants(P)
    w = None
    for f in bundle.summands.values():
        c = FiniteWindow.covering(f)
        w = c if w is None else w.union(c)
    masks = {i: np.abs(sample(f, w, consts)) > 1e-9 for i, f in bundle.summands.items()}
    overlaps = {f"{i}{j}": int((masks[i] & masks[j]).sum())
                for i, j in itertools.combinations(sorted(masks), 2)}
    return OverlapReport(w.to_json(), w.count, {i: int(m.sum()) for i, m in masks.items()}, overlaps)


@dataclass
class FourierIdentity:
    name: str
    boxes_match: bool
    constant: SymbolicScalar
    displayed: SymbolicScalar

    @property
    def constants_match(self) -> bool:
        return self.constant == self.displayed

    def to_json(self) -> dict:
        return {"name": self.name, "boxes_match": self.boxes_match,
                "constant": str(self.constant), "displayed": str(self.displayed),
                "constants_match": self.constants_match}


def fourier_identities(case: Case) -> Dict[str, FourierIdentity]:
    """F(phi2) and F(phi1)(pi^-N x) against the twisted boxes they should equal.

    The engine constant is read off the transform; the displayed constant is
    k' for phi2 and q_E^-N k' for phi1.
    """
    from .schwartz import scale_argument
    from .weilrep import fourier1
    if case.kind != "ramified":
        raise ValueError("the identities concern the ramified factors")
    P = case.params
    n, N = case.levels[0], case.N
    f1, f2 = build_phi(case).factors
    kp = kprime(P)
    targets = {
        "phi2": (fourier1(f2), [*e_ideal(P, 0), Shell(-1), Ideal(0)], kp),
        "phi1": (scale_argument(fourier1(f1), Fraction(P.p) ** (-N)),
                 [*e_ideal(P, n + 2), Shell(0), Ideal(n + 1)],
                 kp * scalar(P, Fraction(P.q_ext) ** (-N))),
    }
    out = {}
    for name, (image, sets, shown) in targets.items():
        box = SchwartzFunction.box(P, sets, (2,))
        const = image.terms[0].coeff if len(image.terms) == 1 else scalar(P, 0)
        out[name] = FourierIdentity(name, bool(equal(image, box.scale(const))) if const else False,
                                    const, shown)
    return out


def kprime_checks(params: FieldParams) -> dict:
    """k'^4 = 1 symbolically and |k'| = 1 numerically after constant resolution."""
    from .oracle import resolve_constants
    kp = kprime(params)
    c = resolve_constants(params)
    val = kp.evaluate(gamma=c.gamma1, tau=c.tau)
    return {"fourth_power_one": kp ** 4 == scalar(params, 1), "value": val,
            "modulus_error": abs(abs(val) - 1)}
