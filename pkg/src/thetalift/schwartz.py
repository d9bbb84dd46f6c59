"""Symbolic Schwartz functions on X and X^2.

A function is a finite sum of box terms

    coeff * prod_{i in twists} chi(x_i) * prod_i 1_{S_i}(x_i) * prod_k 1[Q_k in p^{m_k}]

where each S_i is a fractional ideal, a unit shell, all of L or {0}, and
each Q_k is one of the quadratic forms <x,x>, <x,y>, <y,y>.

Normal form: untwisted shells are expanded as Ideal(m) - Ideal(m+1), twists
survive only on shells in the ramified case (in the inert case chi is a
sign on a shell, in the split case it is trivial), constraints implied by
the box are dropped and identical boxes are merged.  Without constraints
the normal form is unique, because products of ideal indicators and of
twisted shell indicators are linearly independent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .localfield import FieldParams, as_fraction, chi_quad, val_or_inf, valuation
from .quadspace import XPoint, pair, pairing_weights
from .scalar import SymbolicScalar

INF = float("inf")
FORMS = ("xx", "xy", "yy")


# ---------------------------------------------------------------------------
# Coordinate sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CoordSet:
    kind: str  # "ideal", "shell", "all", "zero"
    m: int = 0

    def contains(self, x: Fraction, p: int) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "zero":
            return x == 0
        if x == 0:
            return self.kind == "ideal"
        v = valuation(x, p)
        return v >= self.m if self.kind == "ideal" else v == self.m

    @property
    def lower(self) -> float:
        """Smallest valuation occurring in the set."""
        if self.kind == "all":
            return -INF
        if self.kind == "zero":
            return INF
        return self.m

    @property
    def period(self) -> float:
        """Level k such that the set (and chi on it) is stable under p^k."""
        if self.kind == "all":
            return -INF
        if self.kind == "zero":
            return INF
        return self.m if self.kind == "ideal" else self.m + 1

    def shifted(self, k: int) -> "CoordSet":
        if self.kind in ("ideal", "shell"):
            return CoordSet(self.kind, self.m + k)
        return self

    def __str__(self) -> str:
        if self.kind == "ideal":
            return f"p^{self.m}"
        if self.kind == "shell":
            return f"p^{self.m}o^x"
        return self.kind


def Ideal(m: int) -> CoordSet:
    return CoordSet("ideal", m)


def Shell(m: int) -> CoordSet:
    return CoordSet("shell", m)


ALL = CoordSet("all")
ZERO = CoordSet("zero")


def e_ideal(params: FieldParams, k: int) -> Tuple[CoordSet, CoordSet]:
    """The E-ideal P^k on the diagonal coordinates (c1, c2)."""
    if params.kind == "ramified":
        return Ideal(-((-k) // 2)), Ideal(-((-(k - 1)) // 2))
    if params.kind == "inert":
        return Ideal(k), Ideal(k)
    raise ValueError("no E-ideal in the split case")


def recognize_e_ideal(params: FieldParams, s1: CoordSet, s2: CoordSet) -> Optional[int]:
    """Exponent k with (s1, s2) = P^k, if the pair is an E-ideal."""
    if s1.kind != "ideal" or s2.kind != "ideal":
        return None
    if params.kind == "inert":
        return s1.m if s1.m == s2.m else None
    k = s1.m + s2.m
    return k if e_ideal(params, k) == (s1, s2) else None


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


Constraint = Tuple[str, int]


@dataclass(frozen=True)
class BoxTerm:
    coeff: SymbolicScalar
    box: Tuple[CoordSet, ...]
    twists: frozenset = frozenset()
    constraints: Tuple[Constraint, ...] = ()

    @property
    def key(self):
        return (self.box, tuple(sorted(self.twists)), self.constraints)

    def with_coeff(self, c: SymbolicScalar) -> "BoxTerm":
        return BoxTerm(c, self.box, self.twists, self.constraints)


def ring_of(params: FieldParams) -> Tuple[int, int]:
    return params.q, params.chi_minus_one


def scalar(params: FieldParams, c=1, **kw) -> SymbolicScalar:
    return SymbolicScalar.monomial(params.q, params.chi_minus_one, c, **kw)


def _form_coords(form: str) -> Tuple[int, int]:
    return {"xx": (0, 0), "xy": (0, 4), "yy": (4, 4)}[form]


def form_value(params: FieldParams, coords: Sequence[Fraction], form: str) -> Fraction:
    a, b = _form_coords(form)
    x = XPoint(params, tuple(coords[a:a + 4]))
    y = XPoint(params, tuple(coords[b:b + 4]))
    return pair(x, y)


def form_bound_from_box(params: FieldParams, box: Sequence[CoordSet], form: str) -> float:
    """Lower bound for the valuation of a quadratic form over a box."""
    a, b = _form_coords(form)
    best = INF
    for i, j, w in pairing_weights(params):
        # 2<x, y> = sum w y_i x_j ; <x, y> has the same valuation (p odd)
        lo = box[b + i].lower + box[a + j].lower
        if lo != lo:  # -inf + inf: the zero set kills the monomial
            continue
        best = min(best, val_or_inf(w, params.p) + lo)
    return best


def form_bound(params: FieldParams, term: BoxTerm, form: str) -> float:
    """Lower bound using the box and any explicit constraint on the form."""
    bound = form_bound_from_box(params, term.box, form)
    for f, m in term.constraints:
        if f == form:
            bound = max(bound, m)
    return bound


def _normalize_term(params: FieldParams, term: BoxTerm) -> List[BoxTerm]:
    """Expand a term into normal-form terms (see module docstring)."""
    if term.coeff.is_zero():
        return []
    coeff = term.coeff
    box = list(term.box)
    twists = set(term.twists)
    for i in sorted(twists):
        s = box[i]
        if s.kind != "shell":
            raise ValueError("twisted coordinates must carry a shell")
        if params.kind == "split":
            twists.discard(i)
        elif params.kind == "inert":
            twists.discard(i)
            if s.m % 2:
                coeff = -coeff
    # constraints: merge duplicates (intersection keeps the larger level)
    cons: Dict[str, int] = {}
    for f, m in term.constraints:
        cons[f] = max(m, cons.get(f, m))
    # expand untwisted shells
    options = []
    for i, s in enumerate(box):
        if s.kind == "shell" and i not in twists:
            options.append([(Ideal(s.m), 1), (Ideal(s.m + 1), -1)])
        else:
            options.append([(s, 1)])
    out = []
    for choice in itertools.product(*options):
        nb = tuple(c for c, _ in choice)
        sign = 1
        for _, sg in choice:
            sign *= sg
        kept = tuple(sorted((f, m) for f, m in cons.items()
                            if form_bound_from_box(params, nb, f) < m))
        c = coeff if sign == 1 else -coeff
        out.append(BoxTerm(c, nb, frozenset(twists), kept))
    return out


# ---------------------------------------------------------------------------
# Schwartz functions
# ---------------------------------------------------------------------------


class SchwartzFunction:
    """Finite sum of box terms on X (dim 4) or X^2 (dim 8), in normal form."""

    __slots__ = ("params", "dim", "terms")

    def __init__(self, params: FieldParams, dim: int, terms: Iterable[BoxTerm] = ()):
        if dim not in (4, 8):
            raise ValueError("dimension must be 4 or 8")
        self.params = params
        self.dim = dim
        merged: Dict[tuple, BoxTerm] = {}
        for t in terms:
            if len(t.box) != dim:
                raise ValueError("box length does not match dimension")
            for nt in _normalize_term(params, t):
                k = nt.key
                if k in merged:
                    c = merged[k].coeff + nt.coeff
                    if c.is_zero():
                        del merged[k]
                    else:
                        merged[k] = nt.with_coeff(c)
                else:
                    merged[k] = nt
        self.terms: Tuple[BoxTerm, ...] = tuple(merged[k] for k in sorted(merged, key=_sort_key))

    # construction ----------------------------------------------------
    @classmethod
    def box(cls, params: FieldParams, sets: Sequence[CoordSet], twists: Iterable[int] = (),
            coeff=1, constraints: Iterable[Constraint] = ()) -> "SchwartzFunction":
        c = coeff if isinstance(coeff, SymbolicScalar) else scalar(params, coeff)
        return cls(params, len(sets), [BoxTerm(c, tuple(sets), frozenset(twists), tuple(constraints))])

    @classmethod
    def zero(cls, params: FieldParams, dim: int) -> "SchwartzFunction":
        return cls(params, dim, [])

    def is_zero(self) -> bool:
        return not self.terms

    # algebra ---------------------------------------------------------
    def __add__(self, other: "SchwartzFunction") -> "SchwartzFunction":
        self._check(other)
        return SchwartzFunction(self.params, self.dim, self.terms + other.terms)

    def __neg__(self) -> "SchwartzFunction":
        return self.scale(-1)

    def __sub__(self, other: "SchwartzFunction") -> "SchwartzFunction":
        return self + (-other)

    def scale(self, c) -> "SchwartzFunction":
        c = c if isinstance(c, SymbolicScalar) else scalar(self.params, c)
        return SchwartzFunction(self.params, self.dim, [t.with_coeff(t.coeff * c) for t in self.terms])

    def _check(self, other: "SchwartzFunction") -> None:
        if other.params != self.params or other.dim != self.dim:
            raise ValueError("incompatible Schwartz functions")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchwartzFunction):
            return NotImplemented
        return self.params == other.params and self.dim == other.dim and \
            [(t.key, t.coeff) for t in self.terms] == [(t.key, t.coeff) for t in other.terms]

    def __hash__(self):
        return hash((self.params, self.dim, tuple(t.key for t in self.terms)))

    def has_constraints(self) -> bool:
        return any(t.constraints for t in self.terms)

    def __repr__(self) -> str:
        return describe(self)


def _sort_key(key):
    box, twists, cons = key
    return (tuple((s.kind, s.m) for s in box), twists, cons)


def describe(f: SchwartzFunction) -> str:
    lines = []
    for t in f.terms:
        box = ", ".join(str(s) for s in t.box)
        tw = f" chi@{sorted(t.twists)}" if t.twists else ""
        cons = "".join(f" [{fm} in p^{m}]" for fm, m in t.constraints)
        lines.append(f"({t.coeff}) * [{box}]{tw}{cons}")
    return "\n".join(lines) if lines else "0"


def _point_coords(pt) -> Tuple[Fraction, ...]:
    if isinstance(pt, XPoint):
        return pt.coords
    if isinstance(pt, tuple) and len(pt) == 2 and all(isinstance(z, XPoint) for z in pt):
        return pt[0].coords + pt[1].coords
    return tuple(as_fraction(c) for c in pt)


def evaluate_term(params: FieldParams, t: BoxTerm, coords: Sequence[Fraction]) -> int:
    """Value of the indicator and twist part of a term: 0 or +-1."""
    p = params.p
    for s, c in zip(t.box, coords):
        if not s.contains(c, p):
            return 0
    for f, m in t.constraints:
        v = form_value(params, coords, f)
        if v != 0 and valuation(v, p) < m:
            return 0
    sign = 1
    for i in t.twists:
        sign *= chi_quad(params, coords[i])
    return sign


def evaluate(f: SchwartzFunction, pt) -> SymbolicScalar:
    coords = _point_coords(pt)
    if len(coords) != f.dim:
        raise ValueError("point dimension mismatch")
    total = scalar(f.params, 0)
    for t in f.terms:
        s = evaluate_term(f.params, t, coords)
        if s:
            total = total + (t.coeff if s == 1 else -t.coeff)
    return total


# ---------------------------------------------------------------------------
# Structural operations
# ---------------------------------------------------------------------------


def tensor(f: SchwartzFunction, g: SchwartzFunction) -> SchwartzFunction:
    """T(f (x) g)(x, y) = f(x) g(y)."""
    if f.dim != 4 or g.dim != 4:
        raise ValueError("tensor takes two functions on X")
    terms = []
    for a in f.terms:
        for b in g.terms:
            cons = tuple(a.constraints) + tuple(("yy", m) for _, m in b.constraints)
            terms.append(BoxTerm(a.coeff * b.coeff, a.box + b.box,
                                 a.twists | frozenset(i + 4 for i in b.twists), cons))
    return SchwartzFunction(f.params, 8, terms)


def factor_slices(f: SchwartzFunction, factor: Optional[int]) -> range:
    if f.dim == 4:
        if factor not in (None, 0):
            raise ValueError("functions on X have one factor")
        return range(0, 4)
    if factor is None:
        return range(0, 8)
    return range(4 * factor, 4 * factor + 4)


def _shift_constraints(t: BoxTerm, shifts: Dict[str, int]) -> Tuple[Constraint, ...]:
    return tuple((fm, m + shifts.get(fm, 0)) for fm, m in t.constraints)


def scale_argument(f: SchwartzFunction, a, factor: Optional[int] = None) -> SchwartzFunction:
    """x -> f(a x) on all coordinates (or on one factor of X^2)."""
    a = as_fraction(a)
    if a == 0:
        raise ValueError("scale_argument requires a != 0")
    P = f.params
    v = valuation(a, P.p)
    idx = set(factor_slices(f, factor))
    chi_a = chi_quad(P, a)
    shifts: Dict[str, int] = {}
    if f.dim == 4 or factor is None:
        shifts = {"xx": -2 * v, "xy": -2 * v, "yy": -2 * v}
    elif factor == 0:
        shifts = {"xx": -2 * v, "xy": -v}
    else:
        shifts = {"yy": -2 * v, "xy": -v}
    terms = []
    for t in f.terms:
        box = tuple(s.shifted(-v) if i in idx else s for i, s in enumerate(t.box))
        n_tw = len([i for i in t.twists if i in idx])
        c = t.coeff if (chi_a == 1 or n_tw % 2 == 0) else -t.coeff
        terms.append(BoxTerm(c, box, t.twists, _shift_constraints(t, shifts)))
    return SchwartzFunction(P, f.dim, terms)


def negate_argument(f: SchwartzFunction, factor: Optional[int] = None) -> SchwartzFunction:
    return scale_argument(f, -1, factor)


def coordinate_scale(f: SchwartzFunction, scalings: Dict[int, Fraction]) -> SchwartzFunction:
    """x -> f(x') where x'_i = a_i x_i; only valid when no constraint is touched."""
    P = f.params
    if any(t.constraints for t in f.terms):
        raise ValueError("coordinate_scale does not transform constraints")
    terms = []
    for t in f.terms:
        box = list(t.box)
        c = t.coeff
        for i, a in scalings.items():
            a = as_fraction(a)
            box[i] = box[i].shifted(-valuation(a, P.p))
            if i in t.twists and chi_quad(P, a) == -1:
                c = -c
        terms.append(BoxTerm(c, tuple(box), t.twists, t.constraints))
    return SchwartzFunction(P, f.dim, terms)


def restrict_factor(t: BoxTerm, factor: int) -> BoxTerm:
    """The X-term of one factor of an X^2 term (coefficient 1)."""
    lo = 4 * factor
    own = "xx" if factor == 0 else "yy"
    cons = tuple(("xx", m) for f_, m in t.constraints if f_ == own)
    tw = frozenset(i - lo for i in t.twists if lo <= i < lo + 4)
    one = t.coeff.like(1)
    return BoxTerm(one, t.box[lo:lo + 4], tw, cons)


# ---------------------------------------------------------------------------
# Equality
# ---------------------------------------------------------------------------


@dataclass
class EqualityVerdict:
    equal: bool
    certificate: str  # "canonical", "exhaustive", "sampled"
    detail: str = ""

    def __bool__(self) -> bool:
        return self.equal


def equal(f: SchwartzFunction, g: SchwartzFunction, budget: int = 200_000,
          seed: int = 0) -> EqualityVerdict:
    """Decide f == g extensionally.

    Constraint-free functions are compared through the unique normal form.
    Otherwise the difference is evaluated on every residue tuple of a
    covering quotient, or on a seeded sample when that exceeds the budget.
    """
    f._check(g)
    diff = f - g
    if diff.is_zero():
        return EqualityVerdict(True, "canonical")
    if not diff.has_constraints():
        return EqualityVerdict(False, "canonical", "normal forms differ")
    grid = covering_grid(diff)
    total = 1
    for axis in grid:
        total *= len(axis)
    if total <= budget:
        for pt in itertools.product(*grid):
            if not evaluate(diff, pt).is_zero():
                return EqualityVerdict(False, "exhaustive", f"differs at {pt}")
        return EqualityVerdict(True, "exhaustive")
    import random
    rng = random.Random(seed)
    for _ in range(budget):
        pt = tuple(rng.choice(axis) for axis in grid)
        if not evaluate(diff, pt).is_zero():
            return EqualityVerdict(False, "sampled", f"differs at {pt}")
    return EqualityVerdict(True, "sampled", f"{budget} of {total} points")


def coordinate_window(f: SchwartzFunction) -> List[Tuple[int, int]]:
    """Per-coordinate (support level, period level) covering every term.

    Values of f depend only on the residue of each coordinate modulo
    p^hi inside p^lo, provided the constraints are resolved at that depth.
    """
    P = f.params
    lows, highs = [], []
    for i in range(f.dim):
        lo, hi = INF, -INF
        for t in f.terms:
            s = t.box[i]
            if s.kind == "zero":
                continue
            lo = min(lo, s.lower)
            hi = max(hi, s.period)
        if lo == INF:
            lo, hi = 0, 0
        lows.append(lo)
        highs.append(hi)
    # constraints need enough digits: <.,.> in p^m depends on coordinates
    # modulo p^(m - other lower bound)
    for t in f.terms:
        for fm, m in t.constraints:
            a, b = _form_coords(fm)
            for i, j, w in pairing_weights(P):
                wv = val_or_inf(w, P.p)
                for u, v in ((b + i, a + j), (a + j, b + i)):
                    need = m - wv - lows[v]
                    highs[u] = max(highs[u], need)
    out = []
    for lo, hi in zip(lows, highs):
        if lo == -INF or hi == INF:
            raise ValueError("function is not compactly supported or not locally constant")
        out.append((int(lo), int(max(hi, lo))))
    return out


def covering_grid(f: SchwartzFunction) -> List[List[Fraction]]:
    p = f.params.p
    grid = []
    for lo, hi in coordinate_window(f):
        step = Fraction(p) ** lo
        grid.append([step * k for k in range(p ** (hi - lo))])
    return grid


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

SCHEMA_VERSION = 1


def to_json(f: SchwartzFunction) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "p": f.params.p,
        "kind": f.params.kind,
        "delta": str(f.params.delta),
        "dim": f.dim,
        "terms": [
            {
                "coeff": t.coeff.to_json(),
                "box": [[s.kind, s.m] for s in t.box],
                "twists": sorted(t.twists),
                "constraints": [[fm, m] for fm, m in t.constraints],
            }
            for t in f.terms
        ],
    }


def from_json(doc: dict) -> SchwartzFunction:
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError("unsupported schema version")
    P = FieldParams.make(doc["p"], doc["kind"], Fraction(doc["delta"]))
    terms = [
        BoxTerm(SymbolicScalar.from_json(t["coeff"]),
                tuple(CoordSet(k, m) for k, m in t["box"]),
                frozenset(t["twists"]),
                tuple((fm, m) for fm, m in t["constraints"]))
        for t in doc["terms"]
    ]
    return SchwartzFunction(P, doc["dim"], terms)
