"""The four-dimensional quadratic space X, its pairing and the GSO(X) action.

Split case: X = M(2, L) with <x, y> = Tr(x y*)/2, where y* is the adjugate.
Non-split case: X = {[[c1 + c2 r, c3 r], [c4 r, c1 - c2 r]]} inside M(2, E),
r = sqrt(delta).  Points are stored in canonical coordinates (c1, c2, c3, c4).

GSO(X) is the image of rho: split rho(g1, g2) x = g1 x g2*; non-split
rho(t, b) x = t^-1 b x alpha(b)*.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .localfield import ExtElement, FieldParams, as_fraction

Mat2 = Tuple[Tuple[object, object], Tuple[object, object]]


# ---------------------------------------------------------------------------
# 2x2 matrix helpers over any commutative ring with division
# ---------------------------------------------------------------------------


def mat2(a, b, c, d) -> Mat2:
    return ((a, b), (c, d))


def m2_mul(x: Mat2, y: Mat2) -> Mat2:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def m2_det(x: Mat2):
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def m2_adj(x: Mat2) -> Mat2:
    """The adjugate x* with x x* = det(x)."""
    return ((x[1][1], -x[0][1]), (-x[1][0], x[0][0]))


def m2_inv(x: Mat2) -> Mat2:
    d = m2_det(x)
    inv = 1 / d if not isinstance(d, ExtElement) else d.inverse()
    a = m2_adj(x)
    return tuple(tuple(e * inv for e in row) for row in a)  # type: ignore[return-value]


def m2_map(x: Mat2, f) -> Mat2:
    return tuple(tuple(f(e) for e in row) for row in x)  # type: ignore[return-value]


def m2_trace(x: Mat2):
    return x[0][0] + x[1][1]


# ---------------------------------------------------------------------------
# Points of X
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class XPoint:
    params: FieldParams
    coords: Tuple[Fraction, Fraction, Fraction, Fraction]

    @classmethod
    def of(cls, params: FieldParams, c1=0, c2=0, c3=0, c4=0) -> "XPoint":
        return cls(params, tuple(as_fraction(c) for c in (c1, c2, c3, c4)))  # type: ignore[arg-type]

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def __add__(self, other: "XPoint") -> "XPoint":
        return XPoint(self.params, tuple(a + b for a, b in zip(self.coords, other.coords)))  # type: ignore[arg-type]

    def __neg__(self) -> "XPoint":
        return XPoint(self.params, tuple(-a for a in self.coords))  # type: ignore[arg-type]

    def scale(self, a) -> "XPoint":
        a = as_fraction(a)
        return XPoint(self.params, tuple(a * c for c in self.coords))  # type: ignore[arg-type]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    # matrix views ----------------------------------------------------
    def matrix(self) -> Mat2:
        c1, c2, c3, c4 = self.coords
        if self.params.split:
            return mat2(c1, c2, c3, c4)
        P = self.params
        return mat2(ExtElement.of(P, c1, c2), ExtElement.of(P, 0, c3),
                    ExtElement.of(P, 0, c4), ExtElement.of(P, c1, -c2))

    @classmethod
    def from_matrix(cls, params: FieldParams, m: Mat2) -> "XPoint":
        if params.split:
            return cls.of(params, m[0][0], m[0][1], m[1][0], m[1][1])
        a, b = m[0]
        c, d = m[1]
        if d != a.conj() or b.a != 0 or c.a != 0:
            raise ValueError("matrix does not lie in X")
        return cls.of(params, a.a, a.b, b.b, c.b)

    def raw_view(self) -> Tuple[object, object, object, object]:
        """Non-split secondary view: (c1, c2, c3 sqrt(delta), c4 sqrt(delta))."""
        if self.params.split:
            return self.coords
        P = self.params
        c1, c2, c3, c4 = self.coords
        return (c1, c2, ExtElement.of(P, 0, c3), ExtElement.of(P, 0, c4))


def pairing_weights(params: FieldParams) -> Tuple[Tuple[int, int, Fraction], ...]:
    """Triples (i, j, w) with 2<x, y> = sum of w * y_i * x_j over i.

    The index map i -> j is an involution on coordinates.
    """
    if params.split:
        return ((0, 3, Fraction(1)), (1, 2, Fraction(-1)), (2, 1, Fraction(-1)), (3, 0, Fraction(1)))
    d = params.delta
    return ((0, 0, Fraction(2)), (1, 1, -2 * d), (2, 3, -d), (3, 2, -d))


def pair(x: XPoint, y: XPoint) -> Fraction:
    """<x, y> = Tr(x y*)/2 in canonical coordinates."""
    return sum((w * y[i] * x[j] for i, j, w in pairing_weights(x.params)), Fraction(0)) / 2


def pair_by_trace(x: XPoint, y: XPoint) -> Fraction:
    """Reference computation of Tr(x y*)/2 from the matrix views."""
    t = m2_trace(m2_mul(x.matrix(), m2_adj(y.matrix())))
    if isinstance(t, ExtElement):
        if t.b != 0:
            raise ArithmeticError("trace left L")
        t = t.a
    return Fraction(t) / 2


def pair_raw(x: XPoint, y: XPoint) -> Fraction:
    """The pairing written in raw off-diagonal entries; equals pair(x, y)."""
    if x.params.split:
        return pair(x, y)
    x1, x2, x3, x4 = x.raw_view()
    y1, y2, y3, y4 = y.raw_view()
    d = x.params.delta
    two = 2 * x1 * y1 - 2 * x2 * y2 * d
    e = x3 * y4 + x4 * y3
    if e.b != 0:
        raise ArithmeticError("raw pairing left L")
    return (two - e.a) / 2


def quad(x: XPoint) -> Fraction:
    return pair(x, x)


def haar_constant_exponent2(params: FieldParams) -> int:
    """Doubled q-exponent of the self-dual Haar constant on X.

    The self-dual measure for psi(2<x, y>) is |det W|^(1/2) dc1..dc4 with W
    the pairing matrix; |det W| = |4 delta^3|.
    """
    if params.split or params.kind == "inert":
        return 0
    return -3


def base_points(params: FieldParams) -> Tuple[XPoint, XPoint]:
    """x1 = [[0, sqrt(d)], [0, 0]], x2 = [[0, 0], [-2 sqrt(d)/d, 0]]; d = 1 if split."""
    if params.split:
        return XPoint.of(params, 0, 1, 0, 0), XPoint.of(params, 0, 0, -2, 0)
    return XPoint.of(params, 0, 0, 1, 0), XPoint.of(params, 0, 0, 0, -2 / params.delta)


# ---------------------------------------------------------------------------
# GSO(X)
# ---------------------------------------------------------------------------


def _alpha_mat(b: Mat2) -> Mat2:
    return m2_map(b, lambda e: e.conj())


@dataclass(frozen=True)
class GsoElement:
    """rho(g1, g2) (split, t unused) or rho(t, g) (non-split, g2 unused)."""

    params: FieldParams
    g1: Mat2
    g2: Mat2 = None  # type: ignore[assignment]
    t: Fraction = Fraction(1)

    @classmethod
    def split(cls, params: FieldParams, g1, g2) -> "GsoElement":
        f = lambda m: m2_map(m, as_fraction)
        return cls(params, f(g1), f(g2))

    @classmethod
    def nonsplit(cls, params: FieldParams, t, g) -> "GsoElement":
        conv = lambda e: e if isinstance(e, ExtElement) else ExtElement.of(params, e)
        return cls(params, m2_map(g, conv), None, as_fraction(t))

    @classmethod
    def identity(cls, params: FieldParams) -> "GsoElement":
        if params.split:
            return cls.split(params, mat2(1, 0, 0, 1), mat2(1, 0, 0, 1))
        return cls.nonsplit(params, 1, mat2(1, 0, 0, 1))

    @property
    def similitude(self) -> Fraction:
        if self.params.split:
            return Fraction(m2_det(self.g1) * m2_det(self.g2))
        n = m2_det(self.g1).norm()
        return Fraction(n) / (self.t * self.t)

    def apply(self, x: XPoint) -> XPoint:
        m = x.matrix()
        if self.params.split:
            out = m2_mul(m2_mul(self.g1, m), m2_adj(self.g2))
            return XPoint.from_matrix(self.params, out)
        b = self.g1
        out = m2_mul(m2_mul(b, m), m2_adj(_alpha_mat(b)))
        tinv = 1 / self.t
        out = m2_map(out, lambda e: e * tinv)
        return XPoint.from_matrix(self.params, out)

    def compose(self, other: "GsoElement") -> "GsoElement":
        """self * other (apply other first)."""
        if self.params.split:
            return GsoElement(self.params, m2_mul(self.g1, other.g1), m2_mul(self.g2, other.g2))
        return GsoElement(self.params, m2_mul(self.g1, other.g1), None, self.t * other.t)

    def inverse(self) -> "GsoElement":
        if self.params.split:
            return GsoElement(self.params, m2_inv(self.g1), m2_inv(self.g2))
        return GsoElement(self.params, m2_inv(self.g1), None, 1 / self.t)

    def in_so(self) -> bool:
        return self.similitude == 1


def rho_apply(h: GsoElement, x: XPoint) -> XPoint:
    return h.apply(x)


def canonical_basis(params: FieldParams) -> Sequence[XPoint]:
    return [XPoint.of(params, *[1 if j == i else 0 for j in range(4)]) for i in range(4)]


def similitude_certified(h: GsoElement) -> bool:
    """Check <hx, hy> = lambda <x, y> on the canonical basis."""
    lam = h.similitude
    basis = canonical_basis(h.params)
    for x in basis:
        for y in basis:
            if pair(h.apply(x), h.apply(y)) != lam * pair(x, y):
                return False
    return True


def in_stabilizer(h: GsoElement) -> bool:
    """Whether h fixes both base points."""
    x1, x2 = base_points(h.params)
    return h.apply(x1) == x1 and h.apply(x2) == x2


def stabilizer_closed_form(h: GsoElement) -> bool:
    """Closed-form description of H modulo the kernel of rho.

    Split: rho(z diag(a, 1), z^-1 diag(1/a, 1)).  Non-split: rho(N(z), z diag(1, u))
    with N(u) = 1.
    """
    if h.params.split:
        g1, g2 = h.g1, h.g2
        if g1[0][1] != 0 or g1[1][0] != 0 or g2[0][1] != 0 or g2[1][0] != 0:
            return False
        return g1[1][1] * g2[1][1] == 1 and g1[0][0] * g2[0][0] == 1
    b = h.g1
    if not (b[0][1].is_zero() and b[1][0].is_zero()):
        return False
    z = b[0][0]
    if z.norm() != h.t:
        return False
    u = b[1][1] / z
    return u.norm() == 1


def kernel_element(params: FieldParams, z) -> GsoElement:
    """A generator of ker rho: split (z, 1/z) scalars; non-split (N(z), z I)."""
    if params.split:
        z = as_fraction(z)
        return GsoElement.split(params, mat2(z, 0, 0, z), mat2(1 / z, 0, 0, 1 / z))
    zz = z if isinstance(z, ExtElement) else ExtElement.of(params, z)
    zero = ExtElement.of(params, 0)
    return GsoElement.nonsplit(params, zz.norm(), mat2(zz, zero, zero, zz))
