"""Gauss integrals, the Fourier transform on X and the Weil representation on
Schwartz functions of X^2, all in the symbolic box algebra.

Root-of-unity constants stay formal: tau is the quadratic Gauss sum over the
residue field and gamma stands for the Weil index of the SL(2) action on
S(X), so that the Fourier generator of Sp(4) carries gamma^2.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .gsp4cosets import Gsp4Matrix, similitude_diag
from .localfield import (ExtElement, FieldParams, as_fraction, chi_quad, val_or_inf,
                         valuation)
from .quadspace import GsoElement, haar_constant_exponent2, pairing_weights
from .schwartz import (ALL, BoxTerm, CoordSet, Ideal, SchwartzFunction, Shell, e_ideal,
                       form_bound, negate_argument, recognize_e_ideal, restrict_factor,
                       scalar, scale_argument)
from .scalar import SymbolicScalar

INF = float("inf")


class OracleOnly(Exception):
    """The symbolic engine cannot certify this step; only the oracle can."""


# ---------------------------------------------------------------------------
# One-dimensional Gauss integrals
# ---------------------------------------------------------------------------


def gauss_integral(params: FieldParams, cset: CoordSet, twisted: bool, c) -> SymbolicScalar:
    """Integral over cset of [chi(y)] psi(c y) dy with vol(o) = 1."""
    c = as_fraction(c)
    q = params.q
    one = scalar(params, 1)
    vc = val_or_inf(c, params.p)
    kind = cset.kind
    if kind == "zero":
        return one.zero()
    if kind == "all":
        raise OracleOnly("integral over all of L is a distribution")
    n = cset.m
    if kind == "shell":
        if twisted and params.kind == "ramified":
            if vc != -n - 1:
                return one.zero()
            sign = params.chi_pi * chi_quad(params, c)
            return scalar(params, sign * Fraction(q) ** (-n - 1), tau=1)
        base = gauss_integral(params, Ideal(n), False, c) - gauss_integral(params, Ideal(n + 1), False, c)
        if twisted and params.kind == "inert" and n % 2:
            return -base
        return base
    # ideal
    if not twisted or params.kind == "split":
        return scalar(params, Fraction(q) ** (-n)) if vc >= -n else one.zero()
    if params.kind == "ramified":
        # only the shell at level -v(c) - 1 survives
        if vc == INF:
            return one.zero()
        k = int(-vc - 1)
        return gauss_integral(params, Shell(k), True, c) if k >= n else one.zero()
    # inert: sum over shells of (-1)^k times the untwisted shell integral
    qf = Fraction(q)
    a = n if vc == INF else max(n, int(-vc))
    tail = Fraction((-1) ** (a % 2)) * qf ** (-a) * (qf - 1) / (qf + 1)
    total = tail
    if vc != INF and n <= -vc - 1:
        k = int(-vc - 1)
        total += Fraction((-1) ** (k % 2)) * (-(qf ** (-k - 1)))
    return scalar(params, total)


def haar_constant(params: FieldParams) -> SymbolicScalar:
    """Self-dual Haar constant relative to dc1 dc2 dc3 dc4."""
    return scalar(params, 1, half_q=haar_constant_exponent2(params))


def kprime(params: FieldParams) -> SymbolicScalar:
    """The unimodular constant chi(-1) tau / sqrt(q) of the twisted transforms."""
    return scalar(params, Fraction(params.chi_minus_one, params.q), half_q=1, tau=1)


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------


def _fourier_term(params: FieldParams, t: BoxTerm) -> Optional[BoxTerm]:
    if t.constraints:
        raise OracleOnly("Fourier transform of a term with a form constraint")
    p, q = params.p, params.q
    coeff = t.coeff * haar_constant(params)
    new_box = [None] * 4
    new_tw = set()
    for i, j, w in pairing_weights(params):
        s = t.box[i]
        vw = valuation(w, p)
        if s.kind == "zero":
            return None
        if s.kind == "all":
            raise OracleOnly("Fourier transform of a non-compact box")
        if i in t.twists:
            # twisted shell: tau q^(-n-1) chi(pi) chi(w) chi(x_j) on Shell(-n-1-v(w))
            n = s.m
            sign = params.chi_pi * chi_quad(params, w)
            coeff = coeff * scalar(params, sign * Fraction(q) ** (-n - 1), tau=1)
            new_box[j] = Shell(-n - 1 - vw)
            new_tw.add(j)
        elif s.kind == "ideal":
            coeff = coeff * scalar(params, Fraction(q) ** (-s.m))
            new_box[j] = Ideal(-s.m - vw)
        else:
            raise AssertionError("untwisted shells are expanded in normal form")
    return BoxTerm(coeff, tuple(new_box), frozenset(new_tw), ())


def fourier1(f: SchwartzFunction) -> SchwartzFunction:
    """F1 f(x) = integral of f(y) psi(2<x, y>) dy over X."""
    if f.dim != 4:
        raise ValueError("fourier1 acts on functions on X")
    terms = [nt for t in f.terms if (nt := _fourier_term(f.params, t)) is not None]
    return SchwartzFunction(f.params, 4, terms)


def fourier_factor(f: SchwartzFunction, factor: int) -> SchwartzFunction:
    """F1 on one factor of X^2."""
    if f.dim != 8:
        raise ValueError("fourier_factor acts on functions on X^2")
    P = f.params
    other = "yy" if factor == 0 else "xx"
    lo = 4 * factor
    terms = []
    for t in f.terms:
        if any(fm != other for fm, _ in t.constraints):
            raise OracleOnly("partial Fourier transform across a form constraint")
        part = BoxTerm(scalar(P, 1), t.box[lo:lo + 4],
                       frozenset(i - lo for i in t.twists if lo <= i < lo + 4), ())
        nt = _fourier_term(P, part)
        if nt is None:
            continue
        box = list(t.box)
        box[lo:lo + 4] = nt.box
        tw = {i for i in t.twists if not lo <= i < lo + 4} | {i + lo for i in nt.twists}
        terms.append(BoxTerm(t.coeff * nt.coeff, tuple(box), frozenset(tw), t.constraints))
    return SchwartzFunction(P, 8, terms)


def fourier_full(f: SchwartzFunction) -> SchwartzFunction:
    return fourier_factor(fourier_factor(f, 0), 1)


# ---------------------------------------------------------------------------
# Elementary pieces of the Weil action on S(X^2)
# ---------------------------------------------------------------------------


def _own(factor: int) -> str:
    return "xx" if factor == 0 else "yy"


def translate(f: SchwartzFunction, dst: int, src: int, c) -> SchwartzFunction:
    """phi(x_dst + c x_src) with the other factor fixed, certified per term.

    Each term is unchanged when c x_src moves no box coordinate beyond its
    period and no form constraint beyond its level on the term's support.
    """
    c = as_fraction(c)
    if c == 0:
        return f
    P = f.params
    vc = valuation(c, P.p)
    for t in f.terms:
        for k in range(4):
            shift = vc + t.box[4 * src + k].lower
            if shift < t.box[4 * dst + k].period:
                raise OracleOnly(f"translation moves coordinate {k} of factor {dst}")
        for fm, m in t.constraints:
            if fm == _own(dst):
                ok = form_bound(P, t, "xy") + vc >= m and form_bound(P, t, _own(src)) + 2 * vc >= m
            elif fm == "xy":
                ok = form_bound(P, t, _own(src)) + vc >= m
            else:
                ok = True
            if not ok:
                raise OracleOnly(f"translation moves the constraint on {fm}")
    return f


def swap_factors(f: SchwartzFunction) -> SchwartzFunction:
    ren = {"xx": "yy", "yy": "xx", "xy": "xy"}
    terms = [BoxTerm(t.coeff, t.box[4:] + t.box[:4],
                     frozenset((i + 4) % 8 for i in t.twists),
                     tuple((ren[fm], m) for fm, m in t.constraints)) for t in f.terms]
    return SchwartzFunction(f.params, 8, terms)


def _abs_chi(params: FieldParams, d: Fraction, power: int) -> SymbolicScalar:
    """chi(d) |d|^power."""
    return scalar(params, chi_quad(params, d) * Fraction(params.q) ** (-power * valuation(d, params.p)))


def _abs_pow(params: FieldParams, d: Fraction, power: int) -> SymbolicScalar:
    """|d|^power."""
    return scalar(params, Fraction(params.q) ** (-power * valuation(d, params.p)))


def act_levi(f: SchwartzFunction, a) -> SchwartzFunction:
    """omega(m(A)) phi(x, y) = chi(det A) |det A|^2 phi(a1 x + a3 y, a2 x + a4 y)."""
    (a1, a2), (a3, a4) = [[as_fraction(x) for x in row] for row in a]
    P = f.params
    det = a1 * a4 - a2 * a3
    if val_or_inf(a1, P.p) > val_or_inf(a2, P.p):
        # A = A' S with S the swap, so omega(m(A)) = omega(m(A')) omega(m(S))
        swapped = swap_factors(f).scale(P.chi_minus_one)
        return act_levi(swapped, ((a2, a1), (a4, a3)))
    # A = L(c) D(a1, det/a1) U(b) with c = a3/a1, b = a2/a1; apply U, then D, then L
    b, c = a2 / a1, a3 / a1
    d1, d2 = a1, det / a1
    g = translate(f, 1, 0, b)
    g = scale_argument(g, d1, 0)
    g = scale_argument(g, d2, 1)
    g = g.scale(_abs_chi(P, d1 * d2, 2))
    return translate(g, 0, 1, c)


def act_unipotent(f: SchwartzFunction, b1, b2, b3) -> SchwartzFunction:
    """psi(b1 <x,x> + 2 b2 <x,y> + b3 <y,y>) phi, accepted when certified trivial."""
    P = f.params
    for t in f.terms:
        for b, fm in ((b1, "xx"), (b2, "xy"), (b3, "yy")):
            b = as_fraction(b)
            if b != 0 and form_bound(P, t, fm) + valuation(b, P.p) < 0:
                raise OracleOnly(f"psi multiplier on {fm} is not certified trivial")
    return f


def unipotent_family_sum(f: SchwartzFunction, form: str, base) -> SchwartzFunction:
    """Sum over u in o/p of psi(u base Q) phi, for Q the chosen form.

    On a term where base Q lies in p^-1 this sum is q times the indicator
    of base Q in o; where base Q lies in o it is q.
    """
    base = as_fraction(base)
    P = f.params
    vb = valuation(base, P.p)
    # the middle entry enters as 2 b2 <x,y>; 2 is a unit for odd p
    terms = []
    for t in f.terms:
        lb = form_bound(P, t, form) + vb
        if lb >= 0:
            terms.append(t.with_coeff(t.coeff * P.q))
        elif lb >= -1:
            terms.append(BoxTerm(t.coeff * P.q, t.box, t.twists, t.constraints + ((form, -vb),)))
        else:
            raise OracleOnly("family sum does not collapse to an indicator")
    return SchwartzFunction(P, 8, terms)


def act_weyl_j(f: SchwartzFunction) -> SchwartzFunction:
    return fourier_full(f).scale(scalar(f.params, gamma=2))


def act_weyl_j_inverse(f: SchwartzFunction) -> SchwartzFunction:
    # F^-1 g(x) = F g(-x)
    return negate_argument(fourier_full(f)).scale(scalar(f.params, gamma=-2))


def act_sl2(f: SchwartzFunction, factor: int, g) -> SchwartzFunction:
    """omega_1(g) on one factor, through its Bruhat decomposition."""
    (a, b), (c, d) = [[as_fraction(x) for x in row] for row in g]
    if a * d - b * c != 1:
        raise ValueError("act_sl2 needs determinant 1")
    P = f.params

    def n_of(h, x):
        if factor == 0:
            return act_unipotent(h, x, 0, 0)
        return act_unipotent(h, 0, 0, x)

    def diag(h, x):
        return scale_argument(h, x, factor).scale(_abs_chi(P, x, 2))

    def w(h):
        return fourier_factor(h, factor).scale(scalar(P, gamma=1))

    if c == 0:
        # [[a, b], [0, 1/a]] = diag(a, 1/a) n(b/a)
        return diag(n_of(f, b / a), a)
    # n(a/c) w diag(-c, -1/c) n(d/c)
    h = n_of(f, d / c)
    h = diag(h, -c)
    h = w(h)
    return n_of(h, a / c)


def act_gso(f: SchwartzFunction, h: GsoElement) -> SchwartzFunction:
    """omega(1, h) phi = phi(h^-1 x, h^-1 y) for diagonal h."""
    P = f.params
    lam = h.similitude
    vl = valuation(lam, P.p)
    if P.split:
        g1, g2 = h.g1, h.g2
        if g1[0][1] or g1[1][0] or g2[0][1] or g2[1][0]:
            raise OracleOnly("non-diagonal GSO element")
        a1, a2, b1, b2 = g1[0][0], g1[1][1], g2[0][0], g2[1][1]
        scal = [a1 * b2, a1 * b1, a2 * b2, a2 * b1]
        e_scale = None
    else:
        b = h.g1
        if not (b[0][1].is_zero() and b[1][0].is_zero()):
            raise OracleOnly("non-diagonal GSO element")
        z1, z2 = b[0][0], b[1][1]
        t = h.t
        e_scale = (z1 * z2.conj()) * ExtElement.of(P, 1 / t)
        scal = [None, None, z1.norm() / t, z2.norm() / t]
    terms = []
    for term in f.terms:
        box = list(term.box)
        coeff = term.coeff
        for base in (0, 4):
            for k in range(4):
                s = scal[k]
                if s is None:
                    continue
                # phi(x / s): x in S iff x in s S
                box[base + k] = box[base + k].shifted(valuation(s, P.p))
                if base + k in term.twists and chi_quad(P, s) == -1:
                    coeff = -coeff
            if e_scale is not None:
                ebox = _e_scale_pair(P, box[base], box[base + 1], e_scale,
                                     base in term.twists or base + 1 in term.twists)
                box[base], box[base + 1] = ebox
        cons = tuple((fm, m + vl) for fm, m in term.constraints)
        terms.append(BoxTerm(coeff, tuple(box), term.twists, cons))
    return SchwartzFunction(P, 8, terms)


def _e_scale_pair(P: FieldParams, s1: CoordSet, s2: CoordSet, e: ExtElement, twisted: bool):
    """Box of a with a/e in (s1, s2); e acts by E-multiplication."""
    if e.b == 0:
        if twisted and chi_quad(P, e.a) == -1:
            raise OracleOnly("sign change on a twisted diagonal coordinate")
        v = valuation(e.a, P.p)
        return s1.shifted(v), s2.shifted(v)
    if twisted:
        raise OracleOnly("E-multiplication on a twisted coordinate")
    if s1.kind == "all" and s2.kind == "all":
        return s1, s2
    k = recognize_e_ideal(P, s1, s2)
    if k is None:
        raise OracleOnly("E-multiplication on a box that is not an E-ideal")
    return e_ideal(P, k + e.valuation())


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------


def _block(g: Gsp4Matrix, r: int, c: int):
    return ((g.rows[r][c], g.rows[r][c + 1]), (g.rows[r + 1][c], g.rows[r + 1][c + 1]))


def _is_zero_block(b) -> bool:
    return all(x == 0 for row in b for x in row)


def _is_identity_block(b) -> bool:
    return b[0][0] == 1 and b[1][1] == 1 and b[0][1] == 0 and b[1][0] == 0


def _iota_parts(g: Gsp4Matrix):
    r = g.rows
    off = [(0, 1), (0, 3), (1, 0), (1, 2), (2, 1), (2, 3), (3, 0), (3, 2)]
    if any(r[i][j] != 0 for i, j in off):
        return None
    g1 = ((r[0][0], r[0][2]), (r[2][0], r[2][2]))
    g2 = ((r[1][1], r[1][3]), (r[3][1], r[3][3]))
    return g1, g2


def weil_apply(g: Gsp4Matrix, h: Optional[GsoElement], f: SchwartzFunction) -> SchwartzFunction:
    """omega(g, h) f for g in the supported classes and lambda(h) = lambda(g)."""
    if f.dim != 8:
        raise ValueError("weil_apply acts on functions on X^2")
    P = f.params
    lam = g.lam
    if h is not None and h.similitude != lam:
        raise ValueError("companion similitude does not match")
    if lam != 1:
        if h is None:
            raise ValueError("a companion in GSO(X) is required when lambda != 1")
        g1 = g @ similitude_diag(1 / lam)
        inner = act_gso(f, h)
        return weil_apply(g1, None, inner).scale(_abs_pow(P, lam, -2))
    if h is not None:
        f = act_gso(f, h)
    return _apply_sp4(g, f)


def _apply_sp4(g: Gsp4Matrix, f: SchwartzFunction) -> SchwartzFunction:
    if g.is_identity():
        return f
    a, b = _block(g, 0, 0), _block(g, 0, 2)
    c, d = _block(g, 2, 0), _block(g, 2, 2)
    if _is_zero_block(b) and _is_zero_block(c):
        return act_levi(f, a)
    if _is_identity_block(a) and _is_identity_block(d) and _is_zero_block(c):
        return act_unipotent(f, b[0][0], b[0][1], b[1][1])
    if _is_identity_block(a) and _is_identity_block(d) and _is_zero_block(b):
        # lower unipotent = J n(-C) J^-1
        h = act_weyl_j_inverse(f)
        h = act_unipotent(h, -c[0][0], -c[0][1], -c[1][1])
        return act_weyl_j(h)
    if _is_zero_block(a) and _is_zero_block(d) and _is_identity_block(b) \
            and c == ((-1, 0), (0, -1)):
        return act_weyl_j(f)
    parts = _iota_parts(g)
    if parts is not None:
        g1, g2 = parts
        return act_sl2(act_sl2(f, 1, g2), 0, g1)
    # generic: g = lower(C) m(A) upper(B) when A is invertible
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if det == 0:
        raise OracleOnly("no supported factorization for this element")
    from .gsp4cosets import _m2_inv, _m2_mul, levi, lower_unipotent, unipotent
    ainv = _m2_inv(a)
    cc = _m2_mul(c, ainv)
    bb = _m2_mul(ainv, b)
    hf = act_unipotent(f, bb[0][0], bb[0][1], bb[1][1])
    hf = act_levi(hf, a)
    return _apply_sp4(lower_unipotent(cc[0][0], cc[0][1], cc[1][1]), hf)


def resolve_constants(params: FieldParams, **kw):
    """Numeric values of tau, gamma and k' from the finite-quotient oracle."""
    from .oracle import resolve_constants as _resolve
    return _resolve(params, **kw)
